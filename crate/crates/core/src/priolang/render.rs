//! Canonical source rendering: 4-space indentation, one statement per line,
//! parentheses only where precedence requires them.

use super::ast::*;

const P_TEST: u8 = 0;
const P_OR: u8 = 1;
const P_AND: u8 = 2;
const P_NOT: u8 = 3;
const P_CMP: u8 = 4;
const P_BITOR: u8 = 5;
const P_BITAND: u8 = 6;
const P_ARITH: u8 = 7;
const P_TERM: u8 = 8;
const P_UNARY: u8 = 9;
const P_POWER: u8 = 10;
const P_ATOM: u8 = 11;

/// Renders a program; `site` supplies the text for each tunable site.
pub fn render_program(p: &Program, site: &dyn Fn(usize) -> String) -> String {
    let mut r = Renderer { out: String::new(), site };
    for (i, f) in p.functions.iter().enumerate() {
        if i > 0 {
            r.out.push_str("\n\n");
        }
        r.func(f);
    }
    r.out
}

pub fn render_expr(e: &Expr, site: &dyn Fn(usize) -> String) -> String {
    let r = Renderer { out: String::new(), site };
    r.expr(e, P_TEST)
}

struct Renderer<'a> {
    out: String,
    site: &'a dyn Fn(usize) -> String,
}

fn binop_prec(op: BinOp) -> u8 {
    match op {
        BinOp::BitOr => P_BITOR,
        BinOp::BitAnd => P_BITAND,
        BinOp::Add | BinOp::Sub => P_ARITH,
        BinOp::Mul | BinOp::Div | BinOp::FloorDiv | BinOp::Mod => P_TERM,
        BinOp::Pow => P_POWER,
    }
}

impl Renderer<'_> {
    fn func(&mut self, f: &FunctionDef) {
        let params: Vec<&str> = f.params.iter().map(|p| p.id.as_str()).collect();
        self.out.push_str(&format!("def {}({}):\n", f.name, params.join(", ")));
        self.block(&f.body, 1);
    }

    fn block(&mut self, body: &[Stmt], depth: usize) {
        for s in body {
            self.stmt(s, depth);
        }
    }

    fn line(&mut self, depth: usize, text: &str) {
        for _ in 0..depth {
            self.out.push_str("    ");
        }
        self.out.push_str(text);
        self.out.push('\n');
    }

    fn stmt(&mut self, s: &Stmt, depth: usize) {
        match s {
            Stmt::Assign(t, e) => {
                let text = format!("{} = {}", self.target(t), self.top(e));
                self.line(depth, &text);
            }
            Stmt::AugAssign(t, op, e) => {
                let text = format!("{} {}= {}", self.target(t), op.symbol(), self.top(e));
                self.line(depth, &text);
            }
            Stmt::For { vars, iter, body } => {
                let text = format!("for {} in {}:", names(vars), self.expr(iter, P_TEST));
                self.line(depth, &text);
                self.block(body, depth + 1);
            }
            Stmt::If { branches, orelse } => {
                for (i, (c, b)) in branches.iter().enumerate() {
                    let kw = if i == 0 { "if" } else { "elif" };
                    let text = format!("{kw} {}:", self.expr(c, P_TEST));
                    self.line(depth, &text);
                    self.block(b, depth + 1);
                }
                if let Some(b) = orelse {
                    self.line(depth, "else:");
                    self.block(b, depth + 1);
                }
            }
            Stmt::Return(e) => {
                let text = format!("return {}", self.top(e));
                self.line(depth, &text);
            }
            Stmt::Pass => self.line(depth, "pass"),
        }
    }

    fn target(&self, t: &Target) -> String {
        match t {
            Target::Name(n) => n.id.clone(),
            Target::Unpack(ns) => names(ns),
            Target::Index(n, i) => format!("{}[{}]", n.id, self.top(i)),
        }
    }

    /// Statement-level expression: a tuple is written without parentheses.
    fn top(&self, e: &Expr) -> String {
        match e {
            Expr::Tuple(items) if items.len() > 1 => items.iter().map(|x| self.expr(x, P_TEST)).collect::<Vec<_>>().join(", "),
            _ => self.expr(e, P_TEST),
        }
    }

    fn expr(&self, e: &Expr, min: u8) -> String {
        let (text, prec) = self.expr_prec(e);
        if prec < min {
            format!("({text})")
        } else {
            text
        }
    }

    fn expr_prec(&self, e: &Expr) -> (String, u8) {
        match e {
            Expr::Lit(l) => {
                let t = l.text();
                let prec = if t.starts_with('-') { P_UNARY } else { P_ATOM };
                (t, prec)
            }
            Expr::Site(id) => ((self.site)(*id), P_ATOM),
            Expr::Var(n) => (n.id.clone(), P_ATOM),
            Expr::List(xs) => (format!("[{}]", self.list(xs)), P_ATOM),
            Expr::Tuple(xs) => {
                let text = match xs.len() {
                    0 => "()".to_string(),
                    1 => format!("({},)", self.expr(&xs[0], P_TEST)),
                    _ => format!("({})", self.list(xs)),
                };
                (text, P_ATOM)
            }
            Expr::Index(base, idx) => (format!("{}[{}]", self.expr(base, P_ATOM), self.top(idx)), P_ATOM),
            Expr::Call(b, args) => {
                let inner = match args.as_slice() {
                    [Expr::Comp(c)] if c.kind == CompKind::Generator => self.comp_body(c),
                    _ => self.list(args),
                };
                (format!("{}({inner})", b.name()), P_ATOM)
            }
            Expr::Comp(c) => {
                let body = self.comp_body(c);
                let text = match c.kind {
                    CompKind::List => format!("[{body}]"),
                    CompKind::Generator => format!("({body})"),
                };
                (text, P_ATOM)
            }
            Expr::Binary(op, l, r) => {
                let p = binop_prec(*op);
                let (lmin, rmin) = if *op == BinOp::Pow { (P_ATOM, P_UNARY) } else { (p, p + 1) };
                (format!("{} {} {}", self.expr(l, lmin), op.symbol(), self.expr(r, rmin)), p)
            }
            Expr::Unary(op, a) => match op {
                UnaryOp::Neg => (format!("-{}", self.expr(a, P_UNARY)), P_UNARY),
                UnaryOp::Pos => (format!("+{}", self.expr(a, P_UNARY)), P_UNARY),
                UnaryOp::Not => (format!("not {}", self.expr(a, P_NOT)), P_NOT),
            },
            Expr::Compare(first, rest) => {
                let mut s = self.expr(first, P_CMP + 1);
                for (op, x) in rest {
                    s.push_str(&format!(" {} {}", op.symbol(), self.expr(x, P_CMP + 1)));
                }
                (s, P_CMP)
            }
            Expr::Bool(op, l, r) => {
                let (p, kw) = match op {
                    BoolOp::Or => (P_OR, "or"),
                    BoolOp::And => (P_AND, "and"),
                };
                (format!("{} {kw} {}", self.expr(l, p), self.expr(r, p + 1)), p)
            }
            Expr::IfElse { cond, then, orelse } => {
                (format!("{} if {} else {}", self.expr(then, P_OR), self.expr(cond, P_OR), self.expr(orelse, P_TEST)), P_TEST)
            }
        }
    }

    fn list(&self, xs: &[Expr]) -> String {
        xs.iter().map(|x| self.expr(x, P_TEST)).collect::<Vec<_>>().join(", ")
    }

    fn comp_body(&self, c: &Comprehension) -> String {
        let mut s = format!("{} for {} in {}", self.expr(&c.elt, P_TEST), names(&c.vars), self.expr(&c.iter, P_OR));
        if let Some(cond) = &c.cond {
            s.push_str(&format!(" if {}", self.expr(cond, P_OR)));
        }
        s
    }
}

fn names(ns: &[Name]) -> String {
    ns.iter().map(|n| n.id.as_str()).collect::<Vec<_>>().join(", ")
}
