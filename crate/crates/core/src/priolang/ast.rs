//! Syntax tree for priority functions.
//!
//! Variable references carry a slot index filled in by [`resolve`]; the
//! interpreter addresses locals by slot rather than by name.

use std::collections::HashMap;

pub const UNRESOLVED: usize = usize::MAX;

#[derive(Debug, Clone, PartialEq)]
pub struct Program {
    pub functions: Vec<FunctionDef>,
}

impl Program {
    /// The priority function: the last one defined.
    pub fn entry(&self) -> &FunctionDef {
        self.functions.last().expect("parser guarantees at least one function")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionDef {
    pub name: String,
    pub params: Vec<Name>,
    pub body: Vec<Stmt>,
    /// Number of local slots after resolution.
    pub slots: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Name {
    pub id: String,
    pub slot: usize,
}

impl Name {
    pub fn new(id: impl Into<String>) -> Self {
        Self { id: id.into(), slot: UNRESOLVED }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Target {
    Name(Name),
    Unpack(Vec<Name>),
    Index(Name, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Stmt {
    Assign(Target, Expr),
    AugAssign(Target, BinOp, Expr),
    For { vars: Vec<Name>, iter: Expr, body: Vec<Stmt> },
    If { branches: Vec<(Expr, Vec<Stmt>)>, orelse: Option<Vec<Stmt>> },
    Return(Expr),
    Pass,
}

/// A number or string literal; numbers keep their source spelling so that
/// rendering reproduces the text an option was written with.
#[derive(Debug, Clone, PartialEq)]
pub enum Literal {
    Num { value: f64, text: String },
    Str(String),
}

impl Literal {
    pub fn num(value: f64) -> Self {
        Literal::Num { value, text: format_number(value) }
    }

    pub fn text(&self) -> String {
        match self {
            Literal::Num { text, .. } => text.clone(),
            Literal::Str(s) => quote_str(s),
        }
    }
}

pub fn quote_str(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('\'');
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\'' => out.push_str("\\'"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('\'');
    out
}

/// Shortest spelling that parses back to the same value, Python style
/// (`2.0` rather than `2` for floats).
pub fn format_number(v: f64) -> String {
    if v.is_finite() && v.fract() == 0.0 && v.abs() < 1e16 {
        format!("{v:.1}")
    } else {
        format!("{v:?}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    FloorDiv,
    Mod,
    Pow,
    BitAnd,
    BitOr,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::FloorDiv => "//",
            BinOp::Mod => "%",
            BinOp::Pow => "**",
            BinOp::BitAnd => "&",
            BinOp::BitOr => "|",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Gt,
    Le,
    Ge,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "==",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Gt => ">",
            CmpOp::Le => "<=",
            CmpOp::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Pos,
    Not,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoolOp {
    And,
    Or,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Builtin {
    Abs,
    Min,
    Max,
    Sum,
    Len,
    Range,
    Enumerate,
    Log,
    Log1p,
    Exp,
    Tanh,
    Sqrt,
}

impl Builtin {
    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "abs" => Self::Abs,
            "min" => Self::Min,
            "max" => Self::Max,
            "sum" => Self::Sum,
            "len" => Self::Len,
            "range" => Self::Range,
            "enumerate" => Self::Enumerate,
            "log" => Self::Log,
            "log1p" => Self::Log1p,
            "exp" => Self::Exp,
            "tanh" => Self::Tanh,
            "sqrt" => Self::Sqrt,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Abs => "abs",
            Self::Min => "min",
            Self::Max => "max",
            Self::Sum => "sum",
            Self::Len => "len",
            Self::Range => "range",
            Self::Enumerate => "enumerate",
            Self::Log => "log",
            Self::Log1p => "log1p",
            Self::Exp => "exp",
            Self::Tanh => "tanh",
            Self::Sqrt => "sqrt",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompKind {
    List,
    Generator,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comprehension {
    pub kind: CompKind,
    pub elt: Expr,
    pub vars: Vec<Name>,
    pub iter: Expr,
    pub cond: Option<Expr>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Lit(Literal),
    Var(Name),
    List(Vec<Expr>),
    Tuple(Vec<Expr>),
    Index(Box<Expr>, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Unary(UnaryOp, Box<Expr>),
    Compare(Box<Expr>, Vec<(CmpOp, Expr)>),
    Bool(BoolOp, Box<Expr>, Box<Expr>),
    IfElse {
        cond: Box<Expr>,
        then: Box<Expr>,
        orelse: Box<Expr>,
    },
    Call(Builtin, Vec<Expr>),
    Comp(Box<Comprehension>),
    /// Reference to the tunable site with the given ordinal.
    Site(usize),
}

impl Expr {
    pub fn walk<'a>(&'a self, f: &mut dyn FnMut(&'a Expr)) {
        f(self);
        match self {
            Expr::Lit(_) | Expr::Var(_) | Expr::Site(_) => {}
            Expr::List(xs) | Expr::Tuple(xs) | Expr::Call(_, xs) => xs.iter().for_each(|x| x.walk(f)),
            Expr::Index(a, b) | Expr::Binary(_, a, b) | Expr::Bool(_, a, b) => {
                a.walk(f);
                b.walk(f);
            }
            Expr::Unary(_, a) => a.walk(f),
            Expr::Compare(a, rest) => {
                a.walk(f);
                rest.iter().for_each(|(_, x)| x.walk(f));
            }
            Expr::IfElse { cond, then, orelse } => {
                then.walk(f);
                cond.walk(f);
                orelse.walk(f);
            }
            Expr::Comp(c) => {
                c.iter.walk(f);
                c.elt.walk(f);
                if let Some(cond) = &c.cond {
                    cond.walk(f);
                }
            }
        }
    }

    /// Rebuilds the tree bottom-up, letting `f` replace any node.
    pub fn map(&self, f: &dyn Fn(&Expr) -> Option<Expr>) -> Expr {
        if let Some(e) = f(self) {
            return e;
        }
        let b = |e: &Expr| Box::new(e.map(f));
        match self {
            Expr::Lit(_) | Expr::Var(_) | Expr::Site(_) => self.clone(),
            Expr::List(xs) => Expr::List(xs.iter().map(|x| x.map(f)).collect()),
            Expr::Tuple(xs) => Expr::Tuple(xs.iter().map(|x| x.map(f)).collect()),
            Expr::Call(bi, xs) => Expr::Call(*bi, xs.iter().map(|x| x.map(f)).collect()),
            Expr::Index(a, i) => Expr::Index(b(a), b(i)),
            Expr::Binary(op, l, r) => Expr::Binary(*op, b(l), b(r)),
            Expr::Bool(op, l, r) => Expr::Bool(*op, b(l), b(r)),
            Expr::Unary(op, a) => Expr::Unary(*op, b(a)),
            Expr::Compare(a, rest) => Expr::Compare(b(a), rest.iter().map(|(op, x)| (*op, x.map(f))).collect()),
            Expr::IfElse { cond, then, orelse } => Expr::IfElse { cond: b(cond), then: b(then), orelse: b(orelse) },
            Expr::Comp(c) => Expr::Comp(Box::new(Comprehension {
                kind: c.kind,
                elt: c.elt.map(f),
                vars: c.vars.clone(),
                iter: c.iter.map(f),
                cond: c.cond.as_ref().map(|x| x.map(f)),
            })),
        }
    }
}

pub fn map_stmts(body: &[Stmt], f: &dyn Fn(&Expr) -> Option<Expr>) -> Vec<Stmt> {
    body.iter()
        .map(|s| match s {
            Stmt::Assign(t, e) => Stmt::Assign(map_target(t, f), e.map(f)),
            Stmt::AugAssign(t, op, e) => Stmt::AugAssign(map_target(t, f), *op, e.map(f)),
            Stmt::For { vars, iter, body } => Stmt::For { vars: vars.clone(), iter: iter.map(f), body: map_stmts(body, f) },
            Stmt::If { branches, orelse } => Stmt::If {
                branches: branches.iter().map(|(c, b)| (c.map(f), map_stmts(b, f))).collect(),
                orelse: orelse.as_ref().map(|b| map_stmts(b, f)),
            },
            Stmt::Return(e) => Stmt::Return(e.map(f)),
            Stmt::Pass => Stmt::Pass,
        })
        .collect()
}

fn map_target(t: &Target, f: &dyn Fn(&Expr) -> Option<Expr>) -> Target {
    match t {
        Target::Index(n, i) => Target::Index(n.clone(), Box::new(i.map(f))),
        other => other.clone(),
    }
}

pub fn map_program(p: &Program, f: &dyn Fn(&Expr) -> Option<Expr>) -> Program {
    Program {
        functions: p
            .functions
            .iter()
            .map(|fd| FunctionDef { name: fd.name.clone(), params: fd.params.clone(), body: map_stmts(&fd.body, f), slots: fd.slots })
            .collect(),
    }
}

/// Assigns local slots to every variable reference. Comprehension variables
/// get their own slots, scoped to the comprehension.
pub fn resolve(func: &mut FunctionDef) {
    let mut r = Resolver { scopes: vec![HashMap::new()], next: 0 };
    for p in &mut func.params {
        r.bind(p);
    }
    r.stmts(&mut func.body);
    func.slots = r.next;
}

struct Resolver {
    scopes: Vec<HashMap<String, usize>>,
    next: usize,
}

impl Resolver {
    fn lookup(&mut self, name: &mut Name) {
        for scope in self.scopes.iter().rev() {
            if let Some(&s) = scope.get(&name.id) {
                name.slot = s;
                return;
            }
        }
        // Unknown in any scope: give it a function-level slot. Reading it
        // before assignment is a runtime error.
        let slot = self.next;
        self.next += 1;
        self.scopes[0].insert(name.id.clone(), slot);
        name.slot = slot;
    }

    fn bind(&mut self, name: &mut Name) {
        let scope = self.scopes.last_mut().unwrap();
        if let Some(&s) = scope.get(&name.id) {
            name.slot = s;
        } else {
            scope.insert(name.id.clone(), self.next);
            name.slot = self.next;
            self.next += 1;
        }
    }

    fn stmts(&mut self, body: &mut [Stmt]) {
        for s in body {
            match s {
                Stmt::Assign(t, e) => {
                    self.expr(e);
                    self.target(t);
                }
                Stmt::AugAssign(t, _, e) => {
                    self.expr(e);
                    self.target(t);
                }
                Stmt::For { vars, iter, body } => {
                    self.expr(iter);
                    for v in vars.iter_mut() {
                        self.lookup(v);
                    }
                    self.stmts(body);
                }
                Stmt::If { branches, orelse } => {
                    for (c, b) in branches {
                        self.expr(c);
                        self.stmts(b);
                    }
                    if let Some(b) = orelse {
                        self.stmts(b);
                    }
                }
                Stmt::Return(e) => self.expr(e),
                Stmt::Pass => {}
            }
        }
    }

    fn target(&mut self, t: &mut Target) {
        match t {
            Target::Name(n) => self.lookup(n),
            Target::Unpack(ns) => ns.iter_mut().for_each(|n| self.lookup(n)),
            Target::Index(n, i) => {
                self.expr(i);
                self.lookup(n);
            }
        }
    }

    fn expr(&mut self, e: &mut Expr) {
        match e {
            Expr::Lit(_) | Expr::Site(_) => {}
            Expr::Var(n) => self.lookup(n),
            Expr::List(xs) | Expr::Tuple(xs) | Expr::Call(_, xs) => xs.iter_mut().for_each(|x| self.expr(x)),
            Expr::Index(a, b) | Expr::Binary(_, a, b) | Expr::Bool(_, a, b) => {
                self.expr(a);
                self.expr(b);
            }
            Expr::Unary(_, a) => self.expr(a),
            Expr::Compare(a, rest) => {
                self.expr(a);
                rest.iter_mut().for_each(|(_, x)| self.expr(x));
            }
            Expr::IfElse { cond, then, orelse } => {
                self.expr(cond);
                self.expr(then);
                self.expr(orelse);
            }
            Expr::Comp(c) => {
                self.expr(&mut c.iter);
                self.scopes.push(HashMap::new());
                for v in c.vars.iter_mut() {
                    self.bind(v);
                }
                self.expr(&mut c.elt);
                if let Some(cond) = &mut c.cond {
                    self.expr(cond);
                }
                self.scopes.pop();
            }
        }
    }
}
