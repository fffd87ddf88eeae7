//! Recursive-descent parser with Python operator precedence.

use super::ast::*;
use super::error::{ParseError, SyntaxError};
use super::lexer::{tokenize, Keyword, Tok, Token};

/// A `tunable([...])` call found while parsing.
#[derive(Debug, Clone, PartialEq)]
pub struct RawSite {
    pub options: Vec<Literal>,
    /// Byte range of the whole call in the source text.
    pub span: (usize, usize),
    pub line: usize,
    pub col: usize,
}

pub fn parse_program(src: &str) -> Result<(Program, Vec<RawSite>), SyntaxError> {
    let tokens = tokenize(src)?;
    let mut p = Parser { toks: tokens, pos: 0, sites: Vec::new() };
    let prog = p.program()?;
    Ok((prog, p.sites))
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    sites: Vec<RawSite>,
}

type PResult<T> = Result<T, SyntaxError>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, off: usize) -> &Tok {
        let i = (self.pos + off).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn cur(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn advance(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> PResult<T> {
        let t = self.cur();
        Err(ParseError::new(t.line, t.col, msg).into())
    }

    fn describe(&self) -> String {
        match self.peek() {
            Tok::Name(n) => format!("name `{n}`"),
            Tok::Number(_, s) => format!("number `{s}`"),
            Tok::Str(_) => "string literal".into(),
            Tok::Kw(k) => format!("keyword `{}`", format!("{k:?}").to_lowercase()),
            Tok::Op(o) => format!("`{o}`"),
            Tok::Newline => "end of line".into(),
            Tok::Indent => "indent".into(),
            Tok::Dedent => "dedent".into(),
            Tok::Eof => "end of input".into(),
        }
    }

    fn is_op(&self, op: &str) -> bool {
        matches!(self.peek(), Tok::Op(o) if *o == op)
    }

    fn is_kw(&self, kw: Keyword) -> bool {
        matches!(self.peek(), Tok::Kw(k) if *k == kw)
    }

    fn eat_op(&mut self, op: &str) -> bool {
        if self.is_op(op) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, kw: Keyword) -> bool {
        if self.is_kw(kw) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn expect_op(&mut self, op: &str) -> PResult<Token> {
        if self.is_op(op) {
            Ok(self.advance())
        } else {
            self.err(format!("expected `{op}`, found {}", self.describe()))
        }
    }

    fn expect_kw(&mut self, kw: Keyword) -> PResult<()> {
        if self.eat_kw(kw) {
            Ok(())
        } else {
            self.err(format!("expected `{}`, found {}", format!("{kw:?}").to_lowercase(), self.describe()))
        }
    }

    fn expect_newline(&mut self) -> PResult<()> {
        match self.peek() {
            Tok::Newline => {
                self.advance();
                Ok(())
            }
            Tok::Eof | Tok::Dedent => Ok(()),
            _ => self.err(format!("expected end of line, found {}", self.describe())),
        }
    }

    fn name(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Name(n) => {
                self.advance();
                Ok(n)
            }
            _ => self.err(format!("expected identifier, found {}", self.describe())),
        }
    }

    fn program(&mut self) -> PResult<Program> {
        let mut functions = Vec::new();
        loop {
            match self.peek() {
                Tok::Eof => break,
                Tok::Newline => {
                    self.advance();
                }
                Tok::Kw(Keyword::Def) => functions.push(self.funcdef()?),
                // `import x` / `from x import y` lines are tolerated at top level
                // and ignored; any use of the imported names still fails later.
                Tok::Name(n) if n == "import" || n == "from" => self.skip_line(),
                _ => return self.err(format!("expected function definition, found {}", self.describe())),
            }
        }
        if functions.is_empty() {
            return Err(SyntaxError::Empty);
        }
        Ok(Program { functions })
    }

    fn skip_line(&mut self) {
        while !matches!(self.peek(), Tok::Newline | Tok::Eof) {
            self.advance();
        }
        self.advance();
    }

    /// Skips a type annotation: everything up to one of `stops` at bracket depth 0.
    fn skip_annotation(&mut self, stops: &[&str]) -> PResult<()> {
        let mut depth = 0usize;
        loop {
            match self.peek() {
                Tok::Op(o) if depth == 0 && stops.contains(o) => return Ok(()),
                Tok::Op("(") | Tok::Op("[") => depth += 1,
                Tok::Op(")") | Tok::Op("]") => {
                    if depth == 0 {
                        return self.err("unbalanced bracket in annotation");
                    }
                    depth -= 1;
                }
                Tok::Newline | Tok::Eof | Tok::Indent | Tok::Dedent => {
                    return self.err(format!("unterminated annotation, found {}", self.describe()))
                }
                _ => {}
            }
            self.advance();
        }
    }

    fn funcdef(&mut self) -> PResult<FunctionDef> {
        self.expect_kw(Keyword::Def)?;
        let name = self.name()?;
        self.expect_op("(")?;
        let mut params = Vec::new();
        while !self.is_op(")") {
            params.push(Name::new(self.name()?));
            if self.eat_op(":") {
                self.skip_annotation(&[",", ")"])?;
            }
            if self.is_op("=") {
                return self.err("default parameter values are not supported");
            }
            if !self.eat_op(",") {
                break;
            }
        }
        self.expect_op(")")?;
        if self.eat_op("->") {
            self.skip_annotation(&[":"])?;
        }
        self.expect_op(":")?;
        let body = self.block()?;
        let mut f = FunctionDef { name, params, body, slots: 0 };
        resolve(&mut f);
        Ok(f)
    }

    fn block(&mut self) -> PResult<Vec<Stmt>> {
        if !matches!(self.peek(), Tok::Newline) {
            // Single-line suite: `def f(x): return x`.
            let s = self.simple_stmt()?;
            self.expect_newline()?;
            return Ok(s.into_iter().collect());
        }
        self.advance();
        if !matches!(self.peek(), Tok::Indent) {
            return self.err("expected an indented block");
        }
        self.advance();
        let mut body = Vec::new();
        while !matches!(self.peek(), Tok::Dedent | Tok::Eof) {
            if let Some(s) = self.statement()? {
                body.push(s);
            }
        }
        self.advance();
        if body.is_empty() {
            body.push(Stmt::Pass);
        }
        Ok(body)
    }

    fn statement(&mut self) -> PResult<Option<Stmt>> {
        match self.peek() {
            Tok::Kw(Keyword::For) => self.for_stmt().map(Some),
            Tok::Kw(Keyword::If) => self.if_stmt().map(Some),
            Tok::Kw(Keyword::Def) => self.err("nested function definitions are not supported"),
            Tok::Indent => self.err("unexpected indent"),
            _ => {
                let s = self.simple_stmt()?;
                self.expect_newline()?;
                Ok(s)
            }
        }
    }

    fn for_stmt(&mut self) -> PResult<Stmt> {
        self.expect_kw(Keyword::For)?;
        let vars = self.loop_vars()?;
        self.expect_kw(Keyword::In)?;
        let iter = self.expr()?;
        self.expect_op(":")?;
        let body = self.block()?;
        Ok(Stmt::For { vars, iter, body })
    }

    fn loop_vars(&mut self) -> PResult<Vec<Name>> {
        let paren = self.eat_op("(");
        let mut vars = vec![Name::new(self.name()?)];
        while self.eat_op(",") {
            if self.is_kw(Keyword::In) || self.is_op(")") {
                break;
            }
            vars.push(Name::new(self.name()?));
        }
        if paren {
            self.expect_op(")")?;
        }
        Ok(vars)
    }

    fn if_stmt(&mut self) -> PResult<Stmt> {
        self.expect_kw(Keyword::If)?;
        let mut branches = Vec::new();
        let cond = self.expr()?;
        self.expect_op(":")?;
        branches.push((cond, self.block()?));
        let mut orelse = None;
        loop {
            if self.eat_kw(Keyword::Elif) {
                let cond = self.expr()?;
                self.expect_op(":")?;
                branches.push((cond, self.block()?));
            } else if self.eat_kw(Keyword::Else) {
                self.expect_op(":")?;
                orelse = Some(self.block()?);
                break;
            } else {
                break;
            }
        }
        Ok(Stmt::If { branches, orelse })
    }

    /// Returns None for statements that carry no meaning (docstrings).
    fn simple_stmt(&mut self) -> PResult<Option<Stmt>> {
        if self.eat_kw(Keyword::Pass) {
            return Ok(Some(Stmt::Pass));
        }
        if self.eat_kw(Keyword::Return) {
            if matches!(self.peek(), Tok::Newline | Tok::Eof | Tok::Dedent) {
                return self.err("bare `return` without a value is not supported");
            }
            return Ok(Some(Stmt::Return(self.expr_list()?)));
        }
        if let Tok::Str(_) = self.peek() {
            if matches!(self.peek_at(1), Tok::Newline | Tok::Eof | Tok::Dedent) {
                self.advance();
                return Ok(None);
            }
        }
        let start = self.pos;
        let lhs = self.expr_list()?;
        // Annotated assignment: `x: float = 0.0`.
        if self.is_op(":") {
            if !matches!(lhs, Expr::Var(_)) {
                return self.err("annotation target must be a name");
            }
            self.advance();
            self.skip_annotation(&["="])?;
        }
        if self.eat_op("=") {
            let target = self.target(lhs, start)?;
            let value = self.expr_list()?;
            if self.is_op("=") {
                return self.err("chained assignment is not supported");
            }
            return Ok(Some(Stmt::Assign(target, value)));
        }
        let aug = match self.peek() {
            Tok::Op("+=") => Some(BinOp::Add),
            Tok::Op("-=") => Some(BinOp::Sub),
            Tok::Op("*=") => Some(BinOp::Mul),
            Tok::Op("/=") => Some(BinOp::Div),
            Tok::Op("%=") => Some(BinOp::Mod),
            Tok::Op("//=") => Some(BinOp::FloorDiv),
            Tok::Op("**=") => Some(BinOp::Pow),
            _ => None,
        };
        if let Some(op) = aug {
            self.advance();
            let target = self.target(lhs, start)?;
            if matches!(target, Target::Unpack(_)) {
                return self.err("augmented assignment to a tuple is not supported");
            }
            let value = self.expr_list()?;
            return Ok(Some(Stmt::AugAssign(target, op, value)));
        }
        let t = &self.toks[start];
        Err(ParseError::new(t.line, t.col, "expression statements are not supported").into())
    }

    fn target(&self, e: Expr, start: usize) -> PResult<Target> {
        let bad = || {
            let t = &self.toks[start];
            Err(ParseError::new(t.line, t.col, "invalid assignment target").into())
        };
        match e {
            Expr::Var(n) => Ok(Target::Name(n)),
            Expr::Tuple(items) => {
                let mut names = Vec::new();
                for it in items {
                    match it {
                        Expr::Var(n) => names.push(n),
                        _ => return bad(),
                    }
                }
                Ok(Target::Unpack(names))
            }
            Expr::Index(base, idx) => match *base {
                Expr::Var(n) => Ok(Target::Index(n, idx)),
                _ => bad(),
            },
            _ => bad(),
        }
    }

    /// Comma-separated expressions; a bare tuple when there is more than one
    /// (or a trailing comma).
    fn expr_list(&mut self) -> PResult<Expr> {
        let first = self.expr()?;
        if !self.is_op(",") {
            return Ok(first);
        }
        let mut items = vec![first];
        while self.eat_op(",") {
            if self.at_expr_end() {
                break;
            }
            items.push(self.expr()?);
        }
        Ok(Expr::Tuple(items))
    }

    fn at_expr_end(&self) -> bool {
        matches!(self.peek(), Tok::Newline | Tok::Eof | Tok::Dedent | Tok::Op("=") | Tok::Op(")") | Tok::Op("]") | Tok::Op(":"))
            || matches!(self.peek(), Tok::Op(o) if o.ends_with('=') && o.len() >= 2 && !matches!(*o, "==" | "!=" | "<=" | ">="))
    }

    pub(crate) fn expr(&mut self) -> PResult<Expr> {
        let body = self.or_expr()?;
        if self.is_kw(Keyword::If) {
            self.advance();
            let cond = self.or_expr()?;
            self.expect_kw(Keyword::Else)?;
            let orelse = self.expr()?;
            return Ok(Expr::IfElse { cond: Box::new(cond), then: Box::new(body), orelse: Box::new(orelse) });
        }
        Ok(body)
    }

    fn or_expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.and_expr()?;
        while self.eat_kw(Keyword::Or) {
            let rhs = self.and_expr()?;
            lhs = Expr::Bool(BoolOp::Or, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn and_expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.not_expr()?;
        while self.eat_kw(Keyword::And) {
            let rhs = self.not_expr()?;
            lhs = Expr::Bool(BoolOp::And, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn not_expr(&mut self) -> PResult<Expr> {
        if self.eat_kw(Keyword::Not) {
            let inner = self.not_expr()?;
            return Ok(Expr::Unary(UnaryOp::Not, Box::new(inner)));
        }
        self.comparison()
    }

    fn comparison(&mut self) -> PResult<Expr> {
        let first = self.bitor()?;
        let mut rest = Vec::new();
        loop {
            let op = match self.peek() {
                Tok::Op("==") => CmpOp::Eq,
                Tok::Op("!=") => CmpOp::Ne,
                Tok::Op("<") => CmpOp::Lt,
                Tok::Op(">") => CmpOp::Gt,
                Tok::Op("<=") => CmpOp::Le,
                Tok::Op(">=") => CmpOp::Ge,
                Tok::Kw(Keyword::In) => return self.err("`in` operator is not supported"),
                _ => break,
            };
            self.advance();
            rest.push((op, self.bitor()?));
        }
        if rest.is_empty() {
            Ok(first)
        } else {
            Ok(Expr::Compare(Box::new(first), rest))
        }
    }

    fn bitor(&mut self) -> PResult<Expr> {
        let mut lhs = self.bitand()?;
        while self.eat_op("|") {
            let rhs = self.bitand()?;
            lhs = Expr::Binary(BinOp::BitOr, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn bitand(&mut self) -> PResult<Expr> {
        let mut lhs = self.arith()?;
        while self.eat_op("&") {
            let rhs = self.arith()?;
            lhs = Expr::Binary(BinOp::BitAnd, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn arith(&mut self) -> PResult<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Op("+") => BinOp::Add,
                Tok::Op("-") => BinOp::Sub,
                _ => break,
            };
            self.advance();
            let rhs = self.term()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> PResult<Expr> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek() {
                Tok::Op("*") => BinOp::Mul,
                Tok::Op("/") => BinOp::Div,
                Tok::Op("//") => BinOp::FloorDiv,
                Tok::Op("%") => BinOp::Mod,
                _ => break,
            };
            self.advance();
            let rhs = self.factor()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> PResult<Expr> {
        if self.eat_op("-") {
            let inner = self.factor()?;
            return Ok(match inner {
                Expr::Lit(Literal::Num { value, text }) if !text.starts_with('-') => {
                    Expr::Lit(Literal::Num { value: -value, text: format!("-{text}") })
                }
                other => Expr::Unary(UnaryOp::Neg, Box::new(other)),
            });
        }
        if self.eat_op("+") {
            let inner = self.factor()?;
            return Ok(Expr::Unary(UnaryOp::Pos, Box::new(inner)));
        }
        if self.is_op("~") {
            return self.err("bitwise inversion `~` is not supported");
        }
        self.power()
    }

    fn power(&mut self) -> PResult<Expr> {
        let base = self.primary()?;
        if self.eat_op("**") {
            let exp = self.factor()?;
            return Ok(Expr::Binary(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> PResult<Expr> {
        let start_tok = self.cur().clone();
        let mut e = self.atom()?;
        loop {
            if self.is_op("[") {
                self.advance();
                let idx = self.expr_list()?;
                if self.is_op(":") {
                    return self.err("slices are not supported");
                }
                self.expect_op("]")?;
                e = Expr::Index(Box::new(e), Box::new(idx));
            } else if self.is_op("(") {
                let Expr::Var(name) = &e else {
                    return self.err("only builtin functions can be called");
                };
                let name = name.id.clone();
                if name == "tunable" {
                    e = self.tunable(&start_tok)?;
                } else {
                    let Some(b) = Builtin::from_name(&name) else {
                        return Err(ParseError::new(start_tok.line, start_tok.col, format!("call to unknown function `{name}`")).into());
                    };
                    self.advance();
                    let args = self.call_args()?;
                    e = Expr::Call(b, args);
                }
            } else if self.is_op(".") {
                return self.err("attribute access is not supported");
            } else {
                break;
            }
        }
        Ok(e)
    }

    fn call_args(&mut self) -> PResult<Vec<Expr>> {
        let mut args = Vec::new();
        if self.eat_op(")") {
            return Ok(args);
        }
        let first = self.expr()?;
        if self.is_kw(Keyword::For) {
            let comp = self.comp_tail(CompKind::Generator, first)?;
            self.expect_op(")")?;
            return Ok(vec![comp]);
        }
        if self.is_op("=") {
            return self.err("keyword arguments are not supported");
        }
        args.push(first);
        while self.eat_op(",") {
            if self.is_op(")") {
                break;
            }
            let a = self.expr()?;
            if self.is_kw(Keyword::For) {
                return self.err("generator expression must be the sole argument");
            }
            if self.is_op("=") {
                return self.err("keyword arguments are not supported");
            }
            args.push(a);
        }
        self.expect_op(")")?;
        Ok(args)
    }

    fn comp_tail(&mut self, kind: CompKind, elt: Expr) -> PResult<Expr> {
        self.expect_kw(Keyword::For)?;
        let vars = self.loop_vars()?;
        self.expect_kw(Keyword::In)?;
        let iter = self.or_expr()?;
        let cond = if self.eat_kw(Keyword::If) { Some(self.or_expr()?) } else { None };
        if self.is_kw(Keyword::For) || self.is_kw(Keyword::If) {
            return self.err("nested comprehension clauses are not supported");
        }
        Ok(Expr::Comp(Box::new(Comprehension { kind, elt, vars, iter, cond })))
    }

    fn tunable(&mut self, start: &Token) -> PResult<Expr> {
        let terr = |t: &Token, msg: &str| -> SyntaxError { SyntaxError::Tunable { line: t.line, col: t.col, message: msg.to_string() } };
        self.expect_op("(")?;
        if !self.is_op("[") {
            return Err(terr(self.cur(), "tunable expects a single list of literal options"));
        }
        self.advance();
        let mut options = Vec::new();
        while !self.is_op("]") {
            let t = self.cur().clone();
            let lit = match self.literal_option() {
                Some(l) => l,
                None => return Err(terr(&t, "tunable options must be number or string literals")),
            };
            options.push(lit);
            if !self.eat_op(",") {
                break;
            }
        }
        if !self.is_op("]") {
            return Err(terr(self.cur(), "tunable options must be number or string literals"));
        }
        self.advance();
        if options.is_empty() {
            return Err(terr(start, "tunable needs at least one option"));
        }
        self.eat_op(",");
        if !self.is_op(")") {
            return Err(terr(self.cur(), "tunable takes exactly one argument"));
        }
        let end = self.advance().end;
        let id = self.sites.len();
        self.sites.push(RawSite { options, span: (start.start, end), line: start.line, col: start.col });
        Ok(Expr::Site(id))
    }

    fn literal_option(&mut self) -> Option<Literal> {
        let neg = match self.peek() {
            Tok::Op("-") => true,
            Tok::Op("+") => {
                self.advance();
                false
            }
            _ => false,
        };
        if neg {
            self.advance();
        }
        let lit = match self.peek().clone() {
            Tok::Number(v, text) => {
                if neg {
                    Literal::Num { value: -v, text: format!("-{text}") }
                } else {
                    Literal::Num { value: v, text }
                }
            }
            Tok::Kw(Keyword::True) if !neg => Literal::Num { value: 1.0, text: "True".into() },
            Tok::Kw(Keyword::False) if !neg => Literal::Num { value: 0.0, text: "False".into() },
            Tok::Str(s) if !neg => Literal::Str(s),
            _ => return None,
        };
        self.advance();
        // Reject `1 + 2` style expressions.
        if !(self.is_op(",") || self.is_op("]")) {
            return None;
        }
        Some(lit)
    }

    fn atom(&mut self) -> PResult<Expr> {
        match self.peek().clone() {
            Tok::Number(v, text) => {
                self.advance();
                Ok(Expr::Lit(Literal::Num { value: v, text }))
            }
            Tok::Str(s) => {
                self.advance();
                Ok(Expr::Lit(Literal::Str(s)))
            }
            Tok::Kw(Keyword::True) => {
                self.advance();
                Ok(Expr::Lit(Literal::Num { value: 1.0, text: "True".into() }))
            }
            Tok::Kw(Keyword::False) => {
                self.advance();
                Ok(Expr::Lit(Literal::Num { value: 0.0, text: "False".into() }))
            }
            Tok::Name(n) => {
                self.advance();
                Ok(Expr::Var(Name::new(n)))
            }
            Tok::Op("(") => {
                self.advance();
                if self.eat_op(")") {
                    return Ok(Expr::Tuple(Vec::new()));
                }
                let first = self.expr()?;
                if self.is_kw(Keyword::For) {
                    let comp = self.comp_tail(CompKind::Generator, first)?;
                    self.expect_op(")")?;
                    return Ok(comp);
                }
                if self.eat_op(")") {
                    return Ok(first);
                }
                let mut items = vec![first];
                while self.eat_op(",") {
                    if self.is_op(")") {
                        break;
                    }
                    items.push(self.expr()?);
                }
                self.expect_op(")")?;
                Ok(Expr::Tuple(items))
            }
            Tok::Op("[") => {
                self.advance();
                if self.eat_op("]") {
                    return Ok(Expr::List(Vec::new()));
                }
                let first = self.expr()?;
                if self.is_kw(Keyword::For) {
                    let comp = self.comp_tail(CompKind::List, first)?;
                    self.expect_op("]")?;
                    return Ok(comp);
                }
                let mut items = vec![first];
                while self.eat_op(",") {
                    if self.is_op("]") {
                        break;
                    }
                    items.push(self.expr()?);
                }
                self.expect_op("]")?;
                Ok(Expr::List(items))
            }
            _ => self.err(format!("unexpected {}", self.describe())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(src: &str) -> Program {
        parse_program(src).unwrap().0
    }

    #[test]
    fn unary_minus_binds_looser_than_power() {
        let p = parse("def f():\n    return -2 ** 2\n");
        let Stmt::Return(e) = &p.entry().body[0] else { panic!() };
        assert!(matches!(e, Expr::Unary(UnaryOp::Neg, _)));
    }

    #[test]
    fn negative_literal_is_folded() {
        let p = parse("def f():\n    return -0.5\n");
        let Stmt::Return(Expr::Lit(Literal::Num { value, text })) = &p.entry().body[0] else { panic!() };
        assert_eq!(*value, -0.5);
        assert_eq!(text, "-0.5");
    }

    #[test]
    fn annotations_are_ignored() {
        let p = parse("def priority(el: tuple[int, ...], n: int) -> float:\n    return 0.0\n");
        assert_eq!(p.entry().params.len(), 2);
    }

    #[test]
    fn last_function_is_entry() {
        let p = parse("def a(x):\n    return x\n\ndef b(y):\n    return y\n");
        assert_eq!(p.entry().name, "b");
    }

    #[test]
    fn tunable_records_span() {
        let src = "def f():\n    return tunable([1, -2, 'a'])\n";
        let (_, sites) = parse_program(src).unwrap();
        assert_eq!(sites.len(), 1);
        assert_eq!(&src[sites[0].span.0..sites[0].span.1], "tunable([1, -2, 'a'])");
        assert_eq!(sites[0].options[1], Literal::Num { value: -2.0, text: "-2".into() });
    }

    #[test]
    fn tunable_with_expression_option_is_rejected() {
        let err = parse_program("def f(x):\n    return tunable([x, 1])\n").unwrap_err();
        assert!(matches!(err, SyntaxError::Tunable { line: 2, .. }));
        let err = parse_program("def f(x):\n    return tunable(x)\n").unwrap_err();
        assert!(matches!(err, SyntaxError::Tunable { .. }));
        let err = parse_program("def f(x):\n    return tunable([1 + 2])\n").unwrap_err();
        assert!(matches!(err, SyntaxError::Tunable { .. }));
    }

    #[test]
    fn unknown_calls_and_attributes_are_rejected() {
        for src in ["def f(x):\n    return foo(x)\n", "def f(x):\n    return np.log(x)\n", "def f(x):\n    return x[1:]\n"] {
            let err = parse_program(src).unwrap_err();
            assert!(matches!(err, SyntaxError::Parse(ParseError { line: 2, .. })), "{src}: {err:?}");
        }
    }

    #[test]
    fn docstring_and_imports_are_skipped() {
        let p = parse("import math\n\ndef f(x):\n    \"\"\"Doc.\n    more\"\"\"\n    return x\n");
        assert_eq!(p.entry().body.len(), 1);
    }
}
