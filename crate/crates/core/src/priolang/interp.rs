//! Tree-walking interpreter over resolved function bodies.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::rc::Rc;

use super::ast::*;
use super::error::EvalError;
use super::value::{normalize_index, py_floordiv, py_mod, py_pow, to_int, Value};

/// Default limit on primitive operations per call.
pub const DEFAULT_STEP_LIMIT: u64 = 10_000_000;

/// Calls `func` with positional `args`.
pub fn call_function(func: &FunctionDef, args: Vec<Value>, step_limit: u64) -> Result<Value, EvalError> {
    if args.len() != func.params.len() {
        return Err(EvalError::rt(format!("{}() takes {} arguments but {} were given", func.name, func.params.len(), args.len())));
    }
    let mut frame = Frame { slots: vec![None; func.slots], steps: 0, limit: step_limit };
    for (p, a) in func.params.iter().zip(args) {
        frame.slots[p.slot] = Some(a);
    }
    match frame.block(&func.body)? {
        Flow::Return(v) => Ok(v),
        Flow::Normal => Err(EvalError::rt(format!("{}() finished without returning a value", func.name))),
    }
}

enum Flow {
    Normal,
    Return(Value),
}

/// Iteration source; ranges stay lazy so `for i in range(n)` allocates nothing.
enum Seq {
    Range { start: i64, stop: i64, step: i64 },
    Items(Vec<Value>),
}

impl Seq {
    fn len(&self) -> usize {
        match self {
            Seq::Range { start, stop, step } => range_len(*start, *stop, *step),
            Seq::Items(v) => v.len(),
        }
    }

    fn get(&self, i: usize) -> Value {
        match self {
            Seq::Range { start, step, .. } => Value::Num((start + step * i as i64) as f64),
            Seq::Items(v) => v[i].clone(),
        }
    }
}

fn range_len(start: i64, stop: i64, step: i64) -> usize {
    if step > 0 && start < stop {
        ((stop - start - 1) / step + 1) as usize
    } else if step < 0 && start > stop {
        ((start - stop - 1) / (-step) + 1) as usize
    } else {
        0
    }
}

struct Frame {
    slots: Vec<Option<Value>>,
    steps: u64,
    limit: u64,
}

impl Frame {
    #[inline]
    fn tick(&mut self, n: u64) -> Result<(), EvalError> {
        self.steps += n;
        if self.steps > self.limit {
            return Err(EvalError::Timeout(self.limit));
        }
        Ok(())
    }

    fn load(&self, n: &Name) -> Result<Value, EvalError> {
        match self.slots.get(n.slot).and_then(|s| s.as_ref()) {
            Some(v) => Ok(v.clone()),
            None => Err(EvalError::rt(format!("name `{}` is not defined", n.id))),
        }
    }

    fn store(&mut self, n: &Name, v: Value) {
        self.slots[n.slot] = Some(v);
    }

    fn block(&mut self, body: &[Stmt]) -> Result<Flow, EvalError> {
        for s in body {
            if let Flow::Return(v) = self.stmt(s)? {
                return Ok(Flow::Return(v));
            }
        }
        Ok(Flow::Normal)
    }

    fn stmt(&mut self, s: &Stmt) -> Result<Flow, EvalError> {
        self.tick(1)?;
        match s {
            Stmt::Assign(t, e) => {
                let v = self.expr(e)?;
                self.assign(t, v)?;
            }
            Stmt::AugAssign(t, op, e) => {
                let current = match t {
                    Target::Name(n) => self.load(n)?,
                    Target::Index(n, idx) => {
                        let i = self.expr(idx)?.as_num()?;
                        self.load(n)?.get(i)?
                    }
                    Target::Unpack(_) => unreachable!("rejected by the parser"),
                };
                let rhs = self.expr(e)?;
                let v = binary(*op, current, rhs)?;
                self.assign(t, v)?;
            }
            Stmt::For { vars, iter, body } => {
                let seq = self.iterate(iter)?;
                for i in 0..seq.len() {
                    self.tick(1)?;
                    self.bind_vars(vars, seq.get(i))?;
                    if let Flow::Return(v) = self.block(body)? {
                        return Ok(Flow::Return(v));
                    }
                }
            }
            Stmt::If { branches, orelse } => {
                for (c, b) in branches {
                    if self.expr(c)?.truthy() {
                        return self.block(b);
                    }
                }
                if let Some(b) = orelse {
                    return self.block(b);
                }
            }
            Stmt::Return(e) => return Ok(Flow::Return(self.expr(e)?)),
            Stmt::Pass => {}
        }
        Ok(Flow::Normal)
    }

    fn assign(&mut self, t: &Target, v: Value) -> Result<(), EvalError> {
        match t {
            Target::Name(n) => self.store(n, v),
            Target::Unpack(ns) => self.bind_vars(ns, v)?,
            Target::Index(n, idx) => {
                let i = self.expr(idx)?.as_num()?;
                match self.load(n)? {
                    Value::List(l) => {
                        let len = l.borrow().len();
                        let pos = normalize_index(i, len)?;
                        l.borrow_mut()[pos] = v;
                    }
                    other => return Err(EvalError::rt(format!("{} does not support item assignment", other.type_name()))),
                }
            }
        }
        Ok(())
    }

    fn bind_vars(&mut self, vars: &[Name], v: Value) -> Result<(), EvalError> {
        if let [single] = vars {
            self.store(single, v);
            return Ok(());
        }
        let items = v.items()?;
        if items.len() != vars.len() {
            return Err(EvalError::rt(format!("cannot unpack {} values into {} names", items.len(), vars.len())));
        }
        for (n, x) in vars.iter().zip(items) {
            self.store(n, x);
        }
        Ok(())
    }

    fn iterate(&mut self, e: &Expr) -> Result<Seq, EvalError> {
        if let Expr::Call(Builtin::Range, args) = e {
            let (start, stop, step) = self.range_args(args)?;
            return Ok(Seq::Range { start, stop, step });
        }
        let v = self.expr(e)?;
        let items = v.items()?;
        Ok(Seq::Items(items))
    }

    fn range_args(&mut self, args: &[Expr]) -> Result<(i64, i64, i64), EvalError> {
        let mut ints = Vec::with_capacity(args.len());
        for a in args {
            ints.push(to_int(self.expr(a)?.as_num()?)?);
        }
        let (start, stop, step) = match ints.as_slice() {
            [stop] => (0, *stop, 1),
            [start, stop] => (*start, *stop, 1),
            [start, stop, step] => (*start, *stop, *step),
            _ => return Err(EvalError::rt(format!("range expected 1 to 3 arguments, got {}", ints.len()))),
        };
        if step == 0 {
            return Err(EvalError::rt("range() arg 3 must not be zero"));
        }
        Ok((start, stop, step))
    }

    fn expr(&mut self, e: &Expr) -> Result<Value, EvalError> {
        self.tick(1)?;
        match e {
            Expr::Lit(Literal::Num { value, .. }) => Ok(Value::Num(*value)),
            Expr::Lit(Literal::Str(s)) => Ok(Value::Str(s.as_str().into())),
            Expr::Var(n) => self.load(n),
            Expr::Site(id) => Err(EvalError::rt(format!("tunable site {id} has not been substituted"))),
            Expr::List(xs) => {
                let mut out = Vec::with_capacity(xs.len());
                for x in xs {
                    out.push(self.expr(x)?);
                }
                Ok(Value::List(Rc::new(RefCell::new(out))))
            }
            Expr::Tuple(xs) => {
                let mut out = Vec::with_capacity(xs.len());
                for x in xs {
                    out.push(self.expr(x)?);
                }
                Ok(Value::tuple(out))
            }
            Expr::Index(base, idx) => {
                let b = self.expr(base)?;
                let i = self.expr(idx)?;
                match i {
                    Value::Num(i) => b.get(i),
                    other => Err(EvalError::rt(format!("indices must be numbers, not {}", other.type_name()))),
                }
            }
            Expr::Binary(op, l, r) => {
                let a = self.expr(l)?;
                let b = self.expr(r)?;
                binary(*op, a, b)
            }
            Expr::Unary(op, a) => {
                let v = self.expr(a)?;
                match op {
                    UnaryOp::Neg => Ok(Value::Num(-v.as_num().map_err(|_| operand_err("-", &v))?)),
                    UnaryOp::Pos => Ok(Value::Num(v.as_num().map_err(|_| operand_err("+", &v))?)),
                    UnaryOp::Not => Ok(Value::bool(!v.truthy())),
                }
            }
            Expr::Compare(first, rest) => {
                let mut lhs = self.expr(first)?;
                for (op, x) in rest {
                    let rhs = self.expr(x)?;
                    if !compare(*op, &lhs, &rhs)? {
                        return Ok(Value::bool(false));
                    }
                    lhs = rhs;
                }
                Ok(Value::bool(true))
            }
            Expr::Bool(op, l, r) => {
                let a = self.expr(l)?.truthy();
                let result = match op {
                    BoolOp::And => a && self.expr(r)?.truthy(),
                    BoolOp::Or => a || self.expr(r)?.truthy(),
                };
                Ok(Value::bool(result))
            }
            Expr::IfElse { cond, then, orelse } => {
                if self.expr(cond)?.truthy() {
                    self.expr(then)
                } else {
                    self.expr(orelse)
                }
            }
            Expr::Call(b, args) => self.call(*b, args),
            Expr::Comp(c) => {
                let items = self.comprehension(c)?;
                Ok(match c.kind {
                    CompKind::List => Value::List(Rc::new(RefCell::new(items))),
                    CompKind::Generator => Value::tuple(items),
                })
            }
        }
    }

    fn comprehension(&mut self, c: &Comprehension) -> Result<Vec<Value>, EvalError> {
        let seq = self.iterate(&c.iter)?;
        let mut out = Vec::new();
        for i in 0..seq.len() {
            self.tick(1)?;
            self.bind_vars(&c.vars, seq.get(i))?;
            if let Some(cond) = &c.cond {
                if !self.expr(cond)?.truthy() {
                    continue;
                }
            }
            out.push(self.expr(&c.elt)?);
        }
        Ok(out)
    }

    fn args(&mut self, args: &[Expr]) -> Result<Vec<Value>, EvalError> {
        let mut out = Vec::with_capacity(args.len());
        for a in args {
            out.push(self.expr(a)?);
        }
        Ok(out)
    }

    fn call(&mut self, b: Builtin, args: &[Expr]) -> Result<Value, EvalError> {
        let name = b.name();
        let arity = |lo: usize, hi: usize| -> Result<(), EvalError> {
            if args.len() < lo || args.len() > hi {
                Err(EvalError::rt(format!("{name}() got {} arguments", args.len())))
            } else {
                Ok(())
            }
        };
        match b {
            Builtin::Range => {
                let (start, stop, step) = self.range_args(args)?;
                let n = range_len(start, stop, step);
                self.tick(n as u64)?;
                Ok(Value::tuple((0..n).map(|i| Value::Num((start + step * i as i64) as f64)).collect()))
            }
            Builtin::Len => {
                arity(1, 1)?;
                let v = self.expr(&args[0])?;
                Ok(Value::Num(v.len()? as f64))
            }
            Builtin::Sum => {
                arity(1, 2)?;
                let items = self.expr(&args[0])?.items()?;
                let mut acc = match args.get(1) {
                    Some(s) => self.expr(s)?,
                    None => Value::Num(0.0),
                };
                self.tick(items.len() as u64)?;
                for x in items {
                    acc = binary(BinOp::Add, acc, x)?;
                }
                Ok(acc)
            }
            Builtin::Min | Builtin::Max => {
                if args.is_empty() {
                    return Err(EvalError::rt(format!("{name}() expected at least 1 argument")));
                }
                let items = if args.len() == 1 { self.expr(&args[0])?.items()? } else { self.args(args)? };
                self.tick(items.len() as u64)?;
                let mut it = items.into_iter();
                let Some(mut best) = it.next() else {
                    return Err(EvalError::rt(format!("{name}() arg is an empty sequence")));
                };
                let want = if b == Builtin::Max { Ordering::Greater } else { Ordering::Less };
                for x in it {
                    if x.py_cmp(&best)? == Some(want) {
                        best = x;
                    }
                }
                Ok(best)
            }
            Builtin::Enumerate => {
                arity(1, 2)?;
                let items = self.expr(&args[0])?.items()?;
                let start = match args.get(1) {
                    Some(s) => to_int(self.expr(s)?.as_num()?)?,
                    None => 0,
                };
                self.tick(items.len() as u64)?;
                Ok(Value::tuple(
                    items.into_iter().enumerate().map(|(i, x)| Value::tuple(vec![Value::Num((start + i as i64) as f64), x])).collect(),
                ))
            }
            Builtin::Abs => {
                arity(1, 1)?;
                Ok(Value::Num(self.num_arg(&args[0], name)?.abs()))
            }
            Builtin::Log => {
                arity(1, 2)?;
                let x = self.num_arg(&args[0], name)?;
                let lx = math_log(x)?;
                match args.get(1) {
                    None => Ok(Value::Num(lx)),
                    Some(base) => {
                        let lb = math_log(self.num_arg(base, name)?)?;
                        if lb == 0.0 {
                            return Err(EvalError::rt("float division by zero"));
                        }
                        Ok(Value::Num(lx / lb))
                    }
                }
            }
            Builtin::Log1p => {
                arity(1, 1)?;
                let x = self.num_arg(&args[0], name)?;
                if x <= -1.0 {
                    return Err(EvalError::rt("math domain error"));
                }
                Ok(Value::Num(x.ln_1p()))
            }
            Builtin::Exp => {
                arity(1, 1)?;
                let x = self.num_arg(&args[0], name)?;
                let r = x.exp();
                if r.is_infinite() && x.is_finite() {
                    return Err(EvalError::rt("math range error"));
                }
                Ok(Value::Num(r))
            }
            Builtin::Tanh => {
                arity(1, 1)?;
                Ok(Value::Num(self.num_arg(&args[0], name)?.tanh()))
            }
            Builtin::Sqrt => {
                arity(1, 1)?;
                let x = self.num_arg(&args[0], name)?;
                if x < 0.0 {
                    return Err(EvalError::rt("math domain error"));
                }
                Ok(Value::Num(x.sqrt()))
            }
        }
    }

    fn num_arg(&mut self, e: &Expr, name: &str) -> Result<f64, EvalError> {
        let v = self.expr(e)?;
        v.as_num().map_err(|_| EvalError::rt(format!("{name}() needs a number, got {}", v.type_name())))
    }
}

fn math_log(x: f64) -> Result<f64, EvalError> {
    if x <= 0.0 {
        return Err(EvalError::rt("math domain error"));
    }
    Ok(x.ln())
}

fn operand_err(op: &str, v: &Value) -> EvalError {
    EvalError::rt(format!("bad operand type for {op}: {}", v.type_name()))
}

fn repeat(items: &[Value], count: f64) -> Result<Vec<Value>, EvalError> {
    let n = to_int(count)?.max(0) as usize;
    if items.len().saturating_mul(n) > 10_000_000 {
        return Err(EvalError::rt("sequence repetition too large"));
    }
    let mut out = Vec::with_capacity(items.len() * n);
    for _ in 0..n {
        out.extend_from_slice(items);
    }
    Ok(out)
}

pub(crate) fn binary(op: BinOp, a: Value, b: Value) -> Result<Value, EvalError> {
    if let (Value::Num(x), Value::Num(y)) = (&a, &b) {
        let (x, y) = (*x, *y);
        return Ok(Value::Num(match op {
            BinOp::Add => x + y,
            BinOp::Sub => x - y,
            BinOp::Mul => x * y,
            BinOp::Div => {
                if y == 0.0 {
                    return Err(EvalError::rt("division by zero"));
                }
                x / y
            }
            BinOp::FloorDiv => py_floordiv(x, y)?,
            BinOp::Mod => py_mod(x, y)?,
            BinOp::Pow => py_pow(x, y)?,
            BinOp::BitAnd => bool_num(x != 0.0 && y != 0.0),
            BinOp::BitOr => bool_num(x != 0.0 || y != 0.0),
        }));
    }
    match (op, &a, &b) {
        (BinOp::Add, Value::Str(x), Value::Str(y)) => Ok(Value::Str(format!("{x}{y}").into())),
        (BinOp::Add, Value::Tuple(x), Value::Tuple(y)) => Ok(Value::tuple(x.iter().chain(y.iter()).cloned().collect())),
        (BinOp::Add, Value::List(x), Value::List(y)) => {
            let v: Vec<Value> = x.borrow().iter().chain(y.borrow().iter()).cloned().collect();
            Ok(Value::List(Rc::new(RefCell::new(v))))
        }
        (BinOp::Mul, Value::List(l), Value::Num(n)) | (BinOp::Mul, Value::Num(n), Value::List(l)) => {
            let v = repeat(&l.borrow(), *n)?;
            Ok(Value::List(Rc::new(RefCell::new(v))))
        }
        (BinOp::Mul, Value::Tuple(t), Value::Num(n)) | (BinOp::Mul, Value::Num(n), Value::Tuple(t)) => Ok(Value::tuple(repeat(t, *n)?)),
        _ => Err(EvalError::rt(format!("unsupported operand types for {}: {} and {}", op.symbol(), a.type_name(), b.type_name()))),
    }
}

fn bool_num(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

fn compare(op: CmpOp, a: &Value, b: &Value) -> Result<bool, EvalError> {
    Ok(match op {
        CmpOp::Eq => a.py_eq(b),
        CmpOp::Ne => !a.py_eq(b),
        _ => {
            let ord = a.py_cmp(b)?;
            match (op, ord) {
                (_, None) => false,
                (CmpOp::Lt, Some(o)) => o == Ordering::Less,
                (CmpOp::Gt, Some(o)) => o == Ordering::Greater,
                (CmpOp::Le, Some(o)) => o != Ordering::Greater,
                (CmpOp::Ge, Some(o)) => o != Ordering::Less,
                _ => unreachable!(),
            }
        }
    })
}
