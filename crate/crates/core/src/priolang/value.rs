use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::rc::Rc;

use super::error::EvalError;

/// Runtime value. Numbers are always `f64`; booleans are 1.0 / 0.0.
#[derive(Debug, Clone)]
pub enum Value {
    Num(f64),
    Str(Rc<str>),
    Tuple(Rc<[Value]>),
    List(Rc<RefCell<Vec<Value>>>),
}

impl Value {
    pub fn bool(b: bool) -> Value {
        Value::Num(if b { 1.0 } else { 0.0 })
    }

    pub fn tuple_of_nums(xs: impl IntoIterator<Item = f64>) -> Value {
        Value::Tuple(xs.into_iter().map(Value::Num).collect())
    }

    pub fn tuple(xs: Vec<Value>) -> Value {
        Value::Tuple(xs.into())
    }

    pub fn str(s: &str) -> Value {
        Value::Str(s.into())
    }

    pub fn type_name(&self) -> &'static str {
        match self {
            Value::Num(_) => "number",
            Value::Str(_) => "string",
            Value::Tuple(_) => "tuple",
            Value::List(_) => "list",
        }
    }

    pub fn as_num(&self) -> Result<f64, EvalError> {
        match self {
            Value::Num(x) => Ok(*x),
            other => Err(EvalError::rt(format!("expected a number, got {}", other.type_name()))),
        }
    }

    pub fn truthy(&self) -> bool {
        match self {
            Value::Num(x) => *x != 0.0,
            Value::Str(s) => !s.is_empty(),
            Value::Tuple(t) => !t.is_empty(),
            Value::List(l) => !l.borrow().is_empty(),
        }
    }

    /// Length of a sequence value.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> Result<usize, EvalError> {
        match self {
            Value::Str(s) => Ok(s.chars().count()),
            Value::Tuple(t) => Ok(t.len()),
            Value::List(l) => Ok(l.borrow().len()),
            Value::Num(_) => Err(EvalError::rt("object of type number has no len()")),
        }
    }

    /// Elements of a sequence, copied out.
    pub fn items(&self) -> Result<Vec<Value>, EvalError> {
        match self {
            Value::Str(s) => Ok(s.chars().map(|c| Value::Str(c.to_string().into())).collect()),
            Value::Tuple(t) => Ok(t.to_vec()),
            Value::List(l) => Ok(l.borrow().clone()),
            Value::Num(_) => Err(EvalError::rt("number is not iterable")),
        }
    }

    pub fn get(&self, index: f64) -> Result<Value, EvalError> {
        let n = self.len()?;
        let i = normalize_index(index, n)?;
        Ok(match self {
            Value::Str(s) => Value::Str(s.chars().nth(i).unwrap().to_string().into()),
            Value::Tuple(t) => t[i].clone(),
            Value::List(l) => l.borrow()[i].clone(),
            Value::Num(_) => unreachable!(),
        })
    }

    /// Python equality: numbers by value, sequences element-wise; a tuple
    /// never equals a list.
    pub fn py_eq(&self, other: &Value) -> bool {
        match (self, other) {
            (Value::Num(a), Value::Num(b)) => a == b,
            (Value::Str(a), Value::Str(b)) => a == b,
            (Value::Tuple(a), Value::Tuple(b)) => a.len() == b.len() && a.iter().zip(b.iter()).all(|(x, y)| x.py_eq(y)),
            (Value::List(a), Value::List(b)) => {
                let (a, b) = (a.borrow(), b.borrow());
                a.len() == b.len() && a.iter().zip(b.iter()).all(|(x, y)| x.py_eq(y))
            }
            _ => false,
        }
    }

    /// Ordering for `<`-style comparisons; `None` means unordered (NaN).
    pub fn py_cmp(&self, other: &Value) -> Result<Option<Ordering>, EvalError> {
        match (self, other) {
            (Value::Num(a), Value::Num(b)) => Ok(a.partial_cmp(b)),
            (Value::Str(a), Value::Str(b)) => Ok(Some(a.cmp(b))),
            (Value::Tuple(_), Value::Tuple(_)) | (Value::List(_), Value::List(_)) => {
                let (a, b) = (self.items()?, other.items()?);
                for (x, y) in a.iter().zip(b.iter()) {
                    if !x.py_eq(y) {
                        return x.py_cmp(y);
                    }
                }
                Ok(Some(a.len().cmp(&b.len())))
            }
            _ => Err(EvalError::rt(format!("cannot order {} and {}", self.type_name(), other.type_name()))),
        }
    }
}

impl PartialEq for Value {
    fn eq(&self, other: &Self) -> bool {
        self.py_eq(other)
    }
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Num(x)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn seq(f: &mut fmt::Formatter<'_>, xs: &[Value], open: &str, close: &str) -> fmt::Result {
            write!(f, "{open}")?;
            for (i, x) in xs.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{x}")?;
            }
            if xs.len() == 1 && open == "(" {
                write!(f, ",")?;
            }
            write!(f, "{close}")
        }
        match self {
            Value::Num(x) => write!(f, "{x}"),
            Value::Str(s) => write!(f, "{}", super::ast::quote_str(s)),
            Value::Tuple(t) => seq(f, t, "(", ")"),
            Value::List(l) => seq(f, &l.borrow(), "[", "]"),
        }
    }
}

/// Converts a float index to a position, Python style: negative values count
/// from the end, and the value must be integral within 1e-9.
pub fn normalize_index(index: f64, len: usize) -> Result<usize, EvalError> {
    let i = to_int(index)?;
    let len_i = len as i64;
    let pos = if i < 0 { i + len_i } else { i };
    if pos < 0 || pos >= len_i {
        return Err(EvalError::rt(format!("index {i} out of range for length {len}")));
    }
    Ok(pos as usize)
}

pub fn to_int(x: f64) -> Result<i64, EvalError> {
    let r = x.round();
    if !x.is_finite() || (x - r).abs() > 1e-9 || r.abs() > 9.0e15 {
        return Err(EvalError::rt(format!("expected an integer, got {x}")));
    }
    Ok(r as i64)
}

/// Float modulo with the divisor's sign, bit-compatible with CPython.
pub fn py_mod(a: f64, b: f64) -> Result<f64, EvalError> {
    if b == 0.0 {
        return Err(EvalError::rt("modulo by zero"));
    }
    Ok(divmod(a, b).1)
}

/// Floor division, bit-compatible with CPython.
pub fn py_floordiv(a: f64, b: f64) -> Result<f64, EvalError> {
    if b == 0.0 {
        return Err(EvalError::rt("integer division or modulo by zero"));
    }
    Ok(divmod(a, b).0)
}

fn divmod(vx: f64, wx: f64) -> (f64, f64) {
    let mut m = vx % wx;
    let mut div = (vx - m) / wx;
    if m != 0.0 {
        if (wx < 0.0) != (m < 0.0) {
            m += wx;
            div -= 1.0;
        }
    } else {
        m = 0f64.copysign(wx);
    }
    let floordiv = if div != 0.0 {
        let mut fd = div.floor();
        if div - fd > 0.5 {
            fd += 1.0;
        }
        fd
    } else {
        0f64.copysign(vx / wx)
    };
    (floordiv, m)
}

/// Real exponentiation with CPython's error cases.
pub fn py_pow(a: f64, b: f64) -> Result<f64, EvalError> {
    if a == 0.0 && b < 0.0 {
        return Err(EvalError::rt("0.0 cannot be raised to a negative power"));
    }
    if a < 0.0 && a.is_finite() && b.is_finite() && b.fract() != 0.0 {
        return Err(EvalError::rt("negative number raised to a fractional power"));
    }
    let r = a.powf(b);
    if r.is_infinite() && a.is_finite() && b.is_finite() {
        return Err(EvalError::rt("numerical result out of range"));
    }
    Ok(r)
}
