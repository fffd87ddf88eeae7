use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, col: usize, message: impl Into<String>) -> Self {
        Self { line, col, message: message.into() }
    }
}

/// Everything that can go wrong turning source text into a program.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error("tunable error at line {line}, column {col}: {message}")]
    Tunable { line: usize, col: usize, message: String },
    #[error("empty program")]
    Empty,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("runtime error: {0}")]
    Runtime(String),
    #[error("step budget of {0} operations exceeded")]
    Timeout(u64),
}

impl EvalError {
    pub(crate) fn rt(msg: impl Into<String>) -> Self {
        EvalError::Runtime(msg.into())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecisionError {
    #[error("decision vector has {got} entries, program has {expected} tunable sites")]
    Length { expected: usize, got: usize },
    #[error("site {site}: option index {index} out of range (site has {options} options)")]
    Index { site: usize, index: usize, options: usize },
}
