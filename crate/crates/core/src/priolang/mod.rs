//! The priority-function language: a small Python subset with `tunable`
//! decision points.

pub mod ast;
mod error;
mod interp;
mod lexer;
mod parser;
mod render;
mod tunable;
mod value;

pub use error::{DecisionError, EvalError, ParseError, SyntaxError};
pub use interp::DEFAULT_STEP_LIMIT;
pub use parser::{parse_program, RawSite};
pub use render::{render_expr, render_program};
pub use tunable::{ConcreteProgram, DecisionVector, Origin, SourceProgram, TunableProgram, TunableSite};
pub use value::{normalize_index, py_floordiv, py_mod, py_pow, Value};

/// Canonical text of any parseable program (tunable sites included).
pub fn canonicalize(text: &str) -> Result<String, SyntaxError> {
    Ok(TunableProgram::from_text(text)?.canonical_text())
}
