use super::{check_arity, finite_priority, ProblemError, ProblemEvaluator};
use crate::priolang::ConcreteProgram;

/// Calls `priority()` with no arguments; the score is its return value.
/// Used for wiring tests and demos.
#[derive(Debug, Clone, Copy, Default)]
pub struct ToyEvaluator;

impl ProblemEvaluator for ToyEvaluator {
    fn name(&self) -> String {
        "toy".into()
    }

    fn arity(&self) -> usize {
        0
    }

    fn evaluate(&self, program: &ConcreteProgram) -> Result<f64, ProblemError> {
        check_arity(program, 0)?;
        finite_priority(program, Vec::new())
    }
}
