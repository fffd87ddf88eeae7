//! Problem evaluators: greedy constructions driven by a priority function,
//! their verifiers, and supporting oracles and datasets.

pub mod admissible;
pub mod binpack;
pub mod bound;
pub mod capset;
pub mod cycle;
pub mod datasets;
pub mod toy;

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::priolang::{ConcreteProgram, EvalError, Value};

pub use admissible::{greedy_admissible, is_admissible, AdmissibleEvaluator, AdmissibleParams, AdmissibleViolation, TriplePredicate};
pub use binpack::{
    best_fit, excess_score, first_fit, l2_lower_bound, simulate_online, simulate_online_bins, BinPackEvaluator, BinPackInstance,
};
pub use bound::{capacity_lower_bound, capacity_lower_bound_auto, CapacityBound};
pub use capset::{greedy_capset, is_capset, CapsetEvaluator, F3Vector};
pub use cycle::{brute_force_alpha, greedy_independent_set, is_independent, strong_product_adjacent, CycleProductSpec, ShannonEvaluator};
pub use datasets::{gen_or_dataset, gen_weibull_dataset, load_instances, save_instances};
pub use toy::ToyEvaluator;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProblemError {
    #[error(transparent)]
    Program(#[from] EvalError),
    #[error("priority function returned a non-finite value ({0})")]
    NonFinite(f64),
    #[error("priority function takes {got} parameters, this problem passes {expected}")]
    Arity { expected: usize, got: usize },
    #[error("dimension mismatch: expected vectors of length {expected}, found length {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("item of size {item} exceeds bin capacity {capacity}")]
    ItemOversize { item: u32, capacity: u32 },
    #[error("sum of lower bounds is zero")]
    ZeroBound,
    #[error("graph has {vertices} vertices, exact search is limited to {limit}")]
    TooLarge { vertices: usize, limit: usize },
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error("construction failed verification: {0}")]
    Verification(String),
}

/// Scores a concrete program. Implementations must be pure and safe to call
/// from many threads at once.
pub trait ProblemEvaluator: Send + Sync {
    fn name(&self) -> String;

    /// Number of arguments the priority function receives.
    fn arity(&self) -> usize;

    fn evaluate(&self, program: &ConcreteProgram) -> Result<f64, ProblemError>;
}

pub(crate) fn check_arity(program: &ConcreteProgram, expected: usize) -> Result<(), ProblemError> {
    let got = program.arity();
    if got != expected {
        return Err(ProblemError::Arity { expected, got });
    }
    Ok(())
}

pub(crate) fn finite_priority(program: &ConcreteProgram, args: Vec<Value>) -> Result<f64, ProblemError> {
    let v = program.eval_priority(args)?;
    if !v.is_finite() {
        return Err(ProblemError::NonFinite(v));
    }
    Ok(v)
}

/// Candidate order for the greedy builders: descending priority, ties by
/// lower enumeration index.
pub(crate) fn greedy_order(priorities: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..priorities.len()).collect();
    order.sort_by(|&a, &b| priorities[b].total_cmp(&priorities[a]));
    order
}

/// Which bin-packing dataset an evaluator scores against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BinDataset {
    Or,
    Weibull,
}

/// Serializable problem selector used by configs and the command line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProblemSpec {
    Capset {
        n: usize,
    },
    Admissible {
        n: usize,
        w: usize,
    },
    Shannon {
        m: usize,
        n: usize,
    },
    Binpack {
        dataset: BinDataset,
        #[serde(default)]
        path: Option<PathBuf>,
        #[serde(default)]
        instances: Option<usize>,
        #[serde(default)]
        items: Option<usize>,
        #[serde(default)]
        data_seed: Option<u64>,
    },
    Toy,
}

impl ProblemSpec {
    /// Short key used to pick prompt templates.
    pub fn template_key(&self) -> &'static str {
        match self {
            ProblemSpec::Capset { .. } => "capset",
            ProblemSpec::Admissible { .. } => "admissible",
            ProblemSpec::Shannon { .. } => "shannon",
            ProblemSpec::Binpack { .. } => "binpack",
            ProblemSpec::Toy => "toy",
        }
    }

    pub fn build(&self) -> Result<Box<dyn ProblemEvaluator>, ProblemError> {
        Ok(match self {
            ProblemSpec::Capset { n } => Box::new(CapsetEvaluator::new(*n)?),
            ProblemSpec::Admissible { n, w } => Box::new(AdmissibleEvaluator::new(AdmissibleParams::new(*n, *w)?)),
            ProblemSpec::Shannon { m, n } => Box::new(ShannonEvaluator::new(CycleProductSpec::new(*m, *n)?)),
            ProblemSpec::Binpack { dataset, path, instances, items, data_seed } => {
                let data = match path {
                    Some(p) => load_instances(p).map_err(|e| ProblemError::Params(e.to_string()))?,
                    None => {
                        let seed = data_seed.unwrap_or(0);
                        match dataset {
                            BinDataset::Or => gen_or_dataset(seed, instances.unwrap_or(20), items.unwrap_or(120)),
                            BinDataset::Weibull => gen_weibull_dataset(seed, instances.unwrap_or(5), items.unwrap_or(5000)),
                        }
                    }
                };
                Box::new(BinPackEvaluator::new(data)?)
            }
            ProblemSpec::Toy => Box::new(ToyEvaluator),
        })
    }
}
