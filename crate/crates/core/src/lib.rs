//! Solution-space evolution over tunable priority programs.
//!
//! * [`priolang`]: the priority-function language (parse, substitute, evaluate, compact).
//! * [`xsearch`]: score-guided search over one program's solution space.
//! * [`progdb`]: scored program store and reference sampling.
//! * [`llm`]: model backends, budget accounting, program extraction.
//! * [`orchestrator`]: prompts, search processes and the evolution loop.
//! * [`problems`]: cap sets, admissible sets, cycle-graph independent sets, bin packing.

pub mod corpus;
pub mod llm;
pub mod orchestrator;
pub mod priolang;
pub mod problems;
pub mod progdb;
pub mod xsearch;

pub use llm::{Gateway, LlmBackend, LlmError, ScriptedBackend};
pub use orchestrator::{run_evolution, EvolveConfig, PromptTemplate, RunOptions, RunReport};
pub use priolang::{ConcreteProgram, DecisionVector, SourceProgram, TunableProgram};
pub use problems::{ProblemError, ProblemEvaluator, ProblemSpec};
pub use progdb::{Database, ProgramEntry, SamplerConfig};
pub use xsearch::{XSearchConfig, XSearchOutcome, MIN_SCORE};
