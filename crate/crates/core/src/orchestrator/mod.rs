//! Evolution loop: prompt, call, search, store, and periodic halving across
//! parallel search processes.
//!
//! Processes advance in waves. Within a wave, budget units are reserved and
//! prompts built in process order; requests and space searches then run on
//! one thread per process; results are folded back in process order. Halving
//! is applied between waves, once for every multiple of `k_reset` the wave's
//! calls reached.

mod prompt;

use std::path::{Path, PathBuf};
use std::thread;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::llm::{extract_program, Gateway, LlmError, Ticket};
use crate::priolang::{Origin, SourceProgram, TunableProgram};
use crate::problems::{ProblemEvaluator, ProblemSpec};
use crate::progdb::{Database, DbError, Inserted, ProgramEntry, SamplerConfig};
use crate::xsearch::{self, XSearchConfig, MIN_SCORE};

pub use prompt::{build_prompt, rename_function, PromptTemplate, OUTPUT_RESTRICTION, RELATION_HINT};

#[derive(Debug, Error)]
pub enum OrchestratorError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("seed program: {0}")]
    Seed(String),
    #[error(transparent)]
    Backend(#[from] LlmError),
    #[error(transparent)]
    Db(#[from] DbError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RefOrder {
    /// Weakest reference first.
    Ascending,
    Descending,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvolveConfig {
    pub k_search: usize,
    /// Calls between halving events; `None` disables halving.
    pub k_reset: Option<u64>,
    pub k_ref: usize,
    pub k_cluster: usize,
    pub k_stall: usize,
    pub top_k: usize,
    pub p0: f64,
    /// Total LLM calls over all processes.
    pub budget: u64,
    pub batch_size: usize,
    /// Softmax temperature of the space search.
    pub temperature: f64,
    pub max_evaluations: Option<usize>,
    pub ref_order: RefOrder,
    pub seed_program: Option<SourceProgram>,
    pub seed: u64,
}

impl Default for EvolveConfig {
    fn default() -> Self {
        Self {
            k_search: 4,
            k_reset: Some(1600),
            k_ref: 2,
            k_cluster: 10,
            k_stall: 3,
            top_k: 1,
            p0: 0.5,
            budget: 20_000,
            batch_size: 64,
            temperature: 1.0,
            max_evaluations: None,
            ref_order: RefOrder::Ascending,
            seed_program: None,
            seed: 0,
        }
    }
}

impl EvolveConfig {
    /// Defaults tuned per problem family.
    pub fn for_problem(problem: &ProblemSpec) -> Self {
        let mut cfg = Self::default();
        match problem {
            ProblemSpec::Capset { n } if *n >= 8 => {
                cfg.k_stall = 3;
                cfg.k_reset = Some(3200);
            }
            ProblemSpec::Capset { .. } => {
                cfg.k_stall = 5;
                cfg.k_reset = Some(1600);
            }
            ProblemSpec::Binpack { .. } => cfg.k_reset = None,
            _ => {}
        }
        cfg
    }

    pub fn validate(&self) -> Result<(), OrchestratorError> {
        let bad = |m: &str| Err(OrchestratorError::Config(m.into()));
        if self.k_search == 0 {
            return bad("k_search must be at least 1");
        }
        if self.k_reset == Some(0) {
            return bad("k_reset must be at least 1");
        }
        if self.k_cluster < 2 {
            return bad("k_cluster must be at least 2");
        }
        if !(self.p0 > 0.0 && self.p0 < 1.0) {
            return bad("p0 must lie strictly between 0 and 1");
        }
        self.xsearch(0).validate().map_err(OrchestratorError::Config)
    }

    pub fn xsearch(&self, seed: u64) -> XSearchConfig {
        XSearchConfig {
            batch_size: self.batch_size,
            temperature: self.temperature,
            k_stall: self.k_stall,
            top_k: self.top_k,
            max_evaluations: self.max_evaluations,
            seed,
            ..XSearchConfig::default()
        }
    }

    pub fn sampler(&self) -> SamplerConfig {
        SamplerConfig { k_cluster: self.k_cluster, k_ref: self.k_ref, p0: self.p0 }
    }
}

/// Deterministic RNG for one (stream, generation) pair of a run.
pub fn derive_rng(seed: u64, stream: u64, generation: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&stream.to_le_bytes());
    key[16..24].copy_from_slice(&generation.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

const MASTER_STREAM: u64 = u64::MAX;

pub struct SearchProcess {
    pub process_id: usize,
    pub db: Database,
    pub rng: ChaCha8Rng,
    pub best_score: Option<f64>,
    pub reset_count: u32,
    pub llm_calls_made: u64,
}

impl SearchProcess {
    pub fn new(process_id: usize, seed: u64, reset_count: u32) -> Self {
        Self {
            process_id,
            db: Database::new(),
            rng: derive_rng(seed, process_id as u64, reset_count as u64),
            best_score: None,
            reset_count,
            llm_calls_made: 0,
        }
    }

    fn note_score(&mut self, score: f64) {
        if self.best_score.is_none_or(|b| score > b) {
            self.best_score = Some(score);
        }
    }

    /// Inserts a seed entry (created_round 0, no parents).
    pub fn add_seed(&mut self, seed: &SeedEntry) -> Result<(), OrchestratorError> {
        self.db.insert(ProgramEntry {
            id: 0,
            source: seed.source.clone(),
            score: seed.score,
            valid: true,
            parent_ids: vec![],
            created_round: 0,
            process_id: self.process_id,
        })?;
        self.note_score(seed.score);
        Ok(())
    }
}

/// A seed program after its own space search.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeedEntry {
    pub source: String,
    pub score: f64,
}

/// Runs the space search on the seed program once.
pub fn evaluate_seed(seed: &SourceProgram, evaluator: &dyn ProblemEvaluator, cfg: &EvolveConfig) -> Result<SeedEntry, OrchestratorError> {
    let tp = TunableProgram::parse(seed.clone()).map_err(|e| OrchestratorError::Seed(e.to_string()))?;
    let out = xsearch::run(&tp, evaluator, &cfg.xsearch(cfg.seed));
    match (out.compacted, out.best_program) {
        (Some(c), Some(_)) => Ok(SeedEntry { source: canonical_source(c), score: out.best_score }),
        _ => Err(OrchestratorError::Seed(out.first_error.unwrap_or_else(|| "no valid evaluation".into()))),
    }
}

fn canonical_source(p: SourceProgram) -> String {
    match TunableProgram::parse(p.clone()) {
        Ok(tp) => tp.canonical_text(),
        Err(_) => p.text,
    }
}

/// Prompt and parents for one call.
#[derive(Debug, Clone)]
pub struct PreparedCall {
    pub prompt: String,
    pub parent_ids: Vec<u64>,
}

pub fn prepare_call(p: &mut SearchProcess, template: &PromptTemplate, cfg: &EvolveConfig) -> Result<PreparedCall, OrchestratorError> {
    let mut refs = if p.db.sampleable_count() > 0 { p.db.sample_refs(&cfg.sampler(), &mut p.rng)? } else { Vec::new() };
    refs.sort_by(|a, b| a.score.total_cmp(&b.score));
    if cfg.ref_order == RefOrder::Descending {
        refs.reverse();
    }
    Ok(PreparedCall { prompt: build_prompt(&refs, template), parent_ids: refs.iter().map(|r| r.id).collect() })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepReport {
    pub process_id: usize,
    pub call_index: u64,
    /// Best score of the searched space, `None` if nothing was valid.
    pub score: Option<f64>,
    pub entry_id: u64,
    pub duplicate: bool,
    pub evaluations: usize,
    pub error: Option<String>,
}

/// Turns a model response into a database entry.
pub fn finish_call(
    p: &mut SearchProcess,
    ticket: &Ticket,
    prepared: &PreparedCall,
    response: Result<String, LlmError>,
    evaluator: &dyn ProblemEvaluator,
    cfg: &EvolveConfig,
) -> Result<StepReport, OrchestratorError> {
    let search_seed: u64 = p.rng.random();
    p.llm_calls_made += 1;
    let mut evaluations = 0;
    let outcome: Result<(String, f64), (String, String)> = match response {
        Err(e) if e.is_fatal() => return Err(e.into()),
        Err(e) => Err((String::new(), e.to_string())),
        Ok(text) => match extract_program(&text) {
            Err(e) => Err((text, e.to_string())),
            Ok(src) => match TunableProgram::parse(src.clone()) {
                Err(e) => Err((src.text, e.to_string())),
                Ok(tp) => {
                    let out = xsearch::run(&tp, evaluator, &cfg.xsearch(search_seed));
                    evaluations = out.evaluations_used;
                    match out.compacted {
                        Some(c) if out.best_program.is_some() => Ok((canonical_source(c), out.best_score)),
                        _ => Err((src.text, out.first_error.unwrap_or_else(|| "no valid evaluation".into()))),
                    }
                }
            },
        },
    };
    let (source, score, valid, error) = match outcome {
        Ok((s, score)) => (s, score, true, None),
        Err((s, e)) => (s, MIN_SCORE, false, Some(e)),
    };
    let inserted = p.db.insert(ProgramEntry {
        id: 0,
        source,
        score,
        valid,
        parent_ids: prepared.parent_ids.clone(),
        created_round: ticket.call_index,
        process_id: p.process_id,
    })?;
    if valid {
        p.note_score(score);
    }
    Ok(StepReport {
        process_id: p.process_id,
        call_index: ticket.call_index,
        score: valid.then_some(score),
        entry_id: inserted.id(),
        duplicate: matches!(inserted, Inserted::Duplicate(_)),
        evaluations,
        error,
    })
}

/// One full iteration for a single process.
pub fn step(
    p: &mut SearchProcess,
    gateway: &Gateway,
    evaluator: &dyn ProblemEvaluator,
    template: &PromptTemplate,
    cfg: &EvolveConfig,
) -> Result<StepReport, OrchestratorError> {
    let ticket = gateway.reserve(p.process_id)?;
    let prepared = prepare_call(p, template, cfg)?;
    let response = gateway.complete(&ticket, &prepared.prompt);
    finish_call(p, &ticket, &prepared, response, evaluator, cfg)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum Event {
    Call { call_index: u64, process_id: usize, score: Option<f64>, process_best: Option<f64>, global_best: Option<f64> },
    Halving { after_calls: u64, restarted: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HalvingEvent {
    /// Global call count that triggered the event.
    pub after_calls: u64,
    /// (process, best score) from lowest to highest after random tie-breaking.
    pub ranking: Vec<(usize, Option<f64>)>,
    pub restarted: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryPoint {
    pub call_index: u64,
    pub reset_count: u32,
    pub score: Option<f64>,
    pub best: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProcessReport {
    pub process_id: usize,
    pub reset_count: u32,
    pub llm_calls: u64,
    pub best_score: Option<f64>,
    pub trajectory: Vec<TrajectoryPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GlobalBest {
    pub score: f64,
    pub source: String,
    pub process_id: usize,
    /// `None` for a seed program.
    pub call_index: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub problem: String,
    pub config: EvolveConfig,
    pub calls_used: u64,
    pub halving_events: Vec<HalvingEvent>,
    pub processes: Vec<ProcessReport>,
    pub global_best: Option<GlobalBest>,
    /// Global best after each call.
    pub best_trajectory: Vec<(u64, Option<f64>)>,
    /// Database files written, relative to the database directory.
    pub databases: Vec<PathBuf>,
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Directory for the per-process JSON-lines databases.
    pub db_dir: Option<PathBuf>,
}

struct Run<'a> {
    cfg: &'a EvolveConfig,
    opts: &'a RunOptions,
    seed: Option<SeedEntry>,
    databases: Vec<PathBuf>,
}

impl Run<'_> {
    fn spawn(&mut self, pid: usize, reset_count: u32) -> Result<SearchProcess, OrchestratorError> {
        let mut p = SearchProcess::new(pid, self.cfg.seed, reset_count);
        if let Some(dir) = &self.opts.db_dir {
            let path = db_path(dir, pid, reset_count);
            p.db.attach(&path)?;
            self.databases.push(PathBuf::from(path.file_name().expect("db file name")));
        }
        if let Some(seed) = &self.seed {
            p.add_seed(seed)?;
        }
        Ok(p)
    }
}

pub fn db_path(dir: &Path, process_id: usize, reset_count: u32) -> PathBuf {
    dir.join(format!("process{process_id}_gen{reset_count}.jsonl"))
}

fn offer(best: &mut Option<GlobalBest>, score: f64, source: &str, process_id: usize, call_index: Option<u64>) {
    if best.as_ref().is_none_or(|b| score > b.score) {
        *best = Some(GlobalBest { score, source: source.into(), process_id, call_index });
    }
}

pub fn run_evolution(
    cfg: &EvolveConfig,
    evaluator: &dyn ProblemEvaluator,
    template: &PromptTemplate,
    gateway: &Gateway,
    opts: &RunOptions,
    on_event: &mut dyn FnMut(&Event),
) -> Result<RunReport, OrchestratorError> {
    cfg.validate()?;
    let seed = cfg.seed_program.as_ref().map(|s| evaluate_seed(s, evaluator, cfg)).transpose()?;
    let mut run = Run { cfg, opts, seed, databases: Vec::new() };
    let mut master = derive_rng(cfg.seed, MASTER_STREAM, 0);
    let mut procs = Vec::with_capacity(cfg.k_search);
    for pid in 0..cfg.k_search {
        procs.push(run.spawn(pid, 0)?);
    }
    let mut reports: Vec<ProcessReport> = (0..cfg.k_search)
        .map(|pid| ProcessReport { process_id: pid, reset_count: 0, llm_calls: 0, best_score: None, trajectory: Vec::new() })
        .collect();
    let mut global: Option<GlobalBest> = None;
    if let Some(s) = &run.seed {
        offer(&mut global, s.score, &s.source, 0, None);
        for r in &mut reports {
            r.best_score = Some(s.score);
        }
    }
    let mut halvings = Vec::new();
    let mut best_trajectory = Vec::new();

    loop {
        let mut tickets: Vec<Ticket> = Vec::new();
        for p in &procs {
            match gateway.reserve(p.process_id) {
                Ok(t) => tickets.push(t),
                Err(LlmError::BudgetExhausted { .. }) => break,
                Err(e) => return Err(e.into()),
            }
        }
        if tickets.is_empty() {
            break;
        }
        let mut prepared = Vec::with_capacity(tickets.len());
        for (p, _) in procs.iter_mut().zip(&tickets) {
            prepared.push(prepare_call(p, template, cfg)?);
        }
        let results: Vec<Result<StepReport, OrchestratorError>> = thread::scope(|s| {
            let handles: Vec<_> = procs
                .iter_mut()
                .zip(&tickets)
                .zip(&prepared)
                .map(|((p, t), prep)| {
                    s.spawn(move || {
                        let response = gateway.complete(t, &prep.prompt);
                        finish_call(p, t, prep, response, evaluator, cfg)
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("search thread panicked")).collect()
        });
        for r in results {
            let r = r?;
            let p = &procs[r.process_id];
            if let Some(score) = r.score {
                let source = &p.db.get(r.entry_id).expect("entry just inserted").source;
                offer(&mut global, score, source, r.process_id, Some(r.call_index));
            }
            let rep = &mut reports[r.process_id];
            rep.llm_calls += 1;
            rep.best_score = match (rep.best_score, p.best_score) {
                (Some(a), Some(b)) => Some(a.max(b)),
                (a, b) => a.or(b),
            };
            rep.trajectory.push(TrajectoryPoint {
                call_index: r.call_index,
                reset_count: p.reset_count,
                score: r.score,
                best: p.best_score,
            });
            let global_best = global.as_ref().map(|g| g.score);
            best_trajectory.push((r.call_index, global_best));
            tracing::info!(call = r.call_index, process = r.process_id, score = r.score, best = global_best, "call");
            on_event(&Event::Call {
                call_index: r.call_index,
                process_id: r.process_id,
                score: r.score,
                process_best: p.best_score,
                global_best,
            });
        }
        let Some(k_reset) = cfg.k_reset else { continue };
        let half = cfg.k_search / 2;
        for t in &tickets {
            let after_calls = t.call_index + 1;
            if after_calls % k_reset != 0 || half == 0 {
                continue;
            }
            let mut order: Vec<usize> = (0..procs.len()).collect();
            order.shuffle(&mut master);
            let key = |i: usize| procs[i].best_score.unwrap_or(f64::NEG_INFINITY);
            order.sort_by(|&a, &b| key(a).total_cmp(&key(b)));
            let ranking = order.iter().map(|&i| (i, procs[i].best_score)).collect();
            let restarted: Vec<usize> = order[..half].to_vec();
            for &pid in &restarted {
                let next = procs[pid].reset_count + 1;
                procs[pid] = run.spawn(pid, next)?;
                reports[pid].reset_count = next;
            }
            tracing::info!(after_calls, ?restarted, "halving");
            on_event(&Event::Halving { after_calls, restarted: restarted.clone() });
            halvings.push(HalvingEvent { after_calls, ranking, restarted });
        }
    }

    Ok(RunReport {
        problem: evaluator.name(),
        config: cfg.clone(),
        calls_used: gateway.budget().used(),
        halving_events: halvings,
        processes: reports,
        global_best: global,
        best_trajectory,
        databases: run.databases,
    })
}

/// Helper for callers that only need a seed program wrapper.
pub fn seed_source(text: &str) -> SourceProgram {
    SourceProgram::new(text, Origin::Seed)
}
