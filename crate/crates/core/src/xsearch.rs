//! Score-guided search over the solution space of one tunable program.
//!
//! Each round draws a batch of unvisited decision vectors (one option per
//! site, sampled from a per-site softmax over the best score each option has
//! taken part in), evaluates them, and folds the scores back into the table.
//! The run stops once the global best has not improved for more than
//! `k_stall` consecutive rounds, or when no unvisited vector can be found.

use std::collections::HashMap;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::priolang::{ConcreteProgram, DecisionVector, SourceProgram, TunableProgram};
use crate::problems::ProblemEvaluator;

/// Score of an option that has not been part of any successful evaluation.
pub const MIN_SCORE: f64 = -1e10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct XSearchConfig {
    pub batch_size: usize,
    pub temperature: f64,
    pub k_stall: usize,
    pub top_k: usize,
    /// Rejection-sampling budget per batch; `None` means 100 × batch_size.
    pub max_sample_attempts: Option<usize>,
    /// Standardize each site's scores before the softmax.
    pub standardize: bool,
    /// Hard cap on evaluations for one run, if any.
    pub max_evaluations: Option<usize>,
    pub seed: u64,
}

impl Default for XSearchConfig {
    fn default() -> Self {
        Self {
            batch_size: 64,
            temperature: 1.0,
            k_stall: 3,
            top_k: 1,
            max_sample_attempts: None,
            standardize: true,
            max_evaluations: None,
            seed: 0,
        }
    }
}

impl XSearchConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.batch_size == 0 {
            return Err("batch_size must be at least 1".into());
        }
        if self.k_stall == 0 {
            return Err("k_stall must be at least 1".into());
        }
        if self.top_k == 0 {
            return Err("top_k must be at least 1".into());
        }
        if !(self.temperature > 0.0 && self.temperature.is_finite()) {
            return Err(format!("temperature must be positive, got {}", self.temperature));
        }
        Ok(())
    }

    fn attempts(&self) -> usize {
        self.max_sample_attempts.unwrap_or(100 * self.batch_size)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("no unvisited decision vector found")]
pub struct ExhaustedError;

/// Best score seen per (site, option).
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreTable {
    rows: Vec<Vec<f64>>,
}

impl ScoreTable {
    pub fn new(option_counts: &[usize]) -> Self {
        Self { rows: option_counts.iter().map(|&k| vec![MIN_SCORE; k]).collect() }
    }

    pub fn get(&self, site: usize, option: usize) -> f64 {
        self.rows[site][option]
    }

    pub fn site(&self, site: usize) -> &[f64] {
        &self.rows[site]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn num_sites(&self) -> usize {
        self.rows.len()
    }

    pub fn record(&mut self, dv: &DecisionVector, score: f64) {
        for (row, &j) in self.rows.iter_mut().zip(dv.indices()) {
            if score > row[j] {
                row[j] = score;
            }
        }
    }

    fn space_size(&self) -> u128 {
        self.rows.iter().fold(1u128, |acc, r| acc.saturating_mul(r.len() as u128))
    }
}

/// Every vector handed out for evaluation, in evaluation order, with its
/// score (`None` if the program was invalid).
#[derive(Debug, Clone, Default)]
pub struct VisitedMap {
    index: HashMap<DecisionVector, usize>,
    log: Vec<(DecisionVector, Option<f64>)>,
}

impl VisitedMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn contains(&self, dv: &DecisionVector) -> bool {
        self.index.contains_key(dv)
    }

    pub fn get(&self, dv: &DecisionVector) -> Option<Option<f64>> {
        self.index.get(dv).map(|&i| self.log[i].1)
    }

    pub fn len(&self) -> usize {
        self.log.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&DecisionVector, Option<f64>)> {
        self.log.iter().map(|(dv, s)| (dv, *s))
    }

    /// Returns false (and changes nothing) if `dv` was already present.
    pub fn insert(&mut self, dv: DecisionVector, score: Option<f64>) -> bool {
        if self.index.contains_key(&dv) {
            return false;
        }
        self.index.insert(dv.clone(), self.log.len());
        self.log.push((dv, score));
        true
    }

    /// The `k` highest-scoring valid vectors; earlier evaluation wins ties.
    pub fn top_k(&self, k: usize) -> Vec<(DecisionVector, f64)> {
        let mut valid: Vec<(usize, f64)> = self.log.iter().enumerate().filter_map(|(i, (_, s))| s.map(|s| (i, s))).collect();
        valid.sort_by(|a, b| b.1.total_cmp(&a.1));
        valid.into_iter().take(k).map(|(i, s)| (self.log[i].0.clone(), s)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StallSignal {
    Continue,
    Terminate,
}

/// Global best and the consecutive non-improving round counter.
#[derive(Debug, Clone, PartialEq)]
pub struct StallState {
    pub k_stall: usize,
    pub best: Option<f64>,
    pub no_improve: usize,
}

impl StallState {
    pub fn new(k_stall: usize) -> Self {
        Self { k_stall, best: None, no_improve: 0 }
    }
}

/// Numerically stable softmax of `scores / temperature`.
pub fn softmax(scores: &[f64], temperature: f64) -> Vec<f64> {
    let m = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = scores.iter().map(|&s| ((s - m) / temperature).exp()).collect();
    let total: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / total).collect()
}

/// Sampling distribution for one site. Options still at `MIN_SCORE` are
/// treated as if they had the site's best score.
pub fn site_distribution(row: &[f64], temperature: f64, standardize: bool) -> Vec<f64> {
    let seen_max = row.iter().copied().filter(|&s| s > MIN_SCORE).fold(f64::NEG_INFINITY, f64::max);
    if seen_max == f64::NEG_INFINITY {
        return vec![1.0 / row.len() as f64; row.len()];
    }
    let mut filled: Vec<f64> = row.iter().map(|&s| if s > MIN_SCORE { s } else { seen_max }).collect();
    if standardize {
        let n = filled.len() as f64;
        let mean = filled.iter().sum::<f64>() / n;
        let var = filled.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / n;
        let sd = var.sqrt() + 1e-9;
        for s in &mut filled {
            *s = (*s - mean) / sd;
        }
    }
    softmax(&filled, temperature)
}

/// Draws up to `batch_size` distinct vectors that are not in `visited`.
pub fn sample_batch(
    table: &ScoreTable,
    visited: &VisitedMap,
    cfg: &XSearchConfig,
    rng: &mut impl Rng,
) -> Result<Vec<DecisionVector>, ExhaustedError> {
    let remaining = table.space_size().saturating_sub(visited.len() as u128);
    if remaining == 0 {
        return Err(ExhaustedError);
    }
    let target = (cfg.batch_size as u128).min(remaining) as usize;
    let samplers: Vec<Option<WeightedIndex<f64>>> = table
        .rows()
        .iter()
        .map(|row| {
            (row.len() > 1).then(|| {
                WeightedIndex::new(site_distribution(row, cfg.temperature, cfg.standardize))
                    .expect("softmax weights are finite and sum to 1")
            })
        })
        .collect();
    let mut batch: Vec<DecisionVector> = Vec::with_capacity(target);
    for _ in 0..cfg.attempts() {
        if batch.len() == target {
            break;
        }
        let dv = DecisionVector(samplers.iter().map(|s| s.as_ref().map_or(0, |w| w.sample(rng))).collect());
        if !visited.contains(&dv) && !batch.contains(&dv) {
            batch.push(dv);
        }
    }
    if batch.is_empty() {
        return Err(ExhaustedError);
    }
    Ok(batch)
}

/// Records a batch of results. Valid scores update the table; every vector
/// is marked visited.
pub fn apply_scores(
    batch: &[(DecisionVector, Option<f64>)],
    table: &mut ScoreTable,
    visited: &mut VisitedMap,
    state: &mut StallState,
) -> StallSignal {
    let mut batch_best: Option<f64> = None;
    for (dv, score) in batch {
        visited.insert(dv.clone(), *score);
        if let Some(s) = *score {
            table.record(dv, s);
            batch_best = Some(batch_best.map_or(s, |b: f64| b.max(s)));
        }
    }
    match (batch_best, state.best) {
        (Some(b), None) => {
            state.best = Some(b);
            state.no_improve = 0;
        }
        (Some(b), Some(g)) if b > g => {
            state.best = Some(b);
            state.no_improve = 0;
        }
        _ => state.no_improve += 1,
    }
    if state.no_improve > state.k_stall {
        StallSignal::Terminate
    } else {
        StallSignal::Continue
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Stalled,
    Exhausted,
    EvaluationCap,
}

#[derive(Debug, Clone)]
pub struct XSearchOutcome {
    /// Best valid score, or `MIN_SCORE` if nothing evaluated successfully.
    pub best_score: f64,
    pub best_program: Option<ConcreteProgram>,
    /// Source restricted to the top-K decisions.
    pub compacted: Option<SourceProgram>,
    pub evaluations_used: usize,
    pub rounds: usize,
    pub stop: StopReason,
    /// First evaluation error, kept for diagnostics.
    pub first_error: Option<String>,
    pub table: ScoreTable,
    pub visited: VisitedMap,
}

impl XSearchOutcome {
    /// True when every evaluated program was invalid.
    pub fn failed(&self) -> bool {
        self.best_program.is_none()
    }
}

/// Runs the search with a problem evaluator.
pub fn run(tp: &TunableProgram, evaluator: &dyn ProblemEvaluator, cfg: &XSearchConfig) -> XSearchOutcome {
    run_with(tp, &|p: &ConcreteProgram| evaluator.evaluate(p).map_err(|e| e.to_string()), cfg)
}

/// Runs the search with an arbitrary scoring function. Non-finite scores
/// count as invalid.
pub fn run_with<F>(tp: &TunableProgram, score: &F, cfg: &XSearchConfig) -> XSearchOutcome
where
    F: Fn(&ConcreteProgram) -> Result<f64, String> + Sync,
{
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut table = ScoreTable::new(&tp.option_counts());
    let mut visited = VisitedMap::new();
    let mut state = StallState::new(cfg.k_stall);
    let mut best: Option<(f64, DecisionVector)> = None;
    let mut first_error = None;
    let mut rounds = 0;
    let stop = loop {
        if cfg.max_evaluations.is_some_and(|cap| visited.len() >= cap) {
            break StopReason::EvaluationCap;
        }
        let mut batch = match sample_batch(&table, &visited, cfg, &mut rng) {
            Ok(b) => b,
            Err(ExhaustedError) => break StopReason::Exhausted,
        };
        if let Some(cap) = cfg.max_evaluations {
            batch.truncate(cap - visited.len());
        }
        let results: Vec<Result<f64, String>> = batch
            .par_iter()
            .map(|dv| {
                let program = tp.substitute(dv).map_err(|e| e.to_string())?;
                let s = score(&program)?;
                if s.is_finite() {
                    Ok(s)
                } else {
                    Err(format!("non-finite score {s}"))
                }
            })
            .collect();
        let mut scored = Vec::with_capacity(batch.len());
        for (dv, r) in batch.into_iter().zip(results) {
            match r {
                Ok(s) => {
                    if best.as_ref().is_none_or(|(b, _)| s > *b) {
                        best = Some((s, dv.clone()));
                    }
                    scored.push((dv, Some(s)));
                }
                Err(e) => {
                    first_error.get_or_insert(e);
                    scored.push((dv, None));
                }
            }
        }
        rounds += 1;
        let signal = apply_scores(&scored, &mut table, &mut visited, &mut state);
        tracing::debug!(target: "xsearch", round = rounds, best = state.best, evaluations = visited.len(), "round");
        if signal == StallSignal::Terminate {
            break StopReason::Stalled;
        }
    };
    let (best_score, best_program, compacted) = match best {
        Some((s, dv)) => {
            let kept: Vec<DecisionVector> = visited.top_k(cfg.top_k).into_iter().map(|(dv, _)| dv).collect();
            let program = tp.substitute(&dv).expect("visited vectors are in range");
            let compacted = tp.compact(&kept).expect("visited vectors are in range");
            (s, Some(program), Some(compacted))
        }
        None => (MIN_SCORE, None, None),
    };
    XSearchOutcome { best_score, best_program, compacted, evaluations_used: visited.len(), rounds, stop, first_error, table, visited }
}
