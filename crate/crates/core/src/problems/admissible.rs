//! Constant-weight admissible sets in {0,1,2}^n.

use std::sync::Arc;

use super::capset::F3Vector;
use super::{check_arity, finite_priority, greedy_order, ProblemError, ProblemEvaluator};
use crate::priolang::{ConcreteProgram, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AdmissibleParams {
    pub n: usize,
    pub w: usize,
}

impl AdmissibleParams {
    pub fn new(n: usize, w: usize) -> Result<Self, ProblemError> {
        if n == 0 || w > n {
            return Err(ProblemError::Params(format!("need 0 <= w <= n and n >= 1, got n={n}, w={w}")));
        }
        Ok(Self { n, w })
    }
}

/// Condition every triple of distinct members must satisfy.
pub trait TriplePredicate: Send + Sync {
    fn holds(&self, a: &[u8], b: &[u8], c: &[u8]) -> bool;
}

/// Default rule: some coordinate shows the three values 0, 1, 2.
#[derive(Debug, Clone, Copy, Default)]
pub struct DistinctCoordinate;

impl TriplePredicate for DistinctCoordinate {
    fn holds(&self, a: &[u8], b: &[u8], c: &[u8]) -> bool {
        (0..a.len()).any(|i| a[i] != b[i] && b[i] != c[i] && a[i] != c[i])
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AdmissibleViolation {
    /// Member at this position does not have exactly `w` nonzero entries.
    Weight { index: usize, weight: usize },
    /// Members at these positions fail the triple predicate.
    Triple(usize, usize, usize),
}

fn weight(v: &[u8]) -> usize {
    v.iter().filter(|&&d| d != 0).count()
}

/// Vectors with exactly `w` nonzero entries, lexicographic.
pub fn candidates(p: AdmissibleParams) -> Vec<F3Vector> {
    let mut out = Vec::new();
    let mut cur = vec![0u8; p.n];
    fn rec(pos: usize, left: usize, p: AdmissibleParams, cur: &mut Vec<u8>, out: &mut Vec<F3Vector>) {
        if pos == p.n {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let remaining = p.n - pos;
        for d in 0..3u8 {
            let need = if d == 0 { left } else { left.wrapping_sub(1) };
            if (d != 0 && left == 0) || need > remaining - 1 {
                continue;
            }
            cur[pos] = d;
            rec(pos + 1, need, p, cur, out);
        }
        cur[pos] = 0;
    }
    rec(0, p.w, p, &mut cur, &mut out);
    out
}

pub fn is_admissible(set: &[F3Vector], p: AdmissibleParams) -> Result<Option<AdmissibleViolation>, ProblemError> {
    is_admissible_with(set, p, &DistinctCoordinate)
}

pub fn is_admissible_with(
    set: &[F3Vector],
    p: AdmissibleParams,
    pred: &dyn TriplePredicate,
) -> Result<Option<AdmissibleViolation>, ProblemError> {
    for (index, v) in set.iter().enumerate() {
        if v.len() != p.n {
            return Err(ProblemError::DimensionMismatch { expected: p.n, got: v.len() });
        }
        let wt = weight(v);
        if wt != p.w || v.iter().any(|&d| d > 2) {
            return Ok(Some(AdmissibleViolation::Weight { index, weight: wt }));
        }
    }
    for i in 0..set.len() {
        for j in (i + 1)..set.len() {
            for k in (j + 1)..set.len() {
                if !pred.holds(&set[i], &set[j], &set[k]) {
                    return Ok(Some(AdmissibleViolation::Triple(i, j, k)));
                }
            }
        }
    }
    Ok(None)
}

pub fn greedy_admissible(priority: &ConcreteProgram, p: AdmissibleParams) -> Result<Vec<F3Vector>, ProblemError> {
    greedy_admissible_with(priority, p, &DistinctCoordinate)
}

pub fn greedy_admissible_with(
    priority: &ConcreteProgram,
    p: AdmissibleParams,
    pred: &dyn TriplePredicate,
) -> Result<Vec<F3Vector>, ProblemError> {
    check_arity(priority, 3)?;
    let cands = candidates(p);
    let (nv, wv) = (Value::Num(p.n as f64), Value::Num(p.w as f64));
    let mut scores = Vec::with_capacity(cands.len());
    for v in &cands {
        let el = Value::tuple_of_nums(v.iter().map(|&d| d as f64));
        scores.push(finite_priority(priority, vec![el, nv.clone(), wv.clone()])?);
    }
    let mut chosen: Vec<usize> = Vec::new();
    'cand: for idx in greedy_order(&scores) {
        let v = &cands[idx];
        for a in 0..chosen.len() {
            for b in (a + 1)..chosen.len() {
                if !pred.holds(&cands[chosen[a]], &cands[chosen[b]], v) {
                    continue 'cand;
                }
            }
        }
        chosen.push(idx);
    }
    Ok(chosen.into_iter().map(|i| cands[i].clone()).collect())
}

/// Score = size of the greedy admissible set.
#[derive(Clone)]
pub struct AdmissibleEvaluator {
    pub params: AdmissibleParams,
    pub predicate: Arc<dyn TriplePredicate>,
}

impl AdmissibleEvaluator {
    pub fn new(params: AdmissibleParams) -> Self {
        Self { params, predicate: Arc::new(DistinctCoordinate) }
    }

    pub fn with_predicate(params: AdmissibleParams, predicate: Arc<dyn TriplePredicate>) -> Self {
        Self { params, predicate }
    }
}

impl ProblemEvaluator for AdmissibleEvaluator {
    fn name(&self) -> String {
        format!("admissible(n={}, w={})", self.params.n, self.params.w)
    }

    fn arity(&self) -> usize {
        3
    }

    fn evaluate(&self, program: &ConcreteProgram) -> Result<f64, ProblemError> {
        let set = greedy_admissible_with(program, self.params, self.predicate.as_ref())?;
        Ok(set.len() as f64)
    }
}
