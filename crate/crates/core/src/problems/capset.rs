//! Cap sets in F_3^n: greedy construction and verification.

use std::collections::HashMap;

use super::{check_arity, finite_priority, greedy_order, ProblemError, ProblemEvaluator};
use crate::priolang::{ConcreteProgram, Value};

pub type F3Vector = Vec<u8>;

/// Largest dimension the greedy builder accepts (3^12 = 531441 candidates).
pub const MAX_CAPSET_DIM: usize = 12;

/// Digits of `code` in base 3, most significant first.
pub(crate) fn decode(mut code: usize, n: usize, out: &mut [u8]) {
    for i in (0..n).rev() {
        out[i] = (code % 3) as u8;
        code /= 3;
    }
}

pub(crate) fn encode(v: &[u8]) -> usize {
    v.iter().fold(0, |acc, &d| acc * 3 + d as usize)
}

/// All 3^n vectors, lexicographic.
pub fn all_vectors(n: usize) -> Vec<F3Vector> {
    let total = 3usize.pow(n as u32);
    (0..total)
        .map(|c| {
            let mut v = vec![0u8; n];
            decode(c, n, &mut v);
            v
        })
        .collect()
}

fn third_point(a: &[u8], b: &[u8], out: &mut [u8]) {
    for i in 0..a.len() {
        out[i] = (6 - a[i] - b[i]) % 3;
    }
}

/// Returns the first three distinct members (by input position) summing to
/// zero mod 3, or `None` when the set is a cap set.
pub fn is_capset(set: &[F3Vector]) -> Result<Option<(usize, usize, usize)>, ProblemError> {
    let Some(first) = set.first() else { return Ok(None) };
    let n = first.len();
    let mut index: HashMap<&[u8], usize> = HashMap::with_capacity(set.len());
    for (i, v) in set.iter().enumerate() {
        if v.len() != n {
            return Err(ProblemError::DimensionMismatch { expected: n, got: v.len() });
        }
        if v.iter().any(|&d| d > 2) {
            return Err(ProblemError::Params(format!("vector {i} has an entry outside {{0,1,2}}")));
        }
        index.entry(v.as_slice()).or_insert(i);
    }
    let mut third = vec![0u8; n];
    let mut best: Option<(usize, usize, usize)> = None;
    for i in 0..set.len() {
        for j in (i + 1)..set.len() {
            if set[i] == set[j] {
                continue;
            }
            third_point(&set[i], &set[j], &mut third);
            if let Some(&k) = index.get(third.as_slice()) {
                let mut t = [i, j, k];
                t.sort_unstable();
                let t = (t[0], t[1], t[2]);
                if best.is_none_or(|b| t < b) {
                    best = Some(t);
                }
            }
        }
        if let Some(b) = best {
            if b.0 <= i {
                break;
            }
        }
    }
    Ok(best)
}

/// Greedy cap: candidates sorted by descending priority, each admitted unless
/// it completes a line with two members already chosen.
pub fn greedy_capset(priority: &ConcreteProgram, n: usize) -> Result<Vec<F3Vector>, ProblemError> {
    if n == 0 || n > MAX_CAPSET_DIM {
        return Err(ProblemError::Params(format!("n must be in 1..={MAX_CAPSET_DIM}, got {n}")));
    }
    check_arity(priority, 2)?;
    let vectors = all_vectors(n);
    let nv = Value::Num(n as f64);
    let mut scores = Vec::with_capacity(vectors.len());
    for v in &vectors {
        let el = Value::tuple_of_nums(v.iter().map(|&d| d as f64));
        scores.push(finite_priority(priority, vec![el, nv.clone()])?);
    }
    Ok(greedy_from_scores(&vectors, &scores))
}

pub(crate) fn greedy_from_scores(vectors: &[F3Vector], scores: &[f64]) -> Vec<F3Vector> {
    let n = vectors.first().map_or(0, Vec::len);
    let mut blocked = vec![false; vectors.len()];
    let mut cap: Vec<usize> = Vec::new();
    let mut third = vec![0u8; n];
    for idx in greedy_order(scores) {
        if blocked[idx] {
            continue;
        }
        for &c in &cap {
            third_point(&vectors[c], &vectors[idx], &mut third);
            blocked[encode(&third)] = true;
        }
        blocked[idx] = true;
        cap.push(idx);
    }
    cap.into_iter().map(|i| vectors[i].clone()).collect()
}

/// Score = size of the greedy cap.
#[derive(Debug, Clone)]
pub struct CapsetEvaluator {
    pub n: usize,
}

impl CapsetEvaluator {
    pub fn new(n: usize) -> Result<Self, ProblemError> {
        if n == 0 || n > MAX_CAPSET_DIM {
            return Err(ProblemError::Params(format!("n must be in 1..={MAX_CAPSET_DIM}, got {n}")));
        }
        Ok(Self { n })
    }
}

impl ProblemEvaluator for CapsetEvaluator {
    fn name(&self) -> String {
        format!("capset(n={})", self.n)
    }

    fn arity(&self) -> usize {
        2
    }

    fn evaluate(&self, program: &ConcreteProgram) -> Result<f64, ProblemError> {
        let cap = greedy_capset(program, self.n)?;
        if let Some(t) = is_capset(&cap)? {
            return Err(ProblemError::Verification(format!("greedy output contains the line {t:?}")));
        }
        Ok(cap.len() as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constant() -> ConcreteProgram {
        ConcreteProgram::parse("def priority(el, n):\n    return 0.0\n").unwrap()
    }

    #[test]
    fn collinear_example_is_rejected() {
        let set = vec![vec![0, 0], vec![1, 1], vec![2, 2]];
        assert_eq!(is_capset(&set).unwrap(), Some((0, 1, 2)));
        let square = vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]];
        assert_eq!(is_capset(&square).unwrap(), None);
        assert_eq!(is_capset(&[]).unwrap(), None);
        assert!(matches!(is_capset(&[vec![0], vec![0, 1]]), Err(ProblemError::DimensionMismatch { .. })));
    }

    #[test]
    fn small_dimensions() {
        assert_eq!(greedy_capset(&constant(), 1).unwrap().len(), 2);
        assert_eq!(greedy_capset(&constant(), 2).unwrap().len(), 4);
    }

    #[test]
    fn encoding_is_lexicographic() {
        let vs = all_vectors(2);
        assert_eq!(vs[0], vec![0, 0]);
        assert_eq!(vs[1], vec![0, 1]);
        assert_eq!(vs[3], vec![1, 0]);
        assert!(vs.iter().enumerate().all(|(i, v)| encode(v) == i));
    }

    #[test]
    fn arity_is_checked() {
        let p = ConcreteProgram::parse("def priority(el):\n    return 0.0\n").unwrap();
        assert!(matches!(greedy_capset(&p, 2), Err(ProblemError::Arity { expected: 2, got: 1 })));
    }
}
