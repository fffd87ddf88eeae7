//! Independent sets in strong powers of odd cycles.

use super::{check_arity, finite_priority, greedy_order, ProblemError, ProblemEvaluator};
use crate::priolang::{ConcreteProgram, Value};

/// Exact search handles at most this many vertices.
pub const ALPHA_VERTEX_LIMIT: usize = 60;

/// Largest vertex count the greedy builder accepts.
pub const MAX_GREEDY_VERTICES: usize = 5_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CycleProductSpec {
    pub m: usize,
    pub n: usize,
}

impl CycleProductSpec {
    pub fn new(m: usize, n: usize) -> Result<Self, ProblemError> {
        if m < 3 || m.is_multiple_of(2) || n == 0 {
            return Err(ProblemError::Params(format!("need odd m >= 3 and n >= 1, got m={m}, n={n}")));
        }
        Ok(Self { m, n })
    }

    pub fn vertex_count(&self) -> Option<usize> {
        self.m.checked_pow(self.n as u32)
    }

    fn decode(&self, mut code: usize, out: &mut [usize]) {
        for i in (0..self.n).rev() {
            out[i] = code % self.m;
            code /= self.m;
        }
    }

    fn encode(&self, v: &[usize]) -> usize {
        v.iter().fold(0, |acc, &d| acc * self.m + d)
    }

    /// All m^n vertices in lexicographic order.
    pub fn vertices(&self) -> Vec<Vec<usize>> {
        let total = self.vertex_count().expect("vertex count overflows");
        (0..total)
            .map(|c| {
                let mut v = vec![0; self.n];
                self.decode(c, &mut v);
                v
            })
            .collect()
    }

    /// Codes of the 3^n - 1 strong-product neighbours of `v` (fewer when m is
    /// small enough that offsets coincide, which cannot happen for m >= 3).
    fn neighbours(&self, v: &[usize], out: &mut Vec<usize>) {
        out.clear();
        let total = 3usize.pow(self.n as u32);
        let mut w = vec![0; self.n];
        for off in 0..total {
            let mut o = off;
            let mut zero = true;
            for i in (0..self.n).rev() {
                let d = o % 3;
                o /= 3;
                if d != 1 {
                    zero = false;
                }
                // d in {0,1,2} stands for offsets -1, 0, +1.
                w[i] = (v[i] + self.m + d - 1) % self.m;
            }
            if !zero {
                out.push(self.encode(&w));
            }
        }
    }
}

pub fn strong_product_adjacent(u: &[usize], v: &[usize], m: usize) -> bool {
    u != v
        && u.len() == v.len()
        && u.iter().zip(v).all(|(&a, &b)| {
            let d = (a + m - b % m) % m;
            d == 0 || d == 1 || d == m - 1
        })
}

/// First adjacent pair (by position), or `None` if the set is independent.
pub fn is_independent(set: &[Vec<usize>], spec: CycleProductSpec) -> Option<(usize, usize)> {
    for i in 0..set.len() {
        for j in (i + 1)..set.len() {
            if set[i] == set[j] || strong_product_adjacent(&set[i], &set[j], spec.m) {
                return Some((i, j));
            }
        }
    }
    None
}

pub fn greedy_independent_set(priority: &ConcreteProgram, spec: CycleProductSpec) -> Result<Vec<Vec<usize>>, ProblemError> {
    check_arity(priority, 3)?;
    let total = spec
        .vertex_count()
        .filter(|&t| t <= MAX_GREEDY_VERTICES)
        .ok_or_else(|| ProblemError::Params(format!("C_{}^{} has too many vertices for the greedy builder", spec.m, spec.n)))?;
    let (mv, nv) = (Value::Num(spec.m as f64), Value::Num(spec.n as f64));
    let mut scores = Vec::with_capacity(total);
    let mut v = vec![0; spec.n];
    for code in 0..total {
        spec.decode(code, &mut v);
        let el = Value::tuple_of_nums(v.iter().map(|&d| d as f64));
        scores.push(finite_priority(priority, vec![el, mv.clone(), nv.clone()])?);
    }
    let mut taken = vec![false; total];
    let mut out = Vec::new();
    let mut nbrs = Vec::new();
    for code in greedy_order(&scores) {
        spec.decode(code, &mut v);
        spec.neighbours(&v, &mut nbrs);
        if nbrs.iter().any(|&c| taken[c]) {
            continue;
        }
        taken[code] = true;
        out.push(v.clone());
    }
    Ok(out)
}

/// Exact independence number by branch and bound over bitmasks, pruning with
/// a greedy clique-cover bound.
pub fn brute_force_alpha(spec: CycleProductSpec) -> Result<usize, ProblemError> {
    let total = spec.vertex_count().unwrap_or(usize::MAX);
    if total > ALPHA_VERTEX_LIMIT {
        return Err(ProblemError::TooLarge { vertices: total, limit: ALPHA_VERTEX_LIMIT });
    }
    let verts = spec.vertices();
    let adj: Vec<u64> = (0..total)
        .map(|i| (0..total).filter(|&j| strong_product_adjacent(&verts[i], &verts[j], spec.m)).fold(0u64, |acc, j| acc | (1 << j)))
        .collect();
    let all = if total == 64 { u64::MAX } else { (1u64 << total) - 1 };
    let mut best = 0;
    mis(all, 0, &adj, &mut best);
    Ok(best)
}

fn clique_cover_bound(mut p: u64, adj: &[u64]) -> usize {
    let mut count = 0;
    while p != 0 {
        let v = p.trailing_zeros() as usize;
        let mut cand = p & adj[v];
        p &= !(1 << v);
        while cand != 0 {
            let u = cand.trailing_zeros() as usize;
            p &= !(1 << u);
            cand &= adj[u];
            cand &= !(1 << u);
        }
        count += 1;
    }
    count
}

fn mis(p: u64, size: usize, adj: &[u64], best: &mut usize) {
    if p == 0 {
        *best = (*best).max(size);
        return;
    }
    if size + (p.count_ones() as usize) <= *best || size + clique_cover_bound(p, adj) <= *best {
        return;
    }
    // Branch on the vertex with the most neighbours left in `p`.
    let mut v = p.trailing_zeros() as usize;
    let mut deg = (adj[v] & p).count_ones();
    let mut rest = p & (p - 1);
    while rest != 0 {
        let u = rest.trailing_zeros() as usize;
        let d = (adj[u] & p).count_ones();
        if d > deg {
            v = u;
            deg = d;
        }
        rest &= rest - 1;
    }
    let bit = 1u64 << v;
    if deg == 0 {
        mis(p & !bit, size + 1, adj, best);
        return;
    }
    mis(p & !bit & !adj[v], size + 1, adj, best);
    mis(p & !bit, size, adj, best);
}

/// Score = size of the greedy independent set.
#[derive(Debug, Clone)]
pub struct ShannonEvaluator {
    pub spec: CycleProductSpec,
}

impl ShannonEvaluator {
    pub fn new(spec: CycleProductSpec) -> Self {
        Self { spec }
    }
}

impl ProblemEvaluator for ShannonEvaluator {
    fn name(&self) -> String {
        format!("shannon(m={}, n={})", self.spec.m, self.spec.n)
    }

    fn arity(&self) -> usize {
        3
    }

    fn evaluate(&self, program: &ConcreteProgram) -> Result<f64, ProblemError> {
        let set = greedy_independent_set(program, self.spec)?;
        if let Some(pair) = is_independent(&set, self.spec) {
            return Err(ProblemError::Verification(format!("greedy output has adjacent members {pair:?}")));
        }
        Ok(set.len() as f64)
    }
}
