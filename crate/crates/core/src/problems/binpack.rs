//! Online bin packing: simulation under a priority function, classic
//! baselines, and the L2 lower bound.

use serde::{Deserialize, Serialize};

use super::{check_arity, finite_priority, ProblemError, ProblemEvaluator};
use crate::priolang::{ConcreteProgram, Value};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinPackInstance {
    pub capacity: u32,
    /// Arrival order.
    pub items: Vec<u32>,
}

impl BinPackInstance {
    pub fn new(capacity: u32, items: Vec<u32>) -> Self {
        Self { capacity, items }
    }

    pub fn check(&self) -> Result<(), ProblemError> {
        if self.capacity == 0 {
            return Err(ProblemError::Params("bin capacity must be positive".into()));
        }
        if let Some(&item) = self.items.iter().find(|&&i| i > self.capacity || i == 0) {
            if item == 0 {
                return Err(ProblemError::Params("item sizes must be positive".into()));
            }
            return Err(ProblemError::ItemOversize { item, capacity: self.capacity });
        }
        Ok(())
    }
}

/// Packs items online, choosing among feasible bins with `choose`, which gets
/// the item and the feasible (index, remaining) pairs and returns a position
/// into that list. Returns remaining capacities of all bins.
fn pack_with(
    inst: &BinPackInstance,
    mut choose: impl FnMut(u32, &[(usize, u32)], usize) -> Result<usize, ProblemError>,
) -> Result<Vec<u32>, ProblemError> {
    inst.check()?;
    let mut bins: Vec<u32> = Vec::new();
    let mut feasible: Vec<(usize, u32)> = Vec::new();
    for &item in &inst.items {
        feasible.clear();
        feasible.extend(bins.iter().enumerate().filter(|(_, &r)| r >= item).map(|(i, &r)| (i, r)));
        if feasible.is_empty() {
            bins.push(inst.capacity - item);
            continue;
        }
        let pick = choose(item, &feasible, bins.len())?;
        let (idx, _) = feasible[pick];
        bins[idx] -= item;
    }
    Ok(bins)
}

/// Remaining capacities of the final bins under the priority function.
///
/// The function is called once per feasible bin as
/// `priority(item, bin_remaining, bins_max, num_bins, capacity)`, where
/// `bins_max` is the largest remaining capacity among the feasible bins and
/// `num_bins` is the number of open bins.
pub fn simulate_online_bins(priority: &ConcreteProgram, inst: &BinPackInstance) -> Result<Vec<u32>, ProblemError> {
    check_arity(priority, 5)?;
    let cap = Value::Num(inst.capacity as f64);
    pack_with(inst, |item, feasible, open| {
        let bins_max = feasible.iter().map(|&(_, r)| r).max().unwrap_or(0);
        let mut best = 0;
        let mut best_score = f64::NEG_INFINITY;
        for (pos, &(_, r)) in feasible.iter().enumerate() {
            let args =
                vec![Value::Num(item as f64), Value::Num(r as f64), Value::Num(bins_max as f64), Value::Num(open as f64), cap.clone()];
            let s = finite_priority(priority, args)?;
            if pos == 0 || s > best_score {
                best = pos;
                best_score = s;
            }
        }
        Ok(best)
    })
}

pub fn simulate_online(priority: &ConcreteProgram, inst: &BinPackInstance) -> Result<usize, ProblemError> {
    simulate_online_bins(priority, inst).map(|b| b.len())
}

pub fn first_fit(inst: &BinPackInstance) -> Result<usize, ProblemError> {
    pack_with(inst, |_, _, _| Ok(0)).map(|b| b.len())
}

/// Tightest feasible bin, ties to the lowest index.
pub fn best_fit(inst: &BinPackInstance) -> Result<usize, ProblemError> {
    pack_with(inst, |_, feasible, _| {
        let mut best = 0;
        for (pos, &(_, r)) in feasible.iter().enumerate() {
            if r < feasible[best].1 {
                best = pos;
            }
        }
        Ok(best)
    })
    .map(|b| b.len())
}

fn ceil_div(a: u64, b: u64) -> u64 {
    a.div_ceil(b)
}

/// Martello-Toth L2 lower bound on the optimal offline bin count.
pub fn l2_lower_bound(inst: &BinPackInstance) -> Result<u64, ProblemError> {
    inst.check()?;
    let c = inst.capacity as u64;
    let items: Vec<u64> = inst.items.iter().map(|&w| w as u64).collect();
    let total: u64 = items.iter().sum();
    let mut best = ceil_div(total, c);
    let mut thresholds: Vec<u64> = items.iter().copied().filter(|&w| 2 * w <= c).collect();
    thresholds.push(0);
    thresholds.sort_unstable();
    thresholds.dedup();
    for k in thresholds {
        let (mut n1, mut n2, mut s2, mut s3) = (0u64, 0u64, 0u64, 0u64);
        for &w in &items {
            if w > c - k {
                n1 += 1;
            } else if 2 * w > c {
                n2 += 1;
                s2 += w;
            } else if w >= k {
                s3 += w;
            }
        }
        let free = n2 * c - s2;
        let extra = if s3 > free { ceil_div(s3 - free, c) } else { 0 };
        best = best.max(n1 + n2 + extra);
    }
    Ok(best)
}

/// Relative excess of used bins over the bounds: (sum used - sum bounds) / sum bounds.
pub fn excess_score(results: &[u64], bounds: &[u64]) -> Result<f64, ProblemError> {
    if results.len() != bounds.len() {
        return Err(ProblemError::Params(format!("{} results but {} bounds", results.len(), bounds.len())));
    }
    let sb: u64 = bounds.iter().sum();
    if sb == 0 {
        return Err(ProblemError::ZeroBound);
    }
    let sr: u64 = results.iter().sum();
    Ok((sr as f64 - sb as f64) / sb as f64)
}

/// Scores a policy by the negated excess over L2 across a fixed dataset.
#[derive(Debug, Clone)]
pub struct BinPackEvaluator {
    pub instances: Vec<BinPackInstance>,
    pub bounds: Vec<u64>,
}

impl BinPackEvaluator {
    pub fn new(instances: Vec<BinPackInstance>) -> Result<Self, ProblemError> {
        if instances.is_empty() {
            return Err(ProblemError::Params("empty bin-packing dataset".into()));
        }
        let bounds = instances.iter().map(l2_lower_bound).collect::<Result<Vec<_>, _>>()?;
        Ok(Self { instances, bounds })
    }

    pub fn bins_used(&self, program: &ConcreteProgram) -> Result<Vec<u64>, ProblemError> {
        self.instances.iter().map(|inst| simulate_online(program, inst).map(|b| b as u64)).collect()
    }
}

impl ProblemEvaluator for BinPackEvaluator {
    fn name(&self) -> String {
        format!("binpack({} instances)", self.instances.len())
    }

    fn arity(&self) -> usize {
        5
    }

    fn evaluate(&self, program: &ConcreteProgram) -> Result<f64, ProblemError> {
        let used = self.bins_used(program)?;
        Ok(-excess_score(&used, &self.bounds)?)
    }
}
