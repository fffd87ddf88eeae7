//! Cap-set capacity lower bound from an admissible-set size.

use serde::Serialize;

pub const A0: f64 = 12.0;
pub const A1: f64 = 112.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CapacityBound {
    pub c: f64,
    /// Dimension 6·m·n of the resulting cap set.
    pub dimension: u64,
    pub m: u32,
}

/// C = (s · b0^(n-w) · b1^w)^(1/N) with b0 = a0·m·a1^(m-1), b1 = a1^m and
/// N = 6·m·n, evaluated in log space.
pub fn capacity_lower_bound(s: f64, n: u32, w: u32, m: u32) -> CapacityBound {
    let mf = m as f64;
    let ln_b0 = A0.ln() + mf.ln() + (mf - 1.0) * A1.ln();
    let ln_b1 = mf * A1.ln();
    let dimension = 6 * m as u64 * n as u64;
    let ln_size = s.ln() + (n as f64 - w as f64) * ln_b0 + w as f64 * ln_b1;
    CapacityBound { c: (ln_size / dimension as f64).exp(), dimension, m }
}

/// Best bound over m in 1..=12.
pub fn capacity_lower_bound_auto(s: f64, n: u32, w: u32) -> CapacityBound {
    (1..=12)
        .map(|m| capacity_lower_bound(s, n, w, m))
        .fold(None, |best: Option<CapacityBound>, b| match best {
            Some(x) if x.c >= b.c => Some(x),
            _ => Some(b),
        })
        .unwrap()
}
