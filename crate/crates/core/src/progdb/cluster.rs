//! Score clustering and cluster sampling probabilities.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::DbError;

/// Result of a 1-D K-means run.
#[derive(Debug, Clone, PartialEq)]
pub struct KMeans1d {
    pub centers: Vec<f64>,
    /// Cluster index per input point.
    pub labels: Vec<usize>,
    /// Sum of squared distances to assigned centers.
    pub inertia: f64,
}

const KMEANS_ITERS: usize = 100;
const KMEANS_INITS: usize = 10;

/// Lloyd's algorithm on scalars with K-means++ seeding. Best of ten seeded
/// initializations drawn from one ChaCha8 stream.
pub fn kmeans_1d(points: &[f64], k: usize, seed: u64) -> KMeans1d {
    assert!(k >= 1 && k <= points.len(), "need 1 <= k <= number of points");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<KMeans1d> = None;
    for _ in 0..KMEANS_INITS {
        let run = lloyd(points, plus_plus(points, k, &mut rng));
        if best.as_ref().is_none_or(|b| run.inertia < b.inertia) {
            best = Some(run);
        }
    }
    best.unwrap()
}

fn plus_plus(points: &[f64], k: usize, rng: &mut impl Rng) -> Vec<f64> {
    let mut centers = vec![points[rng.random_range(0..points.len())]];
    while centers.len() < k {
        let d2: Vec<f64> = points.iter().map(|&x| centers.iter().map(|&c| (x - c) * (x - c)).fold(f64::INFINITY, f64::min)).collect();
        let total: f64 = d2.iter().sum();
        if total <= 0.0 {
            // Remaining points all coincide with a center.
            let next = points.iter().copied().find(|x| !centers.contains(x)).unwrap_or(centers[0]);
            centers.push(next);
            continue;
        }
        let mut u = rng.random::<f64>() * total;
        let mut pick = points.len() - 1;
        for (i, &w) in d2.iter().enumerate() {
            if u < w {
                pick = i;
                break;
            }
            u -= w;
        }
        centers.push(points[pick]);
    }
    centers
}

fn nearest(x: f64, centers: &[f64]) -> usize {
    let mut best = 0;
    for (j, &c) in centers.iter().enumerate().skip(1) {
        if (x - c).abs() < (x - centers[best]).abs() {
            best = j;
        }
    }
    best
}

fn lloyd(points: &[f64], mut centers: Vec<f64>) -> KMeans1d {
    let mut labels = vec![0; points.len()];
    for _ in 0..KMEANS_ITERS {
        let new_labels: Vec<usize> = points.iter().map(|&x| nearest(x, &centers)).collect();
        let mut sums = vec![0.0; centers.len()];
        let mut counts = vec![0usize; centers.len()];
        for (&x, &l) in points.iter().zip(&new_labels) {
            sums[l] += x;
            counts[l] += 1;
        }
        let mut moved = new_labels != labels;
        for j in 0..centers.len() {
            if counts[j] > 0 {
                let c = sums[j] / counts[j] as f64;
                moved |= c != centers[j];
                centers[j] = c;
            }
        }
        labels = new_labels;
        if !moved {
            break;
        }
    }
    let inertia = points.iter().zip(&labels).map(|(&x, &l)| (x - centers[l]) * (x - centers[l])).sum();
    KMeans1d { centers, labels, inertia }
}

/// Groups distinct scores. Returns clusters of distinct scores ordered by
/// descending maximum; the first holds only the top score.
pub fn cluster_scores(distinct_desc: &[f64], k_cluster: usize) -> Vec<Vec<f64>> {
    if distinct_desc.len() < k_cluster || k_cluster < 2 {
        return distinct_desc.iter().map(|&s| vec![s]).collect();
    }
    let rest = &distinct_desc[1..];
    let km = kmeans_1d(rest, k_cluster - 1, 0);
    let mut groups: Vec<Vec<f64>> = vec![Vec::new(); k_cluster - 1];
    for (&s, &l) in rest.iter().zip(&km.labels) {
        groups[l].push(s);
    }
    groups.retain(|g| !g.is_empty());
    // Members are already descending, so g[0] is the max.
    groups.sort_by(|a, b| b[0].total_cmp(&a[0]));
    let mut out = vec![vec![distinct_desc[0]]];
    out.extend(groups);
    out
}

/// p[i] = p0 · r^i with Σ p = 1, r found by bisection.
pub fn cluster_probs(k: usize, p0: f64) -> Result<Vec<f64>, DbError> {
    if k == 0 {
        return Err(DbError::Infeasible { k, p0 });
    }
    if k == 1 {
        return Ok(vec![1.0]);
    }
    if !(p0 > 0.0 && p0 < 1.0) {
        return Err(DbError::Infeasible { k, p0 });
    }
    let total = |r: f64| -> f64 {
        let mut acc = 0.0;
        let mut term = p0;
        for _ in 0..k {
            acc += term;
            term *= r;
        }
        acc
    };
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while total(hi) < 1.0 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let f = total(mid) - 1.0;
        if f.abs() <= 1e-15 {
            lo = mid;
            hi = mid;
            break;
        }
        if f < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let r = 0.5 * (lo + hi);
    let mut p = Vec::with_capacity(k);
    let mut term = p0;
    for _ in 0..k {
        p.push(term);
        term *= r;
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn probs_small_cases() {
        assert_eq!(cluster_probs(1, 0.5).unwrap(), vec![1.0]);
        let two = cluster_probs(2, 0.5).unwrap();
        assert!((two[0] - 0.5).abs() < 1e-12 && (two[1] - 0.5).abs() < 1e-12);
        assert!(cluster_probs(3, 1.0).is_err());
        assert!(cluster_probs(3, 0.0).is_err());
        assert_eq!(cluster_probs(1, 1.5).unwrap(), vec![1.0]);
    }

    #[test]
    fn kmeans_separates_obvious_groups() {
        let pts = [1.0, 1.1, 0.9, 10.0, 10.2, 20.0];
        let km = kmeans_1d(&pts, 3, 0);
        assert_eq!(km.labels[0], km.labels[1]);
        assert_eq!(km.labels[0], km.labels[2]);
        assert_eq!(km.labels[3], km.labels[4]);
        assert_ne!(km.labels[0], km.labels[3]);
        assert_ne!(km.labels[5], km.labels[3]);
    }

    #[test]
    fn fewer_distinct_than_k() {
        assert_eq!(cluster_scores(&[9.0, 8.0, 7.0], 10), vec![vec![9.0], vec![8.0], vec![7.0]]);
    }
}
