use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spacevolve::progdb::{cluster_probs, kmeans_1d, Database, ProgramEntry, SamplerConfig};

fn entry(source: &str, score: f64, valid: bool) -> ProgramEntry {
    ProgramEntry { id: 0, source: source.into(), score, valid, parent_ids: vec![7], created_round: 3, process_id: 1 }
}

fn db_with(scores: &[f64]) -> Database {
    let mut db = Database::new();
    for (i, &s) in scores.iter().enumerate() {
        db.insert(entry(&format!("def p{i}():\n    return {s}\n"), s, true)).unwrap();
    }
    db
}

fn sse(groups: &[Vec<f64>]) -> f64 {
    groups
        .iter()
        .filter(|g| !g.is_empty())
        .map(|g| {
            let m = g.iter().sum::<f64>() / g.len() as f64;
            g.iter().map(|x| (x - m) * (x - m)).sum::<f64>()
        })
        .sum()
}

/// Minimum within-cluster SSE over every assignment of points to k non-empty groups.
fn optimal_sse(points: &[f64], k: usize) -> f64 {
    let n = points.len();
    let mut best = f64::INFINITY;
    let total = k.pow(n as u32);
    for code in 0..total {
        let mut groups = vec![Vec::new(); k];
        let mut c = code;
        for &p in points {
            groups[c % k].push(p);
            c /= k;
        }
        if groups.iter().any(Vec::is_empty) {
            continue;
        }
        best = best.min(sse(&groups));
    }
    best
}

#[test]
fn partition_examples() {
    assert_eq!(db_with(&[9.0, 8.0, 7.0]).partition(10).unwrap().clusters, vec![vec![0], vec![1], vec![2]]);

    let db = db_with(&[100.0, 10.0, 11.0, 12.0, 50.0, 51.0]);
    let part = db.partition(4).unwrap();
    assert_eq!(part.clusters[0], vec![0]);
    assert_eq!(part.clusters.len(), 4);
    assert_eq!(part.clusters[1], vec![4, 5]);
    let rest = [10.0, 11.0, 12.0, 50.0, 51.0];
    let groups: Vec<Vec<f64>> = part.clusters[1..].iter().map(|c| c.iter().map(|&id| db.get(id).unwrap().score).collect()).collect();
    assert!((sse(&groups) - optimal_sse(&rest, 3)).abs() < 1e-9);
    for w in part.max_scores.windows(2) {
        assert!(w[0] > w[1]);
    }
}

#[test]
fn cluster_probs_examples() {
    let p = cluster_probs(10, 0.5).unwrap();
    assert!((p[0] - 0.5).abs() < 0.005 && (p[1] - 0.25).abs() < 0.005 && (p[2] - 0.125).abs() < 0.005);
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let p3 = cluster_probs(3, 0.5).unwrap();
    for (got, want) in p3.iter().zip([0.5, 0.5 * r, 0.5 * r * r]) {
        assert!((got - want).abs() < 1e-9);
    }
    assert!((p3[1] - 0.309017).abs() < 1e-6 && (p3[2] - 0.190983).abs() < 1e-6);
}

#[test]
fn cluster_zero_frequency() {
    let db = db_with(&(0..10).map(|i| i as f64).collect::<Vec<_>>());
    assert_eq!(db.partition(10).unwrap().clusters.len(), 10);
    let cfg = SamplerConfig { k_ref: 1, ..Default::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let draws = 100_000;
    let top = (0..draws).filter(|_| db.sample_refs(&cfg, &mut rng).unwrap()[0].score == 9.0).count();
    assert!((top as f64 / draws as f64 - 0.5).abs() < 0.01);
}

#[test]
fn persistence_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("db.jsonl");
    let mut db = Database::new();
    db.attach(&path).unwrap();
    db.insert(entry("def priority(el, n):\n    return 'x\\n\"y\"'\n", 1.5, true)).unwrap();
    db.insert(entry("garbage", -1e10, false)).unwrap();
    db.insert(entry("def priority(el, n):\n    return 0.1\n", 0.1, true)).unwrap();
    let loaded = Database::load(&path).unwrap();
    assert_eq!(loaded.entries(), db.entries());
    let copy = dir.path().join("copy.jsonl");
    loaded.persist(&copy).unwrap();
    assert_eq!(std::fs::read(&copy).unwrap(), std::fs::read(&path).unwrap());
    assert_eq!(loaded.best().unwrap().score, 1.5);
    assert!(Database::load(&dir.path().join("missing.jsonl")).unwrap_err().to_string().contains("missing.jsonl"));
}

proptest! {
    #[test]
    fn probs_geometric(k in 1usize..40, p0 in 0.01f64..0.99) {
        let p = cluster_probs(k, p0).unwrap();
        prop_assert_eq!(p.len(), k);
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        if k > 1 {
            prop_assert!((p[0] - p0).abs() < 1e-15);
            let r = p[1] / p[0];
            for w in p.windows(2) {
                prop_assert!((w[1] / w[0] - r).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn partition_properties(scores in prop::collection::vec(0i32..60, 1..30), k in 2usize..8, invalid in prop::collection::vec(any::<bool>(), 30)) {
        let mut db = Database::new();
        for (i, &s) in scores.iter().enumerate() {
            db.insert(entry(&format!("p{i}"), s as f64, !invalid[i])).unwrap();
        }
        match db.partition(k) {
            Err(_) => prop_assert_eq!(db.sampleable_count(), 0),
            Ok(part) => {
                let mut ids: Vec<u64> = part.clusters.concat();
                ids.sort();
                let mut valid: Vec<u64> = db.entries().iter().filter(|e| e.valid).map(|e| e.id).collect();
                valid.sort();
                prop_assert_eq!(ids, valid);
                let top = db.best().unwrap().score;
                prop_assert!(part.clusters[0].iter().all(|&id| db.get(id).unwrap().score == top));
                prop_assert!(part.clusters.len() <= k);
                for w in part.max_scores.windows(2) {
                    prop_assert!(w[0] > w[1]);
                }
                let mut rng = ChaCha8Rng::seed_from_u64(1);
                for r in db.sample_refs(&SamplerConfig { k_cluster: k, ..Default::default() }, &mut rng).unwrap() {
                    prop_assert!(r.valid);
                }
            }
        }
    }

    #[test]
    fn kmeans_near_optimal_for_two_clusters(points in prop::collection::btree_set(0i32..1000, 3..9)) {
        let pts: Vec<f64> = points.iter().map(|&p| p as f64).collect();
        let km = kmeans_1d(&pts, 2, 0);
        prop_assert!(km.inertia <= optimal_sse(&pts, 2) * 1.5 + 1e-9);
    }
}
