//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any gating criterion fails.

use std::collections::HashMap;
use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use spacevolve::corpus;
use spacevolve::priolang::{ConcreteProgram, TunableProgram};
use spacevolve::problems::binpack::{best_fit, excess_score, first_fit, l2_lower_bound, simulate_online, BinPackInstance};
use spacevolve::problems::capset::{greedy_capset, is_capset};
use spacevolve::problems::cycle::{brute_force_alpha, greedy_independent_set, is_independent, CycleProductSpec};
use spacevolve::problems::toy::ToyEvaluator;
use spacevolve::progdb::cluster::cluster_probs;
use spacevolve::progdb::Database;
use spacevolve::xsearch::{self, XSearchConfig, MIN_SCORE};

type Check = Result<(), String>;
type Criterion = (&'static str, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if let false = $cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_spacevolve"))
}

fn run_cli(args: &[&str]) -> Result<String, String> {
    let out = bin().args(args).output().map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("spacevolve {args:?} exited {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr)));
    }
    Ok(String::from_utf8_lossy(&out.stdout).into_owned())
}

fn within(limit: Duration, start: Instant, what: &str) -> Check {
    let took = start.elapsed();
    ensure!(took <= limit, "{what} took {took:?}, limit {limit:?}");
    Ok(())
}

// 1 -------------------------------------------------------------------------

fn field(out: &str, key: &str) -> Result<f64, String> {
    out.lines().find_map(|l| l.strip_prefix(key)).and_then(|v| v.trim().parse().ok()).ok_or_else(|| format!("no `{key}` in output {out:?}"))
}

fn bound_formula() -> Check {
    let cases: [(&str, &str, &str, f64, Option<f64>); 3] =
        [("237984", "24", "17", 2.2202, Some(4.0)), ("1270863", "27", "19", 2.2203, None), ("3003", "15", "10", 2.2194, None)];
    for (s, n, w, c, m) in cases {
        let start = Instant::now();
        let out = run_cli(&["bound", "--s", s, "--n", n, "--w", w, "--m", "auto"])?;
        within(Duration::from_secs(1), start, "bound")?;
        let got = field(&out, "C =")?;
        ensure!((got - c).abs() <= 1e-4, "s={s}: C={got}, expected {c}");
        if let Some(m) = m {
            ensure!(field(&out, "m =")? == m, "s={s}: m={}, expected {m}", field(&out, "m =")?);
        }
        // Independent evaluation: best over m of the product of per-block roots.
        let (s, n, w): (f64, f64, f64) = (s.parse().unwrap(), n.parse().unwrap(), w.parse().unwrap());
        let oracle = (1..=12)
            .map(|m| {
                let m = m as f64;
                let dim = 6.0 * m * n;
                let b0 = 12.0 * m * 112f64.powf(m - 1.0);
                let b1 = 112f64.powf(m);
                (s.powf(1.0 / dim) * b0.powf((n - w) / dim) * b1.powf(w / dim), m)
            })
            .fold((0.0, 0.0), |a, b| if b.0 > a.0 { b } else { a });
        ensure!((got - oracle.0).abs() <= 1e-5, "C={got}, direct evaluation {}", oracle.0);
        ensure!(field(&out, "m =")? == oracle.1, "m differs from direct evaluation {}", oracle.1);
    }
    Ok(())
}

// 2 -------------------------------------------------------------------------

fn capset_replay() -> Check {
    for name in ["program4", "program5", "program6"] {
        let p = corpus::get(name).ok_or(format!("{name} missing"))?;
        let start = Instant::now();
        let out = run_cli(&["evaluate", "--problem", "capset", "--n", "8", "--corpus", name])?;
        within(Duration::from_secs(30), start, name)?;
        ensure!(out.trim() == "512", "{name}: evaluate printed {out:?}");
        let prog = ConcreteProgram::parse(p.source).map_err(|e| e.to_string())?;
        let cap = greedy_capset(&prog, 8).map_err(|e| e.to_string())?;
        ensure!(cap.len() == 512, "{name}: greedy gave {}", cap.len());
        ensure!(is_capset(&cap).map_err(|e| e.to_string())?.is_none(), "{name}: set is not a cap");
        ensure!(naive_is_cap(&cap), "{name}: oracle found a line");
    }
    Ok(())
}

/// Line check by sorting codes: a line {a, b, c} has c = -(a + b).
fn naive_is_cap(set: &[Vec<u8>]) -> bool {
    let code = |v: &[u8]| v.iter().fold(0usize, |acc, &d| acc * 3 + d as usize);
    let members: std::collections::HashSet<usize> = set.iter().map(|v| code(v)).collect();
    if members.len() != set.len() {
        return false;
    }
    for i in 0..set.len() {
        for j in (i + 1)..set.len() {
            let third: Vec<u8> = set[i].iter().zip(&set[j]).map(|(&a, &b)| (6 - a - b) % 3).collect();
            if members.contains(&code(&third)) {
                return false;
            }
        }
    }
    true
}

// 3 -------------------------------------------------------------------------

fn cluster_probabilities() -> Check {
    let p = cluster_probs(10, 0.5).map_err(|e| e.to_string())?;
    ensure!(p.len() == 10, "{} entries", p.len());
    for (got, want) in p.iter().zip([0.5, 0.25, 0.125]) {
        ensure!((got - want).abs() <= 0.005, "probs {p:?}");
    }
    ensure!((p.iter().sum::<f64>() - 1.0).abs() <= 1e-9, "sum {}", p.iter().sum::<f64>());
    let r = p[1] / p[0];
    for w in p.windows(2) {
        ensure!((w[1] / w[0] - r).abs() <= 1e-9, "ratio drift in {p:?}");
    }
    Ok(())
}

// 4 -------------------------------------------------------------------------

/// Maximum independent set by plain include/exclude recursion.
fn mis(adj: &[u64], candidates: u64) -> usize {
    if candidates == 0 {
        return 0;
    }
    let v = candidates.trailing_zeros() as usize;
    let without = mis(adj, candidates & !(1 << v));
    let with = 1 + mis(adj, candidates & !(1 << v) & !adj[v]);
    without.max(with)
}

fn cycle_power_vertices(m: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out.into_iter().flat_map(|v| (0..m).map(move |d| [v.clone(), vec![d]].concat())).collect();
    }
    out
}

fn alpha_oracle(m: usize, n: usize) -> usize {
    let verts = cycle_power_vertices(m, n);
    let close = |a: usize, b: usize| a == b || (a + 1) % m == b || (b + 1) % m == a;
    let adj: Vec<u64> = verts
        .iter()
        .enumerate()
        .map(|(i, u)| {
            verts
                .iter()
                .enumerate()
                .filter(|&(j, v)| j != i && u.iter().zip(v).all(|(&a, &b)| close(a, b)))
                .fold(0u64, |acc, (j, _)| acc | 1 << j)
        })
        .collect();
    mis(&adj, (1u64 << verts.len()) - 1)
}

fn fuzzed_priority(rng: &mut ChaCha8Rng, args: &str) -> String {
    let (a, b, c) = (rng.random_range(1..7), rng.random_range(0..5), rng.random_range(2..6));
    let w: f64 = rng.random_range(-2.0..2.0);
    let d: f64 = rng.random_range(-1.0..1.0);
    format!(
        "def priority({args}):\n    s = 0.0\n    for i in range(len(el)):\n        s = s + ((el[i] * {a} + i * {b}) % {c}) * {w:.3}\n    return s + {d:.3} * el[0]\n"
    )
}

fn cycle_oracles() -> Check {
    let start = Instant::now();
    let graphs = [(5, 1, 2), (5, 2, 5), (7, 1, 3)];
    for (m, n, expected) in graphs {
        let oracle = alpha_oracle(m, n);
        ensure!(oracle == expected, "oracle alpha(C_{m}^{n}) = {oracle}");
        let spec = CycleProductSpec::new(m, n).map_err(|e| e.to_string())?;
        let got = brute_force_alpha(spec).map_err(|e| e.to_string())?;
        ensure!(got == oracle, "brute_force_alpha(C_{m}^{n}) = {got}, oracle {oracle}");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for i in 0..200 {
        let (m, n, alpha) = graphs[i % graphs.len()];
        let spec = CycleProductSpec::new(m, n).unwrap();
        let src = fuzzed_priority(&mut rng, "el, m, n");
        let prog = ConcreteProgram::parse(&src).map_err(|e| format!("{e}\n{src}"))?;
        let set = greedy_independent_set(&prog, spec).map_err(|e| e.to_string())?;
        ensure!(set.len() <= alpha, "greedy {} > alpha {alpha} on C_{m}^{n}", set.len());
        ensure!(is_independent(&set, spec).is_none(), "greedy output not independent on C_{m}^{n}");
    }
    within(Duration::from_secs(60), start, "cycle oracles")
}

// 5 -------------------------------------------------------------------------

/// Largest cap in F_3^n by branch and bound. Translation invariance lets the
/// search fix the origin as a member.
fn max_cap(n: usize) -> usize {
    let total = 3usize.pow(n as u32);
    let digits = |mut c: usize| {
        let mut v = vec![0u8; n];
        for d in v.iter_mut().rev() {
            *d = (c % 3) as u8;
            c /= 3;
        }
        v
    };
    let code = |v: &[u8]| v.iter().fold(0usize, |acc, &d| acc * 3 + d as usize);
    let third: Vec<Vec<usize>> = (0..total)
        .map(|a| {
            let va = digits(a);
            (0..total)
                .map(|b| {
                    let vb = digits(b);
                    code(&va.iter().zip(&vb).map(|(&x, &y)| (6 - x - y) % 3).collect::<Vec<_>>())
                })
                .collect()
        })
        .collect();

    fn go(chosen: &mut Vec<usize>, allowed: Vec<usize>, third: &[Vec<usize>], best: &mut usize) {
        *best = (*best).max(chosen.len());
        if chosen.len() + allowed.len() <= *best {
            return;
        }
        for (k, &p) in allowed.iter().enumerate() {
            if chosen.len() + allowed.len() - k <= *best {
                return;
            }
            let rest: Vec<usize> = allowed[k + 1..].iter().copied().filter(|&q| chosen.iter().all(|&c| third[c][p] != q)).collect();
            chosen.push(p);
            go(chosen, rest, third, best);
            chosen.pop();
        }
    }
    let mut best = 0;
    let allowed: Vec<usize> = (1..total).collect();
    go(&mut vec![0], allowed, &third, &mut best);
    best
}

fn capset_oracles() -> Check {
    for (n, expected) in [(1, 2), (2, 4), (3, 9)] {
        let oracle = max_cap(n);
        ensure!(oracle == expected, "oracle max cap in dimension {n} = {oracle}");
        let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
        for _ in 0..50 {
            let src = fuzzed_priority(&mut rng, "el, n");
            let prog = ConcreteProgram::parse(&src).map_err(|e| format!("{e}\n{src}"))?;
            let cap = greedy_capset(&prog, n).map_err(|e| e.to_string())?;
            ensure!(cap.len() <= oracle, "greedy {} > max {oracle} at n={n}", cap.len());
            ensure!(naive_is_cap(&cap), "greedy output has a line at n={n}");
            ensure!(is_capset(&cap).unwrap().is_none(), "is_capset rejects a cap at n={n}");
        }
    }
    for line in [[[0, 0], [1, 1], [2, 2]], [[0, 0], [0, 1], [0, 2]], [[0, 1], [1, 2], [2, 0]]] {
        let set: Vec<Vec<u8>> = line.iter().map(|v| v.to_vec()).collect();
        ensure!(is_capset(&set).unwrap().is_some(), "collinear {set:?} accepted");
    }
    let square: Vec<Vec<u8>> = vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]];
    ensure!(is_capset(&square).unwrap().is_none(), "four-point cap rejected");
    Ok(())
}

// 6 -------------------------------------------------------------------------

fn xsearch_convergence() -> Check {
    let src = "def priority():\n    return tunable([1, 2, 3]) + tunable([1, 2, 3]) + tunable([1, 2, 3])\n";
    let tp = TunableProgram::from_text(src).map_err(|e| e.to_string())?;
    for seed in 0..100 {
        let out = xsearch::run(&tp, &ToyEvaluator, &XSearchConfig { seed, ..Default::default() });
        ensure!(out.best_score == 9.0, "seed {seed}: best {}", out.best_score);
        ensure!(out.evaluations_used <= 27, "seed {seed}: {} evaluations", out.evaluations_used);
        ensure!(out.visited.len() == out.evaluations_used, "seed {seed}: visited {} vs {}", out.visited.len(), out.evaluations_used);
        let mut expect: HashMap<(usize, usize), f64> = HashMap::new();
        let mut seen = std::collections::HashSet::new();
        for (dv, score) in out.visited.iter() {
            ensure!(seen.insert(dv.clone()), "seed {seed}: {dv:?} evaluated twice");
            let direct: usize = dv.0.iter().map(|j| j + 1).sum();
            ensure!(score == Some(direct as f64), "seed {seed}: {dv:?} scored {score:?}");
            for (s, &j) in dv.0.iter().enumerate() {
                let e = expect.entry((s, j)).or_insert(MIN_SCORE);
                *e = e.max(direct as f64);
            }
        }
        for s in 0..3 {
            for j in 0..3 {
                let want = expect.get(&(s, j)).copied().unwrap_or(MIN_SCORE);
                ensure!(out.table.get(s, j) == want, "seed {seed}: table[{s}][{j}] = {}, expected {want}", out.table.get(s, j));
            }
        }
    }
    Ok(())
}

// 7 -------------------------------------------------------------------------

/// Optimal bin count by depth-first assignment, largest items first.
fn optimal_bins(cap: u32, items: &[u32]) -> usize {
    fn go(items: &[u32], loads: &mut Vec<u32>, cap: u32, best: &mut usize) {
        if loads.len() >= *best {
            return;
        }
        let Some((&item, rest)) = items.split_first() else {
            *best = loads.len();
            return;
        };
        for i in 0..loads.len() {
            if loads[i] + item <= cap && !loads[..i].contains(&loads[i]) {
                loads[i] += item;
                go(rest, loads, cap, best);
                loads[i] -= item;
            }
        }
        loads.push(item);
        go(rest, loads, cap, best);
        loads.pop();
    }
    let mut sorted = items.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let mut best = sorted.len() + 1;
    go(&sorted, &mut Vec::new(), cap, &mut best);
    best.min(sorted.len())
}

fn l2_soundness() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..1000 {
        let cap = rng.random_range(5..=60);
        let n = rng.random_range(1..=10);
        let items: Vec<u32> = (0..n).map(|_| rng.random_range(1..=cap)).collect();
        let inst = BinPackInstance::new(cap, items.clone());
        let l2 = l2_lower_bound(&inst).map_err(|e| e.to_string())?;
        let opt = optimal_bins(cap, &items);
        ensure!(l2 as usize <= opt, "L2 {l2} > optimum {opt} for cap {cap} items {items:?}");
    }
    for _ in 0..100 {
        let cap = rng.random_range(50..=200);
        let n = rng.random_range(20..=300);
        let items: Vec<u32> = (0..n).map(|_| rng.random_range(1..=cap)).collect();
        let inst = BinPackInstance::new(cap, items);
        let l2 = l2_lower_bound(&inst).unwrap() as usize;
        let (ff, bf) = (first_fit(&inst).unwrap(), best_fit(&inst).unwrap());
        ensure!(l2 <= ff.min(bf), "L2 {l2} above ff {ff} / bf {bf}");
    }
    within(Duration::from_secs(60), start, "L2 checks")
}

// 8 -------------------------------------------------------------------------

fn binpack_baselines() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let or_path = dir.path().join("or.json");
    let wb_path = dir.path().join("weibull.json");
    run_cli(&["gen-data", "--dataset", "or", "--seed", "3", "--out", or_path.to_str().unwrap()])?;
    run_cli(&["gen-data", "--dataset", "weibull", "--seed", "3", "--out", wb_path.to_str().unwrap()])?;
    let load = |p: &Path| -> Result<Vec<BinPackInstance>, String> {
        serde_json::from_str(&fs::read_to_string(p).map_err(|e| e.to_string())?).map_err(|e| e.to_string())
    };
    let or = load(&or_path)?;
    ensure!(or.len() == 20, "{} OR instances", or.len());
    for inst in &or {
        ensure!(inst.capacity == 150, "OR capacity {}", inst.capacity);
        ensure!(inst.items.len() == 120, "OR instance with {} items", inst.items.len());
        ensure!(inst.items.iter().all(|&w| (20..=100).contains(&w)), "OR item out of 20..=100");
    }
    let all: Vec<u32> = or.iter().flat_map(|i| i.items.iter().copied()).collect();
    ensure!(all.contains(&20) && all.contains(&100), "OR range endpoints never drawn");
    let wb = load(&wb_path)?;
    ensure!(wb.len() == 5, "{} Weibull instances", wb.len());
    let mut sum = 0.0;
    let mut count = 0.0;
    for inst in &wb {
        ensure!(inst.capacity == 100, "Weibull capacity {}", inst.capacity);
        ensure!(inst.items.len() == 5000, "Weibull instance with {} items", inst.items.len());
        ensure!(inst.items.iter().all(|&w| (1..=100).contains(&w)), "Weibull item out of 1..=100");
        sum += inst.items.iter().map(|&w| w as f64).sum::<f64>();
        count += inst.items.len() as f64;
    }
    // Weibull(scale 45, shape 3) has mean 45 * Gamma(4/3) = 40.18.
    let mean = sum / count;
    ensure!((mean - 40.18).abs() < 0.5, "Weibull mean {mean}");

    // Hand-simulated (capacity, items, first fit, best fit).
    let fixtures: [(u32, &[u32], usize, usize); 4] =
        [(10, &[5, 6, 4, 5], 3, 2), (10, &[5, 7, 5, 3, 4], 3, 3), (10, &[6, 5, 4, 3], 2, 2), (10, &[2, 5, 4, 7, 1, 3, 8], 4, 4)];
    for (cap, items, ff, bf) in fixtures {
        let inst = BinPackInstance::new(cap, items.to_vec());
        ensure!(first_fit(&inst).unwrap() == ff, "first fit on {items:?}: {}", first_fit(&inst).unwrap());
        ensure!(best_fit(&inst).unwrap() == bf, "best fit on {items:?}: {}", best_fit(&inst).unwrap());
        let bf_policy = ConcreteProgram::parse(
            "def priority(item, bin_remaining, bins_max, num_bins, capacity):\n    return -(bin_remaining - item)\n",
        )
        .unwrap();
        ensure!(simulate_online(&bf_policy, &inst).unwrap() == bf, "best-fit policy disagrees on {items:?}");
    }
    let e = excess_score(&[3, 5], &[2, 4]).unwrap();
    ensure!((e - 2.0 / 6.0).abs() < 1e-12, "excess {e}");
    ensure!(excess_score(&[4, 4], &[4, 4]).unwrap() == 0.0, "zero excess");
    Ok(())
}

// 9 -------------------------------------------------------------------------

fn evolution_run(dir: &Path, script: &Path, out: &str) -> Result<Value, String> {
    let config = dir.join(format!("{out}.toml"));
    fs::write(
        &config,
        format!(
            "seed = 11\nout = \"{out}\"\n\n[problem]\nkind = \"toy\"\n\n[backend]\nkind = \"scripted\"\nreplay_file = \"{}\"\n\n[evolve]\nk_search = 4\nk_reset = 10\nbudget = 30\nbatch_size = 8\n",
            script.file_name().unwrap().to_str().unwrap()
        ),
    )
    .map_err(|e| e.to_string())?;
    run_cli(&["run", "--config", config.to_str().unwrap()])?;
    let text = fs::read_to_string(dir.join(out).join("report.json")).map_err(|e| e.to_string())?;
    serde_json::from_str(&text).map_err(|e| e.to_string())
}

fn end_to_end() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let script = dir.path().join("script.jsonl");
    let mut lines = String::new();
    for i in 0..30 {
        let resp = format!("```python\ndef priority():\n    return tunable([{}, {}]) - {}\n```", i % 7, (i * 3) % 11, i % 4);
        lines.push_str(&serde_json::to_string(&resp).unwrap());
        lines.push('\n');
    }
    fs::write(&script, lines).map_err(|e| e.to_string())?;

    let a = evolution_run(dir.path(), &script, "a")?;
    let b = evolution_run(dir.path(), &script, "b")?;
    let ra = fs::read(dir.path().join("a/report.json")).unwrap();
    let rb = fs::read(dir.path().join("b/report.json")).unwrap();
    ensure!(ra == rb, "reports differ between identical runs");
    ensure!(a == b, "parsed reports differ");

    let halvings = a["halving_events"].as_array().ok_or("no halving_events")?;
    ensure!(halvings.len() == 3, "{} halving events", halvings.len());
    let traj = a["best_trajectory"].as_array().ok_or("no best_trajectory")?;
    ensure!(traj.len() == 30, "trajectory has {} points", traj.len());
    let mut prev = f64::NEG_INFINITY;
    for p in traj {
        let s = p[1].as_f64().unwrap_or(f64::NEG_INFINITY);
        ensure!(s >= prev, "global best fell from {prev} to {s}");
        prev = s;
    }

    let dbs = a["databases"].as_array().ok_or("no databases")?;
    ensure!(!dbs.is_empty(), "no databases listed");
    for name in dbs {
        let path = dir.path().join("a/db").join(name.as_str().unwrap());
        let db = Database::load(&path).map_err(|e| e.to_string())?;
        let copy = dir.path().join("copy.jsonl");
        db.persist(&copy).map_err(|e| e.to_string())?;
        let again = Database::load(&copy).map_err(|e| e.to_string())?;
        ensure!(db.entries() == again.entries(), "{} does not round-trip", path.display());
        ensure!(fs::read(&copy).unwrap() == fs::read(&path).unwrap(), "{} rewrites differently", path.display());
    }
    Ok(())
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("1 bound formula", bound_formula),
        ("2 cap-set replay", capset_replay),
        ("3 cluster probabilities", cluster_probabilities),
        ("4 cycle-graph oracles", cycle_oracles),
        ("5 cap-set oracles", capset_oracles),
        ("6 x-search convergence", xsearch_convergence),
        ("7 L2 soundness", l2_soundness),
        ("8 bin-packing baselines and datasets", binpack_baselines),
        ("9 deterministic evolution", end_to_end),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let result = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        match result {
            Ok(()) => println!("PASS {name} ({:.2?})", start.elapsed()),
            Err(e) => {
                failed += 1;
                println!("FAIL {name}: {e}");
            }
        }
    }
    println!("SKIP 10 live cap-set n=8 run (needs a live backend and up to 20000 calls; not gating)");
    if failed > 0 {
        std::process::exit(1);
    }
}
