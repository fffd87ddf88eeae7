use std::sync::Arc;

use spacevolve::llm::{Gateway, GenerationConfig, ScriptedBackend};
use spacevolve::orchestrator::{self, run_evolution, step, EvolveConfig, PromptTemplate, RunOptions, SearchProcess};
use spacevolve::problems::toy::ToyEvaluator;
use spacevolve::progdb::Database;

fn gateway(script: ScriptedBackend, budget: u64) -> Gateway {
    Gateway::new(Arc::new(script), budget, GenerationConfig::default())
}

fn toy() -> PromptTemplate {
    PromptTemplate::builtin("toy").unwrap()
}

fn small_cfg() -> EvolveConfig {
    EvolveConfig { batch_size: 8, ..Default::default() }
}

#[test]
fn step_singleton_program() {
    let gw = gateway(ScriptedBackend::from_responses(["```\ndef priority():\n    return 4\n```"]), 10);
    let mut p = SearchProcess::new(0, 1, 0);
    let r = step(&mut p, &gw, &ToyEvaluator, &toy(), &small_cfg()).unwrap();
    assert_eq!(r.score, Some(4.0));
    assert_eq!(p.db.len(), 1);
    assert_eq!(p.db.entries()[0].score, 4.0);
    assert_eq!(p.best_score, Some(4.0));
}

#[test]
fn step_prose_is_invalid() {
    let gw = gateway(ScriptedBackend::from_responses(["I would rather not."]), 10);
    let mut p = SearchProcess::new(0, 1, 0);
    let r = step(&mut p, &gw, &ToyEvaluator, &toy(), &small_cfg()).unwrap();
    assert_eq!(r.score, None);
    assert_eq!(p.db.len(), 1);
    assert_eq!(p.db.sampleable_count(), 0);
    assert_eq!(gw.budget().used(), 1);
}

#[test]
fn step_tunable_program_reaches_space_optimum() {
    let src = "def priority():\n    return tunable([1, 2, 3]) + tunable([1, 2, 3]) + tunable([1, 2, 3])\n";
    // Oracle: brute force over the 27 choices.
    let mut best = 0;
    for a in 1..=3 {
        for b in 1..=3 {
            for c in 1..=3 {
                best = best.max(a + b + c);
            }
        }
    }
    let gw = gateway(ScriptedBackend::from_responses([src]), 10);
    let mut p = SearchProcess::new(0, 1, 0);
    let r = step(&mut p, &gw, &ToyEvaluator, &toy(), &small_cfg()).unwrap();
    assert_eq!(r.score, Some(best as f64));
    assert_eq!(p.db.entries()[0].source, "def priority():\n    return 3 + 3 + 3\n");
}

fn numbered_script(n: usize) -> ScriptedBackend {
    ScriptedBackend::from_responses((0..n).map(|i| format!("def priority():\n    return tunable([{i}, {}]) - {}\n", i + 1, i % 5)))
}

#[test]
fn halving_schedule() {
    let cfg = EvolveConfig { k_search: 4, k_reset: Some(10), budget: 30, batch_size: 4, seed: 7, ..Default::default() };
    let gw = gateway(numbered_script(30), cfg.budget);
    let report = run_evolution(&cfg, &ToyEvaluator, &toy(), &gw, &RunOptions::default(), &mut |_| {}).unwrap();
    assert_eq!(report.calls_used, 30);
    assert_eq!(report.halving_events.iter().map(|h| h.after_calls).collect::<Vec<_>>(), vec![10, 20, 30]);
    assert!(report.halving_events.iter().all(|h| h.restarted.len() == 2));
    let resets: u32 = report.processes.iter().map(|p| p.reset_count).sum();
    assert_eq!(resets, 6);
}

#[test]
fn single_process_never_halves() {
    let cfg = EvolveConfig { k_search: 1, k_reset: Some(2), budget: 6, batch_size: 4, ..Default::default() };
    let gw = gateway(numbered_script(6), cfg.budget);
    let report = run_evolution(&cfg, &ToyEvaluator, &toy(), &gw, &RunOptions::default(), &mut |_| {}).unwrap();
    assert!(report.halving_events.is_empty());
    assert_eq!(report.processes[0].llm_calls, 6);
}

#[test]
fn plateaued_process_is_restarted() {
    let script = ScriptedBackend::default()
        .with_process_responses(0, ["def priority():\n    return 1\n", "def priority():\n    return 1.0\n"])
        .with_process_responses(1, ["def priority():\n    return 2\n", "def priority():\n    return 3\n"]);
    let cfg = EvolveConfig { k_search: 2, k_reset: Some(2), budget: 4, batch_size: 4, ..Default::default() };
    let gw = gateway(script, cfg.budget);
    let report = run_evolution(&cfg, &ToyEvaluator, &toy(), &gw, &RunOptions::default(), &mut |_| {}).unwrap();
    assert_eq!(report.halving_events[0].after_calls, 2);
    assert_eq!(report.halving_events[0].restarted, vec![0]);
    assert_eq!(report.global_best.as_ref().unwrap().score, 3.0);
}

#[test]
fn seed_program_enters_every_database() {
    let cfg = EvolveConfig {
        k_search: 2,
        k_reset: None,
        budget: 2,
        batch_size: 4,
        seed_program: Some(orchestrator::seed_source("def priority():\n    return tunable([5, 6])\n")),
        ..Default::default()
    };
    let dir = tempfile::tempdir().unwrap();
    let gw = gateway(numbered_script(2), cfg.budget);
    let opts = RunOptions { db_dir: Some(dir.path().to_path_buf()) };
    let report = run_evolution(&cfg, &ToyEvaluator, &toy(), &gw, &opts, &mut |_| {}).unwrap();
    assert_eq!(report.global_best.unwrap().score, 6.0);
    for f in &report.databases {
        let db = Database::load(&dir.path().join(f)).unwrap();
        assert_eq!(db.entries()[0].source, "def priority():\n    return 6\n");
        assert_eq!(db.len(), 2);
    }
}

#[test]
fn script_running_dry_is_fatal() {
    let cfg = EvolveConfig { k_search: 2, budget: 5, batch_size: 4, ..Default::default() };
    let gw = gateway(numbered_script(3), cfg.budget);
    let err = run_evolution(&cfg, &ToyEvaluator, &toy(), &gw, &RunOptions::default(), &mut |_| {}).unwrap_err();
    assert!(err.to_string().contains("script"));
}
