use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;
use std::sync::Arc;

use spacevolve::corpus;
use spacevolve::llm::{Gateway, GenerationConfig, HttpBackend, HttpConfig, LlmBackend, ScriptedBackend};
use spacevolve::orchestrator::{run_evolution, OrchestratorError, PromptTemplate, RunOptions};
use spacevolve::priolang::{ConcreteProgram, Origin, SourceProgram, TunableProgram};
use spacevolve::problems::{
    capacity_lower_bound, capacity_lower_bound_auto, gen_or_dataset, gen_weibull_dataset, is_admissible, is_capset, is_independent,
    save_instances, AdmissibleParams, AdmissibleViolation, CycleProductSpec,
};
use spacevolve::progdb::Database;
use spacevolve::xsearch::{self, XSearchConfig};

use crate::config::{BackendKind, DatasetKind, ProblemArgs, RunArgs, RunConfig};
use crate::{CliError, SetKind};

type CmdResult = Result<u8, CliError>;

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))
}

pub fn run(args: RunArgs) -> CmdResult {
    let cfg = RunConfig::resolve(args)?;
    let evaluator = cfg.problem.build().map_err(|e| CliError::Config(e.to_string()))?;
    let mut template = match &cfg.template {
        Some(p) => PromptTemplate::from_file(p).map_err(CliError::Config)?,
        None => PromptTemplate::builtin(cfg.problem.template_key()).expect("every problem has a bundled template"),
    };
    if cfg.no_hint {
        template.scoring_heuristic_hint = None;
    }
    let mut evolve = cfg.evolve.clone();
    evolve.seed_program = match &cfg.seed_program {
        Some(p) => Some(SourceProgram::new(read(p)?, Origin::Seed)),
        None if !cfg.no_seed => template.seed_program.clone().map(|t| SourceProgram::new(t.trim_start(), Origin::Seed)),
        None => None,
    };

    let mut generation = GenerationConfig::default();
    let backend: Arc<dyn LlmBackend> = match cfg.backend {
        BackendKind::Http => {
            let http = HttpConfig::from_env().map_err(|e| CliError::Config(e.to_string()))?;
            if let Some(m) = std::env::var("LLM_MODEL").ok().filter(|m| !m.is_empty()).or(cfg.model.clone()) {
                generation.model = m;
            }
            Arc::new(HttpBackend::new(http))
        }
        BackendKind::Scripted => {
            let path = cfg.replay_file.as_deref().expect("checked when resolving the config");
            Arc::new(ScriptedBackend::from_file(path).map_err(|e| CliError::Config(e.to_string()))?)
        }
    };
    if let Some(t) = cfg.llm_temperature {
        generation.temperature = t;
    }
    if let Some(t) = cfg.max_tokens {
        generation.max_tokens = t;
    }
    let gateway = Gateway::new(backend, evolve.budget, generation);

    fs::create_dir_all(&cfg.out).map_err(|e| CliError::Output(format!("{}: {e}", cfg.out.display())))?;
    let events_path = cfg.out.join("events.jsonl");
    let mut events = BufWriter::new(File::create(&events_path).map_err(|e| CliError::Output(format!("{}: {e}", events_path.display())))?);
    let mut event_error = None;
    let opts = RunOptions { db_dir: Some(cfg.out.join("db")) };
    let report = run_evolution(&evolve, evaluator.as_ref(), &template, &gateway, &opts, &mut |ev| {
        let line = serde_json::to_string(ev).expect("events serialize");
        if let Err(e) = writeln!(events, "{line}") {
            event_error.get_or_insert(e);
        }
    })
    .map_err(|e| match e {
        OrchestratorError::Config(m) => CliError::Config(m),
        OrchestratorError::Seed(m) => CliError::Input(format!("seed program: {m}")),
        OrchestratorError::Backend(e) => CliError::Backend(e.to_string()),
        OrchestratorError::Db(e) => CliError::Output(e.to_string()),
    })?;
    events.flush().map_err(|e| CliError::Output(format!("{}: {e}", events_path.display())))?;
    if let Some(e) = event_error {
        return Err(CliError::Output(format!("{}: {e}", events_path.display())));
    }

    let report_path = cfg.out.join("report.json");
    write(&report_path, &(serde_json::to_string_pretty(&report).expect("report serializes") + "\n"))?;
    match &report.global_best {
        Some(best) => {
            write(&cfg.out.join("best.py"), &best.source)?;
            println!("best score: {}", best.score);
        }
        None => println!("best score: none (no valid program)"),
    }
    println!("calls: {}", report.calls_used);
    println!("halving events: {}", report.halving_events.len());
    println!("report: {}", report_path.display());
    Ok(0)
}

pub fn evaluate(problem: &ProblemArgs, file: Option<&Path>, corpus_name: Option<&str>) -> CmdResult {
    let spec = problem.spec()?;
    let evaluator = spec.build().map_err(|e| CliError::Config(e.to_string()))?;
    let text = match (file, corpus_name) {
        (Some(f), _) => read(f)?,
        (None, Some(name)) => {
            let p = corpus::get(name).ok_or_else(|| CliError::Config(format!("no bundled program named {name}")))?;
            p.source.to_string()
        }
        (None, None) => return Err(CliError::Config("a program file or --corpus is required".into())),
    };
    let program = ConcreteProgram::parse(&text).map_err(|e| CliError::Input(e.to_string()))?;
    let score = evaluator.evaluate(&program).map_err(|e| CliError::Input(e.to_string()))?;
    println!("{score}");
    Ok(0)
}

fn load_set(path: &Path) -> Result<Vec<Vec<i64>>, CliError> {
    serde_json::from_str(&read(path)?)
        .map_err(|e| CliError::Input(format!("{}: expected a JSON array of integer arrays: {e}", path.display())))
}

fn digits<T: TryFrom<i64>>(set: &[Vec<i64>], below: i64) -> Result<Vec<Vec<T>>, CliError> {
    set.iter()
        .map(|v| {
            v.iter()
                .map(|&x| {
                    if (0..below).contains(&x) {
                        T::try_from(x).map_err(|_| CliError::Input(format!("entry {x} out of range")))
                    } else {
                        Err(CliError::Input(format!("entry {x} is outside 0..{below}")))
                    }
                })
                .collect()
        })
        .collect()
}

fn dim(set: &[Vec<i64>], n: Option<usize>) -> Result<usize, CliError> {
    let n = n.or_else(|| set.first().map(Vec::len)).ok_or_else(|| CliError::Config("empty set: pass --n".into()))?;
    if let Some(v) = set.iter().find(|v| v.len() != n) {
        return Err(CliError::Input(format!("vector {v:?} has length {}, expected {n}", v.len())));
    }
    Ok(n)
}

pub fn verify(kind: SetKind, file: &Path, n: Option<usize>, w: Option<usize>, m: Option<usize>) -> CmdResult {
    let raw = load_set(file)?;
    let violation = match kind {
        SetKind::Capset => {
            dim(&raw, n)?;
            let set: Vec<Vec<u8>> = digits(&raw, 3)?;
            is_capset(&set)
                .map_err(|e| CliError::Input(e.to_string()))?
                .map(|(a, b, c)| format!("line {:?} {:?} {:?} (positions {a}, {b}, {c})", raw[a], raw[b], raw[c]))
        }
        SetKind::Admissible => {
            let n = dim(&raw, n)?;
            let w = w.ok_or_else(|| CliError::Config("--w is required for admissible sets".into()))?;
            let params = AdmissibleParams::new(n, w).map_err(|e| CliError::Config(e.to_string()))?;
            let set: Vec<Vec<u8>> = digits(&raw, 3)?;
            is_admissible(&set, params).map_err(|e| CliError::Input(e.to_string()))?.map(|v| match v {
                AdmissibleViolation::Weight { index, weight } => {
                    format!("weight: vector {:?} at position {index} has weight {weight}, expected {w}", raw[index])
                }
                AdmissibleViolation::Triple(a, b, c) => {
                    format!("triple {:?} {:?} {:?} (positions {a}, {b}, {c}) has no coordinate with 0, 1 and 2", raw[a], raw[b], raw[c])
                }
            })
        }
        SetKind::Independent => {
            let n = dim(&raw, n)?;
            let m = m.ok_or_else(|| CliError::Config("--m is required for independent sets".into()))?;
            let spec = CycleProductSpec::new(m, n).map_err(|e| CliError::Config(e.to_string()))?;
            let set: Vec<Vec<usize>> = digits(&raw, m as i64)?;
            is_independent(&set, spec).map(|(a, b)| format!("adjacent {:?} {:?} (positions {a}, {b})", raw[a], raw[b]))
        }
    };
    match violation {
        None => {
            println!("PASS ({} vectors)", raw.len());
            Ok(0)
        }
        Some(v) => {
            println!("VIOLATION: {v}");
            Ok(1)
        }
    }
}

pub fn bound(s: f64, n: u32, w: u32, m: &str) -> CmdResult {
    if s.is_nan() || s < 1.0 || w > n || n == 0 {
        return Err(CliError::Config("need s >= 1 and 0 <= w <= n, n >= 1".into()));
    }
    let b = if m == "auto" {
        capacity_lower_bound_auto(s, n, w)
    } else {
        let m: u32 = m.parse().map_err(|_| CliError::Config(format!("--m must be a positive integer or auto, got {m}")))?;
        if m == 0 {
            return Err(CliError::Config("--m must be positive".into()));
        }
        capacity_lower_bound(s, n, w, m)
    };
    println!("C = {:.6}", b.c);
    println!("m = {}", b.m);
    println!("dimension = {}", b.dimension);
    Ok(0)
}

pub fn gen_data(dataset: DatasetKind, seed: u64, instances: Option<usize>, items: Option<usize>, out: &Path) -> CmdResult {
    let data = match dataset {
        DatasetKind::Or => gen_or_dataset(seed, instances.unwrap_or(20), items.unwrap_or(120)),
        DatasetKind::Weibull => gen_weibull_dataset(seed, instances.unwrap_or(5), items.unwrap_or(5000)),
    };
    save_instances(out, &data).map_err(|e| CliError::Output(e.to_string()))?;
    let first = &data[0];
    println!("wrote {} instances of {} items (capacity {}) to {}", data.len(), first.items.len(), first.capacity, out.display());
    Ok(0)
}

pub fn replay(db: &Path, top: usize) -> CmdResult {
    let db = Database::load(db).map_err(|e| CliError::Input(e.to_string()))?;
    let best = db.top(top);
    if best.is_empty() {
        println!("no valid entries ({} stored)", db.len());
    }
    for (rank, e) in best.iter().enumerate() {
        println!("#{} id={} score={} process={} round={}", rank + 1, e.id, e.score, e.process_id, e.created_round);
        println!("{}", e.source.trim_end());
        println!();
    }
    Ok(0)
}

pub fn xsearch(problem: &ProblemArgs, file: &Path, cfg: XSearchConfig, out: Option<&Path>) -> CmdResult {
    cfg.validate().map_err(CliError::Config)?;
    let evaluator = problem.spec()?.build().map_err(|e| CliError::Config(e.to_string()))?;
    let tp = TunableProgram::parse(SourceProgram::new(read(file)?, Origin::User)).map_err(|e| CliError::Input(e.to_string()))?;
    let outcome = xsearch::run(&tp, evaluator.as_ref(), &cfg);
    let Some(compacted) = outcome.compacted.as_ref().filter(|_| !outcome.failed()) else {
        let why = outcome.first_error.unwrap_or_else(|| "no valid evaluation".into());
        return Err(CliError::Input(format!("every evaluated program was invalid: {why}")));
    };
    println!("best score: {}", outcome.best_score);
    println!("space size: {}", tp.solution_space_size());
    println!("evaluations: {}", outcome.evaluations_used);
    println!("rounds: {}", outcome.rounds);
    match out {
        Some(path) => write(path, &compacted.text)?,
        None => print!("{}", compacted.text),
    }
    Ok(0)
}

pub fn corpus(name: Option<&str>) -> CmdResult {
    match name {
        Some(name) => {
            let p = corpus::get(name).ok_or_else(|| CliError::Config(format!("no bundled program named {name}")))?;
            print!("{}", p.source);
        }
        None => {
            for p in corpus::PROGRAMS {
                let status = serde_json::to_string(&p.status).expect("status serializes");
                println!("{:<10} {:<11} {:<16} {:<14} {}", p.name, p.problem, p.params, status.trim_matches('"'), p.claimed);
            }
        }
    }
    Ok(0)
}
