use std::fs;
use std::process::{Command, Output};

fn spacevolve(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spacevolve")).args(args).env_remove("LLM_API_KEY").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn evaluate_corpus_program() {
    let o = spacevolve(&["evaluate", "--problem", "capset", "--n", "8", "--corpus", "program4"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "512");
}

#[test]
fn evaluate_constant_priority() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("p.py");
    fs::write(&f, "def priority(el, n):\n    return 0.0\n").unwrap();
    let o = spacevolve(&["evaluate", "--problem", "capset", "--n", "1", f.to_str().unwrap()]);
    assert_eq!(stdout(&o).trim(), "2");
}

#[test]
fn evaluate_bad_input_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("p.py");
    fs::write(&f, "def priority(el, n:\n    return 0.0\n").unwrap();
    assert_eq!(spacevolve(&["evaluate", "--problem", "capset", "--n", "2", f.to_str().unwrap()]).status.code(), Some(4));
    fs::write(&f, "def priority(el, n):\n    return 1 / 0\n").unwrap();
    assert_eq!(spacevolve(&["evaluate", "--problem", "capset", "--n", "2", f.to_str().unwrap()]).status.code(), Some(4));
}

#[test]
fn missing_problem_is_config_error() {
    assert_eq!(spacevolve(&["evaluate", "--corpus", "program4"]).status.code(), Some(2));
}

#[test]
fn verify_sets() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("s.json");
    let f = f.to_str().unwrap();
    fs::write(f, "[[0,0],[0,1],[1,0],[1,1]]").unwrap();
    let o = spacevolve(&["verify", "--kind", "capset", f]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("PASS"));

    fs::write(f, "[[0,1],[1,2],[2,0]]").unwrap();
    let o = spacevolve(&["verify", "--kind", "capset", f]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("VIOLATION"));

    fs::write(f, "[[0,0],[2,2]]").unwrap();
    assert_eq!(spacevolve(&["verify", "--kind", "independent", "--m", "5", f]).status.code(), Some(0));
    fs::write(f, "[[0,0],[1,4]]").unwrap();
    assert_eq!(spacevolve(&["verify", "--kind", "independent", "--m", "5", f]).status.code(), Some(1));

    fs::write(f, "[[1,1,0],[1,0,1],[2,1,0]]").unwrap();
    assert_eq!(spacevolve(&["verify", "--kind", "admissible", "--w", "2", f]).status.code(), Some(1));

    fs::write(f, "not json").unwrap();
    assert_eq!(spacevolve(&["verify", "--kind", "capset", f]).status.code(), Some(4));
}

#[test]
fn bound_fixed_m() {
    let o = spacevolve(&["bound", "--s", "237984", "--n", "24", "--w", "17", "--m", "4"]);
    let out = stdout(&o);
    assert!(out.contains("C = 2.2202"), "{out}");
    assert!(out.contains("dimension = 576"), "{out}");
}

#[test]
fn gen_data_writes_instances() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("d.json");
    let o = spacevolve(&["gen-data", "--dataset", "or", "--instances", "2", "--items", "10", "--out", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&f).unwrap()).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 2);
    assert_eq!(v[0]["capacity"], 150);
    assert_eq!(v[1]["items"].as_array().unwrap().len(), 10);
}

#[test]
fn xsearch_sum_problem() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("t.py");
    let out = dir.path().join("best.py");
    fs::write(&f, "def priority():\n    return tunable([1, 2, 3]) + tunable([1, 2, 3]) + tunable([1, 2, 3])\n").unwrap();
    let o = spacevolve(&["xsearch", "--problem", "toy", f.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("best score: 9"));
    assert_eq!(fs::read_to_string(&out).unwrap(), "def priority():\n    return 3 + 3 + 3\n");
}

#[test]
fn http_backend_without_key_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = spacevolve(&["run", "--problem", "toy", "--budget", "2", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!dir.path().join("report.json").exists());
}

#[test]
fn scripted_run_and_replay() {
    let dir = tempfile::tempdir().unwrap();
    let script = dir.path().join("s.jsonl");
    fs::write(
        &script,
        [
            "\"def priority():\\n    return 2\\n\"",
            "\"def priority():\\n    return tunable([1, 5])\\n\"",
            "\"no code here\"",
            "\"def priority():\\n    return 3\\n\"",
        ]
        .join("\n"),
    )
    .unwrap();
    let out = dir.path().join("run");
    let o = spacevolve(&[
        "run",
        "--problem",
        "toy",
        "--backend",
        "scripted",
        "--replay-file",
        script.to_str().unwrap(),
        "--budget",
        "4",
        "--k-search",
        "2",
        "--k-reset",
        "0",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("best score: 5"));
    assert_eq!(fs::read_to_string(out.join("best.py")).unwrap(), "def priority():\n    return 5\n");
    assert_eq!(fs::read_to_string(out.join("events.jsonl")).unwrap().lines().count(), 4);

    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["calls_used"], 4);
    let db = out.join("db").join(report["databases"][1].as_str().unwrap());
    let o = spacevolve(&["replay", "--db", db.to_str().unwrap(), "--top", "1"]);
    let text = stdout(&o);
    assert!(text.starts_with("#1 "), "{text}");
    assert!(text.contains("score=5"), "{text}");
}

#[test]
fn scripted_run_needs_replay_file() {
    let o = spacevolve(&["run", "--problem", "toy", "--backend", "scripted"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn corpus_listing() {
    let o = spacevolve(&["corpus"]);
    assert_eq!(stdout(&o).lines().count(), 10);
    let o = spacevolve(&["corpus", "program9"]);
    assert!(stdout(&o).contains("def "));
}
