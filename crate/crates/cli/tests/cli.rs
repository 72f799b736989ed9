use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn manifest() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

/// Temporary working directory holding a copy of the fixtures.
fn workdir() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    copy_dir(&manifest().join("tests/fixtures"), dir.path());
    dir
}

fn copy_dir(from: &Path, to: &Path) {
    fs::create_dir_all(to).unwrap();
    for e in fs::read_dir(from).unwrap() {
        let e = e.unwrap();
        let target = to.join(e.file_name());
        if e.file_type().unwrap().is_dir() {
            copy_dir(&e.path(), &target);
        } else {
            fs::copy(e.path(), target).unwrap();
        }
    }
}

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pexpl")).current_dir(dir).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(dir: &Path, args: &[&str]) -> (Value, i32) {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let o = run(dir, &full);
    let v: Value = serde_json::from_str(stdout(&o).trim()).unwrap_or_else(|e| panic!("{e}: {}", stdout(&o)));
    (v, o.status.code().unwrap())
}

fn validator() -> jsonschema::Validator {
    let text = fs::read_to_string(manifest().join("schema/cli-result.schema.json")).unwrap();
    jsonschema::validator_for(&serde_json::from_str(&text).unwrap()).unwrap()
}

fn assert_valid(v: &Value) {
    let errors: Vec<String> = validator().iter_errors(v).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{errors:?} in {v}");
}

/// Drops fields that depend on the clock.
fn strip_timing(v: &mut Value) {
    match v {
        Value::Object(m) => {
            for key in ["elapsed_ms", "mean_runtime", "runtime"] {
                m.remove(key);
            }
            m.values_mut().for_each(strip_timing);
        }
        Value::Array(a) => a.iter_mut().for_each(strip_timing),
        _ => {}
    }
}

/// Compares against `tests/golden/<name>.json`; `UPDATE_GOLDEN=1` rewrites.
fn golden(name: &str, args: &[&str], code: i32) {
    let dir = workdir();
    let (mut v, got) = json(dir.path(), args);
    assert_eq!(got, code, "{v}");
    assert_valid(&v);
    strip_timing(&mut v);
    let path = manifest().join("tests/golden").join(format!("{name}.json"));
    let text = serde_json::to_string_pretty(&v).unwrap() + "\n";
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        fs::write(&path, &text).unwrap();
    }
    let want = fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing {}", path.display()));
    assert_eq!(text, want, "golden {name}");
}

#[test]
fn golden_prob() {
    golden("prob", &["prob", "--wcnf", "ex7.wcnf", "--query", "b.query", "--oracle"], 0);
    golden("prob_given", &["prob", "--wcnf", "ex7.wcnf", "--query", "b.query", "--given", "a.query"], 0);
}

#[test]
fn golden_topk() {
    golden("topk", &["topk", "--wcnf", "cex.wcnf", "--query", "b.query", "--k", "2", "--oracle"], 0);
}

#[test]
fn golden_explain() {
    golden("explain_mono", &["explain", "mono", "--cnf", "alg1.cnf", "--query", "a.query"], 0);
    golden(
        "explain_mrp",
        &["explain", "mrp", "--agent", "alg2_agent.cnf", "--human", "alg2_human.cnf", "--query", "a.query"],
        0,
    );
    golden("explain_pmono", &["explain", "pmono", "--wcnf", "cex.wcnf", "--query", "b.query", "--k", "4"], 0);
    golden(
        "explain_pmrp",
        &["explain", "pmrp", "--agent", "rec_agent.cnf", "--human", "rec_human.wcnf", "--query", "b.query"],
        0,
    );
    golden("explain_preferred", &["explain", "preferred", "--wcnf", "power.wcnf", "--query", "c.query"], 0);
}

#[test]
fn golden_gen() {
    golden("gen_random", &["gen", "random", "--vars", "8", "--clauses", "6", "--width", "3", "--seed", "7", "--out", "r"], 0);
    golden("gen_scenario", &["gen", "scenario", "--cnf", "alg2_agent.cnf", "--level", "5", "--seed", "1", "--out", "h.cnf"], 0);
    golden("gen_robot", &["gen", "robot", "--horizon", "2", "--out", "robot.wcnf"], 0);
}

#[test]
fn golden_bench() {
    golden("bench", &["bench", "--suite", "suite", "--alg", "alg1", "--out", "out", "--jobs", "1"], 0);
}

#[test]
fn golden_errors() {
    golden("error_not_entailed", &["explain", "mono", "--cnf", "alg1.cnf", "--query", "b.query"], 3);
    golden("error_parse", &["explain", "mono", "--cnf", "garbage.cnf", "--query", "a.query"], 2);
}

#[test]
fn prob_prints_six_decimals() {
    let dir = workdir();
    let o = run(dir.path(), &["prob", "--wcnf", "ex7.wcnf", "--query", "b.query"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "0.731059\n");
    let o = run(dir.path(), &["prob", "--wcnf", "ex7.wcnf", "--query", "taut.query"]);
    assert_eq!(stdout(&o), "1.000000\n");
}

#[test]
fn pmono_at_one_matches_mono_on_projection() {
    let dir = workdir();
    let (p, _) = json(dir.path(), &["explain", "pmono", "--wcnf", "cex.wcnf", "--query", "b.query", "--k", "1"]);
    let (m, _) = json(dir.path(), &["explain", "mono", "--cnf", "alg1.cnf", "--query", "a.query"]);
    assert_eq!(m["payload"]["indices"], serde_json::json!([0, 1, 2]));
    let cnf = "p cnf 3 4\n1 0\n-1 2 0\n3 0\n-3 2 0\n";
    fs::write(dir.path().join("cex.cnf"), cnf).unwrap();
    let (c, _) = json(dir.path(), &["explain", "mono", "--cnf", "cex.cnf", "--query", "b.query"]);
    assert_eq!(p["payload"]["indices"], c["payload"]["indices"]);
}

#[test]
fn topk_clamps_with_warning() {
    let dir = workdir();
    let o = run(dir.path(), &["topk", "--wcnf", "cex.wcnf", "--query", "b.query", "--k", "50", "--oracle"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().filter(|l| !l.starts_with("oracle")).count(), 4);
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
}

#[test]
fn gen_random_is_byte_identical() {
    let dir = workdir();
    let args = ["gen", "random", "--vars", "20", "--clauses", "60", "--width", "3", "--seed", "7"];
    let a = run(dir.path(), &args);
    let b = run(dir.path(), &args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    for out in ["x", "y"] {
        let mut full = args.to_vec();
        full.extend(["--out", out]);
        assert!(run(dir.path(), &full).status.success());
    }
    assert_eq!(fs::read(dir.path().join("x.cnf")).unwrap(), fs::read(dir.path().join("y.cnf")).unwrap());
    assert_eq!(fs::read(dir.path().join("x.cnf")).unwrap(), a.stdout);
}

#[test]
fn gen_scenario_drops_the_stated_share() {
    let dir = workdir();
    assert!(run(dir.path(), &["gen", "random", "--vars", "30", "--clauses", "100", "--width", "3", "--seed", "2", "--out", "kb"])
        .status
        .success());
    let o = run(dir.path(), &["gen", "scenario", "--cnf", "kb.cnf", "--level", "3", "--seed", "4"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("p cnf 30 70\n"), "{}", stdout(&o));
}

#[test]
fn robot_output_feeds_prob() {
    let dir = workdir();
    assert!(run(dir.path(), &["gen", "robot", "--horizon", "2", "--out", "robot.wcnf"]).status.success());
    let text = fs::read_to_string(dir.path().join("robot.wcnf")).unwrap();
    assert!(text.starts_with("c 1 crowded(A)\n"));
    let o = run(dir.path(), &["prob", "--wcnf", "robot.wcnf", "--query", "a.query"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn exit_codes() {
    let dir = workdir();
    let code = |args: &[&str]| run(dir.path(), args).status.code().unwrap();
    assert_eq!(code(&["explain", "mono", "--cnf", "missing.cnf", "--query", "a.query"]), 2);
    assert_eq!(code(&["explain", "mono", "--cnf", "inconsistent.cnf", "--query", "a.query"]), 3);
    assert_eq!(code(&["explain", "pmono", "--wcnf", "cex.wcnf", "--query", "b.query", "--gamma", "2"]), 2);
    assert_eq!(code(&["gen", "random", "--vars", "3", "--clauses", "2", "--width", "5", "--seed", "1"]), 2);
    assert_eq!(code(&["bench", "--suite", "suite", "--alg", "alg9", "--out", "o"]), 2);
    let wide: String = (1..=30).map(|v| format!("1 {v} 0\n")).collect();
    fs::write(dir.path().join("wide.wcnf"), wide).unwrap();
    assert_eq!(code(&["prob", "--wcnf", "wide.wcnf", "--query", "a.query"]), 4);
}

#[test]
fn diagnostic_names_the_precondition() {
    let dir = workdir();
    let o = run(dir.path(), &["explain", "mono", "--cnf", "inconsistent.cnf", "--query", "a.query"]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("inconsistent"));
    assert!(o.stdout.is_empty());
}

#[test]
fn bench_writes_outputs() {
    let dir = workdir();
    let (v, code) = json(dir.path(), &["bench", "--suite", "suite", "--alg", "mono", "--out", "out"]);
    assert_eq!(code, 0);
    assert_eq!(v["payload"]["summary"]["solved"], 3);
    assert_eq!(v["payload"]["summary"]["timeout"], 0);
    for f in ["results.jsonl", "summary.json", "summary.csv"] {
        assert!(dir.path().join("out").join(f).exists(), "{f}");
    }
    let lines = fs::read_to_string(dir.path().join("out/results.jsonl")).unwrap();
    assert_eq!(lines.lines().count(), 3);
}
