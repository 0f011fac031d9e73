use std::path::PathBuf;
use std::process::{Command, Output};

use pentail_cli::QueryReport;

fn problem(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("problems").join(name)
}

fn pentail(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pentail")).args(args).env_remove("PENTAIL_VERBOSITY").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Writes `text` to a fresh file under the target directory.
fn scratch(name: &str, text: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn all_rules_pass() {
    let o = pentail(&["run", "--rules", "all"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    assert_eq!(text.lines().filter(|l| l.trim_end().ends_with("pass")).count(), 13);
    assert!(!text.contains("FAIL"));
}

#[test]
fn rules_as_json() {
    let o = pentail(&["rules", "or", "mt", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let reports = v.as_array().unwrap();
    assert_eq!(reports.len(), 2);
    assert_eq!(reports[0]["mu_set"], "{1}");
    assert_eq!(reports[1]["trivial_bindings"], true);
}

#[test]
fn modus_ponens_json() {
    let o = pentail(&["run", "--json", problem("mp.problem").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let extend = &v[1]["outcome"];
    assert_eq!(extend["kind"], "extension");
    assert_eq!(extend["interval"]["lo"], "1");
    assert_eq!(extend["interval"]["hi"], "1");
    assert_eq!(v[2]["outcome"]["direct"], true);
    assert_eq!(v[2]["outcome"]["qc"]["witness"], serde_json::json!([0, 1]));
}

#[test]
fn json_round_trips() {
    for name in ["mp.problem", "conj2.problem", "or.problem", "transitivity.problem", "propagation.problem"] {
        let o = pentail(&["run", "--json", "--table", problem(name).to_str().unwrap()]);
        let reports: Vec<QueryReport> = serde_json::from_slice(&o.stdout).unwrap();
        let again = serde_json::to_string_pretty(&reports).unwrap();
        assert_eq!(again.trim_end(), stdout(&o).trim_end(), "{name}");
    }
}

#[test]
fn conjunction_table() {
    let o = pentail(&["run", "--table", problem("conj2.problem").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("[1/5,1/2]"), "{text}");
    let values: Vec<&str> = text
        .lines()
        .skip_while(|l| !l.contains("constituent"))
        .skip(1)
        .take(5)
        .map(|l| l.split_whitespace().last().unwrap())
        .collect();
    assert_eq!(values, ["1", "0", "x", "y", "z"]);
}

#[test]
fn decimals_print_as_fractions() {
    let o = pentail(&["run", "--json", problem("propagation.problem").to_str().unwrap()]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v[0]["outcome"]["interval"]["lo"], "18/25");
    assert_eq!(v[0]["outcome"]["interval"]["hi"], "23/25");
    assert_eq!(v[1]["outcome"]["interval"]["lo"], "9/10");
}

#[test]
fn parse_errors_exit_two_with_location() {
    let path = scratch("bad.problem", "atom A B;\ncond c = A | (B & ~B);\n");
    for cmd in ["check", "run"] {
        let o = pentail(&[cmd, path.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(2));
        let err = String::from_utf8(o.stderr).unwrap();
        assert!(err.contains(":2:10:") && err.contains("unsatisfiable"), "{err}");
    }
}

#[test]
fn engine_errors_exit_one_and_do_not_stop_the_run() {
    let path = scratch("incoherent.problem", "atom A;\ncond a = A;\nentails {a, ~A} => A?\ncoherent?\nassess P(a) = 1/2;\ncoherent?\n");
    let o = pentail(&["run", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.contains("3:1: entails"));
    assert!(text.contains("not p-consistent"), "{text}");
    assert!(text.contains("6:1: coherent?\n  coherent"), "{text}");
}

#[test]
fn atom_limit_is_enforced() {
    let o = pentail(&["run", "--max-atoms", "3", problem("conj2.problem").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("more than the limit of 3"));
}

#[test]
fn verbosity_from_environment() {
    let path = problem("mp.problem");
    let brief = Command::new(env!("CARGO_BIN_EXE_pentail"))
        .args(["run", "--json", path.to_str().unwrap()])
        .env("PENTAIL_VERBOSITY", "brief")
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_slice(&brief.stdout).unwrap();
    assert_eq!(v[0]["outcome"]["certificate"], serde_json::json!([]));
    let normal = pentail(&["run", "--json", path.to_str().unwrap()]);
    let v: serde_json::Value = serde_json::from_slice(&normal.stdout).unwrap();
    assert_eq!(v[0]["outcome"]["certificate"][0]["feasible"], true);
}

#[test]
fn check_reports_counts() {
    let o = pentail(&["check", problem("or.problem").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("3 atoms, 2 conditionals, 2 queries"));
}
