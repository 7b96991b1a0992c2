use std::fs;
use std::process::{Command, Output};

fn rsplab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rsplab")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn gen_then_cutparams_on_complete_graph() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("k5.txt");
    let g = g.to_str().unwrap();
    assert!(rsplab(&["gen", "--model", "complete", "--n", "5", "--out", g]).status.success());
    assert!(fs::read_to_string(g).unwrap().starts_with("5 10\n"));
    let out = rsplab(&["cutparams", "--graph", g]);
    assert_eq!(stdout(&out), "alpha 1\nbeta 1\n");
}

#[test]
fn metric_export_and_heuristics() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.txt");
    let m = dir.path().join("m.txt");
    let (g, m) = (g.to_str().unwrap(), m.to_str().unwrap());
    assert!(rsplab(&["gen", "--model", "er", "--n", "8", "--p", "1", "--seed", "4", "--out", g]).status.success());
    let out = rsplab(&["metric", "--graph", g, "--seed", "9", "--export", m]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("axiom_violations 0"));
    assert_eq!(fs::read_to_string(m).unwrap().lines().count(), 9);
    for alg in ["greedy-matching", "nn", "insertion", "two-opt", "kmedian"] {
        let out = rsplab(&["heur", alg, "--graph", g, "--seed", "9", "--rule", "cheapest"]);
        assert!(out.status.success(), "{alg}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(stdout(&out).contains("cost"), "{alg}");
    }
}

#[test]
fn weighted_file_weights_are_used() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("w.txt");
    fs::write(&g, "3 2\n1 2 0.5\n2 3 0.25\n").unwrap();
    let out = rsplab(&["metric", "--graph", g.to_str().unwrap()]);
    assert!(stdout(&out).contains("diameter 0.75"));
}

#[test]
fn suite_outputs_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("ratio.cfg");
    fs::write(&cfg, "model = complete\nn = 8\ntrials = 10\nkind = matching\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let csv = rsplab(&["suite", "ratio", "--config", cfg]);
    assert_eq!(csv.status.code(), Some(0));
    assert!(stdout(&csv).ends_with("#summary,result,pass\n"));
    let seq = rsplab(&["suite", "ratio", "--config", cfg, "--sequential"]);
    assert_eq!(csv.stdout, seq.stdout);
    let out = dir.path().join("r.json");
    let json = rsplab(&["suite", "ratio", "--config", cfg, "--format", "json", "--out", out.to_str().unwrap()]);
    assert_eq!(json.status.code(), Some(0));
    assert!(fs::read_to_string(out).unwrap().contains("\"passed\": true"));

    // An unreachable threshold is a failed check, exit code 1.
    let strict = dir.path().join("strict.cfg");
    fs::write(&strict, "model = complete\nn = 8\ntrials = 10\nkind = matching\nmax_mean_ratio = 1\n").unwrap();
    assert_eq!(rsplab(&["suite", "ratio", "--config", strict.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn bounds_eval() {
    let out = rsplab(&["bounds", "eval", "harmonic", "--params", "n=3"]);
    assert!(stdout(&out).starts_with("harmonic 1.833333333333333"));
    let out = rsplab(&["bounds", "eval", "tau-expectation", "--params", "n=2,k=2,alpha=1,beta=1"]);
    assert!(stdout(&out).contains("second 1"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(rsplab(&["gen", "--n", "3"]).status.code(), Some(2));
    assert_eq!(rsplab(&["bounds", "eval", "nope"]).status.code(), Some(2));
    assert_eq!(rsplab(&["cutparams", "--graph", "/nonexistent"]).status.code(), Some(2));
    assert_eq!(rsplab(&["heur", "nn", "--graph", "/nonexistent"]).status.code(), Some(2));
}
