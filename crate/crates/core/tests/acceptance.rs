//! Acceptance run: prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::time::{Duration, Instant};

use rsplab::bounds::harmonic;
use rsplab::graphs::{complete_graph, cut_parameters_exact, CutParameters, Graph};
use rsplab::heuristics::{exact_matching, exact_tsp, InsertionRule};
use rsplab::lab::{run_suite, ExperimentConfig, GraphModel, RatioKind, Report, SuiteId, TwoOptStart};
use rsplab::Seed;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn config(suite: SuiteId, model: GraphModel, n: usize, trials: u64, seed: u64) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(suite);
    cfg.model = model;
    cfg.n = n;
    cfg.trials = trials;
    cfg.seed = Seed::new(seed);
    cfg
}

fn failed_checks(report: &Report) -> Vec<String> {
    report.checks.iter().filter(|c| !c.passed).map(|c| format!("{}: {}", c.name, c.detail)).collect()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut bad = Vec::new();
    for n in 2..=12 {
        let got = cut_parameters_exact(&complete_graph(n).unwrap()).unwrap();
        if got != CutParameters::COMPLETE {
            bad.push(format!("K_{n} -> {got:?}"));
        }
    }
    let path = Graph::new(3, [(0, 1), (1, 2)]).unwrap();
    let star = Graph::new(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
    for (name, g, want) in [("path-3", path, (0.5, 1.0)), ("star-4", star, (1.0 / 3.0, 1.0))] {
        let got = cut_parameters_exact(&g).unwrap();
        let oracle = common::cut_parameters_naive(&g);
        if (got.alpha, got.beta) != oracle || (got.alpha - want.0).abs() > 1e-15 || got.beta != want.1 {
            bad.push(format!("{name}: {got:?} vs oracle {oracle:?}"));
        }
    }
    let elapsed = start.elapsed();
    let ok = bad.is_empty() && elapsed < Duration::from_secs(10);
    outcome(ok, format!("{} mismatches, {:.2?}", bad.len(), elapsed) + &bad.join("; "))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let report = run_suite(&config(SuiteId::Tau, GraphModel::Complete, 100, 500, 2)).unwrap();
    let pair = report.stat("pair_dist").unwrap().stats;
    let tau = report.stat("tau_100").unwrap().stats;
    let h = harmonic(99);
    let (pair_target, tau_target) = (h / 99.0, 2.0 * h / 100.0);
    let elapsed = start.elapsed();
    let ok = pair.ci_contains(pair_target) && tau.ci_contains(tau_target) && elapsed < Duration::from_secs(120);
    outcome(
        ok,
        format!(
            "d(u,v) ci [{:.6}, {:.6}] vs {pair_target:.6}; tau_100 ci [{:.6}, {:.6}] vs {tau_target:.6}; {elapsed:.2?}",
            pair.ci_low, pair.ci_high, tau.ci_low, tau.ci_high
        ),
    )
}

/// Shared by criteria 3 and 4: 520 draws of G(12, 0.8), at least 500 of
/// them connected.
fn structure_er12() -> (Report, Duration) {
    let start = Instant::now();
    let report = run_suite(&config(SuiteId::Structure, GraphModel::ErdosRenyi { p: 0.8 }, 12, 520, 3)).unwrap();
    (report, start.elapsed())
}

fn criterion_3(report: &Report, elapsed: Duration) -> Outcome {
    let eligible = report.trials.eligible();
    let violations = report.trials.total("cut_violations");
    let ok = eligible >= 500 && violations == 0 && elapsed < Duration::from_secs(300);
    outcome(ok, format!("{eligible} connected instances, {violations} violations, {elapsed:.2?}"))
}

fn criterion_4(report: &Report) -> Outcome {
    let mut parts = Vec::new();
    let mut ok = report.trials.eligible() >= 500;
    for j in 0..4 {
        let bad = report.trials.total(&format!("cluster_violations_{j}"));
        let clusters = report.stat(&format!("clusters_{j}")).unwrap().stats.mean;
        let scale = report.stat(&format!("count_scale_{j}")).unwrap().stats.mean;
        ok &= bad == 0;
        parts.push(format!("grid {j}: {bad} violations, mean clusters {clusters:.3} vs n/s {scale:.3}"));
    }
    outcome(ok, parts.join("; "))
}

fn criterion_5() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for n in [8, 10, 12, 14] {
        let mut cfg = config(SuiteId::Structure, GraphModel::ErdosRenyi { p: 0.8 }, n, 500, 5 + n as u64);
        cfg.delta_fractions = vec![0.0];
        let report = run_suite(&cfg).unwrap();
        let checked = report.trials.values("sandwich_violation").len();
        let bad = report.trials.total("sandwich_violation");
        ok &= bad == 0 && checked == report.trials.eligible() && checked > 0;
        parts.push(format!("n={n}: {bad} violations over {checked}"));
    }
    outcome(ok, parts.join("; "))
}

fn criterion_6() -> Outcome {
    let mut worst_matching = 0.0f64;
    let mut worst_tsp = 0.0f64;
    for i in 0..200u64 {
        let n = 2 * (1 + i as usize % 5);
        let m = common::random_metric(n, 0.6, 600 + i);
        worst_matching =
            worst_matching.max((exact_matching(&m).unwrap().cost - common::matching_brute_force(&m)).abs());
        let n = 3 + i as usize % 6;
        let m = common::random_metric(n, 0.6, 6000 + i);
        worst_tsp = worst_tsp.max((exact_tsp(&m).unwrap().cost - common::tsp_brute_force(&m)).abs());
    }
    outcome(
        worst_matching <= 1e-9 && worst_tsp <= 1e-9,
        format!("max |matching - oracle| = {worst_matching:.2e}, max |tsp - oracle| = {worst_tsp:.2e}"),
    )
}

fn criterion_7() -> Outcome {
    let cases = [
        ("GR/MM", RatioKind::Matching, 14),
        ("NN/TSP", RatioKind::NearestNeighbor, 12),
        ("IN_nearest/TSP", RatioKind::Insertion(InsertionRule::Nearest), 12),
        ("TR/ME", RatioKind::KMedian, 15),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (i, (name, kind, n)) in cases.into_iter().enumerate() {
        let mut cfg = config(SuiteId::Ratio, GraphModel::Complete, n, 500, 70 + i as u64);
        cfg.ratio = kind;
        cfg.k = 2;
        let report = run_suite(&cfg).unwrap();
        let s = report.stat("ratio").unwrap().stats;
        let good = s.mean < 3.0 && s.min >= 1.0 - 1e-12 && report.trials.total("ratio_violation") == 0;
        ok &= good;
        parts.push(format!("{name}: mean {:.4}, min {:.4}", s.mean, s.min));
    }
    outcome(ok, parts.join("; "))
}

fn criterion_8() -> Outcome {
    let mut cfg = config(SuiteId::Cdf, GraphModel::Complete, 5, 100_000, 8);
    cfg.cdf_pairs = vec![(1.0, 1), (2.0, 3), (0.5, 5)];
    cfg.cdf_tolerance = 0.02;
    let report = run_suite(&cfg).unwrap();
    let relevant: Vec<_> = report
        .checks
        .iter()
        .filter(|c| c.name.starts_with("exp sum cdf") || c.name.starts_with("k-median order density"))
        .collect();
    let ok = relevant.len() == 4 && relevant.iter().all(|c| c.passed);
    let detail = relevant.iter().map(|c| format!("{}: {}", c.name, c.detail)).collect::<Vec<_>>().join("; ");
    outcome(ok, detail)
}

fn criterion_9() -> Outcome {
    let mut cfg = config(SuiteId::TwoOpt, GraphModel::Complete, 12, 200, 9);
    cfg.two_opt_start = TwoOptStart::Identity;
    let report = run_suite(&cfg).unwrap();
    let t = report.stat("iterations").unwrap();
    let failed = failed_checks(&report);
    outcome(
        failed.is_empty(),
        format!(
            "mean T {:.3}, max T {}, scale {:.3e}{}",
            t.stats.mean,
            t.stats.max,
            t.bracket.map_or(f64::NAN, |b| b.1),
            failed.iter().map(|f| format!("; {f}")).collect::<String>()
        ),
    )
}

fn criterion_10() -> Outcome {
    let mut configs = Vec::new();
    for suite in SuiteId::ALL {
        let model = match suite {
            SuiteId::Ratio | SuiteId::TwoOpt => GraphModel::Complete,
            _ => GraphModel::ErdosRenyi { p: 0.7 },
        };
        configs.push(config(suite, model, 8, 60, 10));
    }
    let mut differing = Vec::new();
    for cfg in configs.iter_mut() {
        let first = run_suite(cfg).unwrap().to_csv().unwrap();
        let again = run_suite(cfg).unwrap().to_csv().unwrap();
        cfg.parallel = !cfg.parallel;
        let other = run_suite(cfg).unwrap().to_csv().unwrap();
        if first != again || first != other {
            differing.push(cfg.suite.to_string());
        }
    }
    outcome(differing.is_empty(), format!("{} suites compared, differing: {differing:?}", configs.len()))
}

fn main() {
    let mut results: Vec<(u32, &str, Outcome)> = Vec::new();
    results.push((1, "exact cut parameters", criterion_1()));
    results.push((2, "complete-graph distance law", criterion_2()));
    let (structure, elapsed) = structure_er12();
    results.push((3, "cut size inequality", criterion_3(&structure, elapsed)));
    results.push((4, "clustering diameters", criterion_4(&structure)));
    results.push((5, "tsp/matching/lightest-edge sandwich", criterion_5()));
    results.push((6, "oracle equivalence", criterion_6()));
    results.push((7, "ratio suites", criterion_7()));
    results.push((8, "cdf formula", criterion_8()));
    results.push((9, "2-opt", criterion_9()));
    results.push((10, "determinism", criterion_10()));

    let mut all = true;
    for (id, name, o) in &results {
        all &= o.passed;
        println!("criterion {id:>2} {} {name}: {}", if o.passed { "PASS" } else { "FAIL" }, o.detail);
    }
    if !all {
        std::process::exit(1);
    }
}
