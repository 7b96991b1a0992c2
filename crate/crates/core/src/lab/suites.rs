//! Suite aggregation: turns trial records into statistics and checks.
//!
//! A suite fails only on a deterministic violation or on a theoretical
//! bracket that misses the 99% confidence interval, plus any optional
//! thresholds the configuration asks for.

use super::config::{ExperimentConfig, GraphModel, SuiteId};
use super::report::Report;
use super::runner::{prepare, run_prepared, summarize, Setup, TrialSet};
use super::stats::{dkw_half_width, ks_distance, SummaryStats};
use super::LabError;
use crate::bounds::{
    exp_sum_cdf, harmonic, integrate, kmedian_order_pdf, ln_binomial, tau_cdf_bounds, tau_expectation_bounds,
};
use crate::graphs::CutParameters;

/// `(n, k, beta)` grid on which the k-median order-statistic density is
/// integrated.
pub const PDF_GRID_N: [u64; 3] = [5, 10, 20];
pub const PDF_GRID_BETA: [f64; 3] = [0.25, 0.5, 1.0];
pub const PDF_TOLERANCE: f64 = 1e-6;

/// Runs the configured suite end to end.
pub fn run_suite(cfg: &ExperimentConfig) -> Result<Report, LabError> {
    let setup = prepare(cfg)?;
    let set = run_prepared(cfg, &setup)?;
    let fixed_cut = setup.fixed.as_ref().and_then(|f| f.cut);
    let mut report = Report::new(cfg.suite, set);
    match cfg.suite {
        SuiteId::Tau => tau(cfg, &setup, fixed_cut.expect("checked by prepare"), &mut report)?,
        SuiteId::Ratio => ratio(cfg, &mut report)?,
        SuiteId::TwoOpt => two_opt(&mut report)?,
        SuiteId::Concentration => concentration(cfg, &mut report)?,
        SuiteId::Structure => structure(cfg, &mut report)?,
        SuiteId::Cdf => cdf(cfg, fixed_cut.expect("checked by prepare"), &mut report)?,
    }
    Ok(report)
}

fn push_eligible(report: &mut Report) {
    let set: &TrialSet = &report.trials;
    let (eligible, total) = (set.eligible(), set.records.len());
    report.notes.push(format!("eligible trials: {eligible} of {total} (disconnected draws skipped)"));
}

/// Adds a zero-violation check over a counter column.
fn zero_check(report: &mut Report, name: &str, column: &str) {
    let values = report.trials.values(column);
    let total = report.trials.total(column);
    report.push_check(name, total == 0, format!("{total} violations over {} trials", values.len()));
}

/// Adds a statistic when the column has values; otherwise notes the gap.
fn stat(report: &mut Report, column: &str, bracket: Option<(f64, f64)>, violations: u64) -> Option<SummaryStats> {
    match summarize(&report.trials, column) {
        Ok(s) => {
            let s = s.with_violations(violations);
            report.push_stat(column, s, bracket);
            Some(s)
        }
        Err(LabError::EmptySelection) => {
            report.notes.push(format!("{column}: no eligible values"));
            None
        }
        Err(e) => unreachable!("summarize only fails on empty input: {e}"),
    }
}

fn bracket_check(report: &mut Report, name: &str, s: &SummaryStats, (lo, hi): (f64, f64)) {
    let ok = s.ci_intersects(lo, hi);
    report.push_check(name, ok, format!("ci [{:.6}, {:.6}] vs bracket [{lo:.6}, {hi:.6}]", s.ci_low, s.ci_high));
}

fn tau(cfg: &ExperimentConfig, setup: &Setup, cut: CutParameters, report: &mut Report) -> Result<(), LabError> {
    let n = setup.n as u64;
    for k in 1..=n {
        let bracket = tau_expectation_bounds(n, k, cut.alpha, cut.beta);
        let col = format!("tau_{k}");
        if let Some(s) = stat(report, &col, Some(bracket), 0) {
            bracket_check(report, &format!("{col} bracket"), &s, bracket);
        }
    }
    // Random pair: average of the per-k brackets over the n - 1 other ranks.
    let (lo, hi) = (2..=n)
        .map(|k| tau_expectation_bounds(n, k, cut.alpha, cut.beta))
        .fold((0.0, 0.0), |(a, b), (l, h)| (a + l, b + h));
    let pair = (lo / (n - 1) as f64, hi / (n - 1) as f64);
    if let Some(s) = stat(report, "pair_dist", Some(pair), 0) {
        bracket_check(report, "pair_dist bracket", &s, pair);
    }
    // Each holding time chi_k (tau_{k+1} - tau_k) is Exp(1) given the past.
    if let Some(s) = stat(report, "birth_mean", Some((1.0, 1.0)), 0) {
        bracket_check(report, "birth holding times", &s, (1.0, 1.0));
    }
    zero_check(report, "cut size bounds", "cut_violations");
    report.notes.push(format!(
        "graph: {} with alpha = {}, beta = {}; vertex {}",
        model_name(cfg),
        cut.alpha,
        cut.beta,
        cfg.vertex
    ));
    Ok(())
}

fn model_name(cfg: &ExperimentConfig) -> String {
    match &cfg.model {
        GraphModel::Complete => format!("K_{}", cfg.n),
        GraphModel::ErdosRenyi { p } => format!("frozen G({}, {p})", cfg.n),
        GraphModel::Imported { path } => format!("imported {}", path.display()),
    }
}

fn ratio(cfg: &ExperimentConfig, report: &mut Report) -> Result<(), LabError> {
    push_eligible(report);
    let violations = report.trials.total("ratio_violation");
    stat(report, "heuristic", None, 0);
    stat(report, "exact", None, 0);
    let s = stat(report, "ratio", None, violations);
    zero_check(report, "ratio at least one", "ratio_violation");
    if let (Some(limit), Some(s)) = (cfg.max_mean_ratio, s) {
        report.push_check("mean ratio threshold", s.mean < limit, format!("mean {:.6} vs limit {limit}", s.mean));
    }
    report.notes.push(format!("ratio kind: {}", cfg.ratio));
    Ok(())
}

fn two_opt(report: &mut Report) -> Result<(), LabError> {
    push_eligible(report);
    let scale = report.trials.values("scale").first().copied();
    let violations = report.trials.total("monotone_violation");
    stat(report, "iterations", scale.map(|s| (0.0, s)), violations);
    stat(report, "initial_cost", None, 0);
    stat(report, "final_cost", None, 0);
    zero_check(report, "strict cost decrease", "monotone_violation");
    zero_check(report, "local optimum on rescan", "local_opt_violation");
    zero_check(report, "iterations within scale", "scale_violation");
    Ok(())
}

fn concentration(cfg: &ExperimentConfig, report: &mut Report) -> Result<(), LabError> {
    push_eligible(report);
    let range = report.trials.total("range_violation");
    stat(report, "alpha_over_p", None, 0);
    stat(report, "beta_over_p", None, 0);
    stat(report, "alpha", None, range);
    stat(report, "beta", None, range);
    let within = stat(report, "within", None, 0);
    zero_check(report, "0 < alpha <= beta <= 1", "range_violation");
    if let Some(min) = cfg.min_fraction {
        let fraction = within.map_or(0.0, |s| s.mean);
        report.push_check(
            "fraction within window",
            within.is_some() && fraction >= min,
            format!("fraction {fraction:.6} vs minimum {min} (epsilon = {})", cfg.epsilon),
        );
    }
    Ok(())
}

fn structure(cfg: &ExperimentConfig, report: &mut Report) -> Result<(), LabError> {
    push_eligible(report);
    stat(report, "alpha", None, 0);
    stat(report, "beta", None, 0);
    stat(report, "diameter", None, 0);
    zero_check(report, "metric axioms", "axiom_violations");
    zero_check(report, "cut size bounds", "cut_violations");
    for j in 0..cfg.delta_fractions.len() {
        let bad = report.trials.total(&format!("cluster_violations_{j}"));
        let scale = summarize(&report.trials, &format!("count_scale_{j}")).ok().map(|s| s.mean);
        stat(report, &format!("clusters_{j}"), scale.map(|s| (0.0, s)), bad);
        stat(report, &format!("count_scale_{j}"), None, 0);
        zero_check(
            report,
            &format!("cluster diameter at most 4 delta (delta = {} * diameter)", cfg.delta_fractions[j]),
            &format!("cluster_violations_{j}"),
        );
    }
    if report.trials.values("sandwich_violation").is_empty() {
        report.notes.push("sandwich skipped: n odd or above the exact caps".into());
    } else {
        let bad = report.trials.total("sandwich_violation");
        stat(report, "tsp", None, bad);
        stat(report, "mm", None, bad);
        stat(report, "s_half", None, bad);
        zero_check(report, "tsp >= mm >= s_half", "sandwich_violation");
    }
    Ok(())
}

/// Integrates the k-median order density for `k` in `{1, n/2, n-1}` over
/// the grid and returns the largest deviation of the total mass from one.
pub fn pdf_grid_error() -> f64 {
    let mut worst = 0.0f64;
    for &n in &PDF_GRID_N {
        for k in [1, n / 2, n - 1] {
            for &beta in &PDF_GRID_BETA {
                // The density is at most C(n-1, k) beta k e^{-beta k x}, so the
                // tail past `upper` carries less than 1e-12 of the mass.
                let upper = (ln_binomial(n - 1, k) + 28.0) / (beta * k as f64);
                let mass = integrate(|x| kmedian_order_pdf(x, n, k, beta), 0.0, upper, 1e-10);
                worst = worst.max((mass - 1.0).abs());
            }
        }
    }
    worst
}

fn cdf(cfg: &ExperimentConfig, cut: CutParameters, report: &mut Report) -> Result<(), LabError> {
    for (j, &(c, n)) in cfg.cdf_pairs.iter().enumerate() {
        let col = format!("expsum_{j}");
        let samples = report.trials.values(&col);
        let mean = harmonic(u64::from(n)) / c;
        stat(report, &col, Some((mean, mean)), 0);
        let ks = ks_distance(&samples, |a| exp_sum_cdf(c, n, a));
        report.push_check(
            format!("exp sum cdf (c = {c}, n = {n})"),
            ks < cfg.cdf_tolerance,
            format!("sup difference {ks:.6} vs tolerance {}", cfg.cdf_tolerance),
        );
    }

    let n = report.trials.n;
    let slack = dkw_half_width(report.trials.records.len());
    let mut sorted: Vec<Vec<f64>> = (1..=n)
        .map(|k| {
            let mut v = report.trials.values(&format!("tau_{k}"));
            v.sort_by(f64::total_cmp);
            v
        })
        .collect();
    let x_max = sorted[n - 1].last().copied().unwrap_or(0.0);
    let (mut misses, mut points, mut halves_win) = (0usize, 0usize, 0usize);
    for k in 1..=n {
        let values = &mut sorted[k - 1];
        let m = values.len() as f64;
        for i in 0..cfg.cdf_points {
            let x = x_max * (i + 1) as f64 / cfg.cdf_points as f64;
            let below = values.partition_point(|&t| t <= x) as f64;
            let empirical = below / m;
            let (lo, hi) = tau_cdf_bounds(x, n as u64, k as u64, cut.alpha, cut.beta);
            points += 1;
            if empirical < lo - slack || empirical > hi + slack {
                misses += 1;
            }
            let nf = n as f64;
            let prefix = (-(-cut.alpha * (nf - k as f64) * x).exp_m1()).powi(k as i32 - 1);
            if lo > prefix {
                halves_win += 1;
            }
        }
    }
    report.push_check(
        "tau cdf within bracket",
        misses == 0,
        format!("{misses} of {points} grid points outside bracket +- {slack:.6}"),
    );
    report.notes.push(format!(
        "tau cdf lower bound: the all-vertices form dominates the prefix form at {halves_win} of {points} grid points"
    ));

    let worst = pdf_grid_error();
    report.push_check(
        "k-median order density integrates to one",
        worst <= PDF_TOLERANCE,
        format!("largest |mass - 1| = {worst:.3e}"),
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::Seed;
    use crate::lab::config::RatioKind;

    fn complete(suite: SuiteId, n: usize, trials: u64) -> ExperimentConfig {
        let mut cfg = ExperimentConfig::new(suite);
        cfg.model = GraphModel::Complete;
        cfg.n = n;
        cfg.trials = trials;
        cfg.seed = Seed::new(11);
        cfg
    }

    #[test]
    fn k2_tau_mean_is_one() {
        let r = run_suite(&complete(SuiteId::Tau, 2, 4000)).unwrap();
        let s = r.stat("tau_2").unwrap();
        assert!(s.stats.ci_contains(1.0), "{:?}", s.stats);
        assert!(r.check("tau_2 bracket").unwrap().passed);
    }

    #[test]
    fn ratio_suite_never_below_one() {
        let mut cfg = complete(SuiteId::Ratio, 8, 50);
        cfg.ratio = RatioKind::Matching;
        let r = run_suite(&cfg).unwrap();
        assert!(r.check("ratio at least one").unwrap().passed);
        assert!(r.stat("ratio").unwrap().stats.min >= 1.0 - 1e-12);
    }

    #[test]
    fn two_opt_from_exact_start_does_nothing() {
        let mut cfg = complete(SuiteId::TwoOpt, 7, 20);
        cfg.two_opt_start = crate::lab::config::TwoOptStart::Exact;
        let r = run_suite(&cfg).unwrap();
        assert_eq!(r.stat("iterations").unwrap().stats.max, 0.0);
        assert!(r.passed());
    }

    #[test]
    fn concentration_p_one_all_within() {
        let mut cfg = complete(SuiteId::Concentration, 8, 10);
        cfg.model = GraphModel::ErdosRenyi { p: 1.0 };
        let r = run_suite(&cfg).unwrap();
        assert_eq!(r.stat("within").unwrap().stats.mean, 1.0);
    }

    #[test]
    fn concentration_p_zero_has_no_eligible_trials() {
        let mut cfg = complete(SuiteId::Concentration, 8, 10);
        cfg.model = GraphModel::ErdosRenyi { p: 0.0 };
        let r = run_suite(&cfg).unwrap();
        assert_eq!(r.trials.eligible(), 0);
        assert!(r.stat("within").is_none());
    }

    #[test]
    fn structure_k8_has_no_violations() {
        let r = run_suite(&complete(SuiteId::Structure, 8, 5)).unwrap();
        assert!(r.passed(), "{:?}", r.checks);
        // delta = 0 gives singletons
        assert_eq!(r.stat("clusters_0").unwrap().stats.mean, 8.0);
    }

    #[test]
    fn pdf_grid_is_normalised() {
        assert!(pdf_grid_error() <= PDF_TOLERANCE);
    }

    #[test]
    fn parallel_and_sequential_csv_agree() {
        let mut cfg = complete(SuiteId::Structure, 6, 30);
        cfg.model = GraphModel::ErdosRenyi { p: 0.7 };
        let a = run_suite(&cfg).unwrap().to_csv().unwrap();
        cfg.parallel = false;
        let b = run_suite(&cfg).unwrap().to_csv().unwrap();
        assert_eq!(a, b);
    }
}
