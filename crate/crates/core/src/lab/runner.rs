//! Seeded trial execution.
//!
//! Trial `i` draws everything from `master.child(i, "trial")`, so a record
//! depends only on the configuration and its index. Records come back in
//! index order whether or not the trials ran in parallel.

use std::borrow::Cow;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::config::{ExperimentConfig, GraphModel, RatioKind, SuiteId, TwoOptStart};
use super::stats::SummaryStats;
use super::LabError;
use crate::graphs::{
    complete_graph, cut_parameters_exact_with_cap, draw_weights, generate_erdos_renyi, parse_graph_file,
    sum_lightest_edges, CutParameters, Graph, Seed,
};
use crate::heuristics::{
    exact_kmedian_with_cap, exact_matching_with_cap, exact_tsp_with_cap, greedy_matching, insertion_tour,
    is_two_opt_local_optimum, nearest_neighbor_tour, trivial_kmedian, two_opt_with, Tour, MIN_IMPROVEMENT,
};
use crate::metric::{build_metric, cluster_partition, diameter, tau_profile, Metric, TauProfile, METRIC_TOLERANCE};

/// Relative slack on `alpha k (n-k) <= chi_k <= beta k (n-k)`; the cut
/// parameters are rounded ratios of integers.
const CUT_RELATIVE_SLACK: f64 = 1e-12;

/// Attempts at drawing a connected `G(n, p)` before giving up on freezing.
const FREEZE_ATTEMPTS: u64 = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial: u64,
    /// Master value of the trial's child seed.
    pub seed: u64,
    pub connected: bool,
    /// One value per column of the owning [`TrialSet`]; NaN when the trial
    /// did not produce the statistic.
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialSet {
    pub n: usize,
    pub columns: Vec<String>,
    pub records: Vec<TrialRecord>,
}

impl TrialSet {
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Values of one column across records, skipping NaN entries.
    pub fn values(&self, name: &str) -> Vec<f64> {
        match self.column(name) {
            Some(idx) => self.records.iter().map(|r| r.values[idx]).filter(|v| !v.is_nan()).collect(),
            None => Vec::new(),
        }
    }

    /// Sum of a counter column (NaN entries skipped).
    pub fn total(&self, name: &str) -> u64 {
        self.values(name).iter().sum::<f64>() as u64
    }

    pub fn eligible(&self) -> usize {
        self.records.iter().filter(|r| r.connected).count()
    }
}

/// Mean, variance and 99% CI of the selected column.
pub fn summarize(set: &TrialSet, column: &str) -> Result<SummaryStats, LabError> {
    SummaryStats::from_values(&set.values(column))
}

/// Graph shared by every trial, with its exact cut parameters when known.
#[derive(Debug, Clone)]
pub(crate) struct Fixed {
    pub graph: Graph,
    pub cut: Option<CutParameters>,
}

#[derive(Debug, Clone)]
pub(crate) struct Setup {
    pub n: usize,
    pub fixed: Option<Fixed>,
}

fn exact_cut(graph: &Graph, cap: usize) -> Option<CutParameters> {
    if graph.is_complete() && graph.n() >= 2 {
        return Some(CutParameters::COMPLETE);
    }
    cut_parameters_exact_with_cap(graph, cap).ok()
}

/// Resolves the graph model: `K_n`, the imported file, or (for suites that
/// need one graph across trials) the first connected `G(n, p)` draw.
pub(crate) fn prepare(cfg: &ExperimentConfig) -> Result<Setup, LabError> {
    cfg.validate()?;
    let needs_frozen = matches!(cfg.suite, SuiteId::Tau | SuiteId::Cdf);
    let fixed = match &cfg.model {
        GraphModel::Complete => Some(Fixed { graph: complete_graph(cfg.n)?, cut: Some(CutParameters::COMPLETE) }),
        GraphModel::Imported { path } => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| LabError::ConfigInvalid(format!("cannot read {}: {e}", path.display())))?;
            let graph = parse_graph_file(&text)?.graph;
            let cut = exact_cut(&graph, cfg.caps.cut);
            Some(Fixed { graph, cut })
        }
        GraphModel::ErdosRenyi { p } if needs_frozen => {
            let graph = (0..FREEZE_ATTEMPTS)
                .map(|attempt| generate_erdos_renyi(cfg.n, *p, cfg.seed.child(attempt, "frozen-graph")))
                .find(|g| g.as_ref().map_or(true, Graph::is_connected))
                .ok_or_else(|| LabError::ConfigInvalid(format!("no connected G({}, {p}) draw found", cfg.n)))??;
            let cut = exact_cut(&graph, cfg.caps.cut);
            Some(Fixed { graph, cut })
        }
        GraphModel::ErdosRenyi { .. } => None,
    };
    let n = fixed.as_ref().map_or(cfg.n, |f| f.graph.n());
    if let Some(f) = &fixed {
        if matches!(cfg.suite, SuiteId::Tau | SuiteId::Cdf) {
            if !f.graph.is_connected() {
                return Err(LabError::ConfigInvalid("suite needs a connected graph".into()));
            }
            if f.cut.is_none() {
                return Err(LabError::ConfigInvalid(format!(
                    "exact cut parameters unavailable for n = {n} (cap {})",
                    cfg.caps.cut
                )));
            }
        }
        if cfg.vertex >= n || cfg.start >= n {
            return Err(LabError::ConfigInvalid(format!("start and vertex must be below n = {n}")));
        }
    }
    Ok(Setup { n, fixed })
}

pub(crate) fn columns(cfg: &ExperimentConfig, n: usize) -> Vec<String> {
    let mut cols: Vec<String> = Vec::new();
    let mut push = |s: &str| cols.push(s.to_string());
    match cfg.suite {
        SuiteId::Tau => {
            for c in ["pair_dist", "birth_mean", "cut_violations"] {
                push(c);
            }
            cols.extend((1..=n).map(|k| format!("tau_{k}")));
            cols.extend((1..n).map(|k| format!("chi_{k}")));
        }
        SuiteId::Ratio => {
            for c in ["heuristic", "exact", "ratio", "ratio_violation"] {
                push(c);
            }
        }
        SuiteId::TwoOpt => {
            for c in [
                "iterations",
                "initial_cost",
                "final_cost",
                "monotone_violation",
                "local_opt_violation",
                "scale",
                "scale_violation",
            ] {
                push(c);
            }
        }
        SuiteId::Concentration => {
            for c in ["alpha", "beta", "alpha_over_p", "beta_over_p", "within", "range_violation"] {
                push(c);
            }
        }
        SuiteId::Structure => {
            for c in ["alpha", "beta", "diameter", "axiom_violations", "cut_violations"] {
                push(c);
            }
            for j in 0..cfg.delta_fractions.len() {
                for c in ["delta", "clusters", "count_scale", "cluster_violations"] {
                    cols.push(format!("{c}_{j}"));
                }
            }
            for c in ["tsp", "mm", "s_half", "sandwich_violation"] {
                cols.push(c.to_string());
            }
        }
        SuiteId::Cdf => {
            cols.extend((0..cfg.cdf_pairs.len()).map(|j| format!("expsum_{j}")));
            cols.extend((1..=n).map(|k| format!("tau_{k}")));
        }
    }
    cols
}

/// Runs every trial of `cfg` and returns the records sorted by index.
pub fn run_trials(cfg: &ExperimentConfig) -> Result<TrialSet, LabError> {
    let setup = prepare(cfg)?;
    run_prepared(cfg, &setup)
}

pub(crate) fn run_prepared(cfg: &ExperimentConfig, setup: &Setup) -> Result<TrialSet, LabError> {
    let columns = columns(cfg, setup.n);
    let width = columns.len();
    let one = |i: u64| run_one(cfg, setup, &columns, i, width);
    let records = if cfg.parallel {
        (0..cfg.trials).into_par_iter().map(one).collect::<Result<Vec<_>, _>>()?
    } else {
        (0..cfg.trials).map(one).collect::<Result<Vec<_>, _>>()?
    };
    Ok(TrialSet { n: setup.n, columns, records })
}

struct Row<'a> {
    columns: &'a [String],
    values: Vec<f64>,
}

impl Row<'_> {
    fn set(&mut self, name: &str, value: f64) {
        let idx = self.columns.iter().position(|c| c == name).unwrap_or_else(|| panic!("no column {name}"));
        self.values[idx] = value;
    }
}

fn run_one(
    cfg: &ExperimentConfig,
    setup: &Setup,
    columns: &[String],
    trial: u64,
    width: usize,
) -> Result<TrialRecord, LabError> {
    let seed = cfg.seed.child(trial, "trial");
    let graph: Cow<Graph> = match &setup.fixed {
        Some(f) => Cow::Borrowed(&f.graph),
        None => {
            let p = match cfg.model {
                GraphModel::ErdosRenyi { p } => p,
                _ => unreachable!("only G(n, p) draws a graph per trial"),
            };
            Cow::Owned(generate_erdos_renyi(setup.n, p, seed.child(0, "graph"))?)
        }
    };
    let connected = graph.is_connected();
    let mut row = Row { columns, values: vec![f64::NAN; width] };
    if connected || cfg.suite == SuiteId::Cdf {
        let cut = match &setup.fixed {
            Some(f) => f.cut,
            None => exact_cut(&graph, cfg.caps.cut),
        };
        match cfg.suite {
            SuiteId::Tau => tau_trial(cfg, &graph, cut, seed, &mut row),
            SuiteId::Ratio => ratio_trial(cfg, &graph, seed, &mut row)?,
            SuiteId::TwoOpt => two_opt_trial(cfg, &graph, cut, seed, &mut row)?,
            SuiteId::Concentration => concentration_trial(cfg, cut, &mut row),
            SuiteId::Structure => structure_trial(cfg, &graph, cut, seed, &mut row)?,
            SuiteId::Cdf => cdf_trial(cfg, &graph, seed, &mut row),
        }
    }
    Ok(TrialRecord { trial, seed: seed.master, connected, values: row.values })
}

fn weighted_metric(graph: &Graph, seed: Seed) -> Metric {
    build_metric(&draw_weights(graph, seed.child(0, "weights")))
}

/// Counts `(v, k)` with `chi_k(v)` outside `[alpha k (n-k), beta k (n-k)]`.
pub fn cut_violations(profile: &TauProfile, cut: CutParameters) -> u64 {
    let n = profile.tau.len();
    (1..n)
        .filter(|&k| {
            let mu = (k * (n - k)) as f64;
            let chi = profile.chi_k(k) as f64;
            chi < cut.alpha * mu * (1.0 - CUT_RELATIVE_SLACK) || chi > cut.beta * mu * (1.0 + CUT_RELATIVE_SLACK)
        })
        .count() as u64
}

fn tau_trial(cfg: &ExperimentConfig, graph: &Graph, cut: Option<CutParameters>, seed: Seed, row: &mut Row) {
    let n = graph.n();
    let metric = weighted_metric(graph, seed);
    let profile = tau_profile(&metric, graph, cfg.vertex);
    let mut rng = seed.child(0, "pair").rng();
    let u = rng.random_range(0..n);
    let mut v = rng.random_range(0..n - 1);
    if v >= u {
        v += 1;
    }
    row.set("pair_dist", metric.d(u, v));
    let birth: f64 = (1..n).map(|k| profile.chi_k(k) as f64 * (profile.tau_k(k + 1) - profile.tau_k(k))).sum::<f64>()
        / (n - 1) as f64;
    row.set("birth_mean", birth);
    if let Some(cut) = cut {
        row.set("cut_violations", cut_violations(&profile, cut) as f64);
    }
    for k in 1..=n {
        row.set(&format!("tau_{k}"), profile.tau_k(k));
    }
    for k in 1..n {
        row.set(&format!("chi_{k}"), profile.chi_k(k) as f64);
    }
}

fn ratio_trial(cfg: &ExperimentConfig, graph: &Graph, seed: Seed, row: &mut Row) -> Result<(), LabError> {
    let metric = weighted_metric(graph, seed);
    let (heuristic, exact) = match cfg.ratio {
        RatioKind::Matching => {
            (greedy_matching(&metric)?.cost, exact_matching_with_cap(&metric, cfg.caps.matching)?.cost)
        }
        RatioKind::NearestNeighbor => {
            (nearest_neighbor_tour(&metric, cfg.start)?.cost, exact_tsp_with_cap(&metric, cfg.caps.tsp)?.cost)
        }
        RatioKind::Insertion(rule) => (
            insertion_tour(&metric, rule, seed.child(0, "insertion"))?.cost,
            exact_tsp_with_cap(&metric, cfg.caps.tsp)?.cost,
        ),
        RatioKind::KMedian => {
            let centers: Vec<usize> = (0..cfg.k).collect();
            (trivial_kmedian(&metric, &centers)?.cost, exact_kmedian_with_cap(&metric, cfg.k, cfg.caps.kmedian)?.cost)
        }
    };
    let ratio = heuristic / exact;
    row.set("heuristic", heuristic);
    row.set("exact", exact);
    row.set("ratio", ratio);
    row.set("ratio_violation", f64::from(u8::from(ratio < 1.0 - 1e-12)));
    Ok(())
}

/// Scale `n^8 ln^3(n) beta / alpha` of the expected 2-opt iteration count.
pub fn two_opt_scale(n: usize, cut: CutParameters) -> f64 {
    let nf = n as f64;
    nf.powi(8) * nf.ln().powi(3) * cut.beta / cut.alpha
}

fn two_opt_trial(
    cfg: &ExperimentConfig,
    graph: &Graph,
    cut: Option<CutParameters>,
    seed: Seed,
    row: &mut Row,
) -> Result<(), LabError> {
    let metric = weighted_metric(graph, seed);
    let initial = match cfg.two_opt_start {
        TwoOptStart::Identity => Tour::identity(&metric),
        TwoOptStart::NearestNeighbor => nearest_neighbor_tour(&metric, cfg.start)?,
        TwoOptStart::Exact => exact_tsp_with_cap(&metric, cfg.caps.tsp)?,
    };
    let trace = two_opt_with(&metric, &initial, cfg.pivot)?;
    let t = trace.iterations as f64;
    row.set("iterations", t);
    row.set("initial_cost", trace.initial_cost);
    row.set("final_cost", trace.final_tour.cost);
    row.set("monotone_violation", f64::from(u8::from(!trace.strictly_decreasing())));
    let local = is_two_opt_local_optimum(&metric, &trace.final_tour, MIN_IMPROVEMENT);
    row.set("local_opt_violation", f64::from(u8::from(!local)));
    if let Some(cut) = cut {
        let scale = two_opt_scale(graph.n(), cut);
        row.set("scale", scale);
        row.set("scale_violation", f64::from(u8::from(t > scale)));
    }
    Ok(())
}

fn concentration_trial(cfg: &ExperimentConfig, cut: Option<CutParameters>, row: &mut Row) {
    let p = match cfg.model {
        GraphModel::ErdosRenyi { p } => p,
        _ => 1.0,
    };
    let cut = cut.expect("connected graphs within the cap have exact cut parameters");
    row.set("alpha", cut.alpha);
    row.set("beta", cut.beta);
    row.set("alpha_over_p", cut.alpha / p);
    row.set("beta_over_p", cut.beta / p);
    let (lo, hi) = ((1.0 - cfg.epsilon) * p, (1.0 + cfg.epsilon) * p);
    row.set("within", f64::from(u8::from(lo <= cut.alpha && cut.beta <= hi)));
    let ordered = 0.0 < cut.alpha && cut.alpha <= cut.beta && cut.beta <= 1.0;
    row.set("range_violation", f64::from(u8::from(!ordered)));
}

fn structure_trial(
    cfg: &ExperimentConfig,
    graph: &Graph,
    cut: Option<CutParameters>,
    seed: Seed,
    row: &mut Row,
) -> Result<(), LabError> {
    let n = graph.n();
    let cut = cut.ok_or_else(|| LabError::ConfigInvalid("structure suite needs exact cut parameters".into()))?;
    let wg = draw_weights(graph, seed.child(0, "weights"));
    let metric = build_metric(&wg);
    let diam = diameter(&metric);
    row.set("alpha", cut.alpha);
    row.set("beta", cut.beta);
    row.set("diameter", diam);
    row.set("axiom_violations", metric.axiom_violations(METRIC_TOLERANCE) as f64);

    let cut_bad: u64 = (0..n).map(|v| cut_violations(&tau_profile(&metric, graph, v), cut)).sum();
    row.set("cut_violations", cut_bad as f64);

    for (j, &fraction) in cfg.delta_fractions.iter().enumerate() {
        let delta = fraction * diam;
        let part = cluster_partition(&metric, delta, cut.alpha);
        let bad = part.diameters.iter().filter(|&&d| d > 4.0 * delta + METRIC_TOLERANCE).count();
        row.set(&format!("delta_{j}"), delta);
        row.set(&format!("clusters_{j}"), part.len() as f64);
        row.set(&format!("count_scale_{j}"), n as f64 / part.s_delta);
        row.set(&format!("cluster_violations_{j}"), bad as f64);
    }

    if n.is_multiple_of(2) && n >= 4 && n <= cfg.caps.tsp && n <= cfg.caps.matching {
        let tsp = exact_tsp_with_cap(&metric, cfg.caps.tsp)?.cost;
        let mm = exact_matching_with_cap(&metric, cfg.caps.matching)?.cost;
        let s_half = sum_lightest_edges(&wg, n / 2)?;
        let bad = tsp < mm - METRIC_TOLERANCE || mm < s_half - METRIC_TOLERANCE;
        row.set("tsp", tsp);
        row.set("mm", mm);
        row.set("s_half", s_half);
        row.set("sandwich_violation", f64::from(u8::from(bad)));
    }
    Ok(())
}

/// One draw of `sum_{i=1}^n Exp(c i)` by inverse transform.
pub fn sample_exp_sum(c: f64, n: u32, seed: Seed) -> f64 {
    let mut rng = seed.rng();
    (1..=n).map(|i| -(1.0 - rng.random::<f64>()).ln() / (c * f64::from(i))).sum()
}

fn cdf_trial(cfg: &ExperimentConfig, graph: &Graph, seed: Seed, row: &mut Row) {
    for (j, &(c, n)) in cfg.cdf_pairs.iter().enumerate() {
        row.set(&format!("expsum_{j}"), sample_exp_sum(c, n, seed.child(j as u64, "expsum")));
    }
    let metric = weighted_metric(graph, seed);
    let profile = tau_profile(&metric, graph, cfg.vertex);
    for k in 1..=graph.n() {
        row.set(&format!("tau_{k}"), profile.tau_k(k));
    }
}
