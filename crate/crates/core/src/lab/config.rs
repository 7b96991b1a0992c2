//! Experiment configuration and its flat `key = value` file format.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::Serialize;

use super::LabError;
use crate::graphs::{Seed, DEFAULT_CUT_CAP};
use crate::heuristics::{InsertionRule, PivotRule, DEFAULT_KMEDIAN_CAP, DEFAULT_MATCHING_CAP, DEFAULT_TSP_CAP};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GraphModel {
    Complete,
    ErdosRenyi {
        p: f64,
    },
    /// Graph file in the `n m` / `u v` format.
    Imported {
        path: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SuiteId {
    Tau,
    Ratio,
    TwoOpt,
    Concentration,
    Structure,
    Cdf,
}

impl SuiteId {
    pub const ALL: [SuiteId; 6] =
        [Self::Tau, Self::Ratio, Self::TwoOpt, Self::Concentration, Self::Structure, Self::Cdf];
}

impl fmt::Display for SuiteId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Tau => "tau",
            Self::Ratio => "ratio",
            Self::TwoOpt => "two-opt",
            Self::Concentration => "concentration",
            Self::Structure => "structure",
            Self::Cdf => "cdf",
        })
    }
}

impl FromStr for SuiteId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL.into_iter().find(|id| id.to_string() == s).ok_or_else(|| format!("unknown suite `{s}`"))
    }
}

/// Heuristic compared against its exact baseline by the ratio suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RatioKind {
    Matching,
    NearestNeighbor,
    Insertion(InsertionRule),
    KMedian,
}

impl fmt::Display for RatioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Matching => f.write_str("matching"),
            Self::NearestNeighbor => f.write_str("nn"),
            Self::Insertion(rule) => write!(f, "insertion:{rule}"),
            Self::KMedian => f.write_str("kmedian"),
        }
    }
}

impl FromStr for RatioKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "matching" | "greedy-matching" => Ok(Self::Matching),
            "nn" => Ok(Self::NearestNeighbor),
            "insertion" => Ok(Self::Insertion(InsertionRule::Nearest)),
            "kmedian" => Ok(Self::KMedian),
            other => match other.strip_prefix("insertion:") {
                Some(rule) => Ok(Self::Insertion(rule.parse()?)),
                None => Err(format!("unknown ratio kind `{other}`")),
            },
        }
    }
}

/// Initial tour handed to 2-opt.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TwoOptStart {
    Identity,
    NearestNeighbor,
    Exact,
}

impl FromStr for TwoOptStart {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "identity" => Ok(Self::Identity),
            "nn" => Ok(Self::NearestNeighbor),
            "exact" => Ok(Self::Exact),
            other => Err(format!("unknown 2-opt start `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(format!("unknown output format `{other}`")),
        }
    }
}

/// Size limits for the exact baselines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Caps {
    pub cut: usize,
    pub matching: usize,
    pub tsp: usize,
    /// Limit on `C(n, k)` for the exact k-median.
    pub kmedian: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            cut: DEFAULT_CUT_CAP,
            matching: DEFAULT_MATCHING_CAP,
            tsp: DEFAULT_TSP_CAP,
            kmedian: DEFAULT_KMEDIAN_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub suite: SuiteId,
    pub model: GraphModel,
    pub n: usize,
    pub trials: u64,
    pub seed: Seed,
    pub caps: Caps,
    /// Relative window for the concentration suite.
    pub epsilon: f64,
    /// Number of centers for the k-median ratio.
    pub k: usize,
    pub ratio: RatioKind,
    /// Start vertex of the nearest-neighbor tour.
    pub start: usize,
    /// Center vertex for tau profiles.
    pub vertex: usize,
    pub two_opt_start: TwoOptStart,
    pub pivot: PivotRule,
    /// Fractions of the diameter used as the clustering delta grid.
    pub delta_fractions: Vec<f64>,
    /// `(c, n)` pairs for the exponential-sum CDF check.
    pub cdf_pairs: Vec<(f64, u32)>,
    /// Largest accepted sup-distance between empirical and exact CDFs.
    pub cdf_tolerance: f64,
    /// Number of evaluation points for the tau CDF bracket check.
    pub cdf_points: usize,
    /// Optional upper limit on the mean ratio (ratio suite).
    pub max_mean_ratio: Option<f64>,
    /// Optional lower limit on the in-window fraction (concentration suite).
    pub min_fraction: Option<f64>,
    pub parallel: bool,
    pub format: OutputFormat,
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Defaults for every field except the suite.
    pub fn new(suite: SuiteId) -> Self {
        ExperimentConfig {
            suite,
            model: GraphModel::Complete,
            n: 12,
            trials: 200,
            seed: Seed::new(1),
            caps: Caps::default(),
            epsilon: 0.5,
            k: 2,
            ratio: RatioKind::Matching,
            start: 0,
            vertex: 0,
            two_opt_start: TwoOptStart::Identity,
            pivot: PivotRule::First,
            delta_fractions: vec![0.0, 0.125, 0.25, 0.5],
            cdf_pairs: vec![(1.0, 1), (2.0, 3), (0.5, 5)],
            cdf_tolerance: 0.02,
            cdf_points: 25,
            max_mean_ratio: None,
            min_fraction: None,
            parallel: true,
            format: OutputFormat::Csv,
            output: None,
        }
    }

    /// Parses the flat `key = value` format; `#` starts a comment. A
    /// `suite` key is required unless `suite` is given.
    pub fn parse(text: &str, suite: Option<SuiteId>) -> Result<Self, LabError> {
        let mut entries = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| LabError::ConfigInvalid(format!("line {}: expected key=value", idx + 1)))?;
            entries.push((key.trim().to_string(), value.trim().to_string()));
        }
        let suite = match (suite, entries.iter().find(|(k, _)| k == "suite")) {
            (Some(s), _) => s,
            (None, Some((_, v))) => v.parse().map_err(LabError::ConfigInvalid)?,
            (None, None) => return Err(LabError::ConfigInvalid("missing `suite`".into())),
        };
        let mut cfg = ExperimentConfig::new(suite);
        let mut model = "complete".to_string();
        let mut p = None;
        let mut graph = None;
        for (key, value) in entries {
            let bad = |what: &str| LabError::ConfigInvalid(format!("{key} = {value}: {what}"));
            let num = |v: &str| v.parse::<f64>().map_err(|_| bad("expected a number"));
            let int = |v: &str| v.parse::<u64>().map_err(|_| bad("expected a nonnegative integer"));
            match key.as_str() {
                "suite" => {}
                "model" => model = value.clone(),
                "p" => p = Some(num(&value)?),
                "graph" => graph = Some(PathBuf::from(&value)),
                "n" => cfg.n = int(&value)? as usize,
                "trials" => cfg.trials = int(&value)?,
                "seed" => cfg.seed = Seed::new(int(&value)?),
                "epsilon" => cfg.epsilon = num(&value)?,
                "k" => cfg.k = int(&value)? as usize,
                "kind" => cfg.ratio = value.parse().map_err(|e: String| bad(&e))?,
                "rule" => {
                    cfg.ratio = RatioKind::Insertion(value.parse().map_err(|e: String| bad(&e))?);
                }
                "start" => cfg.start = int(&value)? as usize,
                "vertex" => cfg.vertex = int(&value)? as usize,
                "two_opt_start" => cfg.two_opt_start = value.parse().map_err(|e: String| bad(&e))?,
                "pivot" => {
                    cfg.pivot = match value.as_str() {
                        "first" => PivotRule::First,
                        "best" => PivotRule::Best,
                        _ => return Err(bad("expected first or best")),
                    }
                }
                "cap_cut" => cfg.caps.cut = int(&value)? as usize,
                "cap_matching" => cfg.caps.matching = int(&value)? as usize,
                "cap_tsp" => cfg.caps.tsp = int(&value)? as usize,
                "cap_kmedian" => cfg.caps.kmedian = int(&value)?,
                "delta_fractions" => {
                    cfg.delta_fractions = value.split(',').map(|s| num(s.trim())).collect::<Result<_, _>>()?;
                }
                "cdf_pairs" => {
                    cfg.cdf_pairs = value
                        .split(',')
                        .map(|pair| {
                            let (c, n) = pair.trim().split_once(':').ok_or_else(|| bad("expected c:n pairs"))?;
                            Ok((num(c)?, int(n)? as u32))
                        })
                        .collect::<Result<_, LabError>>()?;
                }
                "cdf_tolerance" => cfg.cdf_tolerance = num(&value)?,
                "cdf_points" => cfg.cdf_points = int(&value)? as usize,
                "max_mean_ratio" => cfg.max_mean_ratio = Some(num(&value)?),
                "min_fraction" => cfg.min_fraction = Some(num(&value)?),
                "parallel" => {
                    cfg.parallel = value.parse().map_err(|_| bad("expected true or false"))?;
                }
                "format" => cfg.format = value.parse().map_err(|e: String| bad(&e))?,
                "output" => cfg.output = Some(PathBuf::from(&value)),
                _ => return Err(LabError::ConfigInvalid(format!("unknown key `{key}`"))),
            }
        }
        cfg.model = match model.as_str() {
            "complete" => GraphModel::Complete,
            "er" | "erdos-renyi" => {
                GraphModel::ErdosRenyi { p: p.ok_or_else(|| LabError::ConfigInvalid("model = er needs p".into()))? }
            }
            "imported" => GraphModel::Imported {
                path: graph.ok_or_else(|| LabError::ConfigInvalid("model = imported needs graph".into()))?,
            },
            other => return Err(LabError::ConfigInvalid(format!("unknown model `{other}`"))),
        };
        Ok(cfg)
    }

    /// Checks parameter ranges that do not depend on the graph itself.
    pub fn validate(&self) -> Result<(), LabError> {
        let fail = |msg: String| Err(LabError::ConfigInvalid(msg));
        if self.trials == 0 {
            return fail("trials must be at least 1".into());
        }
        if self.n < 2 && !matches!(self.model, GraphModel::Imported { .. }) {
            return fail(format!("n = {} must be at least 2", self.n));
        }
        if let GraphModel::ErdosRenyi { p } = self.model {
            if !(0.0..=1.0).contains(&p) {
                return fail(format!("p = {p} must lie in [0, 1]"));
            }
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return fail(format!("epsilon = {} must lie in (0, 1)", self.epsilon));
        }
        if self.delta_fractions.iter().any(|f| f.is_nan() || *f < 0.0) {
            return fail("delta fractions must be nonnegative".into());
        }
        let n = self.n;
        match self.suite {
            SuiteId::Ratio => match self.ratio {
                RatioKind::Matching if n % 2 == 1 => return fail(format!("matching needs even n, got {n}")),
                RatioKind::Matching if n > self.caps.matching => {
                    return fail(format!("n = {n} exceeds the matching cap {}", self.caps.matching))
                }
                RatioKind::NearestNeighbor | RatioKind::Insertion(_) if n > self.caps.tsp => {
                    return fail(format!("n = {n} exceeds the TSP cap {}", self.caps.tsp))
                }
                RatioKind::NearestNeighbor | RatioKind::Insertion(_) if n < 3 => {
                    return fail("tours need n >= 3".into())
                }
                RatioKind::KMedian if self.k == 0 || self.k >= n => {
                    return fail(format!("k = {} must lie in 1..={}", self.k, n - 1))
                }
                _ => {}
            },
            SuiteId::TwoOpt if self.two_opt_start == TwoOptStart::Exact && n > self.caps.tsp => {
                return fail(format!("exact start needs n <= {}", self.caps.tsp));
            }
            SuiteId::Concentration => {
                if !matches!(self.model, GraphModel::ErdosRenyi { .. } | GraphModel::Complete) {
                    return fail("concentration needs model = er or complete".into());
                }
                if n > self.caps.cut {
                    return fail(format!("n = {n} exceeds the cut-parameter cap {}", self.caps.cut));
                }
            }
            SuiteId::Structure if n > self.caps.cut && !matches!(self.model, GraphModel::Complete) => {
                return fail(format!("n = {n} exceeds the cut-parameter cap {}", self.caps.cut));
            }
            SuiteId::Tau | SuiteId::Cdf => {
                if matches!(self.model, GraphModel::ErdosRenyi { .. }) && n > self.caps.cut {
                    return fail(format!("n = {n} exceeds the cut-parameter cap {}", self.caps.cut));
                }
            }
            _ => {}
        }
        if matches!(self.model, GraphModel::Imported { .. }) {
            return Ok(());
        }
        if self.start >= n || self.vertex >= n {
            return fail(format!("start and vertex must be below n = {n}"));
        }
        Ok(())
    }
}
