//! Summary statistics with normal-approximation confidence intervals.

use serde::Serialize;

use super::LabError;

/// Two-sided 99% standard normal quantile.
pub const Z_99: f64 = 2.575_829_303_548_900_4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SummaryStats {
    pub count: usize,
    pub mean: f64,
    /// Sample variance (divisor `count - 1`); zero for a single value.
    pub variance: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub min: f64,
    pub max: f64,
    /// Deterministic-invariant violations attached by the caller.
    pub violations: u64,
}

impl SummaryStats {
    /// Summarizes `values` in the given order, so the floating-point result
    /// depends only on the order of the input.
    pub fn from_values(values: &[f64]) -> Result<Self, LabError> {
        if values.is_empty() {
            return Err(LabError::EmptySelection);
        }
        let count = values.len();
        let mean = values.iter().sum::<f64>() / count as f64;
        let variance =
            if count > 1 { values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (count - 1) as f64 } else { 0.0 };
        let half = Z_99 * (variance / count as f64).sqrt();
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok(SummaryStats { count, mean, variance, ci_low: mean - half, ci_high: mean + half, min, max, violations: 0 })
    }

    pub fn with_violations(mut self, violations: u64) -> Self {
        self.violations = violations;
        self
    }

    /// True iff `[lo, hi]` meets the confidence interval.
    pub fn ci_intersects(&self, lo: f64, hi: f64) -> bool {
        lo <= self.ci_high && hi >= self.ci_low
    }

    pub fn ci_contains(&self, x: f64) -> bool {
        self.ci_intersects(x, x)
    }
}

/// Half-width of the simultaneous 99% Dvoretzky–Kiefer–Wolfowitz band for an
/// empirical CDF built from `samples` draws.
pub fn dkw_half_width(samples: usize) -> f64 {
    ((2.0f64 / 0.01).ln() / (2.0 * samples as f64)).sqrt()
}

/// Kolmogorov–Smirnov distance `sup_x |F_n(x) - F(x)|` of a sample from a
/// continuous CDF.
pub fn ks_distance<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let m = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / m).abs().max(((i + 1) as f64 / m - f).abs())
        })
        .fold(0.0, f64::max)
}
