//! Sample summaries used by the Monte Carlo harness and the tests.

use serde::Serialize;

pub const DEFAULT_BINS: usize = 50;

pub fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Sample standard deviation (divisor `n − 1`); zero for a single draw.
pub fn sd(x: &[f64]) -> f64 {
    if x.len() < 2 {
        return 0.0;
    }
    let m = mean(x);
    (x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (x.len() - 1) as f64).sqrt()
}

/// Linear-interpolation quantile of already sorted data.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = p * (n - 1) as f64;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn sorted(x: &[f64]) -> Vec<f64> {
    let mut v = x.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Two-sample Kolmogorov–Smirnov distance `sup |F_a − F_b|`.
pub fn ks_distance(a: &[f64], b: &[f64]) -> f64 {
    let (a, b) = (sorted(a), sorted(b));
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Sample skewness and excess kurtosis (moment estimators).
pub fn skew_kurtosis(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let m = mean(x);
    let m2 = x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / n;
    let m3 = x.iter().map(|v| (v - m).powi(3)).sum::<f64>() / n;
    let m4 = x.iter().map(|v| (v - m).powi(4)).sum::<f64>() / n;
    (m3 / m2.powf(1.5), m4 / (m2 * m2) - 3.0)
}

/// Jarque–Bera statistic `n/6 (S² + K²/4)`, asymptotically χ²₂ under normality.
pub fn jarque_bera(x: &[f64]) -> f64 {
    let (s, k) = skew_kurtosis(x);
    x.len() as f64 / 6.0 * (s * s + 0.25 * k * k)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Quantiles {
    pub q01: f64,
    pub q05: f64,
    pub q50: f64,
    pub q95: f64,
    pub q99: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

impl Histogram {
    /// Equal-width bins spanning the data range; the last bin is closed.
    pub fn new(x: &[f64], bins: usize) -> Self {
        let bins = bins.max(1);
        let lo = x.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !(hi > lo) {
            return Self { edges: vec![lo, hi], counts: vec![x.len()] };
        }
        let width = (hi - lo) / bins as f64;
        let edges = (0..=bins).map(|i| lo + width * i as f64).collect();
        let mut counts = vec![0usize; bins];
        for v in x {
            let b = (((v - lo) / width) as usize).min(bins - 1);
            counts[b] += 1;
        }
        Self { edges, counts }
    }
}

/// Distribution summary of one scaled statistic across replications.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct McSummary {
    pub estimator: String,
    pub statistic: String,
    pub reps: usize,
    pub mean: f64,
    pub sd: f64,
    pub quantiles: Quantiles,
    pub histogram: Histogram,
}

impl McSummary {
    pub fn from_draws(estimator: &str, statistic: &str, draws: &[f64]) -> Self {
        let s = sorted(draws);
        let q = |p| quantile_sorted(&s, p);
        Self {
            estimator: estimator.to_string(),
            statistic: statistic.to_string(),
            reps: draws.len(),
            mean: mean(draws),
            sd: sd(draws),
            quantiles: Quantiles { q01: q(0.01), q05: q(0.05), q50: q(0.5), q95: q(0.95), q99: q(0.99) },
            histogram: Histogram::new(draws, DEFAULT_BINS),
        }
    }
}
