//! Model parametrisation, companion matrices, MA(∞) inversion and the
//! long-run covariance of the lagged differences.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal, StudentT};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jsr::spectral_radius;

/// Degrees-of-freedom range for Student-t innovations: finite variance and `2 f_u(0) > 1`.
pub const STUDENT_T_NU_RANGE: (f64, f64) = (2.0, 4.6);

const OMEGA_TRUNCATION_EPS: f64 = 1e-12;
const OMEGA_TRUNCATION_CAP: usize = 100_000;

/// Innovation law, always standardised to mean zero and variance `σ²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum Innovation {
    Gaussian,
    /// Laplace with scale `b = σ/√2`.
    Laplace,
    /// Student-t scaled by `√((ν−2)/ν)`.
    StudentT { nu: f64 },
}

impl Innovation {
    pub fn validate(&self) -> Result<()> {
        if let Innovation::StudentT { nu } = *self {
            let (lo, hi) = STUDENT_T_NU_RANGE;
            if !(nu > lo && nu <= hi) {
                return Err(Error::InvalidSpec(format!(
                    "student_t degrees of freedom must lie in ({lo}, {hi}], got {nu}"
                )));
            }
        }
        Ok(())
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, sigma: f64) -> f64 {
        match *self {
            Innovation::Gaussian => {
                let z: f64 = StandardNormal.sample(rng);
                sigma * z
            }
            Innovation::Laplace => {
                // inverse cdf on (-1/2, 1/2)
                let b = sigma / std::f64::consts::SQRT_2;
                let v: f64 = rng.random::<f64>() - 0.5;
                -b * v.signum() * (1.0 - 2.0 * v.abs()).ln()
            }
            Innovation::StudentT { nu } => {
                let t: f64 = StudentT::new(nu)
                    .expect("degrees of freedom validated")
                    .sample(rng);
                sigma * ((nu - 2.0) / nu).sqrt() * t
            }
        }
    }

    /// Density of `u_t` at zero.
    pub fn density_at_zero(&self, sigma: f64) -> f64 {
        match *self {
            Innovation::Gaussian => 1.0 / (sigma * (2.0 * std::f64::consts::PI).sqrt()),
            Innovation::Laplace => 1.0 / (sigma * std::f64::consts::SQRT_2),
            Innovation::StudentT { nu } => {
                let scale = sigma * ((nu - 2.0) / nu).sqrt();
                let log_c = libm::lgamma(0.5 * (nu + 1.0))
                    - libm::lgamma(0.5 * nu)
                    - 0.5 * (nu * std::f64::consts::PI).ln();
                log_c.exp() / scale
            }
        }
    }

    /// `E|u_t|`.
    pub fn mean_abs(&self, sigma: f64) -> f64 {
        match *self {
            Innovation::Gaussian => sigma * (2.0 / std::f64::consts::PI).sqrt(),
            Innovation::Laplace => sigma / std::f64::consts::SQRT_2,
            Innovation::StudentT { nu } => {
                let scale = sigma * ((nu - 2.0) / nu).sqrt();
                let log_m = libm::lgamma(0.5 * (nu + 1.0)) - libm::lgamma(0.5 * nu)
                    + 0.5 * nu.ln()
                    - 0.5 * std::f64::consts::PI.ln();
                scale * 2.0 * log_m.exp() / (nu - 1.0)
            }
        }
    }
}

/// Full parametrisation of a dynamic Tobit of order `k = phi.len() + 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub alpha: f64,
    pub beta: f64,
    /// Short-run coefficients on `Δy_{t-1}, …, Δy_{t-k+1}`.
    pub phi: Vec<f64>,
    pub sigma: f64,
    pub innovation: Innovation,
}

impl ModelSpec {
    pub fn new(alpha: f64, beta: f64, phi: Vec<f64>, sigma: f64, innovation: Innovation) -> Result<Self> {
        let spec = Self { alpha, beta, phi, sigma, innovation };
        spec.validate()?;
        Ok(spec)
    }

    pub fn k(&self) -> usize {
        self.phi.len() + 1
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::InvalidSpec(format!("sigma must be positive, got {}", self.sigma)));
        }
        if !self.alpha.is_finite() || !self.beta.is_finite() || self.phi.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidSpec("coefficients must be finite".into()));
        }
        self.innovation.validate()
    }
}

/// Local-to-unity drift parametrisation: `α = a0/√T`, `β = 1 + c0/T`, `y_0 = b0·√T`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LurSpec {
    pub a0: f64,
    pub c0: f64,
    pub b0: f64,
    #[serde(rename = "T")]
    pub t: usize,
}

impl LurSpec {
    pub fn new(a0: f64, c0: f64, b0: f64, t: usize) -> Result<Self> {
        let lur = Self { a0, c0, b0, t };
        lur.validate()?;
        Ok(lur)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.b0 >= 0.0) {
            return Err(Error::InvalidSpec(format!("b0 must be non-negative, got {}", self.b0)));
        }
        if self.t == 0 {
            return Err(Error::InvalidSpec("sample size T must be at least 1".into()));
        }
        Ok(())
    }

    pub fn alpha(&self) -> f64 {
        self.a0 / (self.t as f64).sqrt()
    }

    pub fn beta(&self) -> f64 {
        1.0 + self.c0 / self.t as f64
    }

    /// Initial level `b0·√T`, not rounded.
    pub fn y0(&self) -> f64 {
        self.b0 * (self.t as f64).sqrt()
    }

    pub fn model(&self, phi: Vec<f64>, sigma: f64, innovation: Innovation) -> Result<ModelSpec> {
        ModelSpec::new(self.alpha(), self.beta(), phi, sigma, innovation)
    }
}

/// Observed non-negative series `y_1..y_T` with its initial conditions.
///
/// `presample` holds `y_{-p+1}..y_0`. An estimator of order `k` needs `k`
/// initial values; when fewer are stored the leading observations are used
/// as initial conditions instead.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Series {
    presample: Vec<f64>,
    values: Vec<f64>,
}

impl Series {
    pub fn new(presample: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        for (i, v) in presample.iter().chain(values.iter()).enumerate() {
            if !v.is_finite() || *v < 0.0 {
                return Err(Error::InvalidSeries(format!(
                    "entry {i} is {v}; every value must be finite and non-negative"
                )));
            }
        }
        Ok(Self { presample, values })
    }

    /// Series with no stored initial conditions.
    pub fn from_observations(values: Vec<f64>) -> Result<Self> {
        Self::new(Vec::new(), values)
    }

    pub fn presample(&self) -> &[f64] {
        &self.presample
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Presample followed by the observations.
    pub fn full_path(&self) -> Vec<f64> {
        let mut z = Vec::with_capacity(self.presample.len() + self.values.len());
        z.extend_from_slice(&self.presample);
        z.extend_from_slice(&self.values);
        z
    }

    pub fn n_zeros(&self) -> usize {
        self.values.iter().filter(|v| **v == 0.0).count()
    }

    /// Multiplies every entry by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(
            self.presample.iter().map(|v| v * c).collect(),
            self.values.iter().map(|v| v * c).collect(),
        )
    }
}

/// The two companion-form matrices `F_0` and `F_1` (censored and uncensored regimes).
#[derive(Clone, Debug, PartialEq)]
pub struct CompanionPair {
    pub f0: DMatrix<f64>,
    pub f1: DMatrix<f64>,
}

impl CompanionPair {
    pub fn dim(&self) -> usize {
        self.f1.nrows()
    }
}

/// `F_δ` has first row `(φ₁δ, φ₂, …, φ_{k−1})`, `δ` in position (2,1) and
/// ones on the remaining subdiagonal.
pub fn companion_matrices(phi: &[f64]) -> CompanionPair {
    let d = phi.len();
    let build = |delta: f64| {
        let mut f = DMatrix::zeros(d, d);
        for (j, p) in phi.iter().enumerate() {
            f[(0, j)] = *p;
        }
        for i in 1..d {
            f[(i, i - 1)] = 1.0;
        }
        if d > 0 {
            f[(0, 0)] *= delta;
        }
        if d > 1 {
            f[(1, 0)] = delta;
        }
        f
    };
    CompanionPair { f0: build(0.0), f1: build(1.0) }
}

/// `φ(1) = 1 − Σ φ_i`.
pub fn phi_at_one(phi: &[f64]) -> f64 {
    1.0 - phi.iter().sum::<f64>()
}

/// Coefficients `γ_0..γ_N` of `φ(z)^{-1}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MaCoefficients {
    pub gamma: Vec<f64>,
    pub truncation: usize,
}

impl MaCoefficients {
    /// Evaluates `Σ γ_i z^i`.
    pub fn eval(&self, z: f64) -> f64 {
        self.gamma.iter().rev().fold(0.0, |acc, g| acc * z + g)
    }
}

fn check_stationary(phi: &[f64]) -> Result<f64> {
    if phi.is_empty() {
        return Ok(0.0);
    }
    let r = spectral_radius(&companion_matrices(phi).f1);
    if r >= 1.0 {
        return Err(Error::NonStationary(format!(
            "companion spectral radius {r} ≥ 1 for phi = {phi:?}"
        )));
    }
    Ok(r)
}

fn gamma_recursion(phi: &[f64], gamma: &[f64], n: usize) -> f64 {
    phi.iter()
        .take(n)
        .enumerate()
        .map(|(i, p)| p * gamma[n - 1 - i])
        .sum()
}

/// `γ_0 = 1`, `γ_n = Σ_{i=1..min(n,k−1)} φ_i γ_{n−i}`, truncated at `n`.
pub fn ma_coefficients(phi: &[f64], n: usize) -> Result<MaCoefficients> {
    check_stationary(phi)?;
    let mut gamma = Vec::with_capacity(n + 1);
    gamma.push(1.0);
    for m in 1..=n {
        let g = gamma_recursion(phi, &gamma, m);
        gamma.push(g);
        if !g.is_finite() || g.abs() > 1e12 {
            return Err(Error::NonStationary(format!("|γ_{m}| = {g:e} diverges")));
        }
    }
    Ok(MaCoefficients { gamma, truncation: n })
}

/// Truncation at the first `n` whose trailing `max(k−1, 1)` coefficients are all
/// below `1e-12` in absolute value, capped at `10⁵`.
pub fn ma_coefficients_auto(phi: &[f64]) -> Result<MaCoefficients> {
    check_stationary(phi)?;
    let d = phi.len().max(1);
    let mut gamma = vec![1.0];
    let mut small_run = 0usize;
    for m in 1..=OMEGA_TRUNCATION_CAP {
        let g = gamma_recursion(phi, &gamma, m);
        gamma.push(g);
        if g.abs() < OMEGA_TRUNCATION_EPS {
            small_run += 1;
            if small_run >= d {
                break;
            }
        } else {
            small_run = 0;
        }
    }
    let truncation = gamma.len() - 1;
    Ok(MaCoefficients { gamma, truncation })
}

/// `Ω_{ij} = σ² Σ_n γ_n γ_{n+|i−j|}` with the truncation used and an estimate of the
/// neglected tail.
#[derive(Clone, Debug, PartialEq)]
pub struct OmegaMatrix {
    pub matrix: DMatrix<f64>,
    pub truncation: usize,
    pub tail_estimate: f64,
}

pub fn theoretical_omega(phi: &[f64], sigma: f64, n: Option<usize>) -> Result<OmegaMatrix> {
    if !(sigma > 0.0) {
        return Err(Error::Domain(format!("sigma must be positive, got {sigma}")));
    }
    let d = phi.len();
    let radius = check_stationary(phi)?;
    let ma = match n {
        Some(n) => ma_coefficients(phi, n)?,
        None => ma_coefficients_auto(phi)?,
    };
    let g = &ma.gamma;
    let s2 = sigma * sigma;
    let mut matrix = DMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            let h = i.abs_diff(j);
            let sum: f64 = g.iter().zip(g.iter().skip(h)).map(|(a, b)| a * b).sum();
            matrix[(i, j)] = s2 * sum;
        }
    }
    let last = g.iter().rev().take(d.max(1)).fold(0.0f64, |m, v| m.max(v.abs()));
    let tail_estimate = if d == 0 { 0.0 } else { s2 * last * last / (1.0 - radius * radius) };
    Ok(OmegaMatrix { matrix, truncation: ma.truncation, tail_estimate })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn companion_scalar() {
        let c = companion_matrices(&[0.5]);
        assert_eq!(c.f0, DMatrix::from_row_slice(1, 1, &[0.0]));
        assert_eq!(c.f1, DMatrix::from_row_slice(1, 1, &[0.5]));
    }

    #[test]
    fn companion_two_lags() {
        let c = companion_matrices(&[0.3, 0.2]);
        assert_eq!(c.f1, DMatrix::from_row_slice(2, 2, &[0.3, 0.2, 1.0, 0.0]));
        assert_eq!(c.f0, DMatrix::from_row_slice(2, 2, &[0.0, 0.2, 0.0, 0.0]));
    }

    #[test]
    fn companion_first_column_zeroed_only() {
        let c = companion_matrices(&[0.1, 0.2, 0.3, 0.4]);
        let mut expected = c.f1.clone();
        expected.column_mut(0).fill(0.0);
        assert_eq!(c.f0, expected);
        assert_eq!(c.f1[(3, 2)], 1.0);
        assert_eq!(c.f1[(2, 1)], 1.0);
    }

    #[test]
    fn companion_empty_for_k1() {
        let c = companion_matrices(&[]);
        assert_eq!(c.dim(), 0);
        assert_eq!(c.f0.len(), 0);
    }

    #[test]
    fn phi_at_one_values() {
        assert_eq!(phi_at_one(&[]), 1.0);
        assert_eq!(phi_at_one(&[0.5]), 0.5);
        assert!((phi_at_one(&[0.3, 0.2]) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn ma_geometric() {
        let ma = ma_coefficients(&[0.5], 4).unwrap();
        let oracle: Vec<f64> = (0..5).map(|n| 0.5f64.powi(n)).collect();
        assert_eq!(ma.gamma, oracle);
    }

    #[test]
    fn ma_trivial_and_two_lags() {
        assert_eq!(ma_coefficients(&[], 2).unwrap().gamma, vec![1.0, 0.0, 0.0]);
        let g = ma_coefficients(&[0.3, 0.2], 2).unwrap().gamma;
        assert_eq!(g[0], 1.0);
        assert!((g[1] - 0.3).abs() < 1e-15);
        assert!((g[2] - 0.29).abs() < 1e-15);
    }

    #[test]
    fn ma_rejects_unit_root() {
        assert!(matches!(ma_coefficients(&[1.0], 10), Err(Error::NonStationary(_))));
        assert!(matches!(ma_coefficients(&[0.6, 0.5], 10), Err(Error::NonStationary(_))));
    }

    #[test]
    fn auto_truncation_survives_zero_coefficients() {
        // γ_1 = 0 but the polynomial is far from trivial
        let ma = ma_coefficients_auto(&[0.0, 0.5]).unwrap();
        assert!(ma.truncation > 50);
        assert!((ma.gamma[2] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn omega_scalar_closed_form() {
        let om = theoretical_omega(&[0.5], 1.0, None).unwrap();
        assert!((om.matrix[(0, 0)] - 4.0 / 3.0).abs() < 1e-14);
        assert!(om.tail_estimate < 1e-20);
    }

    #[test]
    fn omega_empty_for_k1() {
        let om = theoretical_omega(&[], 2.0, None).unwrap();
        assert_eq!(om.matrix.nrows(), 0);
    }

    #[test]
    fn omega_ar2_matches_yule_walker() {
        // AR(2) autocovariances: γ0 = (1−φ2)σ²/((1+φ2)((1−φ2)²−φ1²)), γ1 = φ1 γ0/(1−φ2)
        let (p1, p2): (f64, f64) = (0.3, 0.2);
        let g0 = (1.0 - p2) / ((1.0 + p2) * ((1.0 - p2).powi(2) - p1 * p1));
        let g1 = p1 * g0 / (1.0 - p2);
        let om = theoretical_omega(&[p1, p2], 1.0, None).unwrap();
        assert!((om.matrix[(0, 0)] - g0).abs() < 1e-12);
        assert!((om.matrix[(1, 1)] - g0).abs() < 1e-12);
        assert!((om.matrix[(0, 1)] - g1).abs() < 1e-12);
    }

    #[test]
    fn innovation_moments() {
        let g = Innovation::Gaussian;
        assert!((g.density_at_zero(1.0) - 0.398_942_280_401_432_7).abs() < 1e-15);
        assert!((g.mean_abs(1.0) - (2.0 / std::f64::consts::PI).sqrt()).abs() < 1e-15);
        let l = Innovation::Laplace;
        assert!((l.density_at_zero(1.0) - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        // t_3 standardised: f(0) = Γ(2)/(√(3π)Γ(3/2)) · √3 = 2/π
        let t = Innovation::StudentT { nu: 3.0 };
        assert!((t.density_at_zero(1.0) - 2.0 / std::f64::consts::PI).abs() < 1e-12);
        // E|t_3| = 2√3/π, scaled by 1/√3
        assert!((t.mean_abs(1.0) - 2.0 / std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn student_t_range_enforced() {
        assert!(Innovation::StudentT { nu: 2.0 }.validate().is_err());
        assert!(Innovation::StudentT { nu: 5.0 }.validate().is_err());
        assert!(Innovation::StudentT { nu: 4.6 }.validate().is_ok());
    }

    #[test]
    fn spec_validation() {
        assert!(ModelSpec::new(0.0, 1.0, vec![0.5], 0.0, Innovation::Gaussian).is_err());
        assert!(LurSpec::new(0.0, 0.0, -1.0, 100).is_err());
        let lur = LurSpec::new(0.0, -5.0, 1.0, 1000).unwrap();
        assert!((lur.beta() - 0.995).abs() < 1e-15);
        assert_eq!(LurSpec::new(0.0, 0.0, 1.0, 400).unwrap().y0(), 20.0);
    }

    #[test]
    fn series_rejects_negative() {
        assert!(Series::new(vec![0.0], vec![1.0, -0.1]).is_err());
        assert!(Series::new(vec![], vec![f64::NAN]).is_err());
    }
}
