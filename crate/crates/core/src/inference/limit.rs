use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{phi_at_one, LurSpec};
use crate::rng::substream;
use crate::simulate::{check_limit_inputs, reflect, simulate_w_and_k, DrivingPaths};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "estimator", rename_all = "lowercase")]
pub enum LimitEstimator {
    Mle,
    /// `f0 = f_u(0)` and `mean_abs = E|u|` of the innovation law.
    Clad { f0: f64, mean_abs: f64 },
}

/// One draw of the limit of `(√T(α̂ − α₀), T(β̂ − β₀))` with its functionals.
/// `b1` and `int_y_db` use `W` for the MLE and `W̃` for CLAD.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LimitDraw {
    pub alpha_comp: f64,
    pub beta_comp: f64,
    pub int_y: f64,
    pub int_y2: f64,
    pub w1: f64,
    pub b1: f64,
    pub int_y_db: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LimitSample {
    pub draws: Vec<LimitDraw>,
    pub warnings: Vec<String>,
}

/// Constants of `dY = cY dτ + φ(1)^{-1}(a₀ dτ + σ dW)` away from zero.
#[derive(Clone, Copy)]
struct Dynamics {
    phi1: f64,
    sigma: f64,
    c: f64,
    a0: f64,
}

/// Functionals of the reflected path `y` on its grid. `∫Y dW` follows from
/// Itô's formula for `Y²`, since the reflection only acts where `Y = 0`:
/// `∫Y dW = (φ/σ) [(Y(1)² − Y(0)² − σ²/φ²)/2 − c∫Y² − (a₀/φ)∫Y]`.
/// When `z` is given, `B = ρW + √(1 − ρ²) Z` and `∫Y dZ` is a left-endpoint sum.
fn functionals(y: &[f64], w: &[f64], z: Option<(&[f64], f64)>, dynamics: Dynamics, scale: f64) -> LimitDraw {
    let Dynamics { phi1, sigma, c, a0 } = dynamics;
    let n = y.len() - 1;
    let dt = 1.0 / n as f64;
    let int_y = y[..n].iter().sum::<f64>() * dt;
    let int_y2 = y[..n].iter().map(|v| v * v).sum::<f64>() * dt;
    let ito = 0.5 * (y[n] * y[n] - y[0] * y[0] - sigma * sigma / (phi1 * phi1)) - c * int_y2 - a0 / phi1 * int_y;
    let int_y_dw = phi1 / sigma * ito;
    let (b1, int_y_db) = match z {
        None => (w[n], int_y_dw),
        Some((z, rho)) => {
            let s = (1.0 - rho * rho).max(0.0).sqrt();
            let int_y_dz: f64 = (0..n).map(|i| y[i] * (z[i + 1] - z[i])).sum();
            (rho * w[n] + s * z[n], rho * int_y_dw + s * int_y_dz)
        }
    };
    let det = int_y2 - int_y * int_y;
    LimitDraw {
        alpha_comp: scale * (int_y2 * b1 - int_y * int_y_db) / det,
        beta_comp: scale * (int_y_db - int_y * b1) / det,
        int_y,
        int_y2,
        w1: w[n],
        b1,
        int_y_db,
    }
}

/// Draws `scale · G⁻¹ (B(1), ∫Y dB)ᵀ` with `G = [[1, ∫Y], [∫Y, ∫Y²]]`, using
/// left-endpoint sums on an `n`-step grid. Draw `r` uses stream `r` of `seed`.
pub fn limit_distribution(
    lur: &LurSpec,
    phi: &[f64],
    sigma: f64,
    estimator: LimitEstimator,
    n: usize,
    reps: usize,
    seed: u64,
) -> Result<LimitSample> {
    let warnings = check_limit_inputs(lur, phi, sigma, n)?;
    if reps == 0 {
        return Err(Error::InvalidSpec("reps must be at least 1".into()));
    }
    let (scale, corr) = match estimator {
        LimitEstimator::Mle => (sigma, 1.0f64),
        LimitEstimator::Clad { f0, mean_abs } => {
            if !(f0 > 0.0 && f0.is_finite()) {
                return Err(Error::Domain(format!("f0 must be positive, got {f0}")));
            }
            let rho = mean_abs / sigma;
            if !(rho > 0.0 && rho <= 1.0) {
                return Err(Error::Domain(format!("E|u| must lie in (0, sigma], got {mean_abs}")));
            }
            (0.5 / f0, rho)
        }
    };
    let phi1 = phi_at_one(phi);
    let c = lur.c0 / phi1;
    let dt = 1.0 / n as f64;
    let dynamics = Dynamics { phi1, sigma, c, a0: lur.a0 };
    let draws = (0..reps as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = substream(seed, r);
            let DrivingPaths { w, k, k_min } = simulate_w_and_k(lur, phi, sigma, n, &mut rng);
            let y = reflect(&k, &k_min, phi1, c);
            if corr < 1.0 {
                let mut z = Vec::with_capacity(n + 1);
                z.push(0.0);
                for i in 0..n {
                    let e: f64 = StandardNormal.sample(&mut rng);
                    z.push(z[i] + dt.sqrt() * e);
                }
                functionals(&y, &w, Some((&z, corr)), dynamics, scale)
            } else {
                functionals(&y, &w, None, dynamics, scale)
            }
        })
        .collect();
    Ok(LimitSample { draws, warnings })
}
