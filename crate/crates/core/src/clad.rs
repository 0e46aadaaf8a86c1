//! Powell's censored least absolute deviations estimator.

use nalgebra::DMatrix;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::design::{dot, short_run_scale, Design};
use crate::error::{Error, Result};
use crate::mle::{fit_mle_design, MleFit, MleOptions};
use crate::model::Series;
use crate::ols::fit_ols_design;
use crate::rng::substream;
use crate::simplex::{minimize, NelderMeadOptions};

/// Normal-consistency factor for the median absolute deviation.
const MAD_SCALE: f64 = 1.4826;
const EVALS_PER_DIM: usize = 3000;
const RESTARTS: usize = 4;

/// `S_T(ρ) = Σ_t |y_t − [α + β y_{t−1} + φᵀΔy_{t−1}]₊|`.
pub fn clad_objective(rho: &[f64], series: &Series) -> Result<f64> {
    let design = Design::new(series, rho.len() - 1)?;
    Ok(objective(rho, &design))
}

pub fn objective(rho: &[f64], design: &Design) -> f64 {
    design.rows().map(|(w, y)| (y - dot(w, rho).max(0.0)).abs()).sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bandwidth {
    /// `h = 1.4826 · median|r| · N₊^{−1/5}` over positive-index residuals.
    Auto,
    Fixed(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct CladOptions {
    /// Total number of starts: MLE, OLS, then perturbations of the MLE start.
    pub starts: usize,
    pub simplex_tol: f64,
    pub bandwidth: Bandwidth,
    /// Seed for the perturbed starts.
    pub seed: u64,
    pub mle: MleOptions,
}

impl Default for CladOptions {
    fn default() -> Self {
        Self { starts: 5, simplex_tol: 1e-8, bandwidth: Bandwidth::Auto, seed: 0, mle: MleOptions::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StartOutcome {
    pub label: String,
    pub objective: f64,
    pub converged: bool,
    pub evals: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityEstimate {
    pub f0: f64,
    pub bandwidth: f64,
    /// Observations with a positive fitted index.
    pub n_positive: usize,
    /// Positive-index residuals inside `[−h, h]`.
    pub n_window: usize,
}

#[derive(Clone, Debug)]
pub struct CladFit {
    pub alpha_hat: f64,
    pub beta_hat: f64,
    pub phi_hat: Vec<f64>,
    pub objective: f64,
    pub f0_hat: f64,
    pub bandwidth: f64,
    pub omega_hat: DMatrix<f64>,
    /// `(1/(2 f̂₀)) √((Ω̂⁻¹)_{ii}/T)`.
    pub se_phi: Vec<f64>,
    pub t_phi: Vec<f64>,
    pub starts: Vec<StartOutcome>,
    pub best_start: String,
    pub n_obs: usize,
    pub n_censored: usize,
}

impl CladFit {
    pub fn coefficients(&self) -> Vec<f64> {
        let mut c = vec![self.alpha_hat, self.beta_hat];
        c.extend_from_slice(&self.phi_hat);
        c
    }
}

/// Uniform-kernel estimate of a residual density at zero:
/// `#{|r| ≤ h} / (2 h N)`.
pub fn density_at_zero(residuals: &[f64], bandwidth: Bandwidth) -> Result<DensityEstimate> {
    let n = residuals.len();
    if n == 0 {
        return Err(Error::DegenerateDensity("no observations with a positive fitted index".into()));
    }
    let h = match bandwidth {
        Bandwidth::Fixed(h) => h,
        Bandwidth::Auto => {
            let mut abs: Vec<f64> = residuals.iter().map(|r| r.abs()).collect();
            let mid = n / 2;
            let (_, m, _) = abs.select_nth_unstable_by(mid, f64::total_cmp);
            let mut median = *m;
            if n % 2 == 0 {
                let lower = abs[..mid].iter().copied().fold(f64::NEG_INFINITY, f64::max);
                median = 0.5 * (median + lower);
            }
            MAD_SCALE * median * (n as f64).powf(-0.2)
        }
    };
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::DegenerateDensity(format!("bandwidth must be positive, got {h}")));
    }
    let n_window = residuals.iter().filter(|r| r.abs() <= h).count();
    if n_window == 0 {
        return Err(Error::DegenerateDensity(format!("no residuals within bandwidth {h}")));
    }
    Ok(DensityEstimate { f0: n_window as f64 / (2.0 * h * n as f64), bandwidth: h, n_positive: n, n_window })
}

/// `f̂₀` from the residuals of observations whose fitted index `x_{t−1}(ρ̂)` is positive.
pub fn estimate_f0(design: &Design, rho_hat: &[f64], bandwidth: Bandwidth) -> Result<DensityEstimate> {
    let residuals: Vec<f64> = design
        .rows()
        .filter_map(|(w, y)| {
            let x = dot(w, rho_hat);
            (x > 0.0).then_some(y - x)
        })
        .collect();
    density_at_zero(&residuals, bandwidth)
}

pub fn fit_clad(series: &Series, k: usize, opts: &CladOptions) -> Result<CladFit> {
    let design = Design::new(series, k)?;
    let mle = fit_mle_design(&design, opts.mle).ok();
    fit_clad_design(&design, opts, mle.as_ref())
}

struct Start {
    label: String,
    x: Vec<f64>,
}

/// Multi-start simplex search. `mle` supplies the preferred start and the
/// perturbation scale; without it the OLS fit plays both roles.
pub fn fit_clad_design(design: &Design, opts: &CladOptions, mle: Option<&MleFit>) -> Result<CladFit> {
    design.require_estimable()?;
    if opts.starts == 0 {
        return Err(Error::InvalidSpec("at least one CLAD start is required".into()));
    }
    let p = design.n_coef();
    let ols = fit_ols_design(design).ok();

    let mut anchors: Vec<(String, Vec<f64>, Vec<f64>)> = Vec::new();
    if let Some(m) = mle.filter(|m| m.converged) {
        anchors.push(("mle".into(), m.coefficients(), m.info_se[..p].to_vec()));
    }
    if let Some(o) = &ols {
        anchors.push(("ols".into(), o.coefficients(), o.se.clone()));
    }
    if anchors.is_empty() {
        return Err(Error::AllStartsFailed);
    }
    let (center, scale) = (anchors[0].1.clone(), sanitize_scale(&anchors[0].2, &anchors[0].1));

    let mut starts: Vec<Start> = anchors
        .iter()
        .take(opts.starts)
        .map(|(label, x, _)| Start { label: label.clone(), x: x.clone() })
        .collect();
    let mut rng = substream(opts.seed, 0);
    let mut i = 1;
    while starts.len() < opts.starts {
        let x = center
            .iter()
            .zip(&scale)
            .map(|(c, s)| {
                let z: f64 = StandardNormal.sample(&mut rng);
                c + 0.5 * s * z
            })
            .collect();
        starts.push(Start { label: format!("perturb-{i}"), x });
        i += 1;
    }

    let nm = NelderMeadOptions {
        step: scale.clone(),
        rel_tol: opts.simplex_tol,
        max_evals: EVALS_PER_DIM * p,
        restarts: RESTARTS,
    };
    let results: Vec<_> = starts
        .par_iter()
        .map(|s| minimize(|rho| objective(rho, design), &s.x, &nm))
        .collect();

    let outcomes: Vec<StartOutcome> = starts
        .iter()
        .zip(&results)
        .map(|(s, r)| StartOutcome { label: s.label.clone(), objective: r.value, converged: r.converged, evals: r.evals })
        .collect();
    let best = results
        .iter()
        .enumerate()
        .filter(|(_, r)| r.converged)
        .min_by(|a, b| a.1.value.total_cmp(&b.1.value).then(a.0.cmp(&b.0)))
        .map(|(i, _)| i)
        .ok_or(Error::AllStartsFailed)?;
    let rho = results[best].x.clone();

    let density = estimate_f0(design, &rho, opts.bandwidth)?;
    let se_phi: Vec<f64> = match short_run_scale(design) {
        Ok(s) => s.iter().map(|v| v / (2.0 * density.f0)).collect(),
        Err(_) => vec![f64::NAN; p - 2],
    };
    let phi_hat = rho[2..].to_vec();
    let t_phi = phi_hat.iter().zip(&se_phi).map(|(c, s)| c / s).collect();
    Ok(CladFit {
        alpha_hat: rho[0],
        beta_hat: rho[1],
        phi_hat,
        objective: results[best].value,
        f0_hat: density.f0,
        bandwidth: density.bandwidth,
        omega_hat: design.omega_hat(),
        se_phi,
        t_phi,
        starts: outcomes,
        best_start: starts[best].label.clone(),
        n_obs: design.n_obs(),
        n_censored: design.n_censored(),
    })
}

fn sanitize_scale(se: &[f64], x: &[f64]) -> Vec<f64> {
    se.iter()
        .zip(x)
        .map(|(s, v)| {
            let floor = 1e-6 * v.abs().max(1.0);
            if s.is_finite() && *s > floor {
                *s
            } else {
                floor.max(1e-3 * v.abs())
            }
        })
        .collect()
}
