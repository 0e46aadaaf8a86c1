//! Gaussian maximum likelihood in Olsen coordinates `θ = ρ/σ`, `ϑ = 1/σ`.
//!
//! In these coordinates the Tobit loglikelihood is concave: each uncensored
//! observation contributes `ln ϑ − ½(ϑ y_t − w_{t−1}ᵀθ)²` and each censored one
//! contributes `ln(1 − Φ(w_{t−1}ᵀθ))`, whose second derivative is `−λ′ ≤ 0`.

use nalgebra::{DMatrix, DVector};

use crate::design::{dot, short_run_scale, Design};
use crate::error::{Error, Result};
use crate::model::Series;
use crate::normal::{inverse_mills, inverse_mills_derivative, ln_sf};
use crate::ols::qr_least_squares;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
const ARMIJO: f64 = 1e-4;
const MAX_HALVINGS: usize = 80;
/// Relative loglikelihood slack treated as rounding noise.
const ROUNDING: f64 = 1e-12;

/// Coefficients `(α, β, φ)` and scale `σ` of the dynamic Tobit.
#[derive(Clone, Debug, PartialEq)]
pub struct TobitParams {
    pub alpha: f64,
    pub beta: f64,
    pub phi: Vec<f64>,
    pub sigma: f64,
}

impl TobitParams {
    pub fn from_rho(rho: &[f64], sigma: f64) -> Self {
        Self { alpha: rho[0], beta: rho[1], phi: rho[2..].to_vec(), sigma }
    }

    pub fn rho(&self) -> Vec<f64> {
        let mut r = vec![self.alpha, self.beta];
        r.extend_from_slice(&self.phi);
        r
    }

    pub fn k(&self) -> usize {
        self.phi.len() + 1
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OlsenParams {
    /// `(α/σ, β/σ, φᵀ/σ)`.
    pub theta: Vec<f64>,
    /// `1/σ`.
    pub vartheta: f64,
}

impl OlsenParams {
    pub fn from_params(p: &TobitParams) -> Result<Self> {
        if !(p.sigma > 0.0) {
            return Err(Error::Domain(format!("sigma must be positive, got {}", p.sigma)));
        }
        Ok(Self { theta: p.rho().iter().map(|r| r / p.sigma).collect(), vartheta: 1.0 / p.sigma })
    }

    pub fn to_params(&self) -> TobitParams {
        let sigma = 1.0 / self.vartheta;
        TobitParams::from_rho(&self.theta.iter().map(|t| t * sigma).collect::<Vec<_>>(), sigma)
    }

    /// Stacked `(θ, ϑ)`.
    pub fn to_vector(&self) -> DVector<f64> {
        let mut v = self.theta.clone();
        v.push(self.vartheta);
        DVector::from_vec(v)
    }

    pub fn from_vector(v: &DVector<f64>) -> Self {
        let n = v.len();
        Self { theta: v.rows(0, n - 1).iter().copied().collect(), vartheta: v[n - 1] }
    }
}

/// Loglikelihood with its analytic gradient and Hessian in `(θ, ϑ)` order.
#[derive(Clone, Debug)]
pub struct OlsenEval {
    pub value: f64,
    pub gradient: DVector<f64>,
    pub hessian: DMatrix<f64>,
}

fn loglik_rho(rho: &[f64], sigma: f64, design: &Design) -> Result<f64> {
    if !(sigma > 0.0) {
        return Err(Error::Domain(format!("sigma must be positive, got {sigma}")));
    }
    if rho.len() != design.n_coef() {
        return Err(Error::DimensionMismatch(format!(
            "{} coefficients for a design with {}",
            rho.len(),
            design.n_coef()
        )));
    }
    let ln_sigma = sigma.ln();
    Ok(design
        .rows()
        .map(|(w, y)| {
            let x = dot(w, rho);
            if y > 0.0 {
                let e = (y - x) / sigma;
                -ln_sigma - LN_SQRT_2PI - 0.5 * e * e
            } else {
                ln_sf(x / sigma)
            }
        })
        .sum())
}

/// Conditional Gaussian Tobit loglikelihood given the initial values.
pub fn loglik(params: &TobitParams, series: &Series) -> Result<f64> {
    loglik_design(params, &Design::new(series, params.k())?)
}

pub fn loglik_design(params: &TobitParams, design: &Design) -> Result<f64> {
    loglik_rho(&params.rho(), params.sigma, design)
}

pub fn loglik_olsen(op: &OlsenParams, series: &Series) -> Result<OlsenEval> {
    olsen_eval(op, &Design::new(series, op.theta.len() - 1)?)
}

pub fn olsen_eval(op: &OlsenParams, design: &Design) -> Result<OlsenEval> {
    let p = design.n_coef();
    if op.theta.len() != p {
        return Err(Error::DimensionMismatch(format!("{} coefficients for a design with {p}", op.theta.len())));
    }
    let v = op.vartheta;
    if !(v > 0.0) {
        return Err(Error::Domain(format!("vartheta must be positive, got {v}")));
    }
    let ln_v = v.ln();
    let mut value = 0.0;
    let mut g = DVector::zeros(p + 1);
    let mut h = DMatrix::zeros(p + 1, p + 1);
    for (w, y) in design.rows() {
        let s = dot(w, &op.theta);
        if y > 0.0 {
            let e = v * y - s;
            value += ln_v - LN_SQRT_2PI - 0.5 * e * e;
            for i in 0..p {
                g[i] += e * w[i];
                for j in 0..=i {
                    h[(i, j)] -= w[i] * w[j];
                }
                h[(p, i)] += w[i] * y;
            }
            g[p] += 1.0 / v - e * y;
            h[(p, p)] -= 1.0 / (v * v) + y * y;
        } else {
            value += ln_sf(s);
            let lam = inverse_mills(s);
            let dlam = inverse_mills_derivative(s);
            for i in 0..p {
                g[i] -= lam * w[i];
                for j in 0..=i {
                    h[(i, j)] -= dlam * w[i] * w[j];
                }
            }
        }
    }
    for i in 0..=p {
        for j in 0..i {
            h[(j, i)] = h[(i, j)];
        }
    }
    Ok(OlsenEval { value, gradient: g, hessian: h })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MleOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for MleOptions {
    fn default() -> Self {
        Self { tol: 1e-8, max_iter: 200 }
    }
}

#[derive(Clone, Debug)]
pub struct MleFit {
    pub alpha_hat: f64,
    pub beta_hat: f64,
    pub phi_hat: Vec<f64>,
    pub sigma_hat: f64,
    pub loglik: f64,
    /// Euclidean norm of the Olsen score at the returned point.
    pub score_norm: f64,
    pub converged: bool,
    pub iterations: usize,
    /// Newton steps replaced by steepest ascent because `−H` was not positive definite.
    pub steepest_steps: usize,
    pub omega_hat: DMatrix<f64>,
    /// `σ̂ √((Ω̂⁻¹)_{ii}/T)`.
    pub se_phi: Vec<f64>,
    pub t_phi: Vec<f64>,
    /// Observed-information standard errors for `(α, β, φ, σ)` via the delta method.
    /// The `α`, `β` entries have a nonstandard limit and are for reference only.
    pub info_se: Vec<f64>,
    pub n_censored: usize,
    pub n_obs: usize,
    /// Loglikelihood at the start and after each accepted step.
    pub loglik_trace: Vec<f64>,
}

impl MleFit {
    pub fn coefficients(&self) -> Vec<f64> {
        let mut c = vec![self.alpha_hat, self.beta_hat];
        c.extend_from_slice(&self.phi_hat);
        c
    }

    pub fn params(&self) -> TobitParams {
        TobitParams::from_rho(&self.coefficients(), self.sigma_hat)
    }
}

/// OLS on the uncensored observations, or on all observations when that fails.
fn starting_values(design: &Design) -> Result<OlsenParams> {
    let p = design.n_coef();
    let fit = |keep: &dyn Fn(f64) -> bool| -> Result<(DVector<f64>, f64)> {
        let rows: Vec<(&[f64], f64)> = design.rows().filter(|(_, y)| keep(*y)).collect();
        if rows.len() <= p {
            return Err(Error::TooShort { needed: p + 1, got: rows.len() });
        }
        let x = DMatrix::from_fn(rows.len(), p, |i, j| rows[i].0[j]);
        let y = DVector::from_iterator(rows.len(), rows.iter().map(|r| r.1));
        let (coef, _) = qr_least_squares(x.clone(), &y)?;
        let rss = (&y - &x * &coef).norm_squared();
        Ok((coef, (rss / (rows.len() - p) as f64).sqrt()))
    };
    let (coef, sd) = fit(&|y| y > 0.0).or_else(|_| fit(&|_| true))?;
    let sd = if sd > 0.0 && sd.is_finite() {
        sd
    } else {
        let mean = design.y().iter().sum::<f64>() / design.n_obs() as f64;
        (design.y().iter().map(|y| (y - mean).powi(2)).sum::<f64>() / design.n_obs() as f64)
            .sqrt()
            .max(1e-8)
    };
    OlsenParams::from_params(&TobitParams::from_rho(coef.as_slice(), sd))
}

/// Maximises the conditional loglikelihood by damped Newton steps in Olsen coordinates.
pub fn fit_mle(series: &Series, k: usize, opts: MleOptions) -> Result<MleFit> {
    fit_mle_design(&Design::new(series, k)?, opts)
}

pub fn fit_mle_design(design: &Design, opts: MleOptions) -> Result<MleFit> {
    let start = starting_values(design)?;
    fit_mle_from(design, start, opts)
}

pub fn fit_mle_from(design: &Design, start: OlsenParams, opts: MleOptions) -> Result<MleFit> {
    design.require_estimable()?;
    let p = design.n_coef();
    let mut x = start.to_vector();
    let mut eval = olsen_eval(&start, design)?;
    let mut trace = vec![eval.value];
    let mut converged = false;
    let mut iterations = 0;
    let mut steepest_steps = 0;

    while iterations < opts.max_iter {
        let g_norm = eval.gradient.norm();
        if g_norm <= opts.tol {
            converged = true;
            break;
        }
        let neg_h = -&eval.hessian;
        let (dir, newton) = match neg_h.clone().cholesky() {
            Some(ch) => (ch.solve(&eval.gradient), true),
            None => {
                steepest_steps += 1;
                (&eval.gradient / g_norm.max(1.0), false)
            }
        };
        let slope = eval.gradient.dot(&dir);
        if newton && 0.5 * slope <= f64::EPSILON * eval.value.abs().max(1.0) {
            // remaining ascent is below the resolution of the loglikelihood
            converged = true;
            break;
        }
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..MAX_HALVINGS {
            let cand = &x + &dir * step;
            if cand[p] > 0.0 {
                let op = OlsenParams::from_vector(&cand);
                let ev = olsen_eval(&op, design)?;
                let sufficient = ev.value >= eval.value + ARMIJO * step * slope;
                // near the optimum the change in ℓ drowns in summation rounding
                let level = ev.value >= eval.value - ROUNDING * (eval.value.abs() + 1.0);
                if ev.value.is_finite() && (sufficient || (level && ev.gradient.norm() < g_norm)) {
                    accepted = Some((cand, ev));
                    break;
                }
            }
            step *= 0.5;
        }
        iterations += 1;
        match accepted {
            Some((cand, ev)) => {
                x = cand;
                eval = ev;
                trace.push(eval.value);
            }
            None => break,
        }
    }
    if !converged && eval.gradient.norm() <= opts.tol {
        converged = true;
    }

    let op = OlsenParams::from_vector(&x);
    let params = op.to_params();
    let sigma_hat = params.sigma;
    let omega_hat = design.omega_hat();
    let se_phi: Vec<f64> = match short_run_scale(design) {
        Ok(scale) => scale.iter().map(|s| sigma_hat * s).collect(),
        Err(_) => vec![f64::NAN; p - 2],
    };
    let t_phi = params.phi.iter().zip(&se_phi).map(|(c, s)| c / s).collect();
    let info_se = information_se(&eval.hessian, &op);

    Ok(MleFit {
        alpha_hat: params.alpha,
        beta_hat: params.beta,
        phi_hat: params.phi,
        sigma_hat,
        loglik: eval.value,
        score_norm: eval.gradient.norm(),
        converged,
        iterations,
        steepest_steps,
        omega_hat,
        se_phi,
        t_phi,
        info_se,
        n_censored: design.n_censored(),
        n_obs: design.n_obs(),
        loglik_trace: trace,
    })
}

/// Delta-method standard errors of `(ρ, σ)` from the inverse observed information in `(θ, ϑ)`.
fn information_se(hessian: &DMatrix<f64>, op: &OlsenParams) -> Vec<f64> {
    let n = hessian.nrows();
    let Some(cov) = (-hessian).cholesky().map(|c| c.inverse()) else {
        return vec![f64::NAN; n];
    };
    let v = op.vartheta;
    let p = n - 1;
    let mut jac = DMatrix::zeros(n, n);
    for i in 0..p {
        jac[(i, i)] = 1.0 / v;
        jac[(i, p)] = -op.theta[i] / (v * v);
    }
    jac[(p, p)] = -1.0 / (v * v);
    let cov = &jac * cov * jac.transpose();
    (0..n).map(|i| cov[(i, i)].sqrt()).collect()
}
