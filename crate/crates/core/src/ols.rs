//! Least squares on the ADF-form regression.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::design::Design;
use crate::error::{Error, Result};
use crate::model::Series;

const RANK_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OlsFit {
    pub alpha_hat: f64,
    pub beta_hat: f64,
    pub phi_hat: Vec<f64>,
    /// Residual standard deviation with `T − (k + 1)` degrees of freedom.
    pub sigma_hat: f64,
    /// Conventional standard errors for `(α, β, φ)`.
    pub se: Vec<f64>,
    pub t: Vec<f64>,
    pub n_obs: usize,
}

impl OlsFit {
    pub fn coefficients(&self) -> Vec<f64> {
        let mut c = vec![self.alpha_hat, self.beta_hat];
        c.extend_from_slice(&self.phi_hat);
        c
    }
}

/// Householder QR least squares. Returns the coefficients and `R⁻¹`.
pub(crate) fn qr_least_squares(x: DMatrix<f64>, y: &DVector<f64>) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let p = x.ncols();
    if x.nrows() < p {
        return Err(Error::RankDeficient { rank: x.nrows(), cols: p });
    }
    let qr = x.qr();
    let r = qr.r();
    let scale = (0..p).map(|i| r[(i, i)].abs()).fold(0.0, f64::max);
    let rank = (0..p).filter(|&i| r[(i, i)].abs() > RANK_TOL * scale).count();
    if rank < p || scale == 0.0 {
        return Err(Error::RankDeficient { rank, cols: p });
    }
    let qty = qr.q().transpose() * y;
    let coef = r
        .solve_upper_triangular(&qty)
        .ok_or(Error::RankDeficient { rank, cols: p })?;
    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(p, p))
        .ok_or(Error::RankDeficient { rank, cols: p })?;
    Ok((coef, r_inv))
}

pub fn fit_ols(series: &Series, k: usize) -> Result<OlsFit> {
    fit_ols_design(&Design::new(series, k)?)
}

pub fn fit_ols_design(design: &Design) -> Result<OlsFit> {
    let n = design.n_obs();
    let p = design.n_coef();
    if n <= p {
        return Err(Error::TooShort { needed: p + 1, got: n });
    }
    let x = design.matrix();
    let y = DVector::from_column_slice(design.y());
    let (coef, r_inv) = qr_least_squares(x.clone(), &y)?;
    let resid = &y - &x * &coef;
    let s2 = resid.norm_squared() / (n - p) as f64;
    // (XᵀX)⁻¹ = R⁻¹R⁻ᵀ
    let xtx_inv = &r_inv * r_inv.transpose();
    let se: Vec<f64> = (0..p).map(|i| (s2 * xtx_inv[(i, i)]).sqrt()).collect();
    let t = coef.iter().zip(&se).map(|(c, s)| c / s).collect();
    Ok(OlsFit {
        alpha_hat: coef[0],
        beta_hat: coef[1],
        phi_hat: coef.iter().skip(2).copied().collect(),
        sigma_hat: s2.sqrt(),
        se,
        t,
        n_obs: n,
    })
}
