//! Regression design of the ADF-form Tobit: `y_t` on `(1, y_{t−1}, Δy_{t−1}, …, Δy_{t−k+1})`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::model::Series;

#[derive(Clone, Debug)]
pub struct Design {
    k: usize,
    y: Vec<f64>,
    /// Row-major `T × (k + 1)`.
    x: Vec<f64>,
}

impl Design {
    /// Uses the stored presample as initial conditions, topped up from the
    /// leading observations when it is shorter than `k`.
    pub fn new(series: &Series, k: usize) -> Result<Self> {
        Self::with_initial(series, k, k)
    }

    /// Like [`Design::new`] but reserves at least `initial` values as initial
    /// conditions, so fits of different orders share the same sample.
    pub fn with_initial(series: &Series, k: usize, initial: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidSpec("lag order k must be at least 1".into()));
        }
        if initial < k {
            return Err(Error::InvalidSpec(format!("need {k} initial values, reserved {initial}")));
        }
        let z = series.full_path();
        let start = series.presample().len().max(initial);
        let p = k + 1;
        let usable = z.len().saturating_sub(start);
        if usable == 0 {
            return Err(Error::TooShort { needed: start + 1, got: z.len() });
        }
        let mut y = Vec::with_capacity(usable);
        let mut x = Vec::with_capacity(usable * p);
        for t in start..z.len() {
            y.push(z[t]);
            x.push(1.0);
            x.push(z[t - 1]);
            for i in 1..k {
                x.push(z[t - i] - z[t - i - 1]);
            }
        }
        Ok(Self { k, y, x })
    }

    /// Estimation needs more observations than coefficients.
    pub fn require_estimable(&self) -> Result<()> {
        if self.n_obs() <= self.n_coef() {
            return Err(Error::TooShort { needed: self.n_coef() + 1, got: self.n_obs() });
        }
        Ok(())
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n_obs(&self) -> usize {
        self.y.len()
    }

    /// Number of coefficients `(α, β, φ)`, i.e. `k + 1`.
    pub fn n_coef(&self) -> usize {
        self.k + 1
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn row(&self, t: usize) -> &[f64] {
        let p = self.n_coef();
        &self.x[t * p..(t + 1) * p]
    }

    pub fn rows(&self) -> impl Iterator<Item = (&[f64], f64)> + '_ {
        self.x.chunks_exact(self.n_coef()).zip(self.y.iter().copied())
    }

    /// Fitted index `α + β y_{t−1} + φᵀΔy_{t−1}` for every observation.
    pub fn index(&self, rho: &[f64]) -> Vec<f64> {
        self.rows().map(|(w, _)| dot(w, rho)).collect()
    }

    pub fn n_censored(&self) -> usize {
        self.y.iter().filter(|v| **v == 0.0).count()
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.n_obs(), self.n_coef(), &self.x)
    }

    /// `(1/T) Σ Δy_{t−1} Δy_{t−1}ᵀ` over the lagged-difference block.
    pub fn omega_hat(&self) -> DMatrix<f64> {
        let d = self.k - 1;
        let mut om = DMatrix::zeros(d, d);
        for (w, _) in self.rows() {
            let dy = &w[2..];
            for i in 0..d {
                for j in 0..=i {
                    om[(i, j)] += dy[i] * dy[j];
                }
            }
        }
        let n = self.n_obs() as f64;
        for i in 0..d {
            for j in 0..=i {
                om[(i, j)] /= n;
                om[(j, i)] = om[(i, j)];
            }
        }
        om
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `sqrt(diag(Ω̂⁻¹)/T)` for the lagged-difference block.
pub(crate) fn short_run_scale(design: &Design) -> Result<Vec<f64>> {
    let d = design.k() - 1;
    if d == 0 {
        return Ok(Vec::new());
    }
    let inv = design
        .omega_hat()
        .cholesky()
        .ok_or_else(|| Error::Singular("sample Ω̂ is not positive definite".into()))?
        .inverse();
    let n = design.n_obs() as f64;
    Ok((0..d).map(|i| (inv[(i, i)] / n).sqrt()).collect())
}
