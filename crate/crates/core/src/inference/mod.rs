//! Lag-order selection, the Monte Carlo driver and draws from the (α, β) limit laws.

mod lag;
mod limit;
mod montecarlo;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::clad::{fit_clad_design, CladOptions};
use crate::design::Design;
use crate::error::{Error, Result};
use crate::mle::{fit_mle_design, MleFit, MleOptions};
use crate::ols::fit_ols_design;

pub use lag::{select_lag_order, t_stat_profile, LagSelection, LagStep};
pub use limit::{limit_distribution, LimitDraw, LimitEstimator, LimitSample};
pub use montecarlo::{monte_carlo, Dgp, McConfig, McDraw, McResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Mle,
    Clad,
    Ols,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::Mle => "mle",
            Method::Clad => "clad",
            Method::Ols => "ols",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mle" => Ok(Method::Mle),
            "clad" => Ok(Method::Clad),
            "ols" => Ok(Method::Ols),
            other => Err(Error::InvalidSpec(format!("unknown method '{other}' (expected mle, clad or ols)"))),
        }
    }
}

/// Estimator settings shared by lag selection and the Monte Carlo driver.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct EstimatorOptions {
    pub mle: MleOptions,
    pub clad: CladOptions,
}

/// Coefficients `(α, β, φ)` and the short-run standard errors of one fit.
#[derive(Clone, Debug, PartialEq)]
pub struct ShortRunFit {
    pub coefficients: Vec<f64>,
    pub se_phi: Vec<f64>,
}

impl ShortRunFit {
    pub fn phi(&self) -> &[f64] {
        &self.coefficients[2..]
    }
}

/// Fits `method` on `design`. A non-converged MLE is an error. `mle` is an
/// already computed MLE fit on the same design, reused as the CLAD start.
pub(crate) fn fit_method(
    design: &Design,
    method: Method,
    opts: &EstimatorOptions,
    mle: Option<&MleFit>,
) -> Result<ShortRunFit> {
    match method {
        Method::Mle => {
            let owned;
            let fit = match mle {
                Some(m) => m,
                None => {
                    owned = fit_mle_design(design, opts.mle)?;
                    &owned
                }
            };
            if !fit.converged {
                return Err(Error::NotConverged { iterations: fit.iterations, score_norm: fit.score_norm });
            }
            Ok(ShortRunFit { coefficients: fit.coefficients(), se_phi: fit.se_phi.clone() })
        }
        Method::Clad => {
            let owned;
            let hint = match mle {
                Some(m) => Some(m),
                None => {
                    owned = fit_mle_design(design, opts.mle).ok();
                    owned.as_ref()
                }
            };
            let fit = fit_clad_design(design, &opts.clad, hint)?;
            Ok(ShortRunFit { coefficients: fit.coefficients(), se_phi: fit.se_phi })
        }
        Method::Ols => {
            let fit = fit_ols_design(design)?;
            Ok(ShortRunFit { coefficients: fit.coefficients(), se_phi: fit.se[2..].to_vec() })
        }
    }
}
