use serde::Serialize;

use super::{fit_method, EstimatorOptions, Method};
use crate::design::Design;
use crate::error::{Error, Result};
use crate::model::Series;
use crate::normal::two_sided_critical;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LagStep {
    pub k: usize,
    /// t-statistic of `φ_{k−1}` in the order-`k` fit.
    pub t_stat: f64,
    pub reject: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LagSelection {
    /// Tests in the order performed, `k = k0, k0 − 1, …`.
    pub path: Vec<LagStep>,
    pub k_hat: usize,
    pub method: Method,
    pub level: f64,
    pub critical_value: f64,
}

impl LagSelection {
    /// Applies the descending rule to a precomputed profile of `(k, t_stat)` pairs.
    pub fn from_profile(profile: &[(usize, f64)], method: Method, level: f64) -> Result<Self> {
        let k0 = profile.iter().map(|p| p.0).max().unwrap_or(1);
        check_inputs(k0, level)?;
        descend(k0, method, level, |k| {
            profile
                .iter()
                .find(|p| p.0 == k)
                .map(|p| p.1)
                .ok_or_else(|| Error::InvalidSpec(format!("profile has no entry for k = {k}")))
        })
    }
}

fn check_inputs(k0: usize, level: f64) -> Result<()> {
    if k0 < 2 {
        return Err(Error::InvalidSpec(format!("k0 must be at least 2, got {k0}")));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidSpec(format!("level must lie in (0, 1), got {level}")));
    }
    Ok(())
}

fn descend(
    k0: usize,
    method: Method,
    level: f64,
    mut t_at: impl FnMut(usize) -> Result<f64>,
) -> Result<LagSelection> {
    let z = two_sided_critical(level);
    let mut path = Vec::new();
    let mut k_hat = 1;
    for k in (2..=k0).rev() {
        let t = t_at(k)?;
        let reject = t.abs() > z;
        path.push(LagStep { k, t_stat: t, reject });
        if reject {
            k_hat = k;
            break;
        }
    }
    Ok(LagSelection { path, k_hat, method, level, critical_value: z })
}

/// t-statistic of the highest-order lagged difference at order `k`, on the
/// sample that leaves `k0` initial values.
fn top_t(series: &Series, method: Method, k: usize, k0: usize, opts: &EstimatorOptions) -> Result<f64> {
    let run = || -> Result<f64> {
        let design = Design::with_initial(series, k, k0)?;
        let fit = fit_method(&design, method, opts, None)?;
        Ok(fit.phi()[k - 2] / fit.se_phi[k - 2])
    };
    run().map_err(|e| Error::AtLagOrder { k, source: Box::new(e) })
}

/// Sequential test of `φ_{k−1} = 0` from `k = k0` downwards, stopping at the
/// first rejection. Every order is fitted on the same `T − k0` observations.
pub fn select_lag_order(
    series: &Series,
    method: Method,
    k0: usize,
    level: f64,
    opts: &EstimatorOptions,
) -> Result<LagSelection> {
    check_inputs(k0, level)?;
    descend(k0, method, level, |k| top_t(series, method, k, k0, opts))
}

/// `(k, t_stat)` for every `k ∈ {2, …, k0}`, in increasing `k`.
pub fn t_stat_profile(series: &Series, method: Method, k0: usize, opts: &EstimatorOptions) -> Result<Vec<(usize, f64)>> {
    check_inputs(k0, 0.05)?;
    (2..=k0).map(|k| Ok((k, top_t(series, method, k, k0, opts)?))).collect()
}
