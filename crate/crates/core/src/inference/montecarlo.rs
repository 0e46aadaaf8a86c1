use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{fit_method, EstimatorOptions, Method};
use crate::design::Design;
use crate::error::{Error, Result};
use crate::mle::fit_mle_design;
use crate::model::{Innovation, LurSpec, ModelSpec, Series};
use crate::rng::{replication_stream, StreamRng, PURPOSE_CLAD_STARTS, PURPOSE_DATA};
use crate::simulate::{lur_config, simulate_tobit_with_rng, Init, SimConfig};
use crate::stats::McSummary;

/// Label of the statistics that describe the simulated path itself.
pub const DGP_LABEL: &str = "dgp";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Dgp {
    Fixed { spec: ModelSpec, t: usize, init: Init },
    Lur { lur: LurSpec, phi: Vec<f64>, sigma: f64, innovation: Innovation },
}

impl Dgp {
    /// `y_t = [y_{t−1} + 0.5 Δy_{t−1} + u_t]₊` from a zero start.
    pub fn preset(innovation: Innovation, t: usize) -> Self {
        let spec = ModelSpec { alpha: 0.0, beta: 1.0, phi: vec![0.5], sigma: 1.0, innovation };
        Dgp::Fixed { spec, t, init: Init::Zeros }
    }

    /// Gaussian innovations.
    pub fn fig1(t: usize) -> Self {
        Self::preset(Innovation::Gaussian, t)
    }

    /// Laplace innovations with unit variance.
    pub fn fig2(t: usize) -> Self {
        Self::preset(Innovation::Laplace, t)
    }

    pub fn t(&self) -> usize {
        match self {
            Dgp::Fixed { t, .. } => *t,
            Dgp::Lur { lur, .. } => lur.t,
        }
    }

    pub fn spec(&self) -> Result<ModelSpec> {
        match self {
            Dgp::Fixed { spec, .. } => {
                spec.validate()?;
                Ok(spec.clone())
            }
            Dgp::Lur { lur, phi, sigma, innovation } => lur.model(phi.clone(), *sigma, *innovation),
        }
    }

    fn init(&self, k: usize) -> Init {
        match self {
            Dgp::Fixed { init, .. } => init.clone(),
            Dgp::Lur { lur, .. } => lur_config(lur, k, &SimConfig::default()).init,
        }
    }

    pub fn simulate(&self, rng: &mut StreamRng) -> Result<Series> {
        let spec = self.spec()?;
        simulate_tobit_with_rng(&spec, self.t(), 0, &self.init(spec.k()), rng)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct McConfig {
    pub dgp: Dgp,
    pub estimators: Vec<Method>,
    pub reps: usize,
    pub seed: u64,
    pub options: EstimatorOptions,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct McDraw {
    pub rep: usize,
    pub estimator: String,
    pub statistic: String,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct McResult {
    pub reps: usize,
    /// Failed replications per estimator; `dgp` counts failed simulations,
    /// which are excluded for every estimator.
    pub failures: BTreeMap<String, usize>,
    pub failure_fraction: BTreeMap<String, f64>,
    pub summaries: Vec<McSummary>,
    #[serde(skip)]
    pub draws: Vec<McDraw>,
}

impl McResult {
    /// Draws of one statistic in replication order.
    pub fn values(&self, estimator: &str, statistic: &str) -> Vec<f64> {
        self.draws
            .iter()
            .filter(|d| d.estimator == estimator && d.statistic == statistic)
            .map(|d| d.value)
            .collect()
    }

    pub fn summary(&self, estimator: &str, statistic: &str) -> Option<&McSummary> {
        self.summaries.iter().find(|s| s.estimator == estimator && s.statistic == statistic)
    }
}

fn statistic_names(k: usize) -> Vec<String> {
    let mut names = vec!["sqrtT_alpha".to_string(), "T_beta_minus_1".to_string()];
    for i in 1..k {
        names.push(format!("sqrtT_phi{i}"));
        names.push(format!("t_phi{i}"));
    }
    names
}

const DGP_STATISTICS: [&str; 2] = ["yT_over_sqrtT", "zero_fraction"];

type RepOutcome = Result<(Vec<f64>, Vec<Option<Vec<f64>>>)>;

fn replicate(cfg: &McConfig, spec: &ModelSpec, rep: usize) -> RepOutcome {
    let mut rng = replication_stream(cfg.seed, rep as u64, PURPOSE_DATA);
    let series = cfg.dgp.simulate(&mut rng)?;
    let t = series.len() as f64;
    let dgp_stats = vec![series.values()[series.len() - 1] / t.sqrt(), series.n_zeros() as f64 / t];

    let design = Design::new(&series, spec.k())?;
    let mut opts = cfg.options.clone();
    opts.clad.seed = replication_stream(cfg.seed, rep as u64, PURPOSE_CLAD_STARTS).random();
    let needs_mle = cfg.estimators.iter().any(|m| matches!(m, Method::Mle | Method::Clad));
    let mle = if needs_mle { fit_mle_design(&design, opts.mle).ok() } else { None };

    let mut truth = vec![spec.alpha, spec.beta];
    truth.extend_from_slice(&spec.phi);
    let per_estimator = cfg
        .estimators
        .iter()
        .map(|m| {
            let fit = fit_method(&design, *m, &opts, mle.as_ref()).ok()?;
            let c = &fit.coefficients;
            let mut v = vec![t.sqrt() * (c[0] - truth[0]), t * (c[1] - truth[1])];
            for i in 2..c.len() {
                let err = c[i] - truth[i];
                v.push(t.sqrt() * err);
                v.push(err / fit.se_phi[i - 2]);
            }
            v.iter().all(|x| x.is_finite()).then_some(v)
        })
        .collect();
    Ok((dgp_stats, per_estimator))
}

/// Simulates `reps` paths and fits every estimator on each. Replication `r`
/// draws its data from stream `4r` of `seed`, so results do not depend on
/// scheduling. Failed fits are excluded and counted.
pub fn monte_carlo(cfg: &McConfig) -> Result<McResult> {
    if cfg.reps == 0 {
        return Err(Error::InvalidSpec("reps must be at least 1".into()));
    }
    if cfg.estimators.is_empty() {
        return Err(Error::InvalidSpec("at least one estimator is required".into()));
    }
    let spec = cfg.dgp.spec()?;
    let outcomes: Vec<RepOutcome> = (0..cfg.reps).into_par_iter().map(|r| replicate(cfg, &spec, r)).collect();

    let names = statistic_names(spec.k());
    let mut failures: BTreeMap<String, usize> = BTreeMap::new();
    failures.insert(DGP_LABEL.into(), 0);
    for m in &cfg.estimators {
        failures.insert(m.label().into(), 0);
    }
    let mut draws = Vec::new();
    for (rep, outcome) in outcomes.into_iter().enumerate() {
        let (dgp_stats, fits) = match outcome {
            Ok(o) => o,
            Err(_) => {
                for v in failures.values_mut() {
                    *v += 1;
                }
                continue;
            }
        };
        for (name, value) in DGP_STATISTICS.iter().zip(dgp_stats) {
            draws.push(McDraw { rep, estimator: DGP_LABEL.into(), statistic: name.to_string(), value });
        }
        for (m, fit) in cfg.estimators.iter().zip(fits) {
            match fit {
                Some(values) => {
                    for (name, value) in names.iter().zip(values) {
                        draws.push(McDraw { rep, estimator: m.label().into(), statistic: name.clone(), value });
                    }
                }
                None => *failures.get_mut(m.label()).unwrap() += 1,
            }
        }
    }

    let mut summaries = Vec::new();
    let groups = cfg
        .estimators
        .iter()
        .flat_map(|m| names.iter().map(move |n| (m.label().to_string(), n.clone())))
        .chain(DGP_STATISTICS.iter().map(|n| (DGP_LABEL.to_string(), n.to_string())));
    for (est, stat) in groups {
        let v: Vec<f64> = draws
            .iter()
            .filter(|d| d.estimator == est && d.statistic == stat)
            .map(|d| d.value)
            .collect();
        if !v.is_empty() {
            summaries.push(McSummary::from_draws(&est, &stat, &v));
        }
    }
    let failure_fraction = failures.iter().map(|(k, v)| (k.clone(), *v as f64 / cfg.reps as f64)).collect();
    Ok(McResult { reps: cfg.reps, failures, failure_fraction, summaries, draws })
}
