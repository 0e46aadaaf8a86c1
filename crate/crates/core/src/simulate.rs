//! Sample paths of the dynamic Tobit and discretised paths of its reflected limit.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{phi_at_one, Innovation, LurSpec, ModelSpec, Series};
use crate::rng::{substream, StreamRng};

/// Paths leaving this band are treated as explosive.
pub const OVERFLOW_GUARD: f64 = 1e12;
pub const DEFAULT_GRID: usize = 1000;
const COARSE_GRID: usize = 100;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Init {
    #[default]
    Zeros,
    /// `y_{−k+1}, …, y_0`.
    Explicit(Vec<f64>),
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub seed: u64,
    pub burn_in: usize,
    pub init: Init,
}

impl SimConfig {
    pub fn seeded(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }
}

fn initial_values(init: &Init, k: usize) -> Result<Vec<f64>> {
    match init {
        Init::Zeros => Ok(vec![0.0; k]),
        Init::Explicit(v) => {
            if v.len() != k {
                return Err(Error::InvalidSpec(format!(
                    "explicit presample has {} values, order {k} needs {k}",
                    v.len()
                )));
            }
            Ok(v.clone())
        }
    }
}

/// Runs `y_t = [α + β y_{t−1} + φᵀΔy_{t−1} + u_t]₊` for `t = 1..T` with stream 0 of `cfg.seed`.
pub fn simulate_tobit(spec: &ModelSpec, t: usize, cfg: &SimConfig) -> Result<Series> {
    let mut rng = substream(cfg.seed, 0);
    simulate_tobit_with_rng(spec, t, cfg.burn_in, &cfg.init, &mut rng)
}

pub fn simulate_tobit_with_rng<R: Rng + ?Sized>(
    spec: &ModelSpec,
    t: usize,
    burn_in: usize,
    init: &Init,
    rng: &mut R,
) -> Result<Series> {
    spec.validate()?;
    if t == 0 {
        return Err(Error::InvalidSpec("T must be at least 1".into()));
    }
    let k = spec.k();
    let presample = initial_values(init, k)?;
    let total = burn_in + t;
    let mut path = Vec::with_capacity(k + total);
    path.extend_from_slice(&presample);
    for step in 0..total {
        let n = path.len();
        let mut x = spec.alpha + spec.beta * path[n - 1];
        for (i, p) in spec.phi.iter().enumerate() {
            x += p * (path[n - 1 - i] - path[n - 2 - i]);
        }
        let y = (x + spec.innovation.sample(rng, spec.sigma)).max(0.0);
        if !(y.abs() <= OVERFLOW_GUARD) {
            return Err(Error::ExplosivePath { t: step + 1, value: y });
        }
        path.push(y);
    }
    let values = path.split_off(burn_in + k);
    let presample = path.split_off(burn_in);
    Series::new(presample, values)
}

/// Local-to-unity simulation; the presample block is `b0·√T` in every slot.
pub fn simulate_tobit_lur(
    lur: &LurSpec,
    phi: &[f64],
    sigma: f64,
    innovation: Innovation,
    cfg: &SimConfig,
) -> Result<Series> {
    let spec = lur.model(phi.to_vec(), sigma, innovation)?;
    let cfg = lur_config(lur, spec.k(), cfg);
    simulate_tobit(&spec, lur.t, &cfg)
}

pub(crate) fn lur_config(lur: &LurSpec, k: usize, cfg: &SimConfig) -> SimConfig {
    let init = match &cfg.init {
        Init::Zeros => Init::Explicit(vec![lur.y0(); k]),
        explicit => explicit.clone(),
    };
    SimConfig { seed: cfg.seed, burn_in: cfg.burn_in, init }
}

/// Discretised `Y(τ)`, its driving Brownian motion `W` and the unreflected `K`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LimitPath {
    pub grid: Vec<f64>,
    pub y: Vec<f64>,
    pub w: Vec<f64>,
    pub k_path: Vec<f64>,
    pub warnings: Vec<String>,
}

/// Increment integrals over `[s, s + dt]` for `c = c0/φ(1)`:
/// `∫e^{−cr}dr` and `∫e^{−2cr}dr`.
fn exp_integrals(c: f64, s: f64, dt: f64) -> (f64, f64) {
    let integral = |rate: f64| {
        if rate.abs() * dt < 1e-8 {
            (-rate * s).exp() * dt * (1.0 - 0.5 * rate * dt)
        } else {
            (-rate * s).exp() * (-(-rate * dt).exp_m1()) / rate
        }
    };
    (integral(c), integral(2.0 * c))
}

/// `W` and `K` on the grid, with `k_min[i]` the minimum of `K` over step `i`.
pub(crate) struct DrivingPaths {
    pub w: Vec<f64>,
    pub k: Vec<f64>,
    pub k_min: Vec<f64>,
}

/// Simulates `(W, K)` on an `n`-step grid with exact joint Gaussian increments
/// of `ΔW` and `∫e^{−c r}dW(r)`. The minimum of `K` inside each step is drawn
/// from the Brownian-bridge law given the endpoints, so the reflection does not
/// miss excursions between grid points.
pub(crate) fn simulate_w_and_k<R: Rng + ?Sized>(
    lur: &LurSpec,
    phi: &[f64],
    sigma: f64,
    n: usize,
    rng: &mut R,
) -> DrivingPaths {
    let phi1 = phi_at_one(phi);
    let c = lur.c0 / phi1;
    let dt = 1.0 / n as f64;
    let mut w = Vec::with_capacity(n + 1);
    let mut k = Vec::with_capacity(n + 1);
    let mut k_min = Vec::with_capacity(n);
    w.push(0.0);
    k.push(phi1 * lur.b0);
    for i in 0..n {
        let s = i as f64 * dt;
        let (e1, e2) = exp_integrals(c, s, dt);
        let z1: f64 = StandardNormal.sample(rng);
        let dw = dt.sqrt() * z1;
        let resid_var = (e2 - e1 * e1 / dt).max(0.0);
        let stoch = if resid_var > 0.0 {
            let z2: f64 = StandardNormal.sample(rng);
            e1 / dt * dw + resid_var.sqrt() * z2
        } else {
            e1 / dt * dw
        };
        w.push(w[i] + dw);
        k.push(k[i] + lur.a0 * e1 + sigma * stoch);
        let u: f64 = 1.0 - rng.random::<f64>();
        let (a, b) = (k[i], k[i + 1]);
        let v = sigma * sigma * e2;
        k_min.push(0.5 * (a + b - ((b - a).powi(2) - 2.0 * v * u.ln()).sqrt()));
    }
    DrivingPaths { w, k, k_min }
}

/// `Y(τ) = φ(1)^{-1} e^{cτ} (K(τ) + sup_{τ'≤τ}[−K(τ')]₊)` at the grid points,
/// with the running supremum taken over the per-step minima.
pub(crate) fn reflect(k_path: &[f64], k_min: &[f64], phi1: f64, c: f64) -> Vec<f64> {
    let n = k_path.len() - 1;
    let mut sup = (-k_path[0]).max(0.0);
    let mut y = Vec::with_capacity(n + 1);
    for (i, kv) in k_path.iter().enumerate() {
        if i > 0 {
            sup = sup.max(-k_min[i - 1]);
        }
        let tau = i as f64 / n as f64;
        y.push(((c * tau).exp() * (kv + sup) / phi1).max(0.0));
    }
    y
}

pub fn simulate_limit_process(
    lur: &LurSpec,
    phi: &[f64],
    sigma: f64,
    n: usize,
    seed: u64,
) -> Result<LimitPath> {
    let mut rng = substream(seed, 0);
    simulate_limit_process_with_rng(lur, phi, sigma, n, &mut rng)
}

pub(crate) fn check_limit_inputs(lur: &LurSpec, phi: &[f64], sigma: f64, n: usize) -> Result<Vec<String>> {
    lur.validate()?;
    if phi_at_one(phi) <= 0.0 {
        return Err(Error::Domain(format!("φ(1) must be positive, got {}", phi_at_one(phi))));
    }
    if !(sigma > 0.0) {
        return Err(Error::Domain(format!("sigma must be positive, got {sigma}")));
    }
    if n < 2 {
        return Err(Error::InvalidSpec("grid size must be at least 2".into()));
    }
    let mut warnings = Vec::new();
    if n < COARSE_GRID {
        warnings.push(format!("grid of {n} steps is coarse (< {COARSE_GRID}); reflection is under-resolved"));
    }
    Ok(warnings)
}

pub fn simulate_limit_process_with_rng(
    lur: &LurSpec,
    phi: &[f64],
    sigma: f64,
    n: usize,
    rng: &mut StreamRng,
) -> Result<LimitPath> {
    let warnings = check_limit_inputs(lur, phi, sigma, n)?;
    let phi1 = phi_at_one(phi);
    let DrivingPaths { w, k: k_path, k_min } = simulate_w_and_k(lur, phi, sigma, n, rng);
    let y = reflect(&k_path, &k_min, phi1, lur.c0 / phi1);
    let grid = (0..=n).map(|i| i as f64 / n as f64).collect();
    Ok(LimitPath { grid, y, w, k_path, warnings })
}
