//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use dyntobit::design::Design;
use dyntobit::model::{Innovation, ModelSpec, Series};
use dyntobit::simulate::{simulate_tobit, Init, SimConfig};
use nalgebra::{DMatrix, DVector};

pub fn fig1_series(t: usize, seed: u64) -> Series {
    let spec = ModelSpec::new(0.0, 1.0, vec![0.5], 1.0, Innovation::Gaussian).unwrap();
    simulate_tobit(&spec, t, &SimConfig::seeded(seed)).unwrap()
}

/// Stationary AR in levels around 40, far from the censoring point.
pub fn shifted_series(t: usize, seed: u64) -> Series {
    let spec = ModelSpec::new(20.0, 0.5, vec![0.3], 1.0, Innovation::Gaussian).unwrap();
    let cfg = SimConfig { seed, burn_in: 200, init: Init::Explicit(vec![40.0, 40.0]) };
    simulate_tobit(&spec, t, &cfg).unwrap()
}

/// Richardson-extrapolated central difference of `f` along coordinate `i`.
pub fn central_diff(f: &dyn Fn(&[f64]) -> f64, x: &[f64], i: usize, h: f64) -> f64 {
    let d = |h: f64| {
        let mut a = x.to_vec();
        let mut b = x.to_vec();
        a[i] += h;
        b[i] -= h;
        (f(&a) - f(&b)) / (2.0 * h)
    };
    (4.0 * d(0.5 * h) - d(h)) / 3.0
}

pub fn xy(design: &Design) -> (DMatrix<f64>, DVector<f64>) {
    let x = design.matrix();
    let y = DVector::from_column_slice(design.y());
    (x, y)
}

pub fn lad_objective(x: &DMatrix<f64>, y: &DVector<f64>, b: &[f64]) -> f64 {
    (y - x * DVector::from_column_slice(b)).abs().sum()
}

/// Least absolute deviations by iteratively reweighted least squares, then
/// polished to the interpolating vertex through the `p` smallest residuals and
/// refined by a shrinking coordinate grid.
pub fn lad_oracle(x: &DMatrix<f64>, y: &DVector<f64>) -> Vec<f64> {
    let (n, p) = x.shape();
    let mut b = x.clone().svd(true, true).solve(y, 1e-14).unwrap();
    for _ in 0..500 {
        let r = y - x * &b;
        let w: Vec<f64> = r.iter().map(|v| 1.0 / v.abs().max(1e-9)).collect();
        let xtw = DMatrix::from_fn(p, n, |i, j| x[(j, i)] * w[j]);
        let next = (&xtw * x).lu().solve(&(&xtw * y)).unwrap();
        let step = (&next - &b).norm();
        b = next;
        if step < 1e-13 * (1.0 + b.norm()) {
            break;
        }
    }
    let mut best: Vec<f64> = b.iter().copied().collect();
    let mut best_val = lad_objective(x, y, &best);

    let r = y - x * &b;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|i, j| r[*i].abs().total_cmp(&r[*j].abs()));
    let basis = &order[..p];
    let xb = DMatrix::from_fn(p, p, |i, j| x[(basis[i], j)]);
    let yb = DVector::from_fn(p, |i, _| y[basis[i]]);
    if let Some(v) = xb.lu().solve(&yb) {
        let v: Vec<f64> = v.iter().copied().collect();
        let val = lad_objective(x, y, &v);
        if val <= best_val {
            best = v;
            best_val = val;
        }
    }

    let mut delta = 1e-2;
    while delta > 1e-10 {
        let mut improved = false;
        for i in 0..p {
            for s in [-1.0, 1.0] {
                let mut c = best.clone();
                c[i] += s * delta * best[i].abs().max(1.0);
                let val = lad_objective(x, y, &c);
                if val < best_val {
                    best = c;
                    best_val = val;
                    improved = true;
                }
            }
        }
        if !improved {
            delta *= 0.5;
        }
    }
    best
}
