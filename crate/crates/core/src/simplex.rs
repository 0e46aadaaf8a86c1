//! Nelder–Mead simplex minimisation with restarts.
//!
//! Coefficients follow the dimension-adaptive choice of Gao and Han (2012):
//! reflection 1, expansion `1 + 2/n`, contraction `3/4 − 1/(2n)`, shrink `1 − 1/n`.

#[derive(Clone, Debug, PartialEq)]
pub struct NelderMeadOptions {
    /// Initial simplex edge along each coordinate.
    pub step: Vec<f64>,
    /// Converged when every vertex is within `rel_tol · max(1, |x_best,j|)` of the best
    /// vertex in every coordinate `j`.
    pub rel_tol: f64,
    pub max_evals: usize,
    /// Fresh simplices started from the incumbent after convergence.
    pub restarts: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NelderMeadResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: usize,
    pub converged: bool,
}

struct Coeffs {
    reflect: f64,
    expand: f64,
    contract: f64,
    shrink: f64,
}

impl Coeffs {
    fn adaptive(n: usize) -> Self {
        let n = n.max(2) as f64;
        Self { reflect: 1.0, expand: 1.0 + 2.0 / n, contract: 0.75 - 0.5 / n, shrink: 1.0 - 1.0 / n }
    }
}

fn diameter(simplex: &[Vec<f64>], best: &[f64]) -> f64 {
    simplex
        .iter()
        .flat_map(|v| v.iter().zip(best).map(|(a, b)| (a - b).abs() / b.abs().max(1.0)))
        .fold(0.0, f64::max)
}

fn run_once<F: FnMut(&[f64]) -> f64>(
    f: &mut F,
    x0: &[f64],
    f0: f64,
    step: &[f64],
    rel_tol: f64,
    budget: usize,
) -> (Vec<f64>, f64, usize, bool) {
    let n = x0.len();
    let c = Coeffs::adaptive(n);
    let mut evals = 0usize;
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    let mut values: Vec<f64> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    values.push(f0);
    for j in 0..n {
        let mut v = x0.to_vec();
        v[j] += if step[j] != 0.0 { step[j] } else { 0.05 * x0[j].abs().max(1e-3) };
        values.push(f(&v));
        evals += 1;
        simplex.push(v);
    }
    let mut order: Vec<usize> = (0..=n).collect();
    loop {
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let (best, worst, second) = (order[0], order[n], order[n - 1]);
        if diameter(&simplex, &simplex[best]) <= rel_tol {
            return (simplex[best].clone(), values[best], evals, true);
        }
        if evals >= budget {
            return (simplex[best].clone(), values[best], evals, false);
        }
        let mut centroid = vec![0.0; n];
        for &i in &order[..n] {
            for (cj, vj) in centroid.iter_mut().zip(&simplex[i]) {
                *cj += vj / n as f64;
            }
        }
        let along = |t: f64| -> Vec<f64> {
            centroid.iter().zip(&simplex[worst]).map(|(c, w)| c + t * (c - w)).collect()
        };
        let xr = along(c.reflect);
        let fr = f(&xr);
        evals += 1;
        if fr < values[best] {
            let xe = along(c.reflect * c.expand);
            let fe = f(&xe);
            evals += 1;
            if fe < fr {
                simplex[worst] = xe;
                values[worst] = fe;
            } else {
                simplex[worst] = xr;
                values[worst] = fr;
            }
            continue;
        }
        if fr < values[second] {
            simplex[worst] = xr;
            values[worst] = fr;
            continue;
        }
        let (xc, fc) = if fr < values[worst] {
            let xc = along(c.reflect * c.contract);
            let fc = f(&xc);
            (xc, fc)
        } else {
            let xc = along(-c.contract);
            let fc = f(&xc);
            (xc, fc)
        };
        evals += 1;
        if fc < fr.min(values[worst]) {
            simplex[worst] = xc;
            values[worst] = fc;
            continue;
        }
        let xb = simplex[best].clone();
        for &i in &order[1..] {
            for (vj, bj) in simplex[i].iter_mut().zip(&xb) {
                *vj = bj + c.shrink * (*vj - bj);
            }
            values[i] = f(&simplex[i]);
            evals += 1;
        }
    }
}

/// Minimises `f` from `x0`. Each restart reuses the incumbent with the step
/// shrunk by a factor of five, and stops once a restart fails to improve.
pub fn minimize<F: FnMut(&[f64]) -> f64>(mut f: F, x0: &[f64], opts: &NelderMeadOptions) -> NelderMeadResult {
    assert_eq!(opts.step.len(), x0.len(), "step length must match the dimension");
    let mut x = x0.to_vec();
    let mut value = f(&x);
    let mut evals = 1usize;
    let mut step = opts.step.clone();
    let mut converged = false;
    for round in 0..=opts.restarts {
        let budget = opts.max_evals.saturating_sub(evals);
        if budget == 0 {
            break;
        }
        let (xn, vn, used, ok) = run_once(&mut f, &x, value, &step, opts.rel_tol, budget);
        evals += used;
        let improved = vn < value - 1e-13 * value.abs();
        if vn <= value {
            x = xn;
            value = vn;
        }
        converged = ok;
        if !ok || (round > 0 && !improved) {
            break;
        }
        for s in &mut step {
            *s *= 0.2;
        }
    }
    NelderMeadResult { x, value, evals, converged }
}
