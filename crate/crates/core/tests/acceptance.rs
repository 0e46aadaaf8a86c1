//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any failure.

mod common;

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use common::{central_diff, fig1_series, lad_oracle, shifted_series, xy};
use dyntobit::clad::{density_at_zero, fit_clad, Bandwidth, CladOptions};
use dyntobit::design::Design;
use dyntobit::inference::{limit_distribution, monte_carlo, select_lag_order, Dgp, EstimatorOptions, LimitEstimator, McConfig, McResult, Method};
use dyntobit::jsr::{jsr_bounds, spectral_radius, Verdict};
use dyntobit::mle::{fit_mle, olsen_eval, MleOptions, OlsenParams};
use dyntobit::model::{theoretical_omega, Innovation, LurSpec, ModelSpec};
use dyntobit::ols::fit_ols;
use dyntobit::rng::substream;
use dyntobit::simulate::{simulate_limit_process_with_rng, simulate_tobit, SimConfig};
use dyntobit::stats::{ks_distance, mean, sd};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rayon::prelude::*;

const MC_REPS: usize = 5000;
const MC_T: usize = 1000;
const SEED: u64 = 1;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn within(x: f64, lo: f64, hi: f64) -> bool {
    x >= lo && x <= hi
}

struct Runs {
    gaussian: McResult,
    laplace: McResult,
}

fn mc(dgp: Dgp, estimators: Vec<Method>) -> McResult {
    let cfg = McConfig { dgp, estimators, reps: MC_REPS, seed: SEED, options: EstimatorOptions::default() };
    monte_carlo(&cfg).expect("Monte Carlo run")
}

fn gradient_and_hessian() -> Outcome {
    let design = Design::new(&fig1_series(200, 17), 2).unwrap();
    let eval = |v: &[f64]| olsen_eval(&OlsenParams::from_vector(&DVector::from_column_slice(v)), &design).unwrap();
    let mut rng = substream(SEED, 100);
    let (mut score_err, mut hess_err) = (0.0f64, 0.0f64);
    for _ in 0..20 {
        let x = vec![
            rng.random_range(-0.3..0.3),
            rng.random_range(0.9..1.1),
            rng.random_range(0.2..0.8),
            rng.random_range(0.6..1.6),
        ];
        let e = eval(&x);
        for i in 0..4 {
            let fd = central_diff(&|v| eval(v).value, &x, i, 1e-4);
            score_err = score_err.max((fd - e.gradient[i]).abs() / e.gradient[i].abs().max(1.0));
            for j in 0..4 {
                let fd = central_diff(&|v| eval(v).gradient[i], &x, j, 1e-4);
                hess_err = hess_err.max((fd - e.hessian[(i, j)]).abs() / e.hessian[(i, j)].abs().max(1.0));
            }
        }
    }
    outcome(
        score_err <= 1e-6 && hess_err <= 1e-5,
        format!("max rel error score {score_err:.2e} (<= 1e-6), Hessian {hess_err:.2e} (<= 1e-5)"),
    )
}

fn uncensored_agreement() -> Outcome {
    let s = shifted_series(5000, 3);
    let mle = fit_mle(&s, 2, MleOptions::default()).unwrap();
    let ols = fit_ols(&s, 2).unwrap();
    let d_ols = mle.coefficients().iter().zip(ols.coefficients()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let clad = fit_clad(&s, 2, &CladOptions::default()).unwrap();
    let (x, y) = xy(&Design::new(&s, 2).unwrap());
    let oracle = lad_oracle(&x, &y);
    let d_lad = clad.coefficients().iter().zip(&oracle).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    outcome(
        s.n_zeros() == 0 && d_ols <= 1e-6 && d_lad <= 1e-3,
        format!("zeros {}, |MLE - OLS| {d_ols:.2e} (<= 1e-6), |CLAD - LAD| {d_lad:.2e} (<= 1e-3)", s.n_zeros()),
    )
}

fn sd_of(r: &McResult, est: &str, stat: &str) -> f64 {
    r.summary(est, stat).unwrap().sd
}

fn gaussian_efficiency(runs: &Runs) -> Outcome {
    let ratio = sd_of(&runs.gaussian, "clad", "sqrtT_phi1") / sd_of(&runs.gaussian, "mle", "sqrtT_phi1");
    outcome(within(ratio, 1.15, 1.35), format!("sd CLAD / sd MLE = {ratio:.4} in [1.15, 1.35]"))
}

fn laplace_efficiency(runs: &Runs) -> Outcome {
    let ratio = sd_of(&runs.laplace, "mle", "sqrtT_phi1") / sd_of(&runs.laplace, "clad", "sqrtT_phi1");
    outcome(within(ratio, 1.30, 1.55), format!("sd MLE / sd CLAD = {ratio:.4} in [1.30, 1.55]"))
}

fn t_normality(runs: &Runs) -> Outcome {
    let z = dyntobit::normal::two_sided_critical(0.05);
    let mut pass = true;
    let mut parts = Vec::new();
    for est in ["mle", "clad"] {
        let t = runs.gaussian.values(est, "t_phi1");
        let (m, s) = (mean(&t), sd(&t));
        let reject = t.iter().filter(|v| v.abs() > z).count() as f64 / t.len() as f64;
        pass &= m.abs() <= 0.1 && within(s, 0.9, 1.1) && within(reject, 0.035, 0.065);
        parts.push(format!("{est}: mean {m:.4}, sd {s:.4}, 5% rejection {:.2}%", 100.0 * reject));
    }
    outcome(pass, parts.join("; "))
}

fn ols_bias(runs: &Runs) -> Outcome {
    let t = runs.gaussian.summary("ols", "t_phi1").unwrap().mean;
    let e = runs.gaussian.summary("ols", "sqrtT_phi1").unwrap().mean;
    outcome(
        within(t, -0.55, -0.25) && e < 0.0,
        format!("mean OLS t = {t:.4} in [-0.55, -0.25], mean sqrtT error = {e:.4} < 0"),
    )
}

fn y1_draws(phi: &[f64], paths: usize, seed: u64) -> Vec<f64> {
    let lur = LurSpec::new(0.0, 0.0, 0.0, 1).unwrap();
    (0..paths as u64)
        .into_par_iter()
        .map(|r| {
            let p = simulate_limit_process_with_rng(&lur, phi, 1.0, 1000, &mut substream(seed, r)).unwrap();
            p.y[1000]
        })
        .collect()
}

fn limit_law(runs: &Runs) -> Outcome {
    let reflected = y1_draws(&[], 100_000, 71);
    let m = mean(&reflected);
    let target = (2.0 / PI).sqrt();
    let y1 = y1_draws(&[0.5], 100_000, 72);
    let ks = ks_distance(&runs.gaussian.values("dgp", "yT_over_sqrtT"), &y1);
    outcome(
        (m - target).abs() <= 0.01 && ks <= 0.03,
        format!("mean Y(1) = {m:.4} vs {target:.4} (+-0.01), KS(y_T/sqrtT, Y(1)) = {ks:.4} (<= 0.03)"),
    )
}

fn alpha_beta_limit(runs: &Runs) -> Outcome {
    let lur = LurSpec::new(0.0, 0.0, 0.0, MC_T).unwrap();
    let draws = limit_distribution(&lur, &[0.5], 1.0, LimitEstimator::Mle, 1000, MC_REPS, 81).unwrap().draws;
    let beta: Vec<f64> = draws.iter().map(|d| d.beta_comp).collect();
    let ks = ks_distance(&runs.gaussian.values("mle", "T_beta_minus_1"), &beta);
    outcome(ks <= 0.05, format!("KS(T(beta - 1), limit beta component) = {ks:.4} (<= 0.05)"))
}

fn omega_oracle() -> Outcome {
    let exact = theoretical_omega(&[0.5], 1.0, None).unwrap().matrix[(0, 0)];
    let d = Design::new(&fig1_series(100_000, 9), 2).unwrap();
    let sample = d.omega_hat()[(0, 0)];
    let rel = (sample / exact - 1.0).abs();
    outcome(
        (exact - 4.0 / 3.0).abs() <= 1e-12 && rel <= 0.02,
        format!("Omega = {exact:.15} (4/3), sample {sample:.5}, relative gap {:.3}% (<= 2%)", 100.0 * rel),
    )
}

fn density_at_zero_check() -> Outcome {
    let draw = |law: Innovation, stream| -> Vec<f64> {
        let mut rng = substream(SEED, stream);
        (0..1_000_000).map(|_| law.sample(&mut rng, 1.0)).collect()
    };
    let g = density_at_zero(&draw(Innovation::Gaussian, 200), Bandwidth::Auto).unwrap().f0;
    let l = density_at_zero(&draw(Innovation::Laplace, 201), Bandwidth::Auto).unwrap().f0;
    let (tg, tl) = (1.0 / (2.0 * PI).sqrt(), 0.5f64.sqrt());
    let (eg, el) = ((g / tg - 1.0).abs(), (l / tl - 1.0).abs());
    outcome(
        eg <= 0.05 && el <= 0.05,
        format!("Gaussian f0 {g:.5} ({:.2}% off), Laplace f0 {l:.5} ({:.2}% off), both <= 5%", 100.0 * eg, 100.0 * el),
    )
}

fn jsr_checks() -> Outcome {
    let s = |v: f64| DMatrix::from_element(1, 1, v);
    let scalar = jsr_bounds(&[s(0.0), s(0.5)], 20, 1e-9).unwrap();
    let scalar_ok = (scalar.lower - 0.5).abs() <= 1e-9 && (scalar.upper - 0.5).abs() <= 1e-9;
    let e12 = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
    let e21 = DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 1.0, 0.0]);
    let pair = jsr_bounds(&[e12, e21], 20, 1e-3).unwrap();
    let mut rng = substream(SEED, 300);
    let raw = DMatrix::from_fn(2, 2, |_, _| rng.random_range(-1.0..1.0));
    let m = &raw * (0.9 / spectral_radius(&raw));
    let rho = spectral_radius(&m);
    let single = jsr_bounds(&[m], 64, 1e-12).unwrap();
    let gap = (single.upper - rho).abs().max((single.lower - rho).abs());
    outcome(
        scalar_ok && pair.verdict == Verdict::Violated && gap <= 1e-3,
        format!(
            "scalar [{}, {}], E12/E21 verdict {:?}, single matrix bracket within {gap:.2e} of rho {rho:.4}",
            scalar.lower, scalar.upper, pair.verdict
        ),
    )
}

fn lag_selection() -> Outcome {
    let reps = 500u64;
    let opts = EstimatorOptions::default();
    let run = |phi: Vec<f64>, k0: usize, target: usize, seed: u64| -> f64 {
        let spec = ModelSpec::new(0.0, 1.0, phi, 1.0, Innovation::Gaussian).unwrap();
        let hits = (0..reps)
            .into_par_iter()
            .filter(|r| {
                let s = simulate_tobit(&spec, 2000, &SimConfig::seeded(seed + r)).unwrap();
                select_lag_order(&s, Method::Mle, k0, 0.05, &opts).map(|l| l.k_hat == target).unwrap_or(false)
            })
            .count();
        hits as f64 / reps as f64
    };
    let two = run(vec![0.5], 3, 2, 10_000);
    let one = run(vec![], 2, 1, 20_000);
    outcome(
        two >= 0.8 && one >= 0.9,
        format!("k=2 DGP from k0=3: {:.1}% select 2 (>= 80%); unit root from k0=2: {:.1}% select 1 (>= 90%)", 100.0 * two, 100.0 * one),
    )
}

fn main() -> ExitCode {
    let start = Instant::now();
    let timed = |f: &dyn Fn() -> Outcome| {
        let t = Instant::now();
        let o = f();
        (o, t.elapsed().as_secs_f64())
    };
    println!("acceptance: Monte Carlo designs with {MC_REPS} replications, T = {MC_T}");
    let t = Instant::now();
    let runs = Runs {
        gaussian: mc(Dgp::fig1(MC_T), vec![Method::Mle, Method::Clad, Method::Ols]),
        laplace: mc(Dgp::fig2(MC_T), vec![Method::Mle, Method::Clad]),
    };
    println!(
        "acceptance: simulations done in {:.1}s (failures gaussian {:?}, laplace {:?})",
        t.elapsed().as_secs_f64(),
        runs.gaussian.failures,
        runs.laplace.failures
    );

    let checks: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("score and Hessian vs finite differences", Box::new(gradient_and_hessian)),
        ("uncensored MLE = OLS, CLAD = LAD", Box::new(uncensored_agreement)),
        ("Gaussian efficiency ratio", Box::new(|| gaussian_efficiency(&runs))),
        ("Laplace efficiency reversal", Box::new(|| laplace_efficiency(&runs))),
        ("short-run t-statistics are standard normal", Box::new(|| t_normality(&runs))),
        ("OLS short-run bias", Box::new(|| ols_bias(&runs))),
        ("reflected limit process law", Box::new(|| limit_law(&runs))),
        ("(alpha, beta) limit distribution", Box::new(|| alpha_beta_limit(&runs))),
        ("long-run moment matrix", Box::new(omega_oracle)),
        ("density at zero", Box::new(density_at_zero_check)),
        ("joint spectral radius brackets", Box::new(jsr_checks)),
        ("sequential lag selection", Box::new(lag_selection)),
    ];
    let mut failed = 0;
    for (i, (name, f)) in checks.iter().enumerate() {
        let (o, secs) = timed(f.as_ref());
        if !o.pass {
            failed += 1;
        }
        println!("[{}] {:>2} {name}: {} ({secs:.1}s)", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail);
    }
    println!(
        "acceptance: {} of {} criteria passed in {:.1}s",
        checks.len() - failed,
        checks.len(),
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
