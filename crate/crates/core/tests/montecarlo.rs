mod common;

use common::fig1_series;
use dyntobit::design::Design;
use dyntobit::inference::{monte_carlo, select_lag_order, Dgp, EstimatorOptions, McConfig, Method};
use dyntobit::model::{theoretical_omega, Innovation, LurSpec};
use dyntobit::stats::jarque_bera;
use rayon::prelude::*;

/// 95% point of the chi-square distribution with two degrees of freedom.
const CHI2_2_95: f64 = 5.991464547107979;

#[test]
fn mle_t_statistic_passes_a_normality_check() {
    let cfg = McConfig {
        dgp: Dgp::fig1(1000),
        estimators: vec![Method::Mle],
        reps: 1000,
        seed: 2024,
        options: EstimatorOptions::default(),
    };
    let r = monte_carlo(&cfg).unwrap();
    let t = r.values("mle", "t_phi1");
    assert_eq!(t.len() + r.failures["mle"], 1000);
    let jb = jarque_bera(&t);
    assert!(jb < CHI2_2_95, "Jarque-Bera {jb}");
    let s = r.summary("mle", "t_phi1").unwrap();
    assert!(s.mean.abs() < 0.15 && (s.sd - 1.0).abs() < 0.1, "{s:?}");
}

#[test]
fn zero_fraction_is_small_on_every_seed() {
    let worst = (0..1000u64)
        .into_par_iter()
        .map(|seed| {
            let s = fig1_series(1000, seed);
            s.n_zeros() as f64 / 1000.0
        })
        .reduce(|| 0.0, f64::max);
    assert!(worst < 0.15, "worst zero fraction {worst}");
}

#[test]
fn sample_omega_matches_closed_form() {
    let omega = theoretical_omega(&[0.5], 1.0, None).unwrap();
    assert!((omega.matrix[(0, 0)] - 4.0 / 3.0).abs() < 1e-12);
    let d = Design::new(&fig1_series(100_000, 9), 2).unwrap();
    let sample = d.omega_hat()[(0, 0)];
    assert!((sample / (4.0 / 3.0) - 1.0).abs() < 0.02, "sample {sample}");

    let omega = theoretical_omega(&[0.3, 0.2], 1.0, None).unwrap();
    let spec = dyntobit::ModelSpec::new(0.0, 1.0, vec![0.3, 0.2], 1.0, Innovation::Gaussian).unwrap();
    let s = dyntobit::simulate::simulate_tobit(&spec, 100_000, &dyntobit::simulate::SimConfig::seeded(1)).unwrap();
    let sample = Design::new(&s, 3).unwrap().omega_hat();
    for i in 0..2 {
        for j in 0..2 {
            assert!((sample[(i, j)] / omega.matrix[(i, j)] - 1.0).abs() < 0.03, "({i},{j})");
        }
    }
}

#[test]
fn lag_selection_on_a_short_run() {
    let reps = 60;
    let hits = (0..reps)
        .into_par_iter()
        .filter(|seed| {
            let s = fig1_series(2000, 500 + *seed as u64);
            select_lag_order(&s, Method::Mle, 3, 0.05, &EstimatorOptions::default()).unwrap().k_hat == 2
        })
        .count();
    assert!(hits as f64 >= 0.8 * reps as f64, "{hits}/{reps}");
}

#[test]
fn local_to_unity_experiment_runs() {
    let lur = LurSpec::new(1.0, -5.0, 1.0, 500).unwrap();
    let cfg = McConfig {
        dgp: Dgp::Lur { lur, phi: vec![0.2], sigma: 1.0, innovation: Innovation::StudentT { nu: 4.5 } },
        estimators: vec![Method::Mle, Method::Clad, Method::Ols],
        reps: 40,
        seed: 1,
        options: EstimatorOptions::default(),
    };
    let r = monte_carlo(&cfg).unwrap();
    assert_eq!(r.failures["dgp"], 0);
    for s in &r.summaries {
        assert!(s.mean.is_finite() && s.sd >= 0.0);
        let q = &s.quantiles;
        assert!(q.q01 <= q.q05 && q.q05 <= q.q50 && q.q50 <= q.q95 && q.q95 <= q.q99);
    }
}
