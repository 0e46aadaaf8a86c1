mod common;

use std::path::Path;
use std::process::{Command, Output};

use dyntobit::clad::{fit_clad, CladOptions};
use dyntobit::mle::{fit_mle, MleOptions};
use dyntobit::model::{Innovation, ModelSpec};
use dyntobit::simulate::{simulate_tobit, SimConfig};
use serde_json::Value;
use tempfile::TempDir;

fn dyntobit(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dyntobit"))
        .args(args)
        .current_dir(dir)
        .env("DYNTOBIT_JOBS", "2")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn reals(v: &Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

/// Monthly-rate shaped file: 421 rows of a scaled unit-root Tobit path.
fn rate_file(dir: &Path) -> String {
    let spec = ModelSpec::new(0.0, 1.0, vec![0.4, 0.1, 0.0, 0.0, 0.0, 0.0, 0.0], 0.3, Innovation::Gaussian).unwrap();
    let s = simulate_tobit(&spec, 421 - 8, &SimConfig::seeded(4)).unwrap();
    let mut text = String::from("date,value\n");
    for (i, v) in s.full_path().iter().enumerate() {
        text += &format!("{}-{:02},{}\n", 1990 + i / 12, i % 12 + 1, v + 0.2);
    }
    std::fs::write(dir.join("rates.csv"), text).unwrap();
    "rates.csv".into()
}

#[test]
fn simulate_writes_presample_and_sample() {
    let dir = TempDir::new().unwrap();
    let report = json(&dyntobit(&["simulate", "--dgp", "fig1", "--T", "1000", "--seed", "7", "--out", "y.csv"], dir.path()));
    assert_eq!(report["schema"], 1);
    assert_eq!(report["config"]["seed"], 7);
    let text = std::fs::read_to_string(dir.path().join("y.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,y");
    assert_eq!(lines.len(), 1 + 2 + 1000);
    assert!(lines[1].starts_with("-1,") && lines[2].starts_with("0,") && lines[1002].starts_with("1000,"));
}

#[test]
fn estimate_on_emitted_csv_equals_in_memory_fit() {
    let dir = TempDir::new().unwrap();
    json(&dyntobit(&["simulate", "--dgp", "fig1", "--T", "600", "--seed", "11", "--out", "y.csv"], dir.path()));
    let spec = ModelSpec::new(0.0, 1.0, vec![0.5], 1.0, Innovation::Gaussian).unwrap();
    let series = simulate_tobit(&spec, 600, &SimConfig::seeded(11)).unwrap();

    let args = ["estimate", "--input", "y.csv", "--date-col", "t", "--value-col", "y", "--k", "2"];
    let mle = json(&dyntobit(&[&args[..], &["--method", "mle"]].concat(), dir.path()));
    let fit = fit_mle(&series, 2, MleOptions::default()).unwrap();
    assert_eq!(mle["coefficients"]["alpha"].as_f64().unwrap(), fit.alpha_hat);
    assert_eq!(mle["coefficients"]["beta"].as_f64().unwrap(), fit.beta_hat);
    assert_eq!(reals(&mle["coefficients"]["phi"]), fit.phi_hat);
    assert_eq!(mle["sigma"].as_f64().unwrap(), fit.sigma_hat);
    assert_eq!(reals(&mle["t_phi"]), fit.t_phi);
    assert_eq!(mle["T"], 600);

    let clad = json(&dyntobit(&[&args[..], &["--method", "clad"]].concat(), dir.path()));
    let fit = fit_clad(&series, 2, &CladOptions::default()).unwrap();
    assert_eq!(reals(&clad["coefficients"]["phi"]), fit.phi_hat);
    assert_eq!(clad["f0_hat"].as_f64().unwrap(), fit.f0_hat);
}

#[test]
fn table_layout_on_rate_data() {
    let dir = TempDir::new().unwrap();
    let f = rate_file(dir.path());
    let out = json(&dyntobit(&["estimate", "--method", "clad", "--k", "8", "--input", &f, "--censor", "0.5"], dir.path()));
    assert_eq!(out["rows"], 421);
    assert_eq!(out["T"], 421 - 8);
    assert_eq!(reals(&out["t_phi"]).len(), 7);
    assert_eq!(reals(&out["coefficients"]["phi"]).len(), 7);
    assert!(out["zeros"].as_u64().unwrap() > 0);

    let sel = json(&dyntobit(
        &["select-order", "--k0", "20", "--method", "mle", "--level", "0.05", "--profile", "--input", &f, "--censor", "0.5"],
        dir.path(),
    ));
    let profile = sel["profile"].as_array().unwrap();
    assert_eq!(profile.len(), 19);
    let ks: Vec<u64> = profile.iter().map(|p| p["k"].as_u64().unwrap()).collect();
    assert_eq!(ks, (2..=20).collect::<Vec<u64>>());
    assert!((sel["critical_value"].as_f64().unwrap() - 1.959963984540054).abs() < 1e-12);
    let path = sel["path"].as_array().unwrap();
    assert_eq!(path[0]["k"], 20);
    let last = path.last().unwrap();
    let expected = if last["reject"] == true { last["k"].as_u64().unwrap() } else { 1 };
    assert_eq!(sel["k_hat"], expected);
}

#[test]
fn jsr_verdicts() {
    let dir = TempDir::new().unwrap();
    let ok = json(&dyntobit(&["jsr-check", "--phi", "0.5"], dir.path()));
    assert_eq!(ok["verdict"], "satisfied");
    assert_eq!(ok["upper"].as_f64().unwrap(), 0.5);
    let bad = json(&dyntobit(&["jsr-check", "--phi", "1.5"], dir.path()));
    assert_eq!(bad["verdict"], "violated");
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    assert_eq!(dyntobit(&["frobnicate"], dir.path()).status.code(), Some(2));
    assert_eq!(dyntobit(&["estimate", "--k", "x", "--input", "a.csv"], dir.path()).status.code(), Some(2));
    let usage = dyntobit(&["jsr-check"], dir.path());
    assert_eq!(usage.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&usage.stderr).contains("--phi"));
    assert_eq!(dyntobit(&["--help"], dir.path()).status.code(), Some(0));

    std::fs::write(dir.path().join("empty.csv"), "date,value\n").unwrap();
    let out = dyntobit(&["estimate", "--input", "empty.csv"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no data"));
    assert_eq!(dyntobit(&["estimate", "--input", "missing.csv"], dir.path()).status.code(), Some(1));
    assert_eq!(dyntobit(&["jsr-check", "--phi", "0.5", "--tol=-1"], dir.path()).status.code(), Some(1));
}

#[test]
fn montecarlo_replays_byte_for_byte() {
    let dir = TempDir::new().unwrap();
    let run = |summary: &str, draws: &str, jobs: &str| {
        let out = dyntobit(
            &["montecarlo", "--dgp", "fig2", "--T", "150", "--reps", "6", "--seed", "3", "--jobs", jobs, "--out", draws, "--summary", summary],
            dir.path(),
        );
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    };
    run("a.json", "a.csv", "1");
    run("b.json", "b.csv", "3");
    let read = |f: &str| std::fs::read_to_string(dir.path().join(f)).unwrap();
    assert_eq!(read("a.csv"), read("b.csv"));
    let (a, b): (Value, Value) = (serde_json::from_str(&read("a.json")).unwrap(), serde_json::from_str(&read("b.json")).unwrap());
    assert_eq!(a["summaries"], b["summaries"]);
    assert_eq!(a["config"]["jobs"], 1);

    std::fs::rename(dir.path().join("a.json"), dir.path().join("orig.json")).unwrap();
    let out = dyntobit(&["replay", "--from", "orig.json"], dir.path());
    assert!(out.status.success());
    assert_eq!(read("orig.json"), read("a.json"));
    assert_eq!(read("a.csv"), read("b.csv"));

    let summaries = a["summaries"].as_array().unwrap();
    let t_phi = summaries.iter().find(|s| s["estimator"] == "clad" && s["statistic"] == "t_phi1").unwrap();
    assert_eq!(t_phi["reps"], 6);
    let counts: u64 = t_phi["histogram"]["counts"].as_array().unwrap().iter().map(|c| c.as_u64().unwrap()).sum();
    assert_eq!(counts, 6);
    assert_eq!(a["failures"]["mle"], 0);
}

#[test]
fn limit_sim_outputs() {
    let dir = TempDir::new().unwrap();
    let path = json(&dyntobit(&["limit-sim", "--n", "500", "--seed", "2", "--out", "y.csv"], dir.path()));
    assert!(path["warnings"].as_array().unwrap().is_empty());
    let text = std::fs::read_to_string(dir.path().join("y.csv")).unwrap();
    assert_eq!(text.lines().next(), Some("tau,Y,W,K"));
    assert_eq!(text.lines().count(), 502);

    let coarse = json(&dyntobit(&["limit-sim", "--n", "50"], dir.path()));
    assert_eq!(coarse["warnings"].as_array().unwrap().len(), 1);

    let draws = json(&dyntobit(
        &["limit-sim", "--reps", "200", "--estimator", "clad", "--innovation", "laplace", "--phi", "", "--out", "d.csv"],
        dir.path(),
    ));
    assert_eq!(draws["estimator"]["estimator"], "clad");
    assert!((draws["estimator"]["f0"].as_f64().unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
    assert_eq!(std::fs::read_to_string(dir.path().join("d.csv")).unwrap().lines().count(), 201);
}
