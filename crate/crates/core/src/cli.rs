//! The `dyntobit` command line.
//!
//! Every command prints a JSON report with `"schema": 1` and the resolved
//! configuration under `"config"`. `replay --from report.json` reruns that
//! configuration.

use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::clad::{fit_clad_design, Bandwidth, CladOptions};
use crate::design::Design;
use crate::error::{Error, Result};
use crate::inference::{
    limit_distribution, monte_carlo, select_lag_order, t_stat_profile, Dgp, EstimatorOptions, LagSelection,
    LimitEstimator, McConfig, Method,
};
use crate::ingest::{apply_censoring, read_csv, CensorMode, CensorRule, ColumnSpec};
use crate::jsr::check_assumption_a4;
use crate::mle::{fit_mle_design, MleOptions};
use crate::model::{Innovation, LurSpec, ModelSpec, Series};
use crate::ols::fit_ols_design;
use crate::output::{fmt_num, to_json_string};
use crate::simulate::{simulate_limit_process, simulate_tobit, Init, SimConfig};

pub const SCHEMA: u32 = 1;

#[derive(Parser, Debug, Clone, Serialize, Deserialize)]
#[command(name = "dyntobit", version, about = "Dynamic Tobit models with a unit or near-unit root")]
pub struct Cli {
    /// Worker threads for Monte Carlo replications and CLAD starts [default: available cores]
    #[arg(long, global = true, env = "DYNTOBIT_JOBS", value_parser = clap::value_parser!(u64).range(1..))]
    pub jobs: Option<u64>,

    #[command(subcommand)]
    #[serde(flatten)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Simulate a sample path and write it as CSV (t, y), presample rows first
    Simulate(SimulateArgs),
    /// Simulate the reflected limit process Y, or draws from the (alpha, beta) limit law
    LimitSim(LimitSimArgs),
    /// Fit a dynamic Tobit to a CSV series
    Estimate(EstimateArgs),
    /// Sequential t-test selection of the lag order
    SelectOrder(SelectOrderArgs),
    /// Monte Carlo experiment over simulated paths
    Montecarlo(MontecarloArgs),
    /// Bracket the joint spectral radius of the companion matrices
    JsrCheck(JsrArgs),
    /// Rerun the configuration echoed in a previous JSON report
    Replay(ReplayArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DgpPreset {
    /// y_t = [y_{t-1} + 0.5 dy_{t-1} + u_t]+ with Gaussian u, zero start
    Fig1,
    /// as fig1 with Laplace u of unit variance
    Fig2,
    /// --alpha, --beta, --phi, --sigma, --innovation, --init
    Custom,
    /// local to unity: --a0, --c0, --b0 with --phi, --sigma, --innovation
    Lur,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InnovationArg {
    Gaussian,
    Laplace,
    StudentT,
}

/// Comma-separated reals; the empty string is the empty list.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RealList(pub Vec<f64>);

impl FromStr for RealList {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(RealList(Vec::new()));
        }
        s.split(',')
            .map(|v| v.trim().parse::<f64>().map_err(|_| format!("'{v}' is not a number")))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(RealList)
    }
}

impl fmt::Display for RealList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        f.write_str(&v.join(","))
    }
}

fn parse_bandwidth(s: &str) -> std::result::Result<Bandwidth, String> {
    if s.eq_ignore_ascii_case("auto") {
        return Ok(Bandwidth::Auto);
    }
    match s.parse::<f64>() {
        Ok(h) if h > 0.0 && h.is_finite() => Ok(Bandwidth::Fixed(h)),
        _ => Err(format!("'{s}' is neither 'auto' nor a positive bandwidth")),
    }
}

fn parse_unit_interval(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v < 1.0 => Ok(v),
        _ => Err(format!("'{s}' is not in (0, 1)")),
    }
}

fn parse_nonnegative(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("'{s}' is not a finite non-negative number")),
    }
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct DgpArgs {
    #[arg(long, value_enum, default_value = "fig1")]
    pub dgp: DgpPreset,
    /// Sample size
    #[serde(rename = "T")]
    #[arg(long = "T", default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    pub t: u64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub beta: f64,
    /// Short-run coefficients, comma separated ("" for k = 1)
    #[arg(long, default_value = "0.5", allow_hyphen_values = true)]
    pub phi: RealList,
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long, value_enum, default_value = "gaussian")]
    pub innovation: InnovationArg,
    /// Degrees of freedom for student-t, in (2, 4.6]
    #[arg(long, default_value_t = 4.5)]
    pub nu: f64,
    /// Initial values y_{-k+1}, ..., y_0 for custom (default zeros)
    #[arg(long, allow_hyphen_values = true)]
    pub init: Option<RealList>,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub a0: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub c0: f64,
    #[arg(long, default_value_t = 0.0)]
    pub b0: f64,
}

impl DgpArgs {
    fn innovation(&self) -> Innovation {
        innovation_of(self.innovation, self.nu)
    }

    pub fn resolve(&self) -> Result<Dgp> {
        let t = self.t as usize;
        let dgp = match self.dgp {
            DgpPreset::Fig1 => Dgp::fig1(t),
            DgpPreset::Fig2 => Dgp::fig2(t),
            DgpPreset::Custom => {
                let spec = ModelSpec::new(self.alpha, self.beta, self.phi.0.clone(), self.sigma, self.innovation())?;
                let init = match &self.init {
                    Some(v) => Init::Explicit(v.0.clone()),
                    None => Init::Zeros,
                };
                Dgp::Fixed { spec, t, init }
            }
            DgpPreset::Lur => Dgp::Lur {
                lur: LurSpec::new(self.a0, self.c0, self.b0, t)?,
                phi: self.phi.0.clone(),
                sigma: self.sigma,
                innovation: self.innovation(),
            },
        };
        dgp.spec()?;
        Ok(dgp)
    }
}

fn innovation_of(arg: InnovationArg, nu: f64) -> Innovation {
    match arg {
        InnovationArg::Gaussian => Innovation::Gaussian,
        InnovationArg::Laplace => Innovation::Laplace,
        InnovationArg::StudentT => Innovation::StudentT { nu },
    }
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct InputArgs {
    /// CSV file with a header row
    #[arg(long)]
    pub input: PathBuf,
    /// Timestamp column (name, or zero-based index)
    #[arg(long, default_value = "date")]
    pub date_col: String,
    /// Value column (name, or zero-based index)
    #[arg(long, default_value = "value")]
    pub value_col: String,
    /// Censoring threshold c >= 0
    #[arg(long, default_value = "0", value_parser = parse_nonnegative)]
    pub censor: f64,
    /// clip: v <= c becomes 0; shift: v becomes max(v - c, 0)
    #[arg(long, default_value = "clip")]
    pub censor_mode: CensorMode,
}

impl fmt::Display for CensorMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CensorMode::Clip => "clip",
            CensorMode::Shift => "shift",
        })
    }
}

struct Loaded {
    series: Series,
    rows: usize,
    zeros: usize,
}

impl InputArgs {
    fn load(&self) -> Result<Loaded> {
        let raw = read_csv(&self.input, &ColumnSpec { date: self.date_col.clone(), value: self.value_col.clone() })?;
        let censored = apply_censoring(&raw, &CensorRule::new(self.censor, self.censor_mode)?)?;
        Ok(Loaded { rows: raw.len(), zeros: censored.zeros, series: censored.series })
    }
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct FitArgs {
    /// Uniform-kernel bandwidth for f(0): auto or a positive number
    #[arg(long, default_value = "auto", value_parser = parse_bandwidth)]
    pub bandwidth: Bandwidth,
    /// Number of CLAD starts (MLE, OLS, then perturbations)
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(1..))]
    pub starts: u64,
    /// Newton tolerance on the MLE score norm
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, default_value_t = 200)]
    pub max_iter: u64,
}

impl FitArgs {
    fn options(&self, seed: u64) -> EstimatorOptions {
        let mle = MleOptions { tol: self.tol, max_iter: self.max_iter as usize };
        EstimatorOptions {
            mle,
            clad: CladOptions { starts: self.starts as usize, bandwidth: self.bandwidth, seed, mle, ..CladOptions::default() },
        }
    }
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub dgp: DgpArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Discarded leading draws
    #[arg(long, default_value_t = 0)]
    pub burn_in: u64,
    /// CSV destination; without it the path is included in the JSON report
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LimitEstimatorArg {
    Mle,
    Clad,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct LimitSimArgs {
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub a0: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub c0: f64,
    #[arg(long, default_value_t = 0.0)]
    pub b0: f64,
    #[arg(long, default_value = "0.5", allow_hyphen_values = true)]
    pub phi: RealList,
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    /// Grid steps on [0, 1]
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(2..))]
    pub n: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Draw this many (alpha, beta) limit vectors instead of one path
    #[arg(long)]
    pub reps: Option<u64>,
    /// Limit law for --reps; clad takes f(0) and E|u| from --innovation
    #[arg(long, value_enum, default_value = "mle")]
    pub estimator: LimitEstimatorArg,
    #[arg(long, value_enum, default_value = "gaussian")]
    pub innovation: InnovationArg,
    #[arg(long, default_value_t = 4.5)]
    pub nu: f64,
    /// CSV destination (tau, Y, W, K for a path; one row per draw with --reps)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct EstimateArgs {
    #[arg(long, default_value = "mle")]
    pub method: Method,
    /// Lag order k (k - 1 lagged differences)
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
    pub k: u64,
    #[command(flatten)]
    #[serde(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub fit: FitArgs,
    /// Seed for the perturbed CLAD starts
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct SelectOrderArgs {
    /// Starting (largest) lag order
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
    pub k0: u64,
    #[arg(long, default_value = "mle")]
    pub method: Method,
    /// Two-sided significance level
    #[arg(long, default_value = "0.05", value_parser = parse_unit_interval)]
    pub level: f64,
    /// Also report the t-statistic for every k in 2..=k0
    #[arg(long)]
    pub profile: bool,
    #[command(flatten)]
    #[serde(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub fit: FitArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct MontecarloArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub dgp: DgpArgs,
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    pub reps: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Estimators to fit, comma separated
    #[arg(long, value_delimiter = ',', default_value = "mle,clad,ols")]
    pub estimators: Vec<Method>,
    #[command(flatten)]
    #[serde(flatten)]
    pub fit: FitArgs,
    /// Long-format draws CSV (rep, estimator, statistic, value)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write the JSON report here instead of stdout
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct JsrArgs {
    /// Short-run coefficients, comma separated
    #[arg(long, allow_hyphen_values = true)]
    pub phi: RealList,
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_len: u64,
    #[arg(long, default_value_t = 1e-3)]
    pub tol: f64,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct ReplayArgs {
    /// JSON report written by an earlier run
    #[arg(long)]
    pub from: PathBuf,
}

/// Parses `args` (program name first), runs the command and returns the exit
/// status: 0 on success, 2 on usage errors, 1 when the computation fails.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn execute(cli: Cli) -> Result<()> {
    let mut cli = match &cli.command {
        Command::Replay(r) => {
            let report: Value = serde_json::from_str(&fs::read_to_string(&r.from)?)?;
            let config = report
                .get("config")
                .cloned()
                .ok_or_else(|| Error::InvalidSpec(format!("{} has no \"config\" field", r.from.display())))?;
            let replayed: Cli = serde_json::from_value(config)?;
            if matches!(replayed.command, Command::Replay(_)) {
                return Err(Error::InvalidSpec("a replay report cannot be replayed".into()));
            }
            replayed
        }
        _ => cli,
    };
    let jobs = cli
        .jobs
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get() as u64));
    cli.jobs = Some(jobs);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs as usize)
        .build()
        .map_err(|e| Error::InvalidSpec(format!("cannot start {jobs} worker threads: {e}")))?;
    let config = serde_json::to_value(&cli)?;
    pool.install(|| dispatch(&cli.command, config))
}

fn dispatch(command: &Command, config: Value) -> Result<()> {
    let report = match command {
        Command::Simulate(a) => simulate_cmd(a, config)?,
        Command::LimitSim(a) => limit_sim_cmd(a, config)?,
        Command::Estimate(a) => estimate_cmd(a, config)?,
        Command::SelectOrder(a) => select_order_cmd(a, config)?,
        Command::Montecarlo(a) => return montecarlo_cmd(a, config),
        Command::JsrCheck(a) => jsr_cmd(a, config)?,
        Command::Replay(_) => unreachable!("replay is resolved before dispatch"),
    };
    emit(&report)
}

fn emit(report: &Value) -> Result<()> {
    let mut out = std::io::stdout().lock();
    out.write_all(to_json_string(report)?.as_bytes())?;
    out.flush()?;
    Ok(())
}

fn header(command: &str, config: Value) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("schema".into(), json!(SCHEMA));
    m.insert("command".into(), json!(command));
    m.insert("config".into(), config);
    m
}

fn write_csv(path: &Path, header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn simulate_cmd(a: &SimulateArgs, config: Value) -> Result<Value> {
    let dgp = a.dgp.resolve()?;
    let spec = dgp.spec()?;
    let series = match &dgp {
        Dgp::Fixed { init, t, .. } => {
            simulate_tobit(&spec, *t, &SimConfig { seed: a.seed, burn_in: a.burn_in as usize, init: init.clone() })?
        }
        Dgp::Lur { lur, phi, sigma, innovation } => crate::simulate::simulate_tobit_lur(
            lur,
            phi,
            *sigma,
            *innovation,
            &SimConfig { seed: a.seed, burn_in: a.burn_in as usize, init: Init::Zeros },
        )?,
    };
    let k = spec.k() as i64;
    let mut m = header("simulate", config);
    m.insert("model".into(), serde_json::to_value(&spec)?);
    m.insert("T".into(), json!(series.len()));
    m.insert("k".into(), json!(k));
    m.insert("n_zeros".into(), json!(series.n_zeros()));
    m.insert("y_T".into(), json!(series.values()[series.len() - 1]));
    match &a.out {
        Some(path) => {
            let rows = series
                .full_path()
                .into_iter()
                .enumerate()
                .map(|(i, y)| vec![(i as i64 - k + 1).to_string(), fmt_num(y)]);
            write_csv(path, &["t", "y"], rows)?;
            m.insert("out".into(), json!(path));
        }
        None => {
            m.insert("presample".into(), json!(series.presample()));
            m.insert("values".into(), json!(series.values()));
        }
    }
    Ok(Value::Object(m))
}

fn limit_sim_cmd(a: &LimitSimArgs, config: Value) -> Result<Value> {
    let lur = LurSpec::new(a.a0, a.c0, a.b0, 1)?;
    let n = a.n as usize;
    let mut m = header("limit-sim", config);
    match a.reps {
        None => {
            let path = simulate_limit_process(&lur, &a.phi.0, a.sigma, n, a.seed)?;
            m.insert("Y1".into(), json!(path.y[n]));
            m.insert("warnings".into(), json!(path.warnings));
            match &a.out {
                Some(p) => {
                    let rows = (0..=n)
                        .map(|i| vec![fmt_num(path.grid[i]), fmt_num(path.y[i]), fmt_num(path.w[i]), fmt_num(path.k_path[i])]);
                    write_csv(p, &["tau", "Y", "W", "K"], rows)?;
                    m.insert("out".into(), json!(p));
                }
                None => {
                    m.insert("tau".into(), json!(path.grid));
                    m.insert("Y".into(), json!(path.y));
                    m.insert("W".into(), json!(path.w));
                    m.insert("K".into(), json!(path.k_path));
                }
            }
        }
        Some(reps) => {
            let innovation = innovation_of(a.innovation, a.nu);
            innovation.validate()?;
            let estimator = match a.estimator {
                LimitEstimatorArg::Mle => LimitEstimator::Mle,
                LimitEstimatorArg::Clad => LimitEstimator::Clad {
                    f0: innovation.density_at_zero(a.sigma),
                    mean_abs: innovation.mean_abs(a.sigma),
                },
            };
            let sample = limit_distribution(&lur, &a.phi.0, a.sigma, estimator, n, reps as usize, a.seed)?;
            let alpha: Vec<f64> = sample.draws.iter().map(|d| d.alpha_comp).collect();
            let beta: Vec<f64> = sample.draws.iter().map(|d| d.beta_comp).collect();
            m.insert("estimator".into(), serde_json::to_value(estimator)?);
            m.insert("warnings".into(), json!(sample.warnings));
            m.insert(
                "summaries".into(),
                json!([
                    crate::stats::McSummary::from_draws(a.estimator_label(), "sqrtT_alpha", &alpha),
                    crate::stats::McSummary::from_draws(a.estimator_label(), "T_beta_minus_1", &beta),
                ]),
            );
            if let Some(p) = &a.out {
                let rows = sample.draws.iter().enumerate().map(|(r, d)| {
                    let mut row = vec![r.to_string()];
                    row.extend([d.alpha_comp, d.beta_comp, d.int_y, d.int_y2, d.w1, d.b1, d.int_y_db].map(fmt_num));
                    row
                });
                write_csv(p, &["rep", "alpha_comp", "beta_comp", "int_y", "int_y2", "w1", "b1", "int_y_db"], rows)?;
                m.insert("out".into(), json!(p));
            }
        }
    }
    Ok(Value::Object(m))
}

impl LimitSimArgs {
    fn estimator_label(&self) -> &'static str {
        match self.estimator {
            LimitEstimatorArg::Mle => "mle",
            LimitEstimatorArg::Clad => "clad",
        }
    }
}

fn coefficient_block(c: &[f64]) -> Value {
    json!({ "alpha": c[0], "beta": c[1], "phi": &c[2..] })
}

fn estimate_cmd(a: &EstimateArgs, config: Value) -> Result<Value> {
    let data = a.input.load()?;
    let design = Design::new(&data.series, a.k as usize)?;
    let opts = a.fit.options(a.seed);
    let mut m = header("estimate", config);
    m.insert("method".into(), json!(a.method));
    m.insert("k".into(), json!(a.k));
    m.insert("rows".into(), json!(data.rows));
    m.insert("zeros".into(), json!(data.zeros));
    m.insert("T".into(), json!(design.n_obs()));
    m.insert("n_censored".into(), json!(design.n_censored()));
    match a.method {
        Method::Mle => {
            let fit = fit_mle_design(&design, opts.mle)?;
            let p = design.n_coef();
            m.insert("coefficients".into(), coefficient_block(&fit.coefficients()));
            m.insert("sigma".into(), json!(fit.sigma_hat));
            m.insert("se_phi".into(), json!(fit.se_phi));
            m.insert("t_phi".into(), json!(fit.t_phi));
            m.insert(
                "information_se".into(),
                json!({ "alpha": fit.info_se[0], "beta": fit.info_se[1], "phi": &fit.info_se[2..p], "sigma": fit.info_se[p] }),
            );
            m.insert("loglik".into(), json!(fit.loglik));
            m.insert("converged".into(), json!(fit.converged));
            m.insert("iterations".into(), json!(fit.iterations));
            m.insert("score_norm".into(), json!(fit.score_norm));
        }
        Method::Clad => {
            let mle = fit_mle_design(&design, opts.mle).ok();
            let fit = fit_clad_design(&design, &opts.clad, mle.as_ref())?;
            m.insert("coefficients".into(), coefficient_block(&fit.coefficients()));
            m.insert("se_phi".into(), json!(fit.se_phi));
            m.insert("t_phi".into(), json!(fit.t_phi));
            m.insert("objective".into(), json!(fit.objective));
            m.insert("f0_hat".into(), json!(fit.f0_hat));
            m.insert("bandwidth".into(), json!(fit.bandwidth));
            m.insert("best_start".into(), json!(fit.best_start));
            m.insert("starts".into(), serde_json::to_value(&fit.starts)?);
        }
        Method::Ols => {
            let fit = fit_ols_design(&design)?;
            m.insert("coefficients".into(), coefficient_block(&fit.coefficients()));
            m.insert("sigma".into(), json!(fit.sigma_hat));
            m.insert("se_phi".into(), json!(&fit.se[2..]));
            m.insert("t_phi".into(), json!(&fit.t[2..]));
            m.insert("se".into(), coefficient_block(&fit.se));
        }
    }
    m.insert("nonstandard".into(), json!(["alpha", "beta"]));
    Ok(Value::Object(m))
}

fn select_order_cmd(a: &SelectOrderArgs, config: Value) -> Result<Value> {
    let data = a.input.load()?;
    let opts = a.fit.options(a.seed);
    let k0 = a.k0 as usize;
    let (selection, profile) = if a.profile {
        let profile = t_stat_profile(&data.series, a.method, k0, &opts)?;
        (LagSelection::from_profile(&profile, a.method, a.level)?, Some(profile))
    } else {
        (select_lag_order(&data.series, a.method, k0, a.level, &opts)?, None)
    };
    let mut m = header("select-order", config);
    m.insert("rows".into(), json!(data.rows));
    m.insert("zeros".into(), json!(data.zeros));
    m.insert("T".into(), json!(data.series.len().saturating_sub(k0)));
    m.insert("k0".into(), json!(k0));
    m.insert("method".into(), json!(selection.method));
    m.insert("level".into(), json!(selection.level));
    m.insert("critical_value".into(), json!(selection.critical_value));
    m.insert("k_hat".into(), json!(selection.k_hat));
    m.insert("path".into(), serde_json::to_value(&selection.path)?);
    if let Some(p) = profile {
        let rows: Vec<Value> = p.iter().map(|(k, t)| json!({ "k": k, "t_stat": t })).collect();
        m.insert("profile".into(), Value::Array(rows));
    }
    Ok(Value::Object(m))
}

fn montecarlo_cmd(a: &MontecarloArgs, config: Value) -> Result<()> {
    let dgp = a.dgp.resolve()?;
    let mut estimators = Vec::new();
    for e in &a.estimators {
        if !estimators.contains(e) {
            estimators.push(*e);
        }
    }
    let cfg = McConfig { dgp: dgp.clone(), estimators, reps: a.reps as usize, seed: a.seed, options: a.fit.options(0) };
    let result = monte_carlo(&cfg)?;
    if let Some(path) = &a.out {
        let rows = result
            .draws
            .iter()
            .map(|d| vec![d.rep.to_string(), d.estimator.clone(), d.statistic.clone(), fmt_num(d.value)]);
        write_csv(path, &["rep", "estimator", "statistic", "value"], rows)?;
    }
    let mut m = header("montecarlo", config);
    m.insert("model".into(), serde_json::to_value(&dgp)?);
    m.insert("reps".into(), json!(result.reps));
    m.insert("failures".into(), json!(result.failures));
    m.insert("failure_fraction".into(), json!(result.failure_fraction));
    m.insert("summaries".into(), serde_json::to_value(&result.summaries)?);
    let report = Value::Object(m);
    match &a.summary {
        Some(path) => Ok(fs::write(path, to_json_string(&report)?)?),
        None => emit(&report),
    }
}

fn jsr_cmd(a: &JsrArgs, config: Value) -> Result<Value> {
    let bracket = check_assumption_a4(&a.phi.0, a.max_len as usize, a.tol)?;
    let mut m = header("jsr-check", config);
    m.insert("lower".into(), json!(bracket.lower));
    m.insert("upper".into(), json!(bracket.upper));
    m.insert("depth".into(), json!(bracket.depth));
    m.insert("verdict".into(), serde_json::to_value(bracket.verdict)?);
    Ok(Value::Object(m))
}
