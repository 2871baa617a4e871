//! Argument parsing and execution for the `dde-lab` binary.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use dde_resolvent::harness::{
    compare_pde_runtime, compare_scalar_runtime, convergence_study, error_profile, exp_growth_fit,
    rightmost_characteristic_root, SchemePair,
};
use dde_resolvent::io::{write_pairs, write_pde_csv, write_scalar_csv};
use dde_resolvent::oracle::{oo_residual, oo_solution, OhiraParams};
use dde_resolvent::pde::{run_pde, FieldHistory, PdeConfig, PdeProblem};
use dde_resolvent::scalar::{
    run, Coefficient, DelayMode, ScalarDelayProblem, ScalarHistory, Scheme, SchemeConfig,
};
use dde_resolvent::stability::{
    build_discrete_propagators, defect_norm, estimate_os_norm, spectral_radius, CompanionOperator,
};
use dde_resolvent::Error;

pub mod manifest;

pub use manifest::{paper_experiments, Experiment};

#[derive(Debug, Parser)]
#[command(
    name = "dde-lab",
    version,
    about = "Delay-equation integrators, diagnostics and experiments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate the scalar delay equation and write the (t, u) series.
    Scalar(ScalarArgs),
    /// Integrate the reaction-diffusion delay equation and write center/L2 traces.
    Pde(PdeArgs),
    /// Spectral radius, summability and Ritt profiles of the splitting companion matrix.
    Stability(StabilityArgs),
    /// Evaluate the Fourier-quadrature benchmark for u' = a t u + b u(t + tau).
    Oracle(OracleArgs),
    /// Order study of two scheme realizations against each other.
    Convergence(ConvergenceArgs),
    /// Fit log|u| ~ log M + omega t and compare with the rightmost characteristic root.
    GrowthFit(GrowthFitArgs),
    /// Median wall clock of implicit Euler against Lie-Trotter.
    Timing(TimingArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    Ie,
    Lt,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Ie => Scheme::ImplicitEuler,
            SchemeArg::Lt => Scheme::LieTrotter,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DelayModeArg {
    Grid,
    Kernel,
}

impl From<DelayModeArg> for DelayMode {
    fn from(m: DelayModeArg) -> Self {
        match m {
            DelayModeArg::Grid => DelayMode::Grid,
            DelayModeArg::Kernel => DelayMode::Kernel,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CoefficientMode {
    /// a(t) = a
    Constant,
    /// a(t) = a t
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Scalar history choices: `poly10`, `zero` or `constant=<value>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HistoryArg {
    Poly10,
    Constant(f64),
}

impl HistoryArg {
    pub fn build(self) -> ScalarHistory {
        match self {
            HistoryArg::Poly10 => ScalarHistory::poly10(),
            HistoryArg::Constant(c) => ScalarHistory::constant(c),
        }
    }
}

fn parse_history(s: &str) -> Result<HistoryArg, String> {
    match s {
        "poly10" => Ok(HistoryArg::Poly10),
        "zero" => Ok(HistoryArg::Constant(0.0)),
        _ => match s.strip_prefix("constant=") {
            Some(v) => finite(v).map(HistoryArg::Constant),
            None => Err(format!(
                "unknown history {s:?} (poly10, zero, constant=<value>)"
            )),
        },
    }
}

fn finite(s: &str) -> Result<f64, String> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| format!("not a number: {s:?}"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("value must be finite, got {s}"))
    }
}

fn positive(s: &str) -> Result<f64, String> {
    let v = finite(s)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(format!("value must be positive, got {s}"))
    }
}

fn negative(s: &str) -> Result<f64, String> {
    let v = finite(s)?;
    if v < 0.0 {
        Ok(v)
    } else {
        Err(format!("delay must be negative, got {s}"))
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output file; standard output when omitted.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Include wall-clock seconds in JSON output (breaks byte-identical reruns).
    #[arg(long)]
    pub record_wall_clock: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ScalarProblemArgs {
    /// Reaction coefficient a.
    #[arg(long, allow_negative_numbers = true, value_parser = finite, default_value = "-0.15")]
    pub a: f64,
    /// Whether a is constant or multiplies t.
    #[arg(long, value_enum, default_value = "constant")]
    pub a_mode: CoefficientMode,
    /// Delay coefficient b.
    #[arg(long, allow_negative_numbers = true, value_parser = finite, default_value = "-6.0")]
    pub b: f64,
    /// Delay tau (< 0).
    #[arg(long, allow_negative_numbers = true, value_parser = negative, default_value = "-8.0")]
    pub tau: f64,
    /// History on [tau, 0]: poly10, zero or constant=<value>.
    #[arg(long, value_parser = parse_history, default_value = "poly10")]
    pub history: HistoryArg,
}

impl ScalarProblemArgs {
    pub fn problem(&self) -> Result<ScalarDelayProblem, Error> {
        let a = match self.a_mode {
            CoefficientMode::Constant => Coefficient::Constant(self.a),
            CoefficientMode::Linear => Coefficient::LinearInTime(self.a),
        };
        ScalarDelayProblem::new(a, self.b, self.tau, self.history.build())
    }

    fn to_json(&self) -> Value {
        json!({
            "a": self.a,
            "a_mode": match self.a_mode { CoefficientMode::Constant => "constant", CoefficientMode::Linear => "linear" },
            "b": self.b,
            "tau": self.tau,
            "history": match self.history {
                HistoryArg::Poly10 => "poly10".to_string(),
                HistoryArg::Constant(c) => format!("constant={c}"),
            },
        })
    }
}

#[derive(Debug, Clone, Args)]
pub struct ScalarArgs {
    #[command(flatten)]
    pub problem: ScalarProblemArgs,
    #[arg(long, value_enum, default_value = "ie")]
    pub scheme: SchemeArg,
    /// Grid ring buffer or exponential-kernel history segment.
    #[arg(long, value_enum, default_value = "grid")]
    pub mode: DelayModeArg,
    /// Step size.
    #[arg(long, value_parser = positive, default_value = "0.01")]
    pub h: f64,
    /// Horizon.
    #[arg(long = "T", value_parser = positive, default_value = "40")]
    pub horizon: f64,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[command(flatten)]
    pub out: OutputArgs,
}

impl ScalarArgs {
    pub fn config(&self) -> SchemeConfig {
        SchemeConfig::new(self.scheme.into(), self.mode.into(), self.h, self.horizon)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PdePreset {
    PaperAutoPde,
    PaperNonautoPde,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PdeMode {
    Auto,
    Nonauto,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FieldHistoryArg {
    /// 0.3 + 0.2 sin(2 pi x) cos(2 pi t)
    Standard,
    Zero,
}

#[derive(Debug, Clone, Args)]
pub struct PdeArgs {
    /// Named parameter set; individual flags override it.
    #[arg(long, value_enum, conflicts_with = "mode")]
    pub preset: Option<PdePreset>,
    /// Shorthand for the autonomous or non-autonomous parameter set.
    #[arg(long, value_enum)]
    pub mode: Option<PdeMode>,
    #[arg(long, value_enum, default_value = "ie")]
    pub scheme: SchemeArg,
    #[arg(long, value_parser = finite)]
    pub kappa: Option<f64>,
    #[arg(long, allow_negative_numbers = true, value_parser = finite)]
    pub lambda0: Option<f64>,
    #[arg(long, allow_negative_numbers = true, value_parser = finite)]
    pub lambda1: Option<f64>,
    #[arg(long, value_parser = positive)]
    pub t_lambda: Option<f64>,
    #[arg(long, allow_negative_numbers = true, value_parser = finite)]
    pub b: Option<f64>,
    #[arg(long, allow_negative_numbers = true, value_parser = negative)]
    pub tau: Option<f64>,
    /// Domain length.
    #[arg(long = "L", value_parser = positive)]
    pub length: Option<f64>,
    /// Interior grid points.
    #[arg(long)]
    pub nx: Option<usize>,
    #[arg(long, value_parser = positive)]
    pub h: Option<f64>,
    #[arg(long = "T", value_parser = positive)]
    pub horizon: Option<f64>,
    #[arg(long, value_enum)]
    pub history: Option<FieldHistoryArg>,
    /// Record the full field at these times (JSON only).
    #[arg(long, value_delimiter = ',', value_parser = finite)]
    pub snapshot: Vec<f64>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[command(flatten)]
    pub out: OutputArgs,
}

impl PdeArgs {
    pub fn problem(&self) -> PdeProblem {
        let nonauto = matches!(self.preset, Some(PdePreset::PaperNonautoPde))
            || matches!(self.mode, Some(PdeMode::Nonauto));
        let mut p = if nonauto {
            PdeProblem::paper_nonautonomous()
        } else {
            PdeProblem::paper_autonomous()
        };
        if let Some(v) = self.kappa {
            p.kappa = v;
        }
        if let Some(v) = self.lambda0 {
            p.lambda0 = v;
        }
        if let Some(v) = self.lambda1 {
            p.lambda1 = v;
        }
        if let Some(v) = self.t_lambda {
            p.t_lambda = v;
        }
        if let Some(v) = self.b {
            p.b = v;
        }
        if let Some(v) = self.tau {
            p.tau = v;
        }
        if let Some(v) = self.length {
            p.length = v;
        }
        if let Some(v) = self.nx {
            p.nx = v;
        }
        if let Some(FieldHistoryArg::Zero) = self.history {
            p.history = FieldHistory::zero();
        }
        p
    }

    pub fn config(&self) -> PdeConfig {
        let mut c = PdeConfig::paper(self.scheme.into());
        if let Some(h) = self.h {
            c.h = h;
        }
        if let Some(t) = self.horizon {
            c.horizon = t;
        }
        c.snapshots = self.snapshot.clone();
        c
    }
}

#[derive(Debug, Clone, Args)]
pub struct StabilityArgs {
    #[arg(long, allow_negative_numbers = true, value_parser = finite, default_value = "-0.15")]
    pub a: f64,
    #[arg(long, allow_negative_numbers = true, value_parser = finite, default_value = "-6.0")]
    pub b: f64,
    #[arg(long, allow_negative_numbers = true, value_parser = negative, default_value = "-0.257")]
    pub tau: f64,
    #[arg(long, value_parser = positive, default_value = "0.001")]
    pub h: f64,
    /// Profile length N.
    #[arg(long = "N", default_value = "200000")]
    pub n: usize,
    /// Keep every k-th profile entry in the output (the last one is always kept).
    #[arg(long, default_value = "1000")]
    pub profile_stride: usize,
    #[arg(long, value_parser = positive, default_value = "1e-12")]
    pub tol: f64,
    /// Extra step sizes at which to report spectral radius and S_N.
    #[arg(long, value_delimiter = ',', value_parser = positive)]
    pub h_ladder: Vec<f64>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct OracleArgs {
    #[arg(long, allow_negative_numbers = true, value_parser = finite, default_value = "-0.15")]
    pub a: f64,
    #[arg(long, allow_negative_numbers = true, value_parser = finite, default_value = "-6.0")]
    pub b: f64,
    #[arg(long, allow_negative_numbers = true, value_parser = negative, default_value = "-8.0")]
    pub tau: f64,
    #[arg(long, allow_negative_numbers = true, value_parser = finite, default_value = "0")]
    pub t_start: f64,
    #[arg(long, allow_negative_numbers = true, value_parser = finite, default_value = "10")]
    pub t_end: f64,
    #[arg(long, value_parser = positive, default_value = "0.1")]
    pub dt: f64,
    #[arg(long, value_parser = positive, default_value = "4.0")]
    pub omega_max: f64,
    /// Simpson nodes (odd).
    #[arg(long, default_value = "2001")]
    pub nodes: usize,
    /// Add the equation residual at each time (JSON only).
    #[arg(long)]
    pub residual: bool,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PairArg {
    /// Grid implicit Euler against grid Lie-Trotter.
    IeLt,
    /// Kernel against grid implicit Euler.
    KernelGridIe,
    /// Kernel against grid Lie-Trotter.
    KernelGridLt,
}

impl From<PairArg> for SchemePair {
    fn from(p: PairArg) -> Self {
        match p {
            PairArg::IeLt => SchemePair::ie_vs_lt(),
            PairArg::KernelGridIe => SchemePair::kernel_vs_grid(Scheme::ImplicitEuler),
            PairArg::KernelGridLt => SchemePair::kernel_vs_grid(Scheme::LieTrotter),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ConvergenceArgs {
    #[command(flatten)]
    pub problem: ScalarProblemArgs,
    #[arg(long, value_enum, default_value = "ie-lt")]
    pub pair: PairArg,
    /// Strictly decreasing step sizes, comma separated.
    #[arg(long, value_delimiter = ',', value_parser = positive, default_value = "0.1,0.05,0.025,0.0125")]
    pub h_list: Vec<f64>,
    #[arg(long = "T", value_parser = positive, default_value = "20")]
    pub horizon: f64,
    /// Add the pointwise error profile at the coarsest step.
    #[arg(long)]
    pub profile: bool,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct GrowthFitArgs {
    #[command(flatten)]
    pub problem: ScalarProblemArgs,
    #[arg(long, value_enum, default_value = "ie")]
    pub scheme: SchemeArg,
    #[arg(long, value_parser = positive, default_value = "0.01")]
    pub h: f64,
    #[arg(long = "T", value_parser = positive, default_value = "200")]
    pub horizon: f64,
    #[arg(long, value_parser = finite, default_value = "50")]
    pub t_start: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TimingTarget {
    PdeAuto,
    PdeNonauto,
    ScalarGrid,
    ScalarKernel,
}

#[derive(Debug, Clone, Args)]
pub struct TimingArgs {
    #[arg(long, value_enum, default_value = "pde-nonauto")]
    pub target: TimingTarget,
    #[arg(long, default_value = "3")]
    pub repetitions: usize,
    /// Step size (default: 0.002 for PDE, 0.001 for scalar targets).
    #[arg(long, value_parser = positive)]
    pub h: Option<f64>,
    /// Horizon (default: 8 for PDE, 40 for scalar targets).
    #[arg(long = "T", value_parser = positive)]
    pub horizon: Option<f64>,
    /// Interior points for PDE targets.
    #[arg(long)]
    pub nx: Option<usize>,
    #[command(flatten)]
    pub out: OutputArgs,
}

/// Failure of a parsed command.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numerical(Error),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical(_) | CliError::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Numerical(e) => write!(f, "{e}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Parameter(m) | Error::Unsupported(m) => CliError::Usage(m),
            Error::Io(m) => CliError::Io(m),
            other => CliError::Numerical(other),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub fn parse<I, T>(args: I) -> Result<Cli, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    Cli::try_parse_from(args)
}

/// Parses and executes, printing diagnostics; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match parse(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("dde-lab: {e}");
            e.exit_code()
        }
    }
}

fn open_output(out: &OutputArgs) -> Result<Box<dyn Write>, CliError> {
    match &out.output {
        Some(path) => {
            let f =
                File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            Ok(Box::new(BufWriter::new(f)))
        }
        None => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
    }
}

fn write_json<T: Serialize>(out: &OutputArgs, value: &T) -> Result<(), CliError> {
    let mut w = open_output(out)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| CliError::Io(e.to_string()))?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

fn finish(mut w: Box<dyn Write>) -> Result<(), CliError> {
    w.flush()?;
    Ok(())
}

fn with_wall_clock(mut v: Value, out: &OutputArgs, seconds: f64) -> Value {
    if out.record_wall_clock {
        v["wall_clock"] = json!(seconds);
    }
    v
}

pub fn execute(cmd: &Command) -> Result<(), CliError> {
    match cmd {
        Command::Scalar(a) => exec_scalar(a),
        Command::Pde(a) => exec_pde(a),
        Command::Stability(a) => exec_stability(a),
        Command::Oracle(a) => exec_oracle(a),
        Command::Convergence(a) => exec_convergence(a),
        Command::GrowthFit(a) => exec_growth(a),
        Command::Timing(a) => exec_timing(a),
    }
}

fn exec_scalar(a: &ScalarArgs) -> Result<(), CliError> {
    let problem = a.problem.problem()?;
    let cfg = a.config();
    let result = run(&problem, &cfg)?;
    match a.format {
        Format::Csv => {
            let mut w = open_output(&a.out)?;
            write_scalar_csv(&result, &mut w)?;
            finish(w)
        }
        Format::Json => {
            let v = json!({
                "scheme": result.scheme,
                "parameters": {
                    "problem": a.problem.to_json(),
                    "h": cfg.h,
                    "T": cfg.horizon,
                },
                "t": result.times,
                "u": result.values,
            });
            write_json(&a.out, &with_wall_clock(v, &a.out, result.wall_clock))
        }
    }
}

fn exec_pde(a: &PdeArgs) -> Result<(), CliError> {
    let problem = a.problem();
    let cfg = a.config();
    let result = run_pde(&problem, &cfg)?;
    match a.format {
        Format::Csv => {
            let mut w = open_output(&a.out)?;
            write_pde_csv(&result, &mut w)?;
            finish(w)
        }
        Format::Json => {
            let v = json!({
                "scheme": result.scheme,
                "parameters": {
                    "kappa": problem.kappa,
                    "lambda0": problem.lambda0,
                    "lambda1": problem.lambda1,
                    "T_lambda": problem.t_lambda,
                    "b": problem.b,
                    "tau": problem.tau,
                    "L": problem.length,
                    "Nx": problem.nx,
                    "history": problem.history.label(),
                    "h": cfg.h,
                    "T": cfg.horizon,
                },
                "t": result.times,
                "center": result.center,
                "l2": result.l2,
                "snapshots": result.snapshots,
            });
            write_json(&a.out, &with_wall_clock(v, &a.out, result.wall_clock))
        }
    }
}

fn stride_sample(v: &[f64], stride: usize) -> (Vec<usize>, Vec<f64>) {
    let stride = stride.max(1);
    let mut ks = Vec::new();
    let mut vals = Vec::new();
    for (i, x) in v.iter().enumerate() {
        let k = i + 1;
        if k % stride == 0 || k == v.len() {
            ks.push(k);
            vals.push(*x);
        }
    }
    (ks, vals)
}

fn exec_stability(a: &StabilityArgs) -> Result<(), CliError> {
    if a.n == 0 {
        return Err(CliError::Usage("--N must be at least 1".into()));
    }
    let problem = ScalarDelayProblem::new(
        Coefficient::Constant(a.a),
        a.b,
        a.tau,
        ScalarHistory::constant(0.0),
    )?;
    let op = CompanionOperator::from_problem(a.a, a.b, a.tau, a.h)?;
    let rho = spectral_radius(&op, a.tol)?;
    let os = estimate_os_norm(&problem, a.h)?;
    // The dense propagators are O(m^2); the defect has the closed form 2|beta|.
    let defect = if op.m <= 2000 {
        defect_norm(&build_discrete_propagators(&problem, a.h)?)
    } else {
        2.0 * op.beta.abs()
    };
    let profiles = op.profiles(a.n)?;
    let (ks, summability) = stride_sample(&profiles.summability, a.profile_stride);
    let (_, ritt) = stride_sample(&profiles.ritt, a.profile_stride);
    let mut ladder = Vec::new();
    for &h in &a.h_ladder {
        let op = CompanionOperator::from_problem(a.a, a.b, a.tau, h)?;
        let rho = spectral_radius(&op, a.tol)?;
        let s = op.profiles(a.n)?;
        ladder.push(json!({
            "h": h,
            "m": op.m,
            "spectral_radius": rho,
            "inverse_gap": 1.0 / (1.0 - rho),
            "summability_last": s.last_summability(),
        }));
    }
    let v = json!({
        "parameters": { "a": a.a, "b": a.b, "tau": a.tau, "h": a.h, "m": op.m, "N": a.n },
        "alpha": op.alpha,
        "beta": op.beta,
        "spectral_radius": rho,
        "inverse_gap": 1.0 / (1.0 - rho),
        "os_norm": os.value,
        "os_satisfied": os.satisfied,
        "defect_norm": defect,
        "summability_last": profiles.last_summability(),
        "ritt_sup": profiles.ritt_sup(),
        "power_sup": profiles.power_sup(),
        "profile_k": ks,
        "summability": summability,
        "ritt": ritt,
        "ladder": ladder,
    });
    write_json(&a.out, &v)
}

fn exec_oracle(a: &OracleArgs) -> Result<(), CliError> {
    if !(a.t_end >= a.t_start) {
        return Err(CliError::Usage("--t-end must not precede --t-start".into()));
    }
    let p = OhiraParams::new(a.a, a.b, a.tau).with_quadrature(a.omega_max, a.nodes);
    p.validate()?;
    let count = ((a.t_end - a.t_start) / a.dt * (1.0 + 1e-12)).floor() as usize + 1;
    let times: Vec<f64> = (0..count).map(|k| a.t_start + k as f64 * a.dt).collect();
    let values = times
        .iter()
        .map(|&t| oo_solution(t, &p))
        .collect::<Result<Vec<_>, _>>()?;
    match a.format {
        Format::Csv => {
            let mut w = open_output(&a.out)?;
            write_pairs(&mut w, ["t", "u"], &times, &values)?;
            finish(w)
        }
        Format::Json => {
            let mut v = json!({ "parameters": p, "t": times, "u": values });
            if a.residual {
                let r = times
                    .iter()
                    .map(|&t| oo_residual(t, &p, 1e-3))
                    .collect::<Result<Vec<_>, _>>()?;
                v["residual"] = json!(r);
            }
            write_json(&a.out, &v)
        }
    }
}

fn exec_convergence(a: &ConvergenceArgs) -> Result<(), CliError> {
    let problem = a.problem.problem()?;
    let pair: SchemePair = a.pair.into();
    let report = convergence_study(&problem, pair, &a.h_list, a.horizon)?;
    let mut v = json!({
        "parameters": { "problem": a.problem.to_json(), "T": a.horizon },
        "h": report.h,
        "error": report.error,
        "slope": report.slope,
        "intercept": report.intercept,
        "ratios": report.ratios(),
    });
    if a.profile {
        let h = a.h_list[0];
        let s1 = run(
            &problem,
            &SchemeConfig::new(pair.first.0, pair.first.1, h, a.horizon),
        )?;
        let s2 = run(
            &problem,
            &SchemeConfig::new(pair.second.0, pair.second.1, h, a.horizon),
        )?;
        let prof = error_profile(&s1, &s2)?;
        v["profile"] = json!({ "h": h, "t": s1.times, "error": prof });
    }
    write_json(&a.out, &v)
}

fn exec_growth(a: &GrowthFitArgs) -> Result<(), CliError> {
    let problem = a.problem.problem()?;
    let cfg = SchemeConfig::new(a.scheme.into(), DelayMode::Grid, a.h, a.horizon);
    let result = run(&problem, &cfg)?;
    let fit = exp_growth_fit(&result, a.t_start)?;
    let mut v = json!({
        "parameters": { "problem": a.problem.to_json(), "scheme": result.scheme, "h": a.h, "T": a.horizon },
        "logM": fit.log_m,
        "omega": fit.omega,
        "window": [fit.window.0, fit.window.1],
        "samples": fit.samples,
    });
    if a.problem.a_mode == CoefficientMode::Constant {
        let root = rightmost_characteristic_root(a.problem.a, a.problem.b, a.problem.tau)?;
        v["root"] = json!({ "re": root.re, "im": root.im });
    }
    write_json(&a.out, &v)
}

fn exec_timing(a: &TimingArgs) -> Result<(), CliError> {
    let report = match a.target {
        TimingTarget::PdeAuto | TimingTarget::PdeNonauto => {
            let mut p = if a.target == TimingTarget::PdeAuto {
                PdeProblem::paper_autonomous()
            } else {
                PdeProblem::paper_nonautonomous()
            };
            if let Some(nx) = a.nx {
                p.nx = nx;
            }
            compare_pde_runtime(
                &p,
                a.h.unwrap_or(0.002),
                a.horizon.unwrap_or(8.0),
                a.repetitions,
            )?
        }
        TimingTarget::ScalarGrid | TimingTarget::ScalarKernel => {
            let p = ScalarDelayProblem::new(
                Coefficient::Constant(-0.15),
                -6.0,
                -0.257,
                ScalarHistory::poly10(),
            )?;
            let mode = if a.target == TimingTarget::ScalarGrid {
                DelayMode::Grid
            } else {
                DelayMode::Kernel
            };
            compare_scalar_runtime(
                &p,
                mode,
                a.h.unwrap_or(0.001),
                a.horizon.unwrap_or(40.0),
                a.repetitions,
            )?
        }
    };
    write_json(&a.out, &report)
}
