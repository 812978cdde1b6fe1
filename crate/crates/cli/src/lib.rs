//! Command-line front door for the weighted sample covariance solver.
//!
//! Parses law specs and flat key=value config files, runs the
//! density/support/simulate/validate/mp-check workflows, and writes CSV/JSON
//! artifacts. The exit-code contract is meant for scripting:
//!
//! * `0` — success (for `validate`: fit within threshold)
//! * `1` — validation failure (fit above threshold, or mp-check mismatch)
//! * `2` — parse/config/IO error
//! * `3` — solver failure
//! * `4` — eigensolver failure

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::Parser;
use num_complex::Complex64;
use serde_json::json;
use thiserror::Error;
use wscov::density::{
    cdf_curve, default_grid, density_curve, support_report, uniform_grid,
    DensityCurve, DensityError, SupportReport,
};
use wscov::laws::{SpectralLaw, WeightLaw};
use wscov::oracle;
use wscov::sim::{
    ks_statistic, sample_spectrum, trace_mean, wasserstein1, EmpiricalSpectrum, NoiseModel,
    SimConfig, SimError,
};
use wscov::solver::{solve, EvalPoint, SolverConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;
pub const EXIT_EIGEN: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("solver failed: {0}")]
    Solver(String),
    #[error("eigensolver failed: {0}")]
    Eigen(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => EXIT_PARSE,
            CliError::Solver(_) => EXIT_SOLVER,
            CliError::Eigen(_) => EXIT_EIGEN,
        }
    }
}

impl From<DensityError> for CliError {
    fn from(e: DensityError) -> Self {
        match e {
            DensityError::SolverAt { .. } | DensityError::Solve(_) => {
                CliError::Solver(e.to_string())
            }
            other => CliError::Parse(other.to_string()),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Eigen { .. } => CliError::Eigen(e.to_string()),
            other => CliError::Parse(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Parse(format!("io error: {e}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Density,
    Support,
    Simulate,
    Validate,
    MpCheck,
}

impl FromStr for Command {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "density" => Ok(Command::Density),
            "support" => Ok(Command::Support),
            "simulate" => Ok(Command::Simulate),
            "validate" => Ok(Command::Validate),
            "mp-check" => Ok(Command::MpCheck),
            other => Err(CliError::Parse(format!(
                "unknown command `{other}` (expected density, support, simulate, validate, or mp-check)"
            ))),
        }
    }
}

impl Command {
    #[cfg(test)]
    fn as_str(self) -> &'static str {
        match self {
            Command::Density => "density",
            Command::Support => "support",
            Command::Simulate => "simulate",
            Command::Validate => "validate",
            Command::MpCheck => "mp-check",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(CliError::Parse(format!(
                "unknown format `{other}` (expected csv or json)"
            ))),
        }
    }
}

/// Raw command-line surface; every value is optional so that config-file
/// values can be overridden per flag.
#[derive(Debug, Parser)]
#[command(
    name = "wscov",
    about = "Asymptotic spectra of weighted sample covariance matrices",
    disable_help_subcommand = true
)]
pub struct Cli {
    /// density | support | simulate | validate | mp-check
    pub command: Option<String>,
    /// Flat key=value config file; flags override file values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Population spectrum law, e.g. `dirac:1` or `mix:0.2@1,0.4@3,0.4@10`.
    #[arg(long = "h")]
    pub h_spec: Option<String>,
    /// Weight law, e.g. `dirac:1`, `mix:...`, `unif:lo,hi`, `ewma:alpha`.
    #[arg(long = "d")]
    pub d_spec: Option<String>,
    /// Concentration ratio c > 0.
    #[arg(long)]
    pub c: Option<f64>,
    /// Evaluation grid as `min,max,count`.
    #[arg(long)]
    pub grid: Option<String>,
    /// Imaginary offset for the Stieltjes inversion.
    #[arg(long)]
    pub eps: Option<f64>,
    /// Density threshold (support) or KS threshold (validate).
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Matrix dimension for simulate/validate.
    #[arg(long)]
    pub n: Option<usize>,
    /// Noise model: gauss-r | gauss-c | student:NU.
    #[arg(long)]
    pub noise: Option<String>,
    /// RNG seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Conjugate the weight diagonal by a Haar unitary.
    #[arg(long)]
    pub rotate_weights: bool,
    /// Conjugate the population diagonal by an independent Haar unitary.
    #[arg(long)]
    pub rotate_population: bool,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// csv | json.
    #[arg(long)]
    pub format: Option<String>,
    /// Rayon thread-pool size.
    #[arg(long)]
    pub threads: Option<usize>,
}

/// Fully resolved run description: config-file values merged under flags.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub h_spec: String,
    pub d_spec: String,
    pub c: f64,
    pub grid: Option<(f64, f64, usize)>,
    pub epsilon: f64,
    pub threshold: Option<f64>,
    pub n: Option<usize>,
    pub noise: NoiseModel,
    pub seed: u64,
    pub rotate_weights: bool,
    pub rotate_population: bool,
    pub out: Option<PathBuf>,
    pub format: Option<OutputFormat>,
    pub threads: Option<usize>,
}

fn parse_grid(s: &str) -> Result<(f64, f64, usize), CliError> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(CliError::Parse(format!(
            "grid must be `min,max,count`, got `{s}`"
        )));
    }
    let lo: f64 = parts[0]
        .trim()
        .parse()
        .map_err(|_| CliError::Parse(format!("bad grid min `{}`", parts[0])))?;
    let hi: f64 = parts[1]
        .trim()
        .parse()
        .map_err(|_| CliError::Parse(format!("bad grid max `{}`", parts[1])))?;
    let count: usize = parts[2]
        .trim()
        .parse()
        .map_err(|_| CliError::Parse(format!("bad grid count `{}`", parts[2])))?;
    if count < 2 || !(lo < hi) {
        return Err(CliError::Parse(format!(
            "grid needs min < max and count >= 2, got `{s}`"
        )));
    }
    Ok((lo, hi, count))
}

fn parse_noise(s: &str) -> Result<NoiseModel, CliError> {
    match s {
        "gauss-r" => Ok(NoiseModel::GaussianReal),
        "gauss-c" => Ok(NoiseModel::GaussianComplex),
        other => {
            if let Some(nu) = other.strip_prefix("student:") {
                let nu: f64 = nu
                    .parse()
                    .map_err(|_| CliError::Parse(format!("bad degrees of freedom `{nu}`")))?;
                Ok(NoiseModel::StudentT { nu })
            } else {
                Err(CliError::Parse(format!(
                    "unknown noise `{other}` (expected gauss-r, gauss-c, or student:NU)"
                )))
            }
        }
    }
}

fn noise_to_string(noise: NoiseModel) -> String {
    match noise {
        NoiseModel::GaussianReal => "gauss-r".to_owned(),
        NoiseModel::GaussianComplex => "gauss-c".to_owned(),
        NoiseModel::StudentT { nu } => format!("student:{nu}"),
    }
}

fn parse_bool(key: &str, value: &str) -> Result<bool, CliError> {
    match value {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        other => Err(CliError::Parse(format!("bad boolean for `{key}`: `{other}`"))),
    }
}

/// Parse a flat `key = value` config file. `#` starts a comment; blank lines
/// are skipped.
pub fn parse_config_file(path: &Path) -> Result<Vec<(String, String)>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("cannot read config {}: {e}", path.display())))?;
    let mut pairs = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Parse(format!(
                "{}:{}: expected `key = value`, got `{line}`",
                path.display(),
                lineno + 1
            ))
        })?;
        pairs.push((key.trim().to_owned(), value.trim().to_owned()));
    }
    Ok(pairs)
}

pub fn resolve(cli: &Cli) -> Result<RunConfig, CliError> {
    // Start from config-file values, then let flags override.
    let mut command: Option<String> = None;
    let mut h_spec: Option<String> = None;
    let mut d_spec: Option<String> = None;
    let mut c: Option<f64> = None;
    let mut grid: Option<(f64, f64, usize)> = None;
    let mut epsilon: Option<f64> = None;
    let mut threshold: Option<f64> = None;
    let mut n: Option<usize> = None;
    let mut noise: Option<NoiseModel> = None;
    let mut seed: Option<u64> = None;
    let mut rotate_weights = false;
    let mut rotate_population = false;
    let mut out: Option<PathBuf> = None;
    let mut format: Option<OutputFormat> = None;
    let mut threads: Option<usize> = None;

    if let Some(path) = &cli.config {
        for (key, value) in parse_config_file(path)? {
            match key.as_str() {
                "command" => command = Some(value),
                "h" => h_spec = Some(value),
                "d" => d_spec = Some(value),
                "c" => {
                    c = Some(value.parse().map_err(|_| {
                        CliError::Parse(format!("bad value for `c`: `{value}`"))
                    })?)
                }
                "grid" => grid = Some(parse_grid(&value)?),
                "eps" => {
                    epsilon = Some(value.parse().map_err(|_| {
                        CliError::Parse(format!("bad value for `eps`: `{value}`"))
                    })?)
                }
                "threshold" => {
                    threshold = Some(value.parse().map_err(|_| {
                        CliError::Parse(format!("bad value for `threshold`: `{value}`"))
                    })?)
                }
                "n" => {
                    n = Some(value.parse().map_err(|_| {
                        CliError::Parse(format!("bad value for `n`: `{value}`"))
                    })?)
                }
                "noise" => noise = Some(parse_noise(&value)?),
                "seed" => {
                    seed = Some(value.parse().map_err(|_| {
                        CliError::Parse(format!("bad value for `seed`: `{value}`"))
                    })?)
                }
                "rotate_weights" => rotate_weights = parse_bool(&key, &value)?,
                "rotate_population" => rotate_population = parse_bool(&key, &value)?,
                "out" => out = Some(PathBuf::from(value)),
                "format" => format = Some(value.parse()?),
                "threads" => {
                    threads = Some(value.parse().map_err(|_| {
                        CliError::Parse(format!("bad value for `threads`: `{value}`"))
                    })?)
                }
                other => {
                    return Err(CliError::Parse(format!(
                        "unknown config key `{other}` in {}",
                        path.display()
                    )))
                }
            }
        }
    }

    if let Some(v) = &cli.command {
        command = Some(v.clone());
    }
    if let Some(v) = &cli.h_spec {
        h_spec = Some(v.clone());
    }
    if let Some(v) = &cli.d_spec {
        d_spec = Some(v.clone());
    }
    if let Some(v) = cli.c {
        c = Some(v);
    }
    if let Some(v) = &cli.grid {
        grid = Some(parse_grid(v)?);
    }
    if let Some(v) = cli.eps {
        epsilon = Some(v);
    }
    if let Some(v) = cli.threshold {
        threshold = Some(v);
    }
    if let Some(v) = cli.n {
        n = Some(v);
    }
    if let Some(v) = &cli.noise {
        noise = Some(parse_noise(v)?);
    }
    if let Some(v) = cli.seed {
        seed = Some(v);
    }
    if cli.rotate_weights {
        rotate_weights = true;
    }
    if cli.rotate_population {
        rotate_population = true;
    }
    if let Some(v) = &cli.out {
        out = Some(v.clone());
    }
    if let Some(v) = &cli.format {
        format = Some(v.parse()?);
    }
    if let Some(v) = cli.threads {
        threads = Some(v);
    }

    let command: Command = command
        .ok_or_else(|| CliError::Parse("no command given".into()))?
        .parse()?;
    let c = c.ok_or_else(|| CliError::Parse("missing required value `c`".into()))?;
    if !(c > 0.0) || !c.is_finite() {
        return Err(CliError::Parse(format!("c must be positive, got {c}")));
    }
    let epsilon = epsilon.unwrap_or(1e-6);
    if !(epsilon > 0.0) {
        return Err(CliError::Parse(format!("eps must be positive, got {epsilon}")));
    }

    Ok(RunConfig {
        command,
        h_spec: h_spec.unwrap_or_else(|| "dirac:1".to_owned()),
        d_spec: d_spec.unwrap_or_else(|| "dirac:1".to_owned()),
        c,
        grid,
        epsilon,
        threshold,
        n,
        noise: noise.unwrap_or(NoiseModel::GaussianReal),
        seed: seed.unwrap_or(0),
        rotate_weights,
        rotate_population,
        out,
        format,
        threads,
    })
}

fn parse_laws(cfg: &RunConfig) -> Result<(SpectralLaw, WeightLaw), CliError> {
    let h: SpectralLaw = cfg
        .h_spec
        .parse()
        .map_err(|e| CliError::Parse(format!("bad population law `{}`: {e}", cfg.h_spec)))?;
    let d: WeightLaw = cfg
        .d_spec
        .parse()
        .map_err(|e| CliError::Parse(format!("bad weight law `{}`: {e}", cfg.d_spec)))?;
    Ok((h, d))
}

fn build_grid(cfg: &RunConfig, h: &SpectralLaw, d: &WeightLaw) -> Vec<f64> {
    match cfg.grid {
        Some((lo, hi, count)) => uniform_grid(lo, hi, count),
        None => default_grid(h, d, cfg.c, 1000),
    }
}

fn write_output(cfg: &RunConfig, content: &str) -> Result<(), CliError> {
    match &cfg.out {
        Some(path) => {
            std::fs::write(path, content)
                .map_err(|e| CliError::Parse(format!("cannot write {}: {e}", path.display())))?;
        }
        None => print!("{content}"),
    }
    Ok(())
}

fn density_csv(curve: &DensityCurve) -> String {
    let mut s = String::with_capacity(32 * curve.xs.len());
    s.push_str("x,density\n");
    for (&x, &f) in curve.xs.iter().zip(&curve.fs) {
        let _ = writeln!(s, "{x:.12e},{f:.12e}");
    }
    s
}

fn density_json(curve: &DensityCurve) -> String {
    let value = json!({
        "xs": curve.xs,
        "fs": curve.fs,
        "epsilon": curve.epsilon,
        "zero_atom": curve.zero_atom,
    });
    format!("{value:#}\n")
}

fn support_json(report: &SupportReport) -> String {
    let value = json!({
        "support_intervals": report.support_intervals.iter().map(|&(a, b)| vec![a, b]).collect::<Vec<_>>(),
        "gaps": report.gaps.iter().map(|&(a, b)| vec![a, b]).collect::<Vec<_>>(),
        "threshold": report.threshold,
    });
    format!("{value:#}\n")
}

fn spectrum_csv(spec: &EmpiricalSpectrum) -> String {
    let mut s = String::with_capacity(24 * spec.eigenvalues.len());
    s.push_str("index,eigenvalue\n");
    for (i, &ev) in spec.eigenvalues.iter().enumerate() {
        let _ = writeln!(s, "{i},{ev:.12e}");
    }
    s
}

fn spectrum_json(spec: &EmpiricalSpectrum) -> String {
    let value = json!({
        "eigenvalues": spec.eigenvalues,
        "n": spec.n,
        "samples": spec.samples,
    });
    format!("{value:#}\n")
}

fn compute_curve(cfg: &RunConfig) -> Result<(SpectralLaw, WeightLaw, DensityCurve), CliError> {
    let (h, d) = parse_laws(cfg)?;
    let grid = build_grid(cfg, &h, &d);
    let curve = density_curve(&h, &d, cfg.c, &grid, cfg.epsilon, &SolverConfig::default())?;
    Ok((h, d, curve))
}

pub fn run_density(cfg: &RunConfig) -> Result<i32, CliError> {
    let (_, _, curve) = compute_curve(cfg)?;
    let content = match cfg.format.unwrap_or(OutputFormat::Csv) {
        OutputFormat::Csv => density_csv(&curve),
        OutputFormat::Json => density_json(&curve),
    };
    write_output(cfg, &content)?;
    Ok(EXIT_OK)
}

pub fn run_support(cfg: &RunConfig) -> Result<i32, CliError> {
    let (h, d, curve) = compute_curve(cfg)?;
    let threshold = cfg.threshold.unwrap_or(1e-4);
    let report = support_report(&h, &d, cfg.c, &curve, threshold, &SolverConfig::default())?;
    write_output(cfg, &support_json(&report))?;
    Ok(EXIT_OK)
}

fn sim_config(cfg: &RunConfig) -> Result<SimConfig, CliError> {
    let n = cfg
        .n
        .ok_or_else(|| CliError::Parse("missing required value `n`".into()))?;
    let mut sim = SimConfig::new(n, cfg.c, cfg.noise, cfg.seed);
    sim.rotate_weights = cfg.rotate_weights;
    sim.rotate_population = cfg.rotate_population;
    Ok(sim)
}

pub fn run_simulate(cfg: &RunConfig) -> Result<i32, CliError> {
    let (h, d) = parse_laws(cfg)?;
    let sim = sim_config(cfg)?;
    let spec = sample_spectrum(&h, &d, &sim)?;
    let content = match cfg.format.unwrap_or(OutputFormat::Csv) {
        OutputFormat::Csv => spectrum_csv(&spec),
        OutputFormat::Json => spectrum_json(&spec),
    };
    write_output(cfg, &content)?;
    Ok(EXIT_OK)
}

pub fn run_validate(cfg: &RunConfig) -> Result<i32, CliError> {
    let start = Instant::now();
    let (h, d) = parse_laws(cfg)?;
    let sim = sim_config(cfg)?;
    let spec = sample_spectrum(&h, &d, &sim)?;
    let grid = build_grid(cfg, &h, &d);
    let curve = density_curve(&h, &d, cfg.c, &grid, cfg.epsilon, &SolverConfig::default())?;
    let cdf = cdf_curve(&curve);
    let ks = ks_statistic(&spec, &cdf)?;
    let w1 = wasserstein1(&spec, &curve);
    let tm = trace_mean(&spec);
    let threshold = cfg.threshold.unwrap_or(0.05);
    let runtime_ms = start.elapsed().as_millis() as u64;
    let summary = json!({
        "config": {
            "h": cfg.h_spec,
            "d": cfg.d_spec,
            "c": cfg.c,
            "n": sim.n,
            "samples": sim.samples(),
            "noise": noise_to_string(cfg.noise),
            "seed": cfg.seed,
            "rotate_weights": cfg.rotate_weights,
            "rotate_population": cfg.rotate_population,
            "eps": cfg.epsilon,
            "threshold": threshold,
        },
        "ks": ks,
        "w1": w1,
        "trace_mean": tm,
        "runtime_ms": runtime_ms,
    });
    write_output(cfg, &format!("{summary:#}\n"))?;
    if ks <= threshold {
        Ok(EXIT_OK)
    } else {
        Ok(EXIT_VALIDATION)
    }
}

/// Cross-check the fixed-point solver against the closed-form oracle on a
/// deterministic set of evaluation points.
pub fn run_mp_check(cfg: &RunConfig) -> Result<i32, CliError> {
    let c = cfg.c;
    let h = SpectralLaw::point_mass(1.0).expect("unit point mass");
    let d = WeightLaw::point_mass(1.0).expect("unit point mass");
    let (a, b) = oracle::mp_support(c);
    let tolerance = cfg.threshold.unwrap_or(1e-10);
    let mut worst = 0.0f64;
    let mut points = 0usize;
    for i in 0..25 {
        let x = (a - 1.0) + (b + 1.0 - (a - 1.0)) * i as f64 / 24.0;
        for im in [1e-3, 1e-2, 0.1, 1.0] {
            let z = EvalPoint::from_parts(x, im)
                .map_err(|e| CliError::Solver(e.to_string()))?;
            let sol = solve(&h, &d, c, z, &SolverConfig::default())
                .map_err(|e| CliError::Solver(e.to_string()))?;
            let reference = oracle::mp_stieltjes(c, Complex64::new(x, im));
            worst = worst.max((sol.m - reference).norm());
            points += 1;
        }
    }
    let pass = worst <= tolerance;
    let report = json!({
        "c": c,
        "points": points,
        "max_abs_error": worst,
        "tolerance": tolerance,
        "pass": pass,
    });
    write_output(cfg, &format!("{report:#}\n"))?;
    Ok(if pass { EXIT_OK } else { EXIT_VALIDATION })
}

/// Run a resolved config; returns the process exit code.
pub fn run(cfg: &RunConfig) -> Result<i32, CliError> {
    if let Some(threads) = cfg.threads {
        // Ignore failure: the global pool can only be sized once per process.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    match cfg.command {
        Command::Density => run_density(cfg),
        Command::Support => run_support(cfg),
        Command::Simulate => run_simulate(cfg),
        Command::Validate => run_validate(cfg),
        Command::MpCheck => run_mp_check(cfg),
    }
}

/// Parse argv, resolve the config, and run; maps errors to exit codes and
/// prints them on stderr.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap handles --help/--version as "errors" with exit code 0.
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let cfg = match resolve(&cli) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    match run(&cfg) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cli_from(args: &[&str]) -> Cli {
        Cli::try_parse_from(args).unwrap()
    }

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("0,3,100").unwrap(), (0.0, 3.0, 100));
        assert!(parse_grid("3,0,100").is_err());
        assert!(parse_grid("0,3").is_err());
        assert!(parse_grid("0,3,1").is_err());
    }

    #[test]
    fn noise_parsing() {
        assert_eq!(parse_noise("gauss-r").unwrap(), NoiseModel::GaussianReal);
        assert_eq!(parse_noise("gauss-c").unwrap(), NoiseModel::GaussianComplex);
        match parse_noise("student:4").unwrap() {
            NoiseModel::StudentT { nu } => assert_eq!(nu, 4.0),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_noise("poisson").is_err());
    }

    #[test]
    fn flags_override_defaults() {
        let cli = cli_from(&["wscov", "density", "--c", "0.25", "--eps", "1e-5"]);
        let cfg = resolve(&cli).unwrap();
        assert_eq!(cfg.command, Command::Density);
        assert_eq!(cfg.c, 0.25);
        assert_eq!(cfg.epsilon, 1e-5);
        assert_eq!(cfg.h_spec, "dirac:1");
        assert_eq!(cfg.seed, 0);
    }

    #[test]
    fn missing_c_is_parse_error() {
        let cli = cli_from(&["wscov", "density"]);
        let err = resolve(&cli).unwrap_err();
        assert_eq!(err.exit_code(), EXIT_PARSE);
    }

    #[test]
    fn command_name_round_trip() {
        for cmd in [
            Command::Density,
            Command::Support,
            Command::Simulate,
            Command::Validate,
            Command::MpCheck,
        ] {
            assert_eq!(cmd.as_str().parse::<Command>().unwrap(), cmd);
        }
    }
}
