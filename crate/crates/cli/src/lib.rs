//! Command-line front end for the `omega-bergman` library.
//!
//! Exit codes: 0 on success, 1 when a checked property fails (or a
//! computation fails to converge), 2 on usage errors.

pub mod commands;
pub mod config;

use clap::{Args, Parser, Subcommand};
use omega_bergman::regularity::Lattice;
use omega_bergman::verify::{Mutation, RuleChoice, SuiteName, Tolerances, VerifyConfig};
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use commands::Rendered;
use config::{apply_tolerances, parse_tolerance_flag, Decimal, FileConfig, Format};

/// Environment variable naming the default configuration file.
pub const CONFIG_ENV: &str = "OMEGA_BERGMAN_CONFIG";

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Runtime(String),
}

#[derive(Parser, Debug)]
#[command(
    name = "omega-bergman",
    version,
    about = "Sobolev thresholds, weighted moments and Bergman projection certificates",
    after_help = "Configuration: flags override the TOML file given by --config (or $OMEGA_BERGMAN_CONFIG), which overrides built-in defaults."
)]
pub struct Cli {
    /// TOML configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output format.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the report to this file instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Tolerance override NAME=VALUE (repeatable), e.g. quadrature=1e-12.
    #[arg(long = "tol", global = true, value_parser = parse_tolerance_flag)]
    pub tolerances: Vec<(String, f64)>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Threshold r(mu, p), or with --invert a mu whose threshold is r.
    Threshold(ThresholdArgs),
    /// Closed form and quadrature of a weighted moment.
    Lambda(LambdaArgs),
    /// Continuity certificates over a grid of weights.
    ///
    /// CSV columns: s, status (FINITE or DIVERGENT), sup_ratio, bound,
    /// argmax_j, argmax_k, note.
    Scan(ScanArgs),
    /// Run the invariant suites.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
pub struct ThresholdArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub mu: Option<Decimal>,
    /// Target threshold r in (0, 1/2).
    #[arg(long, conflicts_with = "mu", allow_hyphen_values = true)]
    pub invert: Option<Decimal>,
    /// Form degree 0, 1 or 2.
    #[arg(long)]
    pub p: Option<u8>,
    /// Threshold formula.
    #[arg(long, value_parser = parse_rule)]
    pub rule: Option<RuleChoice>,
}

#[derive(Args, Debug)]
pub struct LambdaArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub mu: Option<Decimal>,
    #[arg(long, allow_hyphen_values = true)]
    pub x: Decimal,
    #[arg(long, allow_hyphen_values = true, default_value = "0")]
    pub y: Decimal,
    #[arg(long, allow_hyphen_values = true)]
    pub s: Option<Decimal>,
    /// Fit the growth of truncated moments on eps = 2^-m.
    #[arg(long)]
    pub truncate_fit: bool,
    #[arg(long, default_value_t = 4)]
    pub fit_from: u32,
    #[arg(long, default_value_t = 16)]
    pub fit_to: u32,
}

#[derive(Args, Debug)]
pub struct ScanArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub mu: Option<Decimal>,
    #[arg(long)]
    pub p: Option<u8>,
    /// Explicit weights, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub s_grid: Option<Vec<Decimal>>,
    /// Uniform grid start (with --s-to and --steps).
    #[arg(long)]
    pub s_from: Option<Decimal>,
    #[arg(long)]
    pub s_to: Option<Decimal>,
    #[arg(long)]
    pub steps: Option<u32>,
    #[arg(long)]
    pub j_max: Option<i64>,
    #[arg(long)]
    pub k_max: Option<i64>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Restrict to these suites (repeatable).
    #[arg(long = "suite")]
    pub suites: Vec<SuiteName>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Inject a wrong recursion constant; the run must then fail.
    #[arg(long)]
    pub self_test: bool,
    /// Threshold formula used by the sharpness sandwich.
    #[arg(long, value_parser = parse_rule)]
    pub rule: Option<RuleChoice>,
    /// Geometry samples per mu.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Include per-suite wall-clock times (breaks byte-identical output).
    #[arg(long)]
    pub timings: bool,
}

fn parse_rule(s: &str) -> Result<RuleChoice, String> {
    match s {
        "stated" => Ok(RuleChoice::Stated),
        "sharp" => Ok(RuleChoice::Sharp),
        _ => Err(format!("rule must be `stated` or `sharp`, got `{s}`")),
    }
}

fn need<T>(v: Option<T>, name: &str) -> Result<T, Failure> {
    v.ok_or_else(|| Failure::Usage(format!("missing --{name} (flag or config file)")))
}

fn degree(p: Option<u8>, file: &FileConfig) -> Result<u8, Failure> {
    let p = p.or(file.p).unwrap_or(0);
    if p > 2 {
        return Err(Failure::Usage(format!("form degree must be 0, 1 or 2, got {p}")));
    }
    Ok(p)
}

fn uniform_grid(from: Decimal, to: Decimal, steps: u32) -> Result<Vec<Decimal>, Failure> {
    if steps == 0 {
        return Ok(Vec::new());
    }
    if steps == 1 {
        return Ok(vec![from]);
    }
    let span = to.exact - from.exact;
    let n = num_rational::Rational64::from_integer(steps as i64 - 1);
    Ok((0..steps as i64)
        .map(|i| Decimal::from_exact(from.exact + span * num_rational::Rational64::from_integer(i) / n))
        .collect())
}

fn execute(cli: &Cli, file: &FileConfig) -> Result<Rendered, Failure> {
    let mut tolerances = file.verify.as_ref().map(|v| v.tolerances.clone()).unwrap_or_default();
    apply_tolerances(&mut tolerances, &file.tolerances).map_err(Failure::Usage)?;
    apply_tolerances(&mut tolerances, cli.tolerances.iter().map(|(k, v)| (k, v))).map_err(Failure::Usage)?;
    let lattice_of = |j: Option<i64>, k: Option<i64>| {
        let base = file.lattice.unwrap_or_default();
        let l = Lattice { j_max: j.unwrap_or(base.j_max), k_max: k.unwrap_or(base.k_max) };
        if l.k_max < 0 {
            return Err(Failure::Usage("k_max must be non-negative".into()));
        }
        Ok(l)
    };
    match &cli.command {
        Command::Threshold(a) => {
            let p = degree(a.p, file)?;
            let mu = a.mu.or(if a.invert.is_none() { file.mu } else { None });
            commands::cmd_threshold(mu, a.invert, p, a.rule.unwrap_or(RuleChoice::Stated))
        }
        Command::Lambda(a) => {
            let req = commands::LambdaRequest {
                mu: need(a.mu.or(file.mu), "mu")?,
                x: a.x,
                y: a.y,
                s: a.s.or(file.s).unwrap_or(Decimal::from_exact(0.into())),
                tol: tolerances.quadrature,
                fit: a.truncate_fit.then_some((a.fit_from, a.fit_to)),
            };
            commands::cmd_lambda(&req)
        }
        Command::Scan(a) => {
            let mu = need(a.mu.or(file.mu), "mu")?;
            let p = degree(a.p, file)?;
            let grid = match (&a.s_grid, a.s_from, a.s_to, a.steps) {
                (Some(g), None, None, None) => g.clone(),
                (None, Some(f), Some(t), Some(n)) => uniform_grid(f, t, n)?,
                (None, None, None, None) => return Err(Failure::Usage("scan needs --s-grid or --s-from/--s-to/--steps".into())),
                _ => return Err(Failure::Usage("use either --s-grid or all of --s-from, --s-to, --steps".into())),
            };
            commands::cmd_scan(mu, p, &grid, lattice_of(a.j_max, a.k_max)?)
        }
        Command::Verify(a) => {
            let mut cfg: VerifyConfig = file.verify.clone().unwrap_or_default();
            cfg.tolerances = tolerances;
            if let Some(seed) = a.seed.or(file.seed) {
                cfg.seed = seed;
            }
            if let Some(l) = file.lattice {
                cfg.lattice = l;
            }
            if let Some(rule) = a.rule {
                cfg.rule = rule;
            }
            if let Some(n) = a.samples {
                cfg.geometry_samples = n;
            }
            if a.self_test {
                cfg.mutation = Some(Mutation::RecursionConstant);
            }
            check_verify_config(&cfg)?;
            commands::cmd_verify(&cfg, &a.suites, a.timings)
        }
    }
}

fn check_verify_config(cfg: &VerifyConfig) -> Result<(), Failure> {
    let bad = |m: &str| Err(Failure::Usage(m.to_string()));
    if cfg.geometry_mus.iter().chain(&cfg.lambda_mus).chain([&cfg.gram_mu]).any(|&m| !(m > 1.0)) {
        return bad("every mu in the verify config must exceed 1");
    }
    if cfg.lambda_mus.is_empty() {
        return bad("lambda_mus must not be empty");
    }
    if cfg.targets.iter().any(|&r| !(r > 0.0 && r < 0.5)) {
        return bad("verify targets must lie in (0, 1/2)");
    }
    if cfg.gram_weights.iter().any(|&s| !(0.0..0.5).contains(&s)) {
        return bad("gram weights must lie in [0, 1/2)");
    }
    Ok(())
}

fn render(r: &Rendered, format: Format) -> Result<Vec<u8>, Failure> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&r.json).map_err(|e| Failure::Runtime(e.to_string()))?;
            s.push('\n');
            Ok(s.into_bytes())
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&r.csv_header).map_err(|e| Failure::Runtime(e.to_string()))?;
            for row in &r.csv_rows {
                w.write_record(row).map_err(|e| Failure::Runtime(e.to_string()))?;
            }
            w.into_inner().map_err(|e| Failure::Runtime(e.to_string()))
        }
        Format::Text => Ok(r.text.clone().into_bytes()),
    }
}

/// Parses `args`, runs the command and writes the report. Returns the exit code.
pub fn run<I, T>(args: I, env_config: Option<PathBuf>, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let result = (|| {
        let file = match cli.config.clone().or(env_config) {
            Some(path) => FileConfig::load(&path).map_err(Failure::Usage)?,
            None => FileConfig::default(),
        };
        let format = cli.format.or(file.output.format).unwrap_or_default();
        let rendered = execute(&cli, &file)?;
        let bytes = render(&rendered, format)?;
        match cli.output.clone().or(file.output.path.clone()) {
            Some(path) => std::fs::write(&path, &bytes)
                .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))?,
            None => out.write_all(&bytes).map_err(|e| Failure::Runtime(e.to_string()))?,
        }
        if !rendered.passed {
            let example = commands::first_counterexample(&rendered.json).unwrap_or_else(|| "unknown".into());
            return Err(Failure::Runtime(format!("property failure; first counterexample: {example}")));
        }
        Ok(())
    })();
    match result {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "error: {m}");
            EXIT_USAGE
        }
        Err(Failure::Runtime(m)) => {
            let _ = writeln!(err, "error: {m}");
            EXIT_FAILURE
        }
    }
}

/// Default tolerances, for documentation and tests.
pub fn default_tolerances() -> Tolerances {
    Tolerances::default()
}
