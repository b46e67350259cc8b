//! Command-line front end for metric-aware principal component analysis:
//! argument parsing, error-to-exit-code mapping, and dispatch into the
//! subcommand implementations.

pub mod ball;
pub mod commands;
pub mod report;

use std::path::PathBuf;

use clap::{ArgAction, Args, Parser, Subcommand};

use mapca::data::DataError;
use mapca::error::MapcaError;
use mapca::invariance::Verdict;
use mapca::spectra::DEFAULT_SPD_FLOOR_REL;

/// Environment variable overriding the relative positive-definiteness
/// floor used when inverting or taking fractional powers of matrices.
pub const SPD_FLOOR_ENV: &str = "MAPCA_SPD_FLOOR";

/// Failures mapped to process exit codes: input problems exit 1, numeric
/// problems exit 2, and `--expect` mismatches exit 3.
#[derive(Debug)]
pub enum CliError {
    Input(String),
    Numeric(String),
    ExpectMismatch { expected: Verdict, actual: Verdict },
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Input(_) => "input",
            CliError::Numeric(_) => "numeric",
            CliError::ExpectMismatch { .. } => "expectation",
        }
    }

    pub fn message(&self) -> String {
        match self {
            CliError::Input(m) | CliError::Numeric(m) => m.clone(),
            CliError::ExpectMismatch { expected, actual } => {
                format!("expected verdict {expected}, got {actual}")
            }
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Numeric(_) => 2,
            CliError::ExpectMismatch { .. } => 3,
        }
    }

    /// One-line machine-readable error for stderr.
    pub fn stderr_json(&self) -> String {
        serde_json::json!({
            "error": { "kind": self.kind(), "message": self.message() }
        })
        .to_string()
    }
}

impl From<DataError> for CliError {
    fn from(err: DataError) -> Self {
        CliError::Input(err.to_string())
    }
}

impl From<MapcaError> for CliError {
    fn from(err: MapcaError) -> Self {
        CliError::Numeric(err.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "mapca",
    version,
    about = "Principal component analysis under a configurable metric constraint"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve on a dataset and report spectrum, loadings, and conditioning
    Analyze(AnalyzeArgs),
    /// Trace conditioning across the covariance power family of metrics
    Sweep(SweepArgs),
    /// Compare solutions before and after per-variable rescaling
    VerifyInvariance(VerifyInvarianceArgs),
    /// Tabulate the constraint metrics implicit in self-supervised objectives
    SslTable(SslTableArgs),
    /// Sample constraint-ball boundaries and principal axes for two variables
    Ball(BallArgs),
}

/// Options shared by every command that reads a dataset.
#[derive(Debug, Clone, Args)]
pub struct InputOptions {
    /// Path to a delimited numeric table
    #[arg(long)]
    pub input: PathBuf,

    /// Cell delimiter; pass "\t" for tab-separated files
    #[arg(long, default_value = ",")]
    pub delimiter: String,

    /// Treat the first line as data instead of column names
    #[arg(long, action = ArgAction::SetTrue)]
    pub no_header: bool,

    /// Zero-based column to skip as a non-numeric row label
    #[arg(long)]
    pub label_column: Option<usize>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub input: InputOptions,

    /// Metric: identity, diagonal, beta:<float>, invcov, or explicit:<path>
    #[arg(long, default_value = "identity")]
    pub metric: String,

    /// Write the JSON report here instead of stdout
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub input: InputOptions,

    /// Comma-separated exponents for the metric family Σ^β
    #[arg(long, default_value = "0,0.25,0.5,0.75,1", allow_hyphen_values = true)]
    pub betas: String,

    /// Output file; .json writes JSON, any other extension writes CSV
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyInvarianceArgs {
    #[command(flatten)]
    pub input: InputOptions,

    /// Metric: identity, diagonal, beta:<float>, invcov, or explicit:<path>
    #[arg(long, default_value = "identity")]
    pub metric: String,

    /// Comma-separated positive per-variable scale factors
    #[arg(long, allow_hyphen_values = true)]
    pub scales: String,

    /// Fail (exit 3) unless the verdict matches: strict-invariant,
    /// direction-invariant, not-invariant, or degenerate
    #[arg(long)]
    pub expect: Option<String>,

    /// Write the JSON report here instead of printing a summary
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SslTableArgs {
    #[command(flatten)]
    pub input: InputOptions,

    /// Write the JSON report here instead of printing a summary
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BallArgs {
    #[command(flatten)]
    pub input: InputOptions,

    /// Two zero-based variable indices to project onto
    #[arg(long, default_value = "0,1")]
    pub dims: String,

    /// Number of boundary samples per metric (at least 8)
    #[arg(long, default_value_t = 256)]
    pub points: usize,

    /// Comma-separated metrics, one panel each
    #[arg(long, default_value = "identity,diagonal,beta:0.5,beta:0.75,beta:1")]
    pub metrics: String,

    /// Output file; .json writes JSON, any other extension writes CSV
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// Translates the `--delimiter` string to a single character, accepting
/// the two-character escape `\t` for tabs.
pub fn parse_delimiter(raw: &str) -> Result<char, CliError> {
    if raw == "\\t" || raw == "\t" {
        return Ok('\t');
    }
    let mut chars = raw.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) => Ok(c),
        _ => Err(CliError::Input(format!(
            "delimiter must be a single character, got {raw:?}"
        ))),
    }
}

/// Parses a comma-separated list of finite numbers.
pub fn parse_float_list(raw: &str, what: &str) -> Result<Vec<f64>, CliError> {
    let values: Result<Vec<f64>, CliError> = raw
        .split(',')
        .map(|token| {
            let token = token.trim();
            let value: f64 = token
                .parse()
                .map_err(|_| CliError::Input(format!("invalid {what} entry {token:?}")))?;
            if !value.is_finite() {
                return Err(CliError::Input(format!(
                    "{what} entry {token:?} is not finite"
                )));
            }
            Ok(value)
        })
        .collect();
    let values = values?;
    if values.is_empty() {
        return Err(CliError::Input(format!("{what} list is empty")));
    }
    Ok(values)
}

/// Parses `--dims` into two distinct zero-based indices.
pub fn parse_dims(raw: &str) -> Result<(usize, usize), CliError> {
    let parts: Vec<&str> = raw.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        return Err(CliError::Input(format!(
            "dims must be two comma-separated indices, got {raw:?}"
        )));
    }
    let parse = |token: &str| -> Result<usize, CliError> {
        token
            .parse()
            .map_err(|_| CliError::Input(format!("invalid dimension index {token:?}")))
    };
    let (a, b) = (parse(parts[0])?, parse(parts[1])?);
    if a == b {
        return Err(CliError::Input(format!(
            "dims must name two different variables, got {raw:?}"
        )));
    }
    Ok((a, b))
}

/// Relative positive-definiteness floor, overridable via the
/// `MAPCA_SPD_FLOOR` environment variable.
pub fn spd_floor_from_env() -> Result<f64, CliError> {
    match std::env::var(SPD_FLOOR_ENV) {
        Err(_) => Ok(DEFAULT_SPD_FLOOR_REL),
        Ok(raw) => {
            let value: f64 = raw.trim().parse().map_err(|_| {
                CliError::Input(format!("{SPD_FLOOR_ENV} must be a number, got {raw:?}"))
            })?;
            if !value.is_finite() || value <= 0.0 {
                return Err(CliError::Input(format!(
                    "{SPD_FLOOR_ENV} must be a positive finite number, got {raw:?}"
                )));
            }
            Ok(value)
        }
    }
}

/// Parses arguments, runs the chosen command, and returns the process
/// exit code, reporting failures as one-line JSON on stderr.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return code;
        }
    };
    match commands::dispatch(&cli) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("{}", err.stderr_json());
            err.exit_code()
        }
    }
}
