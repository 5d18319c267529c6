//! `hbundle` command-line front end.
//!
//! Subcommands `index`, `bundle` and `admissible` read citation counts (CSV
//! with header `id,counts`, `;`-separated counts, or a JSON array of
//! `{"id", "counts"}` objects; JSON objects may give `"points": [[x, y], …]`
//! instead of counts) and write CSV or JSON tables. `verify` runs
//! the property suite. Exit codes: 0 success, 1 verification failure,
//! 2 input or configuration error.

pub mod commands;
pub mod config;
pub mod format;
pub mod input;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

pub use commands::{cmd_admissible, cmd_bundle, cmd_index, cmd_verify, Output, BUNDLE_HEADER};
pub use config::{FamilyKind, IndexDef, RunConfig, Spacing, ThetaGrid, VerifySection};
pub use format::fmt_num;
pub use input::{read_sources, Source, SourceData};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_BAD_INPUT: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("input error: {0}")]
    Input(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "hbundle",
    version,
    about = "Hirsch-type index bundles of citation data"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Master seed; overrides the config.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// θ grid as `min:max:count[:log]`; overrides the config.
    #[arg(long = "theta-grid", global = true)]
    pub theta_grid: Option<String>,
    /// Absolute root tolerance; overrides the config.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Output format. For `verify`, `csv` selects the text summary.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// One value per (source, index, θ).
    Index { input: PathBuf },
    /// Bundle table with operator and threshold parameters.
    Bundle { input: PathBuf },
    /// Admissible θ range per (source, index).
    Admissible { input: PathBuf },
    /// Runs the property suite.
    Verify {
        /// Also write the full report as JSON to this path.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Trials per property; overrides the config.
        #[arg(long)]
        trials: Option<usize>,
    },
}

/// Reads the config file (if any) and applies command-line overrides.
pub fn load_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            RunConfig::from_toml(&text).map_err(|e| match e {
                CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
                other => other,
            })?
        }
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(g) = &cli.theta_grid {
        cfg.theta_grid = ThetaGrid::parse(g)?;
    }
    if let Some(tol) = cli.tol {
        cfg.tol = tol;
    }
    if let Command::Verify {
        trials: Some(t), ..
    } = cli.command
    {
        cfg.verify.trials = Some(t);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn write_report(path: &Path, report: &crate::verify::SuiteReport) -> Result<(), CliError> {
    let mut s =
        serde_json::to_string_pretty(report).map_err(|e| CliError::Config(e.to_string()))?;
    s.push('\n');
    std::fs::write(path, s)?;
    Ok(())
}

fn execute(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, CliError> {
    let cfg = load_config(cli)?;
    let (out, code) = match &cli.command {
        Command::Index { input } => (cmd_index(&read_sources(input)?, &cfg, cli.format)?, EXIT_OK),
        Command::Bundle { input } => (
            cmd_bundle(&read_sources(input)?, &cfg, cli.format)?,
            EXIT_OK,
        ),
        Command::Admissible { input } => (
            cmd_admissible(&read_sources(input)?, &cfg, cli.format)?,
            EXIT_OK,
        ),
        Command::Verify { report: path, .. } => {
            let (out, report) = cmd_verify(&cfg, cli.format);
            if let Some(path) = path {
                write_report(path, &report)?;
            }
            let code = if report.any_fail() {
                EXIT_VERIFY_FAILED
            } else {
                EXIT_OK
            };
            (out, code)
        }
    };
    for w in &out.warnings {
        writeln!(stderr, "warning: {w}")?;
    }
    stdout.write_all(out.stdout.as_bytes())?;
    stdout.flush()?;
    Ok(code)
}

/// Parses `args` and runs the selected command; returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_BAD_INPUT
            } else {
                EXIT_OK
            };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(&cli, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_BAD_INPUT
        }
    }
}
