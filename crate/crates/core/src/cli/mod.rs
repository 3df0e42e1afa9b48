//! The `epiplan` command-line front end.
//!
//! Exit codes are a stable contract: 0 success, 2 input or domain error,
//! 3 infeasible policy, 4 I/O error, 5 verification or reproduction failure.
//! Every command validates its whole configuration before computing, and
//! output is assembled in memory so nothing is emitted on failure.

mod commands;
pub mod config;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use thiserror::Error;

use crate::optimizer::SweepParam;
pub use config::{GKind, RunConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_IO: i32 = 4;
pub const EXIT_FAILED: i32 = 5;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Infeasible(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Infeasible(_) => EXIT_INFEASIBLE,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

impl From<crate::Error> for CliError {
    fn from(e: crate::Error) -> Self {
        match e {
            crate::Error::Infeasible { .. } => CliError::Infeasible(e.to_string()),
            crate::Error::SweepPoint { ref source, .. } if matches!(**source, crate::Error::Infeasible { .. }) => {
                CliError::Infeasible(e.to_string())
            }
            other => CliError::Input(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "epiplan", version, about = "Peak-time planning for an SI epidemic with limited health care")]
pub struct Cli {
    /// Configuration file of `key = value` lines
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Write the command's output here instead of standard output
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate welfare at one peak time
    Eval {
        #[arg(long, allow_negative_numbers = true)]
        b: f64,
    },
    /// Find the welfare-maximizing peak time
    Optimize,
    /// Emit x, x', y, h and w over [0, T] as CSV for each peak time
    Curves {
        #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
        b: Vec<f64>,
    },
    /// Re-optimize while varying one policy parameter
    Sweep {
        #[arg(long)]
        param: SweepParam,
        #[arg(long = "from", allow_negative_numbers = true)]
        lo: f64,
        #[arg(long = "to", allow_negative_numbers = true)]
        hi: f64,
        #[arg(long)]
        steps: usize,
    },
    /// Randomized checks of the optimum's structural properties
    Verify {
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Recompute the reference scenario and compare with published values
    ReproduceExample,
}

/// What a successful run produced.
pub struct Output {
    pub text: String,
    /// Checks inside the report failed (exit 5).
    pub failed: bool,
}

fn load_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
            RunConfig::parse(&text)?
        }
        None => RunConfig::default(),
    };
    cfg.out_path = cli.out.clone();
    Ok(cfg)
}

pub fn execute(cli: &Cli) -> Result<Output, CliError> {
    if let Command::ReproduceExample = cli.command {
        return commands::reproduce_example();
    }
    let cfg = load_config(cli)?;
    let policy = cfg.validate()?;
    match &cli.command {
        Command::Eval { b } => commands::eval(&cfg, &policy, *b),
        Command::Optimize => commands::optimize(&cfg, &policy),
        Command::Curves { b } => commands::curves(&cfg, &policy, b),
        Command::Sweep { param, lo, hi, steps } => commands::sweep(&cfg, &policy, *param, *lo, *hi, *steps),
        Command::Verify { trials, seed } => commands::verify(&cfg, &policy, *trials, *seed),
        Command::ReproduceExample => unreachable!("handled above"),
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{e}");
                    EXIT_INPUT
                }
            };
        }
    };

    let output = match execute(&cli) {
        Ok(output) => output,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return e.exit_code();
        }
    };

    let written = match &cli.out {
        Some(path) => std::fs::write(path, &output.text)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => stdout
            .write_all(output.text.as_bytes())
            .and_then(|_| stdout.flush())
            .map_err(|e| CliError::Io(format!("cannot write output: {e}"))),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "error: {e}");
        return e.exit_code();
    }
    if output.failed {
        let _ = writeln!(stderr, "error: one or more checks failed");
        return EXIT_FAILED;
    }
    EXIT_OK
}
