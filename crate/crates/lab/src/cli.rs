//! Argument parsing and command dispatch. Exit codes: 0 success, 1 a
//! verification failed, 2 bad input or usage.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde::Serialize;
use ucpt_core::extremality::SetKind;
use ucpt_core::field::parse_rational;
use ucpt_core::sampling::ExperimentConfig;

use crate::checks::{self, VerifySuiteResult};
use crate::json::{Backend, ConfigJson, SampleReport, SpecJson};
use crate::run;
use crate::{LabError, LabResult};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "ucpt-lab", version, about = "Extremality, factorization and genericity checks for unital quantum channels")]
pub struct Cli {
    /// Write the JSON report to this file instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Independence and extremality verdicts for one family member.
    Analyze {
        /// Family spec as JSON, or @FILE.
        spec: String,
        /// Product set: AstarA, AAstar or LS.
        #[arg(long, default_value = "AstarA")]
        set: String,
        /// Exact arithmetic (the default).
        #[arg(long, conflicts_with = "float")]
        exact: bool,
        /// Complex doubles with a relative rank cutoff.
        #[arg(long)]
        float: bool,
        #[arg(long, default_value_t = ExperimentConfig::DEFAULT_TOLERANCE)]
        tolerance: f64,
    },
    /// Determinants of the product set as polynomials in t, with their roots.
    Sweep {
        /// Family spec as JSON, or @FILE; t is ignored.
        spec: String,
        #[arg(long, default_value = "AstarA")]
        set: String,
        /// Report roots only, without polynomial coefficients.
        #[arg(long)]
        roots: bool,
        /// Open interval for the root listing (default -1 1).
        #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_hyphen_values = true)]
        interval: Option<Vec<String>>,
        /// Worker threads.
        #[arg(long, value_name = "N")]
        parallel: Option<usize>,
    },
    /// Runs registered reproduction checks.
    Verify {
        #[arg(long, conflicts_with = "check")]
        all: bool,
        /// Check to run; repeatable.
        #[arg(long, value_name = "NAME")]
        check: Vec<String>,
        /// List check names and exit.
        #[arg(long)]
        list: bool,
        /// Run checks concurrently on N threads.
        #[arg(long, value_name = "N")]
        parallel: Option<usize>,
    },
    /// Sampled genericity experiment.
    Sample {
        /// Experiment config as JSON, or @FILE.
        config: String,
        #[arg(long, value_name = "N")]
        parallel: Option<usize>,
    },
}

fn read_arg(arg: &str) -> LabResult<String> {
    match arg.strip_prefix('@') {
        Some(path) => Ok(std::fs::read_to_string(path)?),
        None => Ok(arg.to_string()),
    }
}

fn emit<T: Serialize>(value: &T, dest: &Option<PathBuf>, out: &mut dyn Write) -> LabResult<()> {
    let text = serde_json::to_string_pretty(value)?;
    match dest {
        Some(path) => std::fs::write(path, text + "\n")?,
        None => writeln!(out, "{text}")?,
    }
    Ok(())
}

fn set_kind(s: &str) -> LabResult<SetKind> {
    s.parse().map_err(|e: ucpt_core::Error| LabError::Input(e.to_string()))
}

fn execute(cli: Cli, out: &mut dyn Write) -> LabResult<u8> {
    match cli.command {
        Command::Analyze { spec, set, float, tolerance, .. } => {
            let spec = SpecJson::parse(&read_arg(&spec)?)?.to_spec()?;
            let backend = if float { Backend::Float } else { Backend::Exact };
            emit(&run::analyze(&spec, set_kind(&set)?, backend, tolerance)?, &cli.out, out)?;
            Ok(EXIT_OK)
        }
        Command::Sweep { spec, set, roots, interval, parallel } => {
            let spec = SpecJson::parse(&read_arg(&spec)?)?.to_spec()?;
            let interval = match interval.as_deref() {
                Some([lo, hi]) => {
                    let (lo, hi) = (parse_rational(lo)?, parse_rational(hi)?);
                    if lo >= hi {
                        return Err(LabError::Input(format!("empty interval ({lo}, {hi})")));
                    }
                    Some((lo, hi))
                }
                _ => None,
            };
            let pool = run::pool(run::thread_count(parallel)?)?;
            emit(&run::sweep(&spec, set_kind(&set)?, interval, !roots, &pool)?, &cli.out, out)?;
            Ok(EXIT_OK)
        }
        Command::Verify { all, check, list, parallel } => {
            if list {
                let names: Vec<_> = checks::registry().iter().map(|c| serde_json::json!({ "name": c.name, "claim": c.claim })).collect();
                emit(&names, &cli.out, out)?;
                return Ok(EXIT_OK);
            }
            let selected = if all {
                checks::registry().iter().collect()
            } else if check.is_empty() {
                return Err(LabError::Input(String::from("verify needs --all or --check NAME")));
            } else {
                check.iter().map(|n| checks::find(n)).collect::<LabResult<Vec<_>>>()?
            };
            // Budgets are wall-clock, so checks run one at a time unless asked otherwise.
            let explicit = parallel.is_some() || std::env::var_os(run::THREADS_ENV).is_some();
            let pool = if explicit { Some(run::pool(run::thread_count(parallel)?)?) } else { None };
            let result: VerifySuiteResult = checks::run_suite(&selected, pool.as_ref());
            emit(&result, &cli.out, out)?;
            Ok(if result.overall { EXIT_OK } else { EXIT_FAILED })
        }
        Command::Sample { config, parallel } => {
            let cfg = ConfigJson::parse(&read_arg(&config)?)?.to_config()?;
            let pool = run::pool(run::thread_count(parallel)?)?;
            emit(&SampleReport::from(&run::sample(&cfg, &pool)?), &cli.out, out)?;
            Ok(EXIT_OK)
        }
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return EXIT_USAGE;
            }
            let _ = write!(out, "{}", e.render());
            return EXIT_OK;
        }
    };
    match execute(cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}
