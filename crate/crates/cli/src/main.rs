//! `uamo-lab`: verification suites and localization experiments from the command line.
//!
//! Exit status: 0 pass, 1 gated numeric failure, 2 usage or domain error.

mod commands;
mod config;
mod error;
mod freq;
mod output;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{cf, defect, localize, lyapunov, verify, windows};
use config::{ConfigFile, DEFAULT_CONFIG_PATH};
use error::{CliError, CliResult};
use output::Outcome;

/// Environment fallback for `--threads`.
const THREADS_ENV: &str = "UAMO_LAB_THREADS";

#[derive(Debug, Parser)]
#[command(name = "uamo-lab", version, about = "Numerical laboratory for the unitary almost Mathieu operator")]
struct Cli {
    /// Worker threads; falls back to UAMO_LAB_THREADS, then to the machine parallelism.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// JSON config file with one object per subcommand (default `./uamo-lab.json` if present); flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Print the schema-versioned JSON document instead of the summary.
    #[arg(long, global = true, conflicts_with = "csv")]
    json: bool,
    /// Print the CSV table instead of the summary.
    #[arg(long, global = true)]
    csv: bool,
    /// Directory receiving `<command>.json`, `<command>.csv` and `manifest.json`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Continued-fraction table (n, q_n, ln q_{n+1} / q_n, ||q_n omega||).
    Cf(cf::CfArgs),
    /// Phase-averaged Lyapunov exponent on the spectrum against its closed form.
    Lyapunov(lyapunov::LyapunovArgs),
    /// Determinant and interpolation identity suites.
    Verify(verify::VerifyArgs),
    /// Eigenfunction decay and resonance-block inequalities of a finite truncation.
    Localize(localize::LocalizeArgs),
    /// Sum decomposition of the interpolation defect at one site.
    Defect(defect::DefectArgs),
    /// Interpolation windows at one site and scale.
    Windows(windows::WindowsArgs),
}

fn init_threads(flag: Option<usize>) -> CliResult<()> {
    let n = match flag {
        Some(n) => Some(n),
        None => match std::env::var(THREADS_ENV) {
            Ok(v) => Some(v.trim().parse().map_err(|_| CliError::Usage(format!("{THREADS_ENV}={v} is not a count")))?),
            Err(_) => None,
        },
    };
    if let Some(n) = n {
        if n == 0 {
            return Err(CliError::Usage("thread count must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn run(cli: &Cli, file: Option<&ConfigFile>) -> CliResult<Outcome> {
    init_threads(cli.threads)?;
    match &cli.command {
        Command::Cf(a) => cf::run(a, file),
        Command::Lyapunov(a) => lyapunov::run(a, file),
        Command::Verify(a) => verify::run(a, file, cli.config.as_deref()),
        Command::Localize(a) => localize::run(a, file),
        Command::Defect(a) => defect::run(a, file),
        Command::Windows(a) => windows::run(a, file),
    }
}

fn emit(cli: &Cli, file: Option<&ConfigFile>, outcome: &Outcome, started: u128) -> CliResult<()> {
    let mut stdout = std::io::stdout().lock();
    if cli.json {
        stdout.write_all(outcome.json().as_bytes())?;
    } else if cli.csv {
        stdout.write_all(&outcome.csv()?)?;
    } else {
        stdout.write_all(outcome.summary.as_bytes())?;
    }
    if let Some(dir) = &cli.out {
        let config_bytes = file.map(|f| f.bytes.as_slice());
        let path = output::write_run(dir, outcome, std::env::args().collect(), config_bytes, started)?;
        eprintln!("manifest written to {}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let started = output::unix_ms();
    let mut cli = Cli::parse();
    if cli.config.is_none() && Path::new(DEFAULT_CONFIG_PATH).exists() {
        cli.config = Some(PathBuf::from(DEFAULT_CONFIG_PATH));
    }
    let result = cli.config.as_deref().map(ConfigFile::load).transpose().and_then(|file| {
        let outcome = run(&cli, file.as_ref())?;
        emit(&cli, file.as_ref(), &outcome, started)?;
        Ok(outcome.exit)
    });
    let exit = match result {
        Ok(e) => e,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit()
        }
    };
    ExitCode::from(exit as u8)
}
