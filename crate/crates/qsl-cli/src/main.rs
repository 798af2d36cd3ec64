//! Command-line front end for the quantum-speed-limit library: spectra,
//! bound sweeps, Loschmidt echoes, transition detection, gap-ratio scans,
//! and a closed-form consistency battery.

mod commands;
mod config;
mod output;

use std::fmt::Display;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand};

use commands::Globals;
use config::ConfigFile;
use qsl_core::{Error, Result};

#[derive(Parser)]
#[command(
    name = "qsl",
    version,
    about = "Quantum speed limits and localization transitions for 1D lattice fermions"
)]
struct Cli {
    /// Plain key=value parameter file; command-line flags override it
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Seed for phase averaging and reference ensembles
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (0 keeps the runtime default); never affects results
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Directory output files land in (created if absent)
    #[arg(long, global = true, value_name = "DIR")]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Eigenvalues of one model instance, cached by matrix fingerprint
    Spectrum(commands::SpectrumArgs),
    /// Speed bounds for every pre-quench eigenstate, or one state over a grid
    QslSweep(commands::QslSweepArgs),
    /// Loschmidt echo trace with bound envelopes and orthogonality times
    Echo(commands::EchoArgs),
    /// Detuning where localizing and delocalizing bound curves cross
    Transition(commands::TransitionArgs),
    /// Disorder-averaged gap-ratio scan of the interacting chain
    MblScan(commands::MblScanArgs),
    /// Closed-form consistency battery; any breach exits with code 2
    OracleCheck(commands::OracleCheckArgs),
}

/// Plumbing keys resolve like physics keys (flag beats file beats default)
/// but stay out of the per-command parameter hash.
fn plumbing<T>(cli: Option<T>, file: &ConfigFile, key: &str, default: T) -> Result<T>
where
    T: FromStr,
    T::Err: Display,
{
    match cli {
        Some(v) => Ok(v),
        None => match file.get(key) {
            Some(raw) => raw
                .parse::<T>()
                .map_err(|e| Error::Config(format!("bad value for {key}: {e}"))),
            None => Ok(default),
        },
    }
}

fn run() -> Result<u8> {
    let cli = Cli::parse();
    let file = ConfigFile::load(cli.config.as_deref())?;

    let seed: u64 = plumbing(cli.seed, &file, "seed", 1)?;
    let threads: usize = plumbing(cli.threads, &file, "threads", 0)?;
    let out_dir: PathBuf = plumbing(cli.out_dir, &file, "out-dir", PathBuf::from("."))?;

    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    }
    std::fs::create_dir_all(&out_dir)?;
    let globals = Globals { seed, out_dir };

    match &cli.command {
        Cmd::Spectrum(args) => args.run(&file, &globals)?,
        Cmd::QslSweep(args) => args.run(&file, &globals)?,
        Cmd::Echo(args) => args.run(&file, &globals)?,
        Cmd::Transition(args) => args.run(&file, &globals)?,
        Cmd::MblScan(args) => args.run(&file, &globals)?,
        Cmd::OracleCheck(args) => {
            if !args.run(&file, &globals)? {
                return Ok(2);
            }
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
