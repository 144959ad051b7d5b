// Copyright 2026 Dephase Contributors
// SPDX-License-Identifier: MIT

//! `dephase` — config-driven front end for the dephasing-dynamics engine.
//!
//! Subcommands: `evolve`, `rates`, `boson`, `validate`, `spectral`. Each
//! reads one TOML scenario config and writes comma-delimited tables.
//! Exit codes: 0 success, 1 config error, 2 capacity refusal, 3 validation
//! failure.

mod config;
mod error;
mod runs;
mod table;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::ScenarioConfig;
use crate::error::{CliError, Result};

#[derive(Parser)]
#[command(
    name = "dephase",
    version,
    about = "Exact dephasing dynamics of qubit registers coupled to bosonic modes",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Scenario config file (TOML).
    #[arg(long, value_name = "PATH")]
    config: PathBuf,

    /// Output directory for the emitted tables.
    #[arg(long, value_name = "DIR", default_value = ".")]
    out: PathBuf,

    /// Size of the worker thread pool (defaults to the logical CPU count).
    #[arg(long, value_name = "N")]
    threads: Option<usize>,

    /// Suppress the timestamp header line (for byte-identical reruns).
    #[arg(long)]
    no_timestamp: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve the register and tabulate coherences, sectors, and purity.
    Evolve(CommonArgs),
    /// Tabulate the pairwise phase and damping matrices (linear coupling).
    Rates(CommonArgs),
    /// Tabulate the conditional boson mixture (weights and displacements).
    Boson(CommonArgs),
    /// Compare the engine against the truncated-Fock reference.
    Validate {
        #[command(flatten)]
        common: CommonArgs,
        /// Maximum allowed trace distance (default 1e-6).
        #[arg(long, value_name = "FLOAT")]
        tolerance: Option<f64>,
    },
    /// Continuum-bath exponents via quadrature, plus a convergence study.
    Spectral(CommonArgs),
}

impl Command {
    fn common(&self) -> &CommonArgs {
        match self {
            Command::Evolve(c) | Command::Rates(c) | Command::Boson(c) | Command::Spectral(c) => c,
            Command::Validate { common, .. } => common,
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let common = cli.command.common();
    if let Some(n) = common.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be ≥ 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("cannot size the thread pool: {e}")))?;
    }
    let cfg = ScenarioConfig::load(&common.config)?;
    let timestamp = !common.no_timestamp;
    let out_dir = common.out.clone();
    std::fs::create_dir_all(&out_dir).map_err(|e| {
        CliError::Config(format!(
            "cannot create output dir {}: {e}",
            out_dir.display()
        ))
    })?;
    let written = match &cli.command {
        Command::Evolve(_) => runs::run_evolve(&cfg, &out_dir, timestamp)?,
        Command::Rates(_) => runs::run_rates(&cfg, &out_dir, timestamp)?,
        Command::Boson(_) => runs::run_boson(&cfg, &out_dir, timestamp)?,
        Command::Validate { tolerance, .. } => {
            runs::run_validate(&cfg, &out_dir, timestamp, *tolerance)?
        }
        Command::Spectral(_) => runs::run_spectral(&cfg, &out_dir, timestamp)?,
    };
    for path in written {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help / --version are successes; anything else is a usage
            // error, which belongs to the config-error exit class.
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(i32::from(e.exit_code()));
    }
}
