//! `skewlab`: batch front end for the dyadic, series, dynamics, measure and
//! cover-tower tools.
//!
//! Exit status: 0 on success, 1 on a usage or input error, 2 when a
//! verification fails.

mod commands;
mod config;
mod emit;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{Emit, RunConfig};

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    /// The report was produced but a check failed.
    Verify(String),
}

impl From<skewlab::Error> for Failure {
    fn from(e: skewlab::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<covertower::CoverError> for Failure {
    fn from(e: covertower::CoverError) -> Self {
        Failure::Usage(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "skewlab", version, about = "Experiments with Furstenberg's skew product and surface cover towers")]
struct Cli {
    /// `key = value` file; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Series cutoff.
    #[arg(long = "K", short = 'K', global = true)]
    k: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Bits kept for the second coordinate.
    #[arg(long, global = true)]
    precision_bits: Option<u64>,
    #[arg(long, global = true, value_enum)]
    emit: Option<Emit>,
    /// Write here instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<String>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// v_k, the partial sums of α and the fractional parts n_k α.
    Constants,
    /// Evaluate h, g, H or R at an exact angle.
    Series(commands::SeriesArgs),
    /// Step an orbit of T exactly.
    Orbit(commands::OrbitArgs),
    /// Apply one steering block T^{m_s} through the closed form.
    Steer(commands::SteerArgs),
    /// Build and verify a density certificate.
    Density(commands::DensityArgs),
    /// Sample and test invariant measures.
    Measure(commands::MeasureArgs),
    /// Build a tower of double covers opening all short words, or verify one.
    Tower(TowerCommand),
}

#[derive(Debug, Args)]
#[command(args_conflicts_with_subcommands = true)]
struct TowerCommand {
    #[command(subcommand)]
    verify: Option<TowerSub>,
    #[command(flatten)]
    build: commands::TowerArgs,
}

#[derive(Debug, Subcommand)]
enum TowerSub {
    /// Re-check every claim of a tower file with the sheet action.
    Verify { file: PathBuf },
}

fn config_from(cli: &Cli) -> Result<RunConfig, Failure> {
    let mut c = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(k) = cli.k {
        c.k = k;
    }
    if let Some(s) = cli.seed {
        c.seed = s;
    }
    if let Some(p) = cli.precision_bits {
        c.precision_bits = p;
    }
    if let Some(e) = cli.emit {
        c.emit = e;
    }
    if let Some(o) = &cli.output {
        c.output = Some(o.clone());
    }
    if let Some(t) = cli.threads {
        c.threads = Some(t);
    }
    Ok(c)
}

fn run(cli: Cli) -> Result<(), Failure> {
    let cfg = config_from(&cli)?;
    if let Some(t) = cfg.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Failure::Usage(format!("cannot start {t} threads: {e}")))?;
    }
    let (report, check) = match &cli.command {
        Command::Constants => commands::constants(&cfg)?,
        Command::Series(a) => commands::series(&cfg, a)?,
        Command::Orbit(a) => commands::orbit(&cfg, a)?,
        Command::Steer(a) => commands::steer(&cfg, a)?,
        Command::Density(a) => commands::density(&cfg, a)?,
        Command::Measure(a) => commands::measure(&cfg, a)?,
        Command::Tower(t) => match &t.verify {
            Some(TowerSub::Verify { file }) => commands::tower_verify(&cfg, file)?,
            None => commands::tower(&cfg, &t.build)?,
        },
    };
    let text = report.render(&cfg)?;
    match &cfg.output {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Usage(format!("cannot write {path}: {e}")))?,
        None => {
            let mut out = std::io::stdout().lock();
            // a closed pipe is not an error worth reporting
            let _ = out.write_all(text.as_bytes());
        }
    }
    check
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Verify(m)) => {
            eprintln!("verification failed: {m}");
            ExitCode::from(2)
        }
    }
}
