use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use axion_hall::{read_manifest, rerun, run_to_dir, CliError, RunConfig, Scenario, THREADS_ENV};
use clap::{Parser, Subcommand};

/// Axion electrodynamics, chiral magnetic transport and quantum Hall lattices.
///
/// Exit codes: 0 success, 2 configuration error, 3 numerical failure,
/// 4 i/o error. Errors are reported as JSON on stderr.
#[derive(Debug, Parser)]
#[command(name = "axion-hall", version)]
struct Cli {
    /// Run configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides the configuration's `output`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for initial phases; overrides the configuration's `seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for independent modes.
    #[arg(long, global = true, env = THREADS_ENV)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run whatever scenario the configuration names.
    Run,
    /// Im ω of every branch over a k grid.
    Dispersion,
    /// Endpoints of the instability shell.
    Shell,
    /// Mode evolution with prescribed or dynamical μ₅.
    Evolve,
    /// Chiral-magnetic transport formulas.
    Cme,
    /// Abelian quantum Hall lattices.
    Hall {
        #[command(subcommand)]
        command: HallCommand,
    },
    /// Repeat a run from its manifest and verify every output hash.
    Rerun { manifest: PathBuf },
}

#[derive(Debug, Subcommand)]
enum HallCommand {
    /// σ_H = qᵀG⁻¹q for one lattice.
    Fraction,
    /// All fractions within bounds.
    Enumerate,
    /// Bulk/edge anomaly-inflow check on a grid.
    AnomalyCheck,
    /// 3D Hall response of a crystalline axion.
    #[command(name = "3d")]
    ThreeD,
}

fn threads(flag: Option<usize>) -> Result<usize, CliError> {
    match flag {
        Some(0) => Err(CliError::config(Some("threads"), "must be at least 1")),
        Some(n) => Ok(n),
        None => Ok(std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)),
    }
}

fn load(path: &Path) -> Result<RunConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    RunConfig::from_toml(&text)
}

fn main_inner(cli: Cli) -> Result<(), CliError> {
    let n_threads = threads(cli.threads)?;
    let scenario = match &cli.command {
        Command::Rerun { manifest } => {
            let m = read_manifest(manifest)?;
            let out = cli.out.clone().unwrap_or_else(|| {
                manifest.parent().unwrap_or(Path::new(".")).join("rerun")
            });
            let fresh = rerun(&m, &out, n_threads)?;
            println!("reproduced {} outputs in {}", fresh.outputs.len(), out.display());
            return Ok(());
        }
        Command::Run => None,
        Command::Dispersion => Some(Scenario::Dispersion),
        Command::Shell => Some(Scenario::Shell),
        Command::Evolve => Some(Scenario::Evolve),
        Command::Cme => Some(Scenario::Cme),
        Command::Hall { command } => Some(match command {
            HallCommand::Fraction => Scenario::HallFraction,
            HallCommand::Enumerate => Scenario::HallEnumerate,
            HallCommand::AnomalyCheck => Scenario::HallAnomalyCheck,
            HallCommand::ThreeD => Scenario::Hall3d,
        }),
    };
    let path = cli.config.as_deref().ok_or_else(|| CliError::config(Some("--config"), "a configuration file is required"))?;
    let cfg = load(path)?;
    let out = cli
        .out
        .clone()
        .or_else(|| cfg.output.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    let cfg = cfg.resolve(scenario, cli.seed)?;
    let (_, outcome) = run_to_dir(&cfg, &out, n_threads)?;
    if let Some(s) = outcome.stdout {
        println!("{s}");
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match main_inner(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.report());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
