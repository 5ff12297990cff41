use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use conewave_cli::{run_experiment, CliError, ExperimentConfig, ExperimentKind, Format, Overrides};

#[derive(Parser, Debug)]
#[command(name = "conewave", version, about = "Experiments for the quadratic-derivative wave equation")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Run seed; overrides `seed` in the config.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads; overrides CONEWAVE_WORKERS and the config.
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    format: Option<OutFormat>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Monte Carlo volumes of cone intersections and their exponent fits.
    Volumes,
    /// Best constants of the bilinear restriction estimates.
    Constants,
    /// Exact feasibility region of the dyadic exponent ledger.
    Ledger,
    /// Picard and RK4 solves, optionally with an amplitude sweep.
    Solve,
    /// Scaling law of the homogeneous Fourier-Lebesgue norm.
    Scaling,
    /// Strichartz ratio probe over a resolution ladder.
    Strichartz,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum OutFormat {
    Csv,
    Json,
}

impl Command {
    fn kind(self) -> ExperimentKind {
        match self {
            Self::Volumes => ExperimentKind::Volumes,
            Self::Constants => ExperimentKind::Constants,
            Self::Ledger => ExperimentKind::Ledger,
            Self::Solve => ExperimentKind::Solve,
            Self::Scaling => ExperimentKind::Scaling,
            Self::Strichartz => ExperimentKind::Strichartz,
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let text = match &cli.config {
        Some(path) => std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?,
        None => String::new(),
    };
    let over = Overrides {
        seed: cli.seed,
        workers: cli.workers,
        out: cli.out,
        format: cli.format.map(|f| match f {
            OutFormat::Csv => Format::Csv,
            OutFormat::Json => Format::Json,
        }),
    };
    let cfg = ExperimentConfig::parse(cli.command.kind(), &text, &over)?;
    let out = run_experiment(&cfg)?;
    for t in &out.tables {
        eprintln!("wrote {} ({} rows)", t.name, t.rows().len());
    }
    println!("{}", cfg.out.join(conewave_cli::manifest::MANIFEST_NAME).display());
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(2)
        }
    }
}
