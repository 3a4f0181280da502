use std::path::PathBuf;
use std::process::ExitCode;

use beamform::harness::{emit_csv, emit_plot_script, run_experiment, ExperimentConfig};
use beamform::Error;
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "beamform", version, about = "Robust adaptive beamforming experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte-Carlo experiment and write the SINR table as CSV.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output CSV (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        trials: Option<usize>,
        /// Also write a matplotlib script that renders the CSV.
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Parse and check a configuration without running it.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

const EXIT_CONFIG: u8 = 2;
const EXIT_ABORTED: u8 = 3;

fn fail(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    match e {
        Error::Config(_) | Error::InfeasibleParameters(_) => ExitCode::from(EXIT_CONFIG),
        _ => ExitCode::FAILURE,
    }
}

fn run(
    config: PathBuf,
    out: Option<PathBuf>,
    seed: Option<u64>,
    trials: Option<usize>,
    plot: Option<PathBuf>,
) -> Result<ExitCode, Error> {
    let mut cfg = ExperimentConfig::load(&config)?;
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    if let Some(trials) = trials {
        cfg.trials = trials;
    }
    cfg.validate()?;
    let report = run_experiment(&cfg)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    for a in &report.aborted {
        eprintln!("aborted: x = {} trial {}: {}", a.x_value, a.trial, a.reason);
    }
    if report.rows.is_empty() {
        eprintln!("error: every trial was aborted");
        return Ok(ExitCode::from(EXIT_ABORTED));
    }
    match &out {
        Some(path) => emit_csv(&report.rows, path)?,
        None => print!("{}", beamform::harness::csv_string(&report.rows)?),
    }
    if let Some(path) = plot {
        let csv = out
            .as_ref()
            .map_or_else(|| "results.csv".to_string(), |p| p.display().to_string());
        emit_plot_script(&report.rows, &csv, cfg.experiment.x_label(), path)?;
    }
    if report.aborted.is_empty() {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(EXIT_ABORTED))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, out, seed, trials, plot } => run(config, out, seed, trials, plot),
        Command::Validate { config } => ExperimentConfig::load(&config).map(|cfg| {
            for w in cfg.warnings() {
                eprintln!("warning: {w}");
            }
            println!("ok");
            ExitCode::SUCCESS
        }),
    };
    result.unwrap_or_else(|e| fail(&e))
}
