use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ergoquench::{run_experiment, validate_config, CliError, Experiment, ExperimentConfig};

#[derive(Parser)]
#[command(name = "ergoquench", version, about = "Ergotropy of XX spin chains after a dissipative quench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write its CSV files.
    Run {
        /// Experiment name (see `list`).
        #[arg(long)]
        experiment: String,
        /// Flat `key = value` configuration file.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory, overriding `output_dir`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write SVG line plots.
        #[arg(long)]
        svg: bool,
    },
    /// List the available experiments.
    List,
}

fn load(
    experiment: &str,
    config: Option<PathBuf>,
    out: Option<PathBuf>,
    svg: bool,
) -> Result<ExperimentConfig, CliError> {
    let mut cfg = match config {
        Some(path) => validate_config(&std::fs::read_to_string(path)?)?,
        None => ExperimentConfig::default(),
    };
    cfg.experiment = Some(experiment.parse()?);
    if let Some(dir) = out {
        cfg.output_dir = dir;
    }
    cfg.emit_svg |= svg;
    Ok(cfg)
}

fn run(experiment: &str, config: Option<PathBuf>, out: Option<PathBuf>, svg: bool) -> Result<(), CliError> {
    let cfg = load(experiment, config, out, svg)?;
    let report = run_experiment(&cfg)?;
    for line in &report.summary {
        println!("{line}");
    }
    let w = report.stats.worst;
    println!(
        "{} states checked: max trace error {:.2e}, max hermiticity error {:.2e}, min eigenvalue {:.2e}",
        report.stats.count, w.trace, w.hermiticity, w.min_eigenvalue
    );
    for file in &report.files {
        println!("wrote {}", file.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::List => {
            for e in Experiment::ALL {
                println!("{:<14} {}", e.name(), e.description());
            }
            ExitCode::SUCCESS
        }
        Command::Run {
            experiment,
            config,
            out,
            svg,
        } => match run(&experiment, config, out, svg) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(e.exit_code() as u8)
            }
        },
    }
}
