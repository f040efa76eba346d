//! `kp`: run experiments, list them, and measure convergence rates.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use kp_core::runner::{
    convergence_sweep, default_sizes, experiment, run_experiment, ConfigError, ExperimentConfig, RefineAxis,
    RunError, CONFIG_REFERENCE, EXPERIMENTS,
};
use kp_core::stepper::SchemeKind;

#[derive(Parser)]
#[command(name = "kp", version, about = "Compact, spectral and mixed solvers for generalized KP equations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write diagnostics, snapshots and metadata.
    #[command(after_help = CONFIG_REFERENCE)]
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `outputs.out_dir`.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// List the registered experiments.
    ListExperiments,
    /// Print the shipped configuration of an experiment.
    ShowConfig { name: String },
    /// Refine one axis and print the measured convergence slopes against the
    /// exact Zaitsev wave.
    #[command(after_help = CONFIG_REFERENCE)]
    Convergence {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        refine: RefineAxis,
        /// Comma-separated point counts; defaults to N, 1.5 N and 2 N.
        #[arg(long, value_delimiter = ',')]
        sizes: Option<Vec<usize>>,
        /// Overrides the scheme order.
        #[arg(long)]
        order: Option<u32>,
        /// Overrides `time.t_end`.
        #[arg(long)]
        t_end: Option<f64>,
    },
}

fn load(path: &Path) -> Result<ExperimentConfig> {
    Ok(ExperimentConfig::from_path(path).map_err(RunError::from)?)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Run { config, out_dir } => {
            let mut cfg = load(&config)?;
            if let Some(dir) = out_dir {
                cfg.outputs.out_dir = dir;
            }
            let outcome = run_experiment(&cfg)?;
            println!(
                "{}: {} steps to t={} ({}), output in {}",
                cfg.experiment,
                outcome.steps,
                outcome.final_time,
                cfg.scheme.kind.name(),
                cfg.outputs.out_dir.display()
            );
            if outcome.termination.is_terminal_event() {
                eprintln!("terminal event: {}", outcome.termination.describe());
            }
            Ok(ExitCode::from(outcome.exit_code() as u8))
        }
        Command::ListExperiments => {
            for e in &EXPERIMENTS {
                println!("{:<22} {}", e.name, e.description);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::ShowConfig { name } => {
            let Some(e) = experiment(&name) else {
                return Err(RunError::from(ConfigError::Validation {
                    field: "experiment".into(),
                    message: format!("unknown experiment {name:?}"),
                })
                .into());
            };
            print!("{}", e.config);
            Ok(ExitCode::SUCCESS)
        }
        Command::Convergence { config, refine, sizes, order, t_end } => {
            let mut cfg = load(&config)?;
            if let Some(o) = order {
                cfg.scheme.kind = match cfg.scheme.kind {
                    SchemeKind::Compact { .. } => SchemeKind::Compact { order: o },
                    SchemeKind::Mixed { .. } => SchemeKind::Mixed { order_y: o },
                    SchemeKind::Spectral => bail!("--order does not apply to the spectral scheme"),
                };
            }
            if let Some(t) = t_end {
                cfg.time.t_end = t;
            }
            cfg.validate().map_err(RunError::from)?;
            let sizes = sizes.unwrap_or_else(|| default_sizes(&cfg, refine));
            let report = convergence_sweep(&cfg, refine, &sizes)?;
            println!(
                "refine {}, scheme {}, t = {}",
                if refine == RefineAxis::X { "x" } else { "y" },
                cfg.scheme.kind.name(),
                cfg.time.t_end
            );
            println!("{:>6} {:>12} {:>12} {:>7}", "n", "h", "l2_error", "slope");
            for (i, p) in report.points.iter().enumerate() {
                let slope = match i {
                    0 => "-".to_string(),
                    _ => format!("{:.2}", report.pairwise_slopes[i - 1]),
                };
                println!("{:>6} {:>12.6} {:>12.4e} {:>7}", p.n, p.h, p.l2_error, slope);
            }
            println!("fitted slope: {:.3}", report.fitted_slope);
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli).context("kp failed") {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {:#}", err);
            let code = err.downcast_ref::<RunError>().map_or(1, RunError::exit_code);
            ExitCode::from(code as u8)
        }
    }
}
