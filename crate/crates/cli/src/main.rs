use std::path::{Path, PathBuf};
use std::process::ExitCode;

use aol_core::harness::{
    pretrain, pretrain_loss, run_experiment, run_sweep, save_stream, save_weights,
    ExperimentConfig, SweepAxis,
};
use aol_core::scenegen::{generate_stream, preset};
use aol_core::AolError;
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "aol",
    version,
    about = "Adaptive online learning for trajectory prediction"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and print its summary as JSON.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run the experiment once per value of one configuration axis.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// n_slaves, k, epochs, replacement or copy_best.
        #[arg(long)]
        axis: String,
        /// Comma-separated values, e.g. `1,2,5,10,20`.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<String>,
    },
    /// Write a preset stream as JSON lines.
    GenStream {
        #[arg(long)]
        preset: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Pretrain the configured predictor and save an AOLW1 weight file.
    Pretrain {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn exit_code(err: &AolError) -> u8 {
    match err {
        AolError::Io { .. } | AolError::Csv(_) => 3,
        AolError::Config(_)
        | AolError::Json(_)
        | AolError::UnknownArch(_)
        | AolError::Parse { .. } => 2,
        AolError::Contract(_) | AolError::EmptyBatch => 1,
    }
}

fn load(path: &Path) -> Result<ExperimentConfig, AolError> {
    let cfg = ExperimentConfig::load(path)?;
    cfg.validate()?;
    Ok(cfg)
}

fn execute(command: Command) -> Result<(), AolError> {
    match command {
        Command::Run { config } => {
            let outcome = run_experiment(&load(&config)?)?;
            println!("{}", serde_json::to_string_pretty(&outcome.summary)?);
        }
        Command::Sweep {
            config,
            axis,
            values,
        } => {
            let cfg = load(&config)?;
            let axis: SweepAxis = axis.parse()?;
            let table = run_sweep(&cfg, axis, &values)?;
            println!("value,mean_ade,mean_fde");
            for v in &values {
                let v = v.trim();
                println!(
                    "{v},{:.4},{:.4}",
                    table.pooled(v, |r| r.mean_ade),
                    table.pooled(v, |r| r.mean_fde)
                );
            }
        }
        Command::GenStream {
            preset: name,
            out,
            seed,
        } => {
            let samples = generate_stream(&preset(&name)?.with_seed(seed))?;
            save_stream(&samples, &out)?;
            eprintln!("wrote {} samples to {}", samples.len(), out.display());
        }
        Command::Pretrain { config, out } => {
            let cfg = load(&config)?;
            let w = pretrain(&cfg)?;
            save_weights(&w, &cfg.predictor, &out)?;
            eprintln!(
                "wrote {} parameters to {} (pretrain loss {:.6e})",
                w.len(),
                out.display(),
                pretrain_loss(&cfg, 0, &w)?
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
