use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use mbgan::harness::{
    dump_data, load_config, plot_checkpoint, resume, run_config_file, run_preset, PRESET_NAMES,
};
use mbgan::synthdata::RingMixture;
use mbgan::Error;

/// Microbatch multi-discriminator GAN experiments on a 2D ring of Gaussians.
///
/// Set MBGAN_LOG (e.g. `info`, `debug`) to control log output.
#[derive(Parser)]
#[command(name = "mbgan", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train from a JSON config.
    Run {
        config: PathBuf,
        /// Overrides the config's seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a built-in experiment.
    Preset {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(PRESET_NAMES))]
        name: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Continue a checkpointed run up to the config's iteration count.
    Resume {
        checkpoint: PathBuf,
        config: PathBuf,
        /// Defaults to the checkpoint's directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print real samples as x,y CSV.
    DumpData {
        config: PathBuf,
        #[arg(long, default_value_t = 1000)]
        n: usize,
    },
    /// Render a checkpoint's generator as an SVG scatter plot.
    Plot {
        checkpoint: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Config whose dataset supplies the real points.
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

fn execute(cli: Cli) -> mbgan::Result<()> {
    match cli.command {
        Command::Run { config, seed, out } => {
            let outcome = run_config_file(&config, seed, &out)?;
            if let Some(last) = outcome.records.last() {
                println!(
                    "iteration {}: {} modes, hq {:.3}, alpha {:.4}",
                    last.iteration, last.modes_captured, last.hq_fraction, last.alpha
                );
            }
        }
        Command::Preset { name, seed, out } => {
            for (label, outcome) in run_preset(&name, seed, &out)? {
                if let Some(last) = outcome.records.last() {
                    let label = if label.is_empty() {
                        name.as_str()
                    } else {
                        label.as_str()
                    };
                    println!(
                        "{label}: {} modes, hq {:.3}, alpha {:.4}",
                        last.modes_captured, last.hq_fraction, last.alpha
                    );
                }
            }
        }
        Command::Resume {
            checkpoint,
            config,
            out,
        } => {
            let cfg = load_config(&config)?;
            let dir = out.unwrap_or_else(|| {
                checkpoint
                    .parent()
                    .filter(|p| !p.as_os_str().is_empty())
                    .unwrap_or(Path::new("."))
                    .to_path_buf()
            });
            let outcome = resume(&checkpoint, &cfg, &dir)?;
            println!("resumed to iteration {}", outcome.trainer.iteration());
        }
        Command::DumpData { config, n } => {
            print!("{}", dump_data(&load_config(&config)?, n));
        }
        Command::Plot {
            checkpoint,
            out,
            config,
        } => {
            let dataset = match config {
                Some(path) => load_config(&path)?.dataset,
                None => RingMixture::default(),
            };
            plot_checkpoint(&checkpoint, &dataset, &out)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("MBGAN_LOG", "warn")).init();
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::ConfigInvalid { .. } => ExitCode::from(2),
                _ => ExitCode::FAILURE,
            }
        }
    }
}
