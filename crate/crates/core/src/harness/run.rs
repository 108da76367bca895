use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::SeedableRng;

use super::config::{echo_config, load_config};
use super::presets::preset;
use super::svg::emit_scatter_svg;
use crate::metrics::{eval_rng, evaluate, MetricsRecord};
use crate::models::RawCheckpoint;
use crate::ndcore::{Activation, Dense, Matrix, Mlp};
use crate::synthdata::{sample_latent, sample_real, RingMixture};
use crate::trainer::{TrainConfig, Trainer};
use crate::{Error, Result, RunRng};

pub const METRICS_FILE: &str = "metrics.csv";
pub const CONFIG_ECHO_FILE: &str = "config-echo.json";
pub const CHECKPOINT_FILE: &str = "checkpoint.mbgn";
pub const FINAL_CHECKPOINT_FILE: &str = "final.mbgn";
pub const ALPHA_EVOLUTION_FILE: &str = "alpha-evolution.csv";
/// Points of each kind drawn into a scatter plot.
pub const PLOT_SAMPLES: usize = 1024;

#[derive(Debug)]
pub struct RunOutcome {
    pub trainer: Trainer,
    /// Records produced by this invocation, in iteration order.
    pub records: Vec<MetricsRecord>,
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

pub fn plot_name(iteration: u64) -> String {
    format!("plot-{iteration:06}.svg")
}

/// Scatter plot of the trainer's generator against fresh real samples.
pub fn plot_trainer(trainer: &Trainer, path: &Path) -> Result<()> {
    let cfg = trainer.config();
    let mut rng = eval_rng(cfg.seed ^ 0x9107, trainer.iteration());
    let fake = trainer.sample_generator(PLOT_SAMPLES, &mut rng)?;
    let real = sample_real(&cfg.dataset, PLOT_SAMPLES, &mut rng);
    emit_scatter_svg(&real, &fake, path)
}

fn train_until_done(trainer: &mut Trainer, out_dir: &Path, csv: &mut String) -> Result<Vec<MetricsRecord>> {
    let cfg = trainer.config().clone();
    let csv_path = out_dir.join(METRICS_FILE);
    let mut records = Vec::new();
    while trainer.iteration() < cfg.iterations {
        let stats = trainer.train_step()?;
        let it = trainer.iteration();
        if it.is_multiple_of(cfg.checkpoint_every) || it == cfg.iterations {
            let record = evaluate(trainer, &stats)?;
            log::info!(
                "iter {it}: alpha {:.4} modes {} hq {:.3} intra_fid {:.5} fid {:.4}",
                record.alpha,
                record.modes_captured,
                record.hq_fraction,
                record.intra_fid,
                record.fid_to_real
            );
            let _ = writeln!(csv, "{}", record.csv_row());
            write_file(&csv_path, csv)?;
            trainer.to_checkpoint().write(&out_dir.join(CHECKPOINT_FILE))?;
            records.push(record);
        }
        if cfg.plot_every > 0 && it.is_multiple_of(cfg.plot_every) {
            plot_trainer(trainer, &out_dir.join(plot_name(it)))?;
        }
    }
    trainer
        .to_checkpoint()
        .write(&out_dir.join(FINAL_CHECKPOINT_FILE))?;
    plot_trainer(trainer, &out_dir.join(plot_name(trainer.iteration())))?;
    Ok(records)
}

/// Trains `config` from scratch, writing every artifact into `out_dir`.
pub fn run_experiment(config: &TrainConfig, out_dir: &Path) -> Result<RunOutcome> {
    config.validate()?;
    create_dir(out_dir)?;
    write_file(&out_dir.join(CONFIG_ECHO_FILE), &echo_config(config))?;
    log::info!(
        "run {} seed {} -> {}",
        config.alpha.label(),
        config.seed,
        out_dir.display()
    );
    let mut trainer = Trainer::new(config.clone())?;
    let mut csv = format!("{}\n", MetricsRecord::CSV_HEADER);
    write_file(&out_dir.join(METRICS_FILE), &csv)?;
    let records = train_until_done(&mut trainer, out_dir, &mut csv)?;
    Ok(RunOutcome { trainer, records })
}

/// Loads a config file, optionally overrides its seed, and runs it.
pub fn run_config_file(config_path: &Path, seed: Option<u64>, out_dir: &Path) -> Result<RunOutcome> {
    let mut config = load_config(config_path)?;
    if let Some(seed) = seed {
        config.seed = seed;
    }
    run_experiment(&config, out_dir)
}

/// Continues a checkpointed run up to `config.iterations`. Rows of an
/// existing `metrics.csv` in `out_dir` past the checkpoint are dropped before
/// new rows are appended.
pub fn resume(checkpoint_path: &Path, config: &TrainConfig, out_dir: &Path) -> Result<RunOutcome> {
    let raw = RawCheckpoint::read(checkpoint_path)?;
    let start = raw.iteration;
    let mut trainer = Trainer::from_checkpoint(config.clone(), raw)?;
    create_dir(out_dir)?;
    write_file(&out_dir.join(CONFIG_ECHO_FILE), &echo_config(trainer.config()))?;
    log::info!("resume from iteration {start} -> {}", out_dir.display());

    let csv_path = out_dir.join(METRICS_FILE);
    let mut csv = format!("{}\n", MetricsRecord::CSV_HEADER);
    if let Ok(existing) = fs::read_to_string(&csv_path) {
        for line in existing.lines().skip(1) {
            let it: Option<u64> = line.split(',').next().and_then(|f| f.parse().ok());
            if it.is_some_and(|it| it <= start) {
                csv.push_str(line);
                csv.push('\n');
            }
        }
    }
    write_file(&csv_path, &csv)?;
    let records = train_until_done(&mut trainer, out_dir, &mut csv)?;
    Ok(RunOutcome { trainer, records })
}

/// Runs every sub-run of a preset, each in `out_dir/<label>`.
pub fn run_preset(name: &str, seed: u64, out_dir: &Path) -> Result<Vec<(String, RunOutcome)>> {
    let p = preset(name, seed)?;
    create_dir(out_dir)?;
    let mut outcomes = Vec::new();
    for run in &p.runs {
        let dir: PathBuf = if run.label.is_empty() {
            out_dir.to_path_buf()
        } else {
            out_dir.join(&run.label)
        };
        outcomes.push((run.label.clone(), run_experiment(&run.config, &dir)?));
    }
    if p.alpha_evolution {
        write_file(
            &out_dir.join(ALPHA_EVOLUTION_FILE),
            &alpha_evolution_csv(&outcomes),
        )?;
    }
    Ok(outcomes)
}

/// `iteration,<label>...` with one α column per run.
pub fn alpha_evolution_csv(outcomes: &[(String, RunOutcome)]) -> String {
    let mut out = String::from("iteration");
    for (label, _) in outcomes {
        out.push(',');
        out.push_str(label);
    }
    out.push('\n');
    let rows = outcomes.iter().map(|(_, o)| o.records.len()).min().unwrap_or(0);
    for i in 0..rows {
        let _ = write!(out, "{}", outcomes[0].1.records[i].iteration);
        for (_, o) in outcomes {
            let _ = write!(out, ",{}", o.records[i].alpha);
        }
        out.push('\n');
    }
    out
}

/// Rebuilds the generator stored in a checkpoint from its tensor shapes:
/// Relu on every hidden layer, linear output.
pub fn generator_from_checkpoint(raw: &RawCheckpoint) -> Result<Mlp> {
    let params = &raw.generator.params;
    if params.is_empty() || !params.len().is_multiple_of(2) {
        return Err(Error::CheckpointCorrupt(format!(
            "generator has {} tensors, expected weight/bias pairs",
            params.len()
        )));
    }
    let n = params.len() / 2;
    let layers = params
        .chunks(2)
        .enumerate()
        .map(|(i, wb)| Dense {
            weight: wb[0].clone(),
            bias: wb[1].clone(),
            activation: if i + 1 == n {
                Activation::Linear
            } else {
                Activation::Relu
            },
        })
        .collect();
    Mlp::new(layers)
}

/// Plots a checkpoint's generator against the ring `dataset`.
pub fn plot_checkpoint(checkpoint_path: &Path, dataset: &RingMixture, out_file: &Path) -> Result<()> {
    let raw = RawCheckpoint::read(checkpoint_path)?;
    let g = generator_from_checkpoint(&raw)?;
    let mut rng = eval_rng(raw.seed ^ 0x9107, raw.iteration);
    let z = sample_latent(g.layers[0].weight.rows(), PLOT_SAMPLES, &mut rng);
    let fake = g.predict(&z)?;
    let real = sample_real(dataset, PLOT_SAMPLES, &mut rng);
    emit_scatter_svg(&real, &fake, out_file)
}

/// `n` real samples as `x,y` CSV, drawn with the config's seed.
pub fn dump_data(config: &TrainConfig, n: usize) -> String {
    let pts: Matrix = sample_real(&config.dataset, n, &mut RunRng::seed_from_u64(config.seed));
    let mut out = String::from("x,y\n");
    for p in pts.iter_rows() {
        let _ = writeln!(out, "{},{}", p[0], p[1]);
    }
    out
}
