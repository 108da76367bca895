//! Sample-quality and diversity statistics for 2D generators.

mod frechet;

pub use frechet::{
    fit_moments, frechet_distance, min_eigenvalue, mul2, sqrt_of_product, sqrt_psd, GaussianMoments, Sym2,
    PSD_TOLERANCE,
};

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::ndcore::Matrix;
use crate::synthdata::{sample_real, RingMixture};
use crate::trainer::{StepStats, Trainer};
use crate::{Error, Result, RunRng};

/// Fraction of all generated samples a mode must hold to count as captured.
pub const CAPTURE_SHARE: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvalConfig {
    /// Generated and real samples drawn per evaluation.
    pub eval_samples: usize,
    pub intra_fid_subset: usize,
    pub threshold_stds: f64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            eval_samples: 8192,
            intra_fid_subset: 4096,
            threshold_stds: 3.0,
        }
    }
}

impl EvalConfig {
    pub fn validate(&self) -> Result<()> {
        if self.intra_fid_subset < 2 {
            return Err(Error::config("metrics.intra_fid_subset", "must be at least 2"));
        }
        if self.eval_samples < 2 * self.intra_fid_subset {
            return Err(Error::config(
                "metrics.eval_samples",
                "must be at least twice metrics.intra_fid_subset",
            ));
        }
        if !(self.threshold_stds.is_finite() && self.threshold_stds > 0.0) {
            return Err(Error::config(
                "metrics.threshold_stds",
                "must be finite and positive",
            ));
        }
        Ok(())
    }
}

/// Fréchet distance between two disjoint random subsets of `generated`.
pub fn intra_fid<R: Rng + ?Sized>(generated: &Matrix, subset_size: usize, rng: &mut R) -> Result<f64> {
    let needed = 2 * subset_size.max(2);
    if generated.rows() < needed {
        return Err(Error::TooFewSamples {
            needed,
            got: generated.rows(),
        });
    }
    let picked = sample(rng, generated.rows(), 2 * subset_size).into_vec();
    let a = fit_moments(&generated.select_rows(&picked[..subset_size]))?;
    let b = fit_moments(&generated.select_rows(&picked[subset_size..]))?;
    frechet_distance(&a, &b)
}

pub fn cumulative_intra_fid(records: &[MetricsRecord]) -> f64 {
    records.iter().map(|r| r.intra_fid).sum::<f64>() + 0.0
}

/// Mean and minimum of `fid_to_real` across records.
pub fn mean_min_fid(records: &[MetricsRecord]) -> Result<(f64, f64)> {
    if records.is_empty() {
        return Err(Error::EmptySequence);
    }
    let mean = records.iter().map(|r| r.fid_to_real).sum::<f64>() / records.len() as f64;
    let min = records
        .iter()
        .map(|r| r.fid_to_real)
        .fold(f64::INFINITY, f64::min);
    Ok((mean, min))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeCoverage {
    pub modes_captured: usize,
    pub hq_fraction: f64,
    /// Per mode, the fraction of all samples that are high quality and nearest
    /// to it. Sums to `hq_fraction`.
    pub per_mode_share: Vec<f64>,
}

impl ModeCoverage {
    /// Shannon entropy (nats) of `per_mode_share`, with `0 · ln 0 = 0`.
    pub fn entropy(&self) -> f64 {
        mode_entropy(&self.per_mode_share)
    }
}

pub fn mode_entropy(shares: &[f64]) -> f64 {
    // `+ 0.0` turns the empty sum's −0.0 into 0.0.
    shares
        .iter()
        .filter(|&&s| s > 0.0)
        .map(|&s| -s * s.ln())
        .sum::<f64>()
        + 0.0
}

/// A sample is high quality when it lies within `threshold_stds · mode_std`
/// of its nearest center.
pub fn mode_coverage(generated: &Matrix, mix: &RingMixture, threshold_stds: f64) -> ModeCoverage {
    let n = generated.rows();
    let mut counts = vec![0usize; mix.n_modes];
    let radius = threshold_stds * mix.mode_std;
    for p in generated.iter_rows() {
        let (k, d) = mix.nearest_center(p);
        if d <= radius {
            counts[k] += 1;
        }
    }
    if n == 0 {
        return ModeCoverage {
            modes_captured: 0,
            hq_fraction: 0.0,
            per_mode_share: vec![0.0; mix.n_modes],
        };
    }
    let per_mode_share: Vec<f64> = counts.iter().map(|&c| c as f64 / n as f64).collect();
    let hq = counts.iter().sum::<usize>() as f64 / n as f64;
    ModeCoverage {
        modes_captured: per_mode_share.iter().filter(|&&s| s >= CAPTURE_SHARE).count(),
        hq_fraction: hq,
        per_mode_share,
    }
}

/// One evaluation checkpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRecord {
    pub iteration: u64,
    pub alpha: f64,
    pub beta: f64,
    pub intra_fid: f64,
    pub fid_to_real: f64,
    pub modes_captured: usize,
    pub hq_fraction: f64,
    pub per_mode_share: Vec<f64>,
    pub d_losses: Vec<f64>,
    pub g_loss: f64,
}

impl MetricsRecord {
    pub const CSV_HEADER: &'static str =
        "iteration,alpha,beta,intra_fid,fid_to_real,modes_captured,hq_fraction,g_loss,d_loss_mean";

    pub fn d_loss_mean(&self) -> f64 {
        if self.d_losses.is_empty() {
            0.0
        } else {
            self.d_losses.iter().sum::<f64>() / self.d_losses.len() as f64
        }
    }

    pub fn mode_entropy(&self) -> f64 {
        mode_entropy(&self.per_mode_share)
    }

    /// CSV row matching [`Self::CSV_HEADER`]. Floats use Rust's shortest
    /// round-trip formatting.
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.iteration,
            self.alpha,
            self.beta,
            self.intra_fid,
            self.fid_to_real,
            self.modes_captured,
            self.hq_fraction,
            self.g_loss,
            self.d_loss_mean()
        )
    }
}

/// Rng for the evaluation at `iteration`. It runs on its own ChaCha stream so
/// evaluating never perturbs the training trajectory.
pub fn eval_rng(seed: u64, iteration: u64) -> RunRng {
    let mut rng = RunRng::seed_from_u64(seed);
    rng.set_stream(iteration.wrapping_add(1));
    rng
}

/// Evaluates the trainer's current generator. `last` holds the losses of the
/// most recent step.
pub fn evaluate(trainer: &Trainer, last: &StepStats) -> Result<MetricsRecord> {
    let cfg = trainer.config();
    let eval = cfg.metrics;
    let mut rng = eval_rng(cfg.seed, trainer.iteration());
    let fake = trainer.sample_generator(eval.eval_samples, &mut rng)?;
    let real = sample_real(&cfg.dataset, eval.eval_samples, &mut rng);
    let intra = intra_fid(&fake, eval.intra_fid_subset, &mut rng)?;
    let fid_to_real = frechet_distance(&fit_moments(&fake)?, &fit_moments(&real)?)?;
    let cov = mode_coverage(&fake, &cfg.dataset, eval.threshold_stds);
    Ok(MetricsRecord {
        iteration: trainer.iteration(),
        alpha: trainer.alpha().value(),
        beta: trainer.alpha().beta,
        intra_fid: intra,
        fid_to_real,
        modes_captured: cov.modes_captured,
        hq_fraction: cov.hq_fraction,
        per_mode_share: cov.per_mode_share,
        d_losses: last.d_losses.clone(),
        g_loss: last.g_loss,
    })
}
