//! Generator-only training against discriminators that never move.
//!
//! With α = 0 every sample is pushed toward the same maximizer of the
//! discriminators' scores, so the generator loses its dependence on `z`. With
//! α > 0 each discriminator's per-sample optimum is a level set
//! (`D_k = α / (1 + α)`) rather than a point, and the complement term pushes
//! samples apart.

use rand::SeedableRng;
use rand_distr::{Distribution, Normal, StandardNormal};

use super::{generator_objective, partition, TrainConfig};
use crate::models::{init_with_rng, AdamState, Direction, DiscriminatorSpec, NetworkSpec};
use crate::ndcore::{Dense, Matrix, Mlp};
use crate::synthdata::sample_latent;
use crate::{Result, RunRng};

/// Number of latents used to measure the generator's output spread.
pub const PROBE_SAMPLES: usize = 4096;

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSpread {
    pub mean_pairwise_distance: f64,
    pub per_dim_std: Vec<f64>,
}

impl OutputSpread {
    pub fn of(samples: &Matrix) -> Self {
        let n = samples.rows();
        let d = samples.cols();
        let mut per_dim_std = vec![0.0; d];
        if n > 1 {
            for (c, s) in per_dim_std.iter_mut().enumerate() {
                let mean = (0..n).map(|r| samples.get(r, c)).sum::<f64>() / n as f64;
                let var = (0..n).map(|r| (samples.get(r, c) - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
                *s = var.sqrt();
            }
        }
        let mut total = 0.0;
        for i in 0..n {
            let a = samples.row(i);
            for j in i + 1..n {
                let b = samples.row(j);
                total += a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
            }
        }
        let pairs = n * n.saturating_sub(1) / 2;
        Self {
            mean_pairwise_distance: if pairs > 0 { total / pairs as f64 } else { 0.0 },
            per_dim_std,
        }
    }

    pub fn max_std(&self) -> f64 {
        self.per_dim_std.iter().cloned().fold(0.0, f64::max)
    }

    pub fn min_std(&self) -> f64 {
        self.per_dim_std.iter().cloned().fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone)]
pub struct FrozenRun {
    pub generator: Mlp,
    pub initial_spread: OutputSpread,
    pub spread: OutputSpread,
}

/// Trains a freshly initialized generator for `steps` iterations against the
/// fixed `discriminators`, with a constant α and no β updates. The latent
/// probe comes from its own stream derived from `seed`, so runs that differ
/// only in α are measured on identical latents.
pub fn frozen_d_g_training(
    config: &TrainConfig,
    discriminators: &[Mlp],
    alpha: f64,
    steps: u64,
    seed: u64,
) -> Result<FrozenRun> {
    let mut rng = RunRng::seed_from_u64(seed);
    let mut generator = init_with_rng(&config.generator, &mut rng);
    let mut adam = AdamState::new(config.optimizer, generator.tensors());
    let latent = config.generator.latent_dim;
    let head = config.discriminator.head;
    let b = config.batch_size;

    let probe = sample_latent(latent, PROBE_SAMPLES, &mut RunRng::seed_from_u64(seed ^ 0x5eed));
    let initial_spread = OutputSpread::of(&generator.predict(&probe)?);

    for step in 0..steps {
        let z = sample_latent(latent, b, &mut rng);
        let part = partition(b, discriminators.len(), &mut rng)?;
        let (fake, tape) = generator.forward(&z)?;
        let own: Vec<Matrix> = part.ranges.iter().map(|r| fake.slice_rows(r.clone())).collect();
        let comp: Vec<Matrix> = part.complements.iter().map(|c| fake.select_rows(c)).collect();
        let (_, _, fake_grad) = generator_objective(discriminators, &part, &own, &comp, alpha, head)?;
        let back = generator.backward_with(&tape, &fake_grad, false)?;
        adam.step(generator.tensors_mut(), &back.params.tensors, Direction::Descend)
            .map_err(|e| e.with_gradient_context(format!("frozen step {}", step + 1)))?;
    }

    let spread = OutputSpread::of(&generator.predict(&probe)?);
    Ok(FrozenRun {
        generator,
        initial_spread,
        spread,
    })
}

/// Fixed discriminators whose raw score is concave with a finite maximizer.
///
/// The score is `c − Σ_j |u_j| · relu(w_j·x + b_j)`: Relu units with random
/// directions and offsets, all read out with negative weights, so the score
/// falls off in every direction and its argmax `x*` exists. `c` places the
/// score at the origin at `+2`.
pub fn probe_discriminators(spec: &DiscriminatorSpec, count: usize, seed: u64) -> Vec<Mlp> {
    let mut rng = RunRng::seed_from_u64(seed);
    let offsets = Normal::new(0.0, 0.5).expect("valid std");
    (0..count)
        .map(|_| {
            let plan = spec.layer_plan();
            let mut net = init_with_rng(spec, &mut rng);
            let last = net.layers.len() - 1;
            for layer in &mut net.layers[..last] {
                for b in layer.bias.as_mut_slice() {
                    *b = offsets.sample(&mut rng);
                }
            }
            let (fan_in, _, _) = plan[last];
            let readout: &mut Dense = &mut net.layers[last];
            for w in readout.weight.as_mut_slice() {
                let n: f64 = StandardNormal.sample(&mut rng);
                *w = -n.abs() * (1.0 / fan_in as f64).sqrt();
            }
            readout.bias.as_mut_slice()[0] = 0.0;
            let at_origin = net
                .predict(&Matrix::zeros(1, spec.input_dim))
                .expect("widths")
                .get(0, 0);
            net.layers[last].bias.as_mut_slice()[0] = 2.0 - at_origin;
            net
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spread_of_identical_points_is_zero() {
        let s = OutputSpread::of(&Matrix::filled(10, 2, 1.5));
        assert_eq!(s.mean_pairwise_distance, 0.0);
        assert_eq!(s.per_dim_std, vec![0.0, 0.0]);
    }

    #[test]
    fn spread_of_two_points() {
        let s = OutputSpread::of(&Matrix::from_rows(&[vec![0.0, 0.0], vec![3.0, 4.0]]).unwrap());
        assert_eq!(s.mean_pairwise_distance, 5.0);
        assert!((s.per_dim_std[0] - (4.5f64).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn probe_scores_are_concave() {
        let ds = probe_discriminators(&DiscriminatorSpec::default(), 3, 1);
        for d in &ds {
            let at = |x: f64, y: f64| {
                d.predict(&Matrix::from_vec(1, 2, vec![x, y]).unwrap())
                    .unwrap()
                    .get(0, 0)
            };
            assert!((at(0.0, 0.0) - 2.0).abs() < 1e-12);
            // midpoint concavity along random chords
            for i in 0..50 {
                let t = i as f64;
                let (ax, ay) = ((t * 1.3).sin() * 4.0, (t * 0.7).cos() * 4.0);
                let (bx, by) = ((t * 2.1).cos() * 4.0, (t * 0.3).sin() * 4.0);
                let mid = at((ax + bx) / 2.0, (ay + by) / 2.0);
                assert!(mid >= (at(ax, ay) + at(bx, by)) / 2.0 - 1e-12);
            }
        }
    }

    #[test]
    fn zero_steps_leave_generator_untouched() {
        let cfg = super::super::tests::tiny_config(2, super::super::AlphaConfig::Static { value: 0.0 });
        let ds = probe_discriminators(&cfg.discriminator, 2, 0);
        let run = frozen_d_g_training(&cfg, &ds, 0.0, 0, 9).unwrap();
        let fresh = init_with_rng(&cfg.generator, &mut RunRng::seed_from_u64(9));
        assert_eq!(run.generator, fresh);
        assert_eq!(run.spread, run.initial_spread);
    }
}
