//! The alternating multi-discriminator training loop.
//!
//! Each iteration draws `B` latents and `B` real points, partitions both into
//! `K` contiguous microbatches, ascends every discriminator on its own
//! objective (α held constant), then takes one descending generator step
//! against the updated discriminators on the same latents, and finally moves β
//! when α is learned.
//!
//! All randomness comes from one ChaCha stream in a fixed order: generator
//! init, discriminator inits `1..K`, then per iteration latents, real points
//! and complement draws for `k = 1..K`.

mod frozen;
mod loss;
mod partition;

use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use crate::alpha::{AlphaFunction, AlphaMode, AlphaSchedule};
use crate::metrics::EvalConfig;
use crate::models::{
    init_with_rng, AdamConfig, AdamState, Checkpoint, Direction, DiscriminatorSpec, GeneratorSpec,
    NetworkState, RawCheckpoint, RngState,
};
use crate::ndcore::{Matrix, Mlp, MlpGrads};
use crate::synthdata::{sample_latent, sample_real, RingMixture};
use crate::{Error, Result, RunRng};

pub use frozen::{frozen_d_g_training, probe_discriminators, FrozenRun, OutputSpread};
pub use loss::{d_loss, d_loss_and_grad, g_loss, generator_term, GeneratorTerm};
pub use partition::{micro_size, partition, MicrobatchPartition};

/// How α is produced, as written in config files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase", deny_unknown_fields)]
pub enum AlphaConfig {
    Static {
        value: f64,
    },
    Learned {
        function: AlphaFunction,
        /// Defaults to the function's standard starting value.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        beta_init: Option<f64>,
    },
}

impl Default for AlphaConfig {
    fn default() -> Self {
        AlphaConfig::Learned {
            function: AlphaFunction::Sigm,
            beta_init: None,
        }
    }
}

impl AlphaConfig {
    pub fn schedule(&self, adam: AdamConfig) -> Result<AlphaSchedule> {
        match *self {
            AlphaConfig::Static { value } => AlphaSchedule::fixed(value),
            AlphaConfig::Learned { function, beta_init } => {
                AlphaSchedule::learned(function, beta_init.unwrap_or(function.default_beta()), adam)
            }
        }
    }

    /// Fills in defaults so the echoed config is fully explicit.
    pub fn resolved(&self) -> Self {
        match *self {
            AlphaConfig::Learned {
                function,
                beta_init: None,
            } => AlphaConfig::Learned {
                function,
                beta_init: Some(function.default_beta()),
            },
            other => other,
        }
    }

    pub fn label(&self) -> String {
        match self {
            AlphaConfig::Static { value } => format!("static-{value:.1}"),
            AlphaConfig::Learned {
                function,
                beta_init: None,
            } => function.name().to_string(),
            AlphaConfig::Learned {
                function,
                beta_init: Some(b),
            } => format!("{}-beta{b}", function.name()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainConfig {
    /// Number of discriminators `K`.
    pub discriminators: usize,
    /// Minibatch size `B`; must be a multiple of `K`.
    pub batch_size: usize,
    pub iterations: u64,
    pub seed: u64,
    pub alpha: AlphaConfig,
    pub dataset: RingMixture,
    pub generator: GeneratorSpec,
    pub discriminator: DiscriminatorSpec,
    pub optimizer: AdamConfig,
    /// Iterations between metric snapshots and checkpoint writes.
    pub checkpoint_every: u64,
    /// Iterations between scatter plots; 0 disables intermediate plots.
    pub plot_every: u64,
    pub metrics: EvalConfig,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            discriminators: 8,
            batch_size: 512,
            iterations: 25_000,
            seed: 0,
            alpha: AlphaConfig::default(),
            dataset: RingMixture::default(),
            generator: GeneratorSpec::default(),
            discriminator: DiscriminatorSpec::default(),
            optimizer: AdamConfig::default(),
            checkpoint_every: 1000,
            plot_every: 5000,
            metrics: EvalConfig::default(),
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.discriminators == 0 {
            return Err(Error::config("discriminators", "must be at least 1"));
        }
        if self.batch_size == 0 || !self.batch_size.is_multiple_of(self.discriminators) {
            return Err(Error::config(
                "batch_size",
                format!(
                    "{} is not a positive multiple of discriminators = {}",
                    self.batch_size, self.discriminators
                ),
            ));
        }
        if self.checkpoint_every == 0 {
            return Err(Error::config("checkpoint_every", "must be at least 1"));
        }
        self.dataset.validate()?;
        self.generator.validate(2)?;
        self.discriminator.validate(2)?;
        self.optimizer.validate()?;
        self.metrics.validate()?;
        self.alpha.schedule(self.optimizer)?;
        Ok(())
    }

    pub fn micro_size(&self) -> usize {
        self.batch_size / self.discriminators
    }

    pub fn resolved(&self) -> Self {
        Self {
            alpha: self.alpha.resolved(),
            ..self.clone()
        }
    }
}

/// Losses and α observed during one iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct StepStats {
    /// `V_k` per discriminator, evaluated before its update.
    pub d_losses: Vec<f64>,
    pub g_loss: f64,
    pub dloss_dalpha: f64,
    /// α used throughout this iteration.
    pub alpha: f64,
}

#[derive(Debug, Clone)]
pub struct Trainer {
    config: TrainConfig,
    generator: Mlp,
    g_adam: AdamState,
    discriminators: Vec<Mlp>,
    d_adams: Vec<AdamState>,
    alpha: AlphaSchedule,
    rng: RunRng,
    iteration: u64,
}

impl Trainer {
    pub fn new(config: TrainConfig) -> Result<Self> {
        config.validate()?;
        let mut rng = RunRng::seed_from_u64(config.seed);
        let generator = init_with_rng(&config.generator, &mut rng);
        let discriminators: Vec<Mlp> = (0..config.discriminators)
            .map(|_| init_with_rng(&config.discriminator, &mut rng))
            .collect();
        let g_adam = AdamState::new(config.optimizer, generator.tensors());
        let d_adams = discriminators
            .iter()
            .map(|d| AdamState::new(config.optimizer, d.tensors()))
            .collect();
        let alpha = config.alpha.schedule(config.optimizer)?;
        Ok(Self {
            config,
            generator,
            g_adam,
            discriminators,
            d_adams,
            alpha,
            rng,
            iteration: 0,
        })
    }

    pub fn config(&self) -> &TrainConfig {
        &self.config
    }

    pub fn iteration(&self) -> u64 {
        self.iteration
    }

    pub fn generator(&self) -> &Mlp {
        &self.generator
    }

    pub fn discriminators(&self) -> &[Mlp] {
        &self.discriminators
    }

    pub fn alpha(&self) -> &AlphaSchedule {
        &self.alpha
    }

    /// Generator samples for `n` latents drawn from `rng`.
    pub fn sample_generator<R: rand::Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<Matrix> {
        let z = sample_latent(self.config.generator.latent_dim, n, rng);
        self.generator.predict(&z)
    }

    pub fn train_step(&mut self) -> Result<StepStats> {
        let it = self.iteration + 1;
        let b = self.config.batch_size;
        let head = self.config.discriminator.head;
        let alpha = self.alpha.value();

        let z = sample_latent(self.config.generator.latent_dim, b, &mut self.rng);
        let x = sample_real(&self.config.dataset, b, &mut self.rng);
        let part = partition(b, self.config.discriminators, &mut self.rng)?;
        let (fake, g_tape) = self.generator.forward(&z)?;

        let own: Vec<Matrix> = part.ranges.iter().map(|r| fake.slice_rows(r.clone())).collect();
        let comp: Vec<Matrix> = part.complements.iter().map(|c| fake.select_rows(c)).collect();

        let mut d_losses = Vec::with_capacity(part.discriminators());
        for k in 0..part.discriminators() {
            let real = x.slice_rows(part.ranges[k].clone());
            let (value, grads) =
                d_loss_and_grad(&self.discriminators[k], &real, &own[k], &comp[k], alpha, head)?;
            self.d_adams[k]
                .step(
                    self.discriminators[k].tensors_mut(),
                    &grads.tensors,
                    Direction::Ascend,
                )
                .map_err(|e| e.with_gradient_context(format!("iteration {it}, discriminator {k}")))?;
            d_losses.push(value);
        }

        let (g_loss, dloss_dalpha, fake_grad) =
            generator_objective(&self.discriminators, &part, &own, &comp, alpha, head)?;
        let back = self.generator.backward_with(&g_tape, &fake_grad, false)?;
        self.g_adam
            .step(
                self.generator.tensors_mut(),
                &back.params.tensors,
                Direction::Descend,
            )
            .map_err(|e| e.with_gradient_context(format!("iteration {it}, generator")))?;

        if self.alpha.is_learned() {
            self.alpha
                .update_beta(dloss_dalpha)
                .map_err(|e| e.with_gradient_context(format!("iteration {it}")))?;
        }
        self.iteration = it;
        Ok(StepStats {
            d_losses,
            g_loss,
            dloss_dalpha,
            alpha,
        })
    }

    pub fn to_checkpoint(&self) -> Checkpoint {
        Checkpoint {
            iteration: self.iteration,
            seed: self.config.seed,
            rng: RngState {
                key: self.rng.get_seed(),
                stream: self.rng.get_stream(),
                word_pos: self.rng.get_word_pos(),
            },
            beta: self.alpha.beta,
            generator: NetworkState {
                params: self.generator.clone(),
                adam: self.g_adam.clone(),
            },
            discriminators: self
                .discriminators
                .iter()
                .zip(&self.d_adams)
                .map(|(d, a)| NetworkState {
                    params: d.clone(),
                    adam: a.clone(),
                })
                .collect(),
            beta_adam: self.alpha.adam.clone(),
        }
    }

    /// Rebuilds a trainer from a checkpoint; every tensor is checked against
    /// the shapes `config` implies.
    pub fn from_checkpoint(config: TrainConfig, raw: RawCheckpoint) -> Result<Self> {
        config.validate()?;
        let mut probe = RunRng::seed_from_u64(0);
        let g_template = init_with_rng(&config.generator, &mut probe);
        let d_template = init_with_rng(&config.discriminator, &mut probe);
        let ck = raw.into_checkpoint(&g_template, &d_template, config.optimizer, config.discriminators)?;

        let mut rng = RunRng::from_seed(ck.rng.key);
        rng.set_stream(ck.rng.stream);
        rng.set_word_pos(ck.rng.word_pos);

        let mut alpha = config.alpha.schedule(config.optimizer)?;
        if let AlphaMode::Learned(_) = alpha.mode {
            alpha.beta = ck.beta.max(alpha.beta_floor);
        }
        alpha.adam = ck.beta_adam;

        let (discriminators, d_adams) = ck.discriminators.into_iter().map(|s| (s.params, s.adam)).unzip();
        Ok(Self {
            config: TrainConfig {
                seed: ck.seed,
                ..config
            },
            generator: ck.generator.params,
            g_adam: ck.generator.adam,
            discriminators,
            d_adams,
            alpha,
            rng,
            iteration: ck.iteration,
        })
    }
}

/// Complete generator loss for latents `z` split by `part`, with `dLoss/dα`
/// and the gradient w.r.t. every generator parameter.
pub fn generator_loss_and_grad(
    generator: &Mlp,
    discriminators: &[Mlp],
    z: &Matrix,
    part: &MicrobatchPartition,
    alpha: f64,
    head: crate::models::DiscriminatorHead,
) -> Result<(f64, f64, MlpGrads)> {
    let (fake, tape) = generator.forward(z)?;
    let own: Vec<Matrix> = part.ranges.iter().map(|r| fake.slice_rows(r.clone())).collect();
    let comp: Vec<Matrix> = part.complements.iter().map(|c| fake.select_rows(c)).collect();
    let (loss, dalpha, fake_grad) = generator_objective(discriminators, part, &own, &comp, alpha, head)?;
    let back = generator.backward_with(&tape, &fake_grad, false)?;
    Ok((loss, dalpha, back.params))
}

/// Generator loss only; the finite-difference counterpart of
/// [`generator_loss_and_grad`].
pub fn generator_loss(
    generator: &Mlp,
    discriminators: &[Mlp],
    z: &Matrix,
    part: &MicrobatchPartition,
    alpha: f64,
    head: crate::models::DiscriminatorHead,
) -> Result<f64> {
    let fake = generator.predict(z)?;
    let own: Vec<Matrix> = part.ranges.iter().map(|r| fake.slice_rows(r.clone())).collect();
    let comp: Vec<Matrix> = part.complements.iter().map(|c| fake.select_rows(c)).collect();
    Ok(g_loss(discriminators, &own, &comp, alpha, head)?.0)
}

/// Generator loss against every discriminator plus its gradient w.r.t. each
/// fake row. A row receives gradient from its own discriminator and from every
/// complement set it was drawn into; contributions are accumulated in `k`
/// order.
pub(crate) fn generator_objective(
    discriminators: &[Mlp],
    part: &MicrobatchPartition,
    own: &[Matrix],
    comp: &[Matrix],
    alpha: f64,
    head: crate::models::DiscriminatorHead,
) -> Result<(f64, f64, Matrix)> {
    let cols = own.first().map_or(0, Matrix::cols);
    let mut fake_grad = Matrix::zeros(part.batch(), cols);
    let mut loss = 0.0;
    let mut dloss_dalpha = 0.0;
    for (k, d) in discriminators.iter().enumerate() {
        let t = generator_term(d, &own[k], &comp[k], alpha, head)?;
        loss += t.value;
        dloss_dalpha += t.dloss_dalpha;
        for (j, row) in part.ranges[k].clone().enumerate() {
            for (g, v) in fake_grad.row_mut(row).iter_mut().zip(t.own_grad.row(j)) {
                *g += v;
            }
        }
        for (j, &row) in part.complements[k].iter().enumerate() {
            for (g, v) in fake_grad.row_mut(row).iter_mut().zip(t.complement_grad.row(j)) {
                *g += v;
            }
        }
    }
    Ok((loss, dloss_dalpha, fake_grad))
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn tiny_config(k: usize, alpha: AlphaConfig) -> TrainConfig {
        TrainConfig {
            discriminators: k,
            batch_size: 8 * k,
            iterations: 10,
            seed: 3,
            alpha,
            generator: GeneratorSpec {
                latent_dim: 6,
                hidden: vec![10, 10],
                output_dim: 2,
            },
            discriminator: DiscriminatorSpec {
                hidden: vec![12],
                ..Default::default()
            },
            ..Default::default()
        }
    }

    #[test]
    fn toy_preset_defaults() {
        let c = TrainConfig::default();
        assert_eq!((c.discriminators, c.batch_size, c.iterations), (8, 512, 25_000));
        assert_eq!(c.micro_size(), 64);
        c.validate().unwrap();
    }

    #[test]
    fn invalid_batch_names_key() {
        let c = TrainConfig {
            batch_size: 510,
            ..Default::default()
        };
        match c.validate() {
            Err(Error::ConfigInvalid { key, .. }) => assert_eq!(key, "batch_size"),
            other => panic!("{other:?}"),
        }
        let c = TrainConfig {
            alpha: AlphaConfig::Static { value: 1.5 },
            ..Default::default()
        };
        assert!(matches!(c.validate(), Err(Error::ConfigInvalid { .. })));
    }

    #[test]
    fn deterministic_steps() {
        let cfg = tiny_config(2, AlphaConfig::default());
        let mut a = Trainer::new(cfg.clone()).unwrap();
        let mut b = Trainer::new(cfg).unwrap();
        for _ in 0..20 {
            assert_eq!(a.train_step().unwrap(), b.train_step().unwrap());
        }
        assert_eq!(a.generator(), b.generator());
        assert_eq!(a.discriminators(), b.discriminators());
        assert_eq!(a.alpha().beta, b.alpha().beta);
    }

    #[test]
    fn learned_alpha_rises_under_negative_slope() {
        let mut t = Trainer::new(tiny_config(4, AlphaConfig::default())).unwrap();
        let start = t.alpha().value();
        let mut last = start;
        for _ in 0..30 {
            let s = t.train_step().unwrap();
            assert!(s.dloss_dalpha < 0.0);
            assert!(t.alpha().value() >= last);
            last = t.alpha().value();
        }
        // Adam moves β by about lr per step.
        assert!((t.alpha().beta + 1.8 - 30.0 * 2e-4).abs() < 1e-4);
        assert!(last > start);
    }

    #[test]
    fn single_discriminator_has_no_alpha_signal() {
        let mut t = Trainer::new(tiny_config(1, AlphaConfig::default())).unwrap();
        let s = t.train_step().unwrap();
        assert_eq!(s.dloss_dalpha, 0.0);
        assert_eq!(t.alpha().beta, -1.8);
    }

    #[test]
    fn checkpoint_round_trip_continues_identically() {
        let cfg = tiny_config(2, AlphaConfig::default());
        let mut straight = Trainer::new(cfg.clone()).unwrap();
        for _ in 0..5 {
            straight.train_step().unwrap();
        }
        let bytes = straight.to_checkpoint().to_bytes();
        let mut resumed = Trainer::from_checkpoint(cfg, RawCheckpoint::from_bytes(&bytes).unwrap()).unwrap();
        assert_eq!(resumed.iteration(), 5);
        for _ in 0..5 {
            assert_eq!(straight.train_step().unwrap(), resumed.train_step().unwrap());
        }
        assert_eq!(straight.to_checkpoint(), resumed.to_checkpoint());
    }
}
