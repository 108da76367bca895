//! Multi-discriminator GAN training where each discriminator owns one
//! microbatch of every minibatch, plus the diversity metrics used to judge
//! mode coverage on a 2D ring-of-Gaussians task.
//!
//! The crate is organised bottom-up:
//!
//! - [`ndcore`]: dense matrices and reverse-mode gradients for small MLPs.
//! - [`models`]: generator/discriminator definitions, Adam, checkpoints.
//! - [`alpha`]: the diversity parameter and its self-learned schedules.
//! - [`synthdata`]: the ring mixture and latent sampling.
//! - [`trainer`]: the alternating training loop.
//! - [`metrics`]: Fréchet distances and mode coverage.
//! - [`harness`]: configs, presets, CSV/SVG output and resume.

pub mod alpha;
pub mod error;
pub mod harness;
pub mod metrics;
pub mod models;
pub mod ndcore;
pub mod synthdata;
pub mod trainer;

pub use error::{Error, Result};

/// The single random stream used by a training run.
///
/// ChaCha exposes its full position, which lets checkpoints resume bit-exactly.
pub type RunRng = rand_chacha::ChaCha8Rng;
