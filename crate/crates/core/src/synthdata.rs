//! The 2D ring-of-Gaussians target distribution and latent sampling.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::ndcore::Matrix;
use crate::{Error, Result};

/// Isotropic Gaussians with centers equally spaced on a circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RingMixture {
    pub n_modes: usize,
    pub radius: f64,
    pub mode_std: f64,
}

impl Default for RingMixture {
    fn default() -> Self {
        Self {
            n_modes: 8,
            radius: 2.0,
            mode_std: 0.02,
        }
    }
}

impl RingMixture {
    pub fn validate(&self) -> Result<()> {
        if self.n_modes == 0 {
            return Err(Error::config("dataset.n_modes", "must be at least 1"));
        }
        if !(self.radius.is_finite() && self.radius >= 0.0) {
            return Err(Error::config("dataset.radius", "must be finite and non-negative"));
        }
        if !(self.mode_std.is_finite() && self.mode_std > 0.0) {
            return Err(Error::config("dataset.mode_std", "must be finite and positive"));
        }
        Ok(())
    }

    /// Center of mode `k`, at angle `2πk / n_modes`.
    pub fn center(&self, k: usize) -> [f64; 2] {
        let angle = std::f64::consts::TAU * k as f64 / self.n_modes as f64;
        [self.radius * angle.cos(), self.radius * angle.sin()]
    }

    pub fn centers(&self) -> Vec<[f64; 2]> {
        (0..self.n_modes).map(|k| self.center(k)).collect()
    }

    /// Index of and distance to the closest center.
    pub fn nearest_center(&self, p: &[f64]) -> (usize, f64) {
        let mut best = (0, f64::INFINITY);
        for k in 0..self.n_modes {
            let c = self.center(k);
            let d = (p[0] - c[0]).hypot(p[1] - c[1]);
            if d < best.1 {
                best = (k, d);
            }
        }
        best
    }
}

/// Draws `n` points: a uniformly chosen center plus `N(0, mode_std² I)` noise.
/// Per row the draws are: mode index, then x noise, then y noise.
pub fn sample_real<R: Rng + ?Sized>(mix: &RingMixture, n: usize, rng: &mut R) -> Matrix {
    let mut out = Matrix::zeros(n, 2);
    for r in 0..n {
        let k = rng.random_range(0..mix.n_modes);
        let c = mix.center(k);
        let nx: f64 = StandardNormal.sample(rng);
        let ny: f64 = StandardNormal.sample(rng);
        let row = out.row_mut(r);
        row[0] = c[0] + mix.mode_std * nx;
        row[1] = c[1] + mix.mode_std * ny;
    }
    out
}

/// `n x dim` matrix of i.i.d. standard normal draws, filled row-major.
pub fn sample_latent<R: Rng + ?Sized>(dim: usize, n: usize, rng: &mut R) -> Matrix {
    let mut out = Matrix::zeros(n, dim);
    for v in out.as_mut_slice() {
        *v = StandardNormal.sample(rng);
    }
    out
}
