use rand::{Rng, SeedableRng};
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::ndcore::{Activation, Dense, Matrix, Mlp};
use crate::{Error, Result, RunRng};

use super::DiscriminatorHead;

/// Layer plan of a fully connected network.
pub trait NetworkSpec {
    /// `(input width, output width, activation)` per layer.
    fn layer_plan(&self) -> Vec<(usize, usize, Activation)>;
}

/// Generator `z -> x`: Relu hidden layers and a linear output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeneratorSpec {
    pub latent_dim: usize,
    pub hidden: Vec<usize>,
    pub output_dim: usize,
}

impl Default for GeneratorSpec {
    fn default() -> Self {
        Self {
            latent_dim: 256,
            hidden: vec![128, 128],
            output_dim: 2,
        }
    }
}

/// Discriminator `x -> raw score`: Relu hidden layers and one output unit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiscriminatorSpec {
    pub input_dim: usize,
    pub hidden: Vec<usize>,
    pub head: DiscriminatorHead,
}

impl Default for DiscriminatorSpec {
    fn default() -> Self {
        Self {
            input_dim: 2,
            hidden: vec![128],
            head: DiscriminatorHead::Logit,
        }
    }
}

fn plan(input: usize, hidden: &[usize], output: usize, last: Activation) -> Vec<(usize, usize, Activation)> {
    let mut widths = vec![input];
    widths.extend_from_slice(hidden);
    widths.push(output);
    let n = widths.len() - 1;
    (0..n)
        .map(|i| {
            let act = if i + 1 == n { last } else { Activation::Relu };
            (widths[i], widths[i + 1], act)
        })
        .collect()
}

impl NetworkSpec for GeneratorSpec {
    fn layer_plan(&self) -> Vec<(usize, usize, Activation)> {
        plan(self.latent_dim, &self.hidden, self.output_dim, Activation::Linear)
    }
}

impl NetworkSpec for DiscriminatorSpec {
    fn layer_plan(&self) -> Vec<(usize, usize, Activation)> {
        // The head's squashing happens inside the losses; the network emits a
        // raw score.
        plan(self.input_dim, &self.hidden, 1, Activation::Linear)
    }
}

impl GeneratorSpec {
    pub fn validate(&self, data_dim: usize) -> Result<()> {
        if self.latent_dim == 0 {
            return Err(Error::config("generator.latent_dim", "must be at least 1"));
        }
        if self.hidden.contains(&0) {
            return Err(Error::config("generator.hidden", "widths must be at least 1"));
        }
        if self.output_dim != data_dim {
            return Err(Error::config(
                "generator.output_dim",
                format!("must equal the data dimension {data_dim}"),
            ));
        }
        Ok(())
    }
}

impl DiscriminatorSpec {
    pub fn validate(&self, data_dim: usize) -> Result<()> {
        if self.input_dim != data_dim {
            return Err(Error::config(
                "discriminator.input_dim",
                format!("must equal the data dimension {data_dim}"),
            ));
        }
        if self.hidden.contains(&0) {
            return Err(Error::config("discriminator.hidden", "widths must be at least 1"));
        }
        Ok(())
    }
}

/// Zero-mean normal weights with std `sqrt(2/fan_in)` for Relu layers and
/// `sqrt(1/fan_in)` otherwise; zero biases. Weights are drawn layer by layer in
/// row-major order.
pub fn init_with_rng<S: NetworkSpec + ?Sized, R: Rng + ?Sized>(spec: &S, rng: &mut R) -> Mlp {
    let layers = spec
        .layer_plan()
        .into_iter()
        .map(|(fan_in, fan_out, activation)| {
            let gain = if activation == Activation::Relu { 2.0 } else { 1.0 };
            let std = (gain / fan_in as f64).sqrt();
            let mut weight = Matrix::zeros(fan_in, fan_out);
            for w in weight.as_mut_slice() {
                let n: f64 = StandardNormal.sample(rng);
                *w = std * n;
            }
            Dense {
                weight,
                bias: Matrix::zeros(1, fan_out),
                activation,
            }
        })
        .collect();
    Mlp::new(layers).expect("layer plan widths chain")
}

pub fn init_params<S: NetworkSpec + ?Sized>(spec: &S, seed: u64) -> Mlp {
    init_with_rng(spec, &mut RunRng::seed_from_u64(seed))
}
