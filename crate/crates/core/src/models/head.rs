use serde::{Deserialize, Serialize};

use crate::ndcore::{sigmoid, softplus, Matrix, Mlp};
use crate::{Error, Result};

/// Lower/upper clamp applied to the softplus head's probabilities.
pub const SOFTPLUS_PROB_FLOOR: f64 = 1e-7;
pub const SOFTPLUS_PROB_CEIL: f64 = 1.0 - 1e-7;

/// How a discriminator's raw scalar becomes a probability.
///
/// `Logit` squashes with a sigmoid and evaluates `log p`, `log(1 − p)` in
/// log-sigmoid form. `Softplus` uses `softplus(raw)` clamped into
/// `[1e-7, 1 − 1e-7]`; outside the clamp the gradient is zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DiscriminatorHead {
    #[default]
    Logit,
    Softplus,
}

impl DiscriminatorHead {
    pub fn prob(self, raw: f64) -> f64 {
        match self {
            DiscriminatorHead::Logit => sigmoid(raw),
            DiscriminatorHead::Softplus => softplus(raw).clamp(SOFTPLUS_PROB_FLOOR, SOFTPLUS_PROB_CEIL),
        }
    }

    /// `log p`
    pub fn log_prob(self, raw: f64) -> f64 {
        match self {
            DiscriminatorHead::Logit => -softplus(-raw),
            DiscriminatorHead::Softplus => self.prob(raw).ln(),
        }
    }

    /// `log(1 − p)`
    pub fn log_one_minus_prob(self, raw: f64) -> f64 {
        match self {
            DiscriminatorHead::Logit => -softplus(raw),
            DiscriminatorHead::Softplus => (-self.prob(raw)).ln_1p(),
        }
    }

    /// `d log p / d raw`
    pub fn dlog_prob(self, raw: f64) -> f64 {
        match self {
            DiscriminatorHead::Logit => sigmoid(-raw),
            DiscriminatorHead::Softplus => match self.softplus_slope(raw) {
                Some((p, dp)) => dp / p,
                None => 0.0,
            },
        }
    }

    /// `d log(1 − p) / d raw`
    pub fn dlog_one_minus_prob(self, raw: f64) -> f64 {
        match self {
            DiscriminatorHead::Logit => -sigmoid(raw),
            DiscriminatorHead::Softplus => match self.softplus_slope(raw) {
                Some((p, dp)) => -dp / (1.0 - p),
                None => 0.0,
            },
        }
    }

    /// `(p, dp/draw)` inside the clamp band, `None` where it is clamped.
    fn softplus_slope(self, raw: f64) -> Option<(f64, f64)> {
        let p = softplus(raw);
        if (SOFTPLUS_PROB_FLOOR..=SOFTPLUS_PROB_CEIL).contains(&p) {
            Some((p, sigmoid(raw)))
        } else {
            None
        }
    }
}

/// Per-sample probability that each row of `x` is real.
pub fn discriminator_prob(d: &Mlp, x: &Matrix, head: DiscriminatorHead) -> Result<Matrix> {
    if d.output_dim() != 1 {
        return Err(Error::DimensionMismatch {
            op: "discriminator_prob",
            lhs: (x.rows(), d.output_dim()),
            rhs: (x.rows(), 1),
        });
    }
    Ok(d.predict(x)?.map(|r| head.prob(r)))
}
