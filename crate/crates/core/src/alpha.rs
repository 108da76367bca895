//! The diversity parameter α.
//!
//! α is either fixed for the whole run or produced from a generator-owned
//! scalar β through a monotone function. In learned mode β follows its own
//! Adam state and is clamped to a floor after every step; the floor is β's
//! initial value (`-1.8` for the sigmoid, `0` for softsign and tanh, none for
//! the identity).

use serde::{Deserialize, Serialize};

use crate::models::{AdamConfig, AdamState, Direction};
use crate::ndcore::{sigmoid, Matrix};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlphaFunction {
    Sigm,
    Soft,
    Tanh,
    Ident,
}

impl AlphaFunction {
    pub const ALL: [AlphaFunction; 4] = [
        AlphaFunction::Sigm,
        AlphaFunction::Soft,
        AlphaFunction::Tanh,
        AlphaFunction::Ident,
    ];

    /// Starting β, which is also the clamp floor for the bounded functions.
    pub fn default_beta(self) -> f64 {
        match self {
            AlphaFunction::Sigm => -1.8,
            AlphaFunction::Soft | AlphaFunction::Tanh | AlphaFunction::Ident => 0.0,
        }
    }

    pub fn value(self, beta: f64) -> f64 {
        match self {
            AlphaFunction::Sigm => sigmoid(beta),
            AlphaFunction::Soft => beta / (1.0 + beta.abs()),
            AlphaFunction::Tanh => beta.tanh(),
            AlphaFunction::Ident => beta,
        }
    }

    pub fn derivative(self, beta: f64) -> f64 {
        match self {
            AlphaFunction::Sigm => {
                let s = sigmoid(beta);
                s * (1.0 - s)
            }
            AlphaFunction::Soft => 1.0 / (1.0 + beta.abs()).powi(2),
            AlphaFunction::Tanh => 1.0 - beta.tanh().powi(2),
            AlphaFunction::Ident => 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            AlphaFunction::Sigm => "sigm",
            AlphaFunction::Soft => "soft",
            AlphaFunction::Tanh => "tanh",
            AlphaFunction::Ident => "ident",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlphaMode {
    Static(f64),
    Learned(AlphaFunction),
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlphaSchedule {
    pub mode: AlphaMode,
    pub beta: f64,
    pub beta_floor: f64,
    pub adam: AdamState,
}

impl AlphaSchedule {
    pub fn fixed(value: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::config("alpha.value", "static alpha must lie in [0, 1]"));
        }
        Ok(Self {
            mode: AlphaMode::Static(value),
            beta: 0.0,
            beta_floor: f64::NEG_INFINITY,
            adam: AdamState::new(AdamConfig::default(), &[Matrix::zeros(1, 1)]),
        })
    }

    /// Learned schedule starting (and floored) at `beta_init`; the identity has
    /// no floor.
    pub fn learned(function: AlphaFunction, beta_init: f64, adam: AdamConfig) -> Result<Self> {
        if !beta_init.is_finite() {
            return Err(Error::config("alpha.beta_init", "must be finite"));
        }
        let beta_floor = match function {
            AlphaFunction::Ident => f64::NEG_INFINITY,
            _ => beta_init,
        };
        Ok(Self {
            mode: AlphaMode::Learned(function),
            beta: beta_init,
            beta_floor,
            adam: AdamState::new(adam, &[Matrix::zeros(1, 1)]),
        })
    }

    pub fn value(&self) -> f64 {
        match self.mode {
            AlphaMode::Static(v) => v,
            AlphaMode::Learned(f) => f.value(self.beta),
        }
    }

    pub fn derivative(&self) -> Result<f64> {
        match self.mode {
            AlphaMode::Static(_) => Err(Error::StaticScheduleHasNoGradient),
            AlphaMode::Learned(f) => Ok(f.derivative(self.beta)),
        }
    }

    pub fn is_learned(&self) -> bool {
        matches!(self.mode, AlphaMode::Learned(_))
    }

    /// One descending Adam step on β given `dLoss/dα`, then the floor clamp.
    pub fn update_beta(&mut self, dloss_dalpha: f64) -> Result<()> {
        let slope = self.derivative()?;
        if !dloss_dalpha.is_finite() {
            return Err(Error::NonFiniteGradient {
                context: Some("beta".into()),
            });
        }
        let grad = [Matrix::filled(1, 1, dloss_dalpha * slope)];
        let mut beta = Matrix::filled(1, 1, self.beta);
        self.adam.step([&mut beta], &grad, Direction::Descend)?;
        self.beta = beta.get(0, 0).max(self.beta_floor);
        Ok(())
    }
}
