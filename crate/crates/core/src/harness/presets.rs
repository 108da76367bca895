use crate::alpha::AlphaFunction;
use crate::trainer::{AlphaConfig, TrainConfig};
use crate::{Error, Result};

pub const PRESET_NAMES: [&str; 6] = [
    "toy",
    "standard-gan",
    "ident",
    "static-alpha-sweep",
    "alpha-fn-compare",
    "beta-sigm-sweep",
];

/// Initial β values tried by `beta-sigm-sweep`.
pub const BETA_SIGM_SWEEP: [f64; 6] = [-4.0, -3.0, -2.0, -1.8, -1.0, 0.0];

#[derive(Debug, Clone, PartialEq)]
pub struct PresetRun {
    /// Sub-directory name; empty for single-run presets.
    pub label: String,
    pub config: TrainConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentPreset {
    pub name: &'static str,
    pub runs: Vec<PresetRun>,
    /// Write `alpha-evolution.csv` combining the α columns of every run.
    pub alpha_evolution: bool,
}

/// The toy ring setup: 8 discriminators, minibatch 512, 25K iterations.
pub fn toy_config(alpha: AlphaConfig, seed: u64) -> TrainConfig {
    TrainConfig {
        alpha,
        seed,
        ..TrainConfig::default()
    }
}

pub fn learned(function: AlphaFunction) -> AlphaConfig {
    AlphaConfig::Learned {
        function,
        beta_init: None,
    }
}

fn single(name: &'static str, config: TrainConfig) -> ExperimentPreset {
    ExperimentPreset {
        name,
        runs: vec![PresetRun {
            label: String::new(),
            config,
        }],
        alpha_evolution: false,
    }
}

pub fn preset(name: &str, seed: u64) -> Result<ExperimentPreset> {
    let p = match name {
        "toy" => single("toy", toy_config(learned(AlphaFunction::Sigm), seed)),
        "ident" => single("ident", toy_config(learned(AlphaFunction::Ident), seed)),
        "standard-gan" => single(
            "standard-gan",
            TrainConfig {
                discriminators: 1,
                ..toy_config(AlphaConfig::Static { value: 0.0 }, seed)
            },
        ),
        "static-alpha-sweep" => ExperimentPreset {
            name: "static-alpha-sweep",
            runs: (0..=10)
                .map(|i| {
                    let alpha = AlphaConfig::Static {
                        value: i as f64 / 10.0,
                    };
                    PresetRun {
                        label: alpha.label(),
                        config: toy_config(alpha, seed),
                    }
                })
                .collect(),
            alpha_evolution: false,
        },
        "alpha-fn-compare" => ExperimentPreset {
            name: "alpha-fn-compare",
            runs: [AlphaFunction::Sigm, AlphaFunction::Soft, AlphaFunction::Tanh]
                .into_iter()
                .map(|f| PresetRun {
                    label: f.name().to_string(),
                    config: toy_config(learned(f), seed),
                })
                .collect(),
            alpha_evolution: true,
        },
        "beta-sigm-sweep" => ExperimentPreset {
            name: "beta-sigm-sweep",
            runs: BETA_SIGM_SWEEP
                .iter()
                .map(|&b| {
                    let alpha = AlphaConfig::Learned {
                        function: AlphaFunction::Sigm,
                        beta_init: Some(b),
                    };
                    PresetRun {
                        label: alpha.label(),
                        config: toy_config(alpha, seed),
                    }
                })
                .collect(),
            alpha_evolution: true,
        },
        other => {
            return Err(Error::config(
                "preset",
                format!(
                    "unknown preset {other:?}; expected one of {}",
                    PRESET_NAMES.join(", ")
                ),
            ))
        }
    };
    Ok(p)
}
