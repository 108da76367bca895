//! Experiment plumbing: JSON configs, presets, run directories, plots.
//!
//! A run directory holds `config-echo.json` (the fully resolved config),
//! `metrics.csv`, the latest `checkpoint.mbgn`, `final.mbgn`, and
//! `plot-NNNNNN.svg` scatter plots.

mod config;
mod presets;
mod run;
mod svg;

pub use config::{echo_config, load_config, parse_config};
pub use presets::{learned, preset, toy_config, ExperimentPreset, PresetRun, BETA_SIGM_SWEEP, PRESET_NAMES};
pub use run::{
    alpha_evolution_csv, dump_data, generator_from_checkpoint, plot_checkpoint, plot_name, plot_trainer,
    resume, run_config_file, run_experiment, run_preset, RunOutcome, ALPHA_EVOLUTION_FILE, CHECKPOINT_FILE,
    CONFIG_ECHO_FILE, FINAL_CHECKPOINT_FILE, METRICS_FILE, PLOT_SAMPLES,
};
pub use svg::{emit_scatter_svg, render_scatter_svg, VIEW_HALF_WIDTH};
