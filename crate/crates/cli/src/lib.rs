//! Library side of the `gridsched` command: presets, configuration layering,
//! paired policy comparisons and output files.

pub mod compare;
pub mod config;
pub mod error;
pub mod output;
pub mod preset;

pub use compare::{run_compare, Comparison, ComparisonReport, Crossover, PolicyReport};
pub use config::{resolve, ConfigFile, ExperimentConfig, Overrides};
pub use error::CliError;
pub use output::emit_outputs;
pub use preset::Preset;
