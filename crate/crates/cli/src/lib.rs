//! Command-line experiment runner for dissipative quenches of XX spin-chain
//! batteries.
//!
//! Each experiment reads an [`ExperimentConfig`], runs the engine from
//! `ergoquench-core`, and writes CSV tables (and optionally SVG plots) to the
//! configured output directory.

pub mod config;
pub mod error;
pub mod experiments;
pub mod svg;
pub mod table;

pub use config::{validate_config, ConfigError, ExperimentConfig};
pub use error::CliError;
pub use experiments::{run_experiment, Experiment, RunReport, StateStats};
pub use table::{Cell, Table};
