//! Experiment runner for Ising local-convergence checks.

pub mod commands;
pub mod config;
pub mod experiments;
pub mod output;

pub use config::{ConfigError, ExperimentConfig, ExperimentKind};
pub use experiments::{run, Check, Outcome};
