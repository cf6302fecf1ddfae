//! Configuration, experiment orchestration and file output for the
//! `meshplace` command-line tool.

pub mod config;
pub mod experiment;
pub mod output;

pub use config::{ExperimentConfig, RegionSource, StrategyChoice, SweepTo};
pub use experiment::{run_experiment, run_seed, ExperimentOutcome, SeedRun};
