//! Experiment runner, spectrum export and theorem suites for `nframes`.

pub mod config;
pub mod error;
pub mod report;
pub mod runner;
pub mod suites;

pub use config::ExperimentConfig;
pub use error::CliError;
pub use report::Report;
pub use runner::{prepare, run, spectrum, spectrum_csv, Overrides};
