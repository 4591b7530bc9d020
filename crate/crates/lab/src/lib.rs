//! Config-driven Monte Carlo studies of MST length fluctuations, Stein
//! bounds and two-arm decay, with CSV and JSON outputs.

pub mod cache;
pub mod config;
pub mod error;
pub mod experiments;
pub mod output;

pub use config::{ExperimentConfig, Kind, Model};
pub use error::{LabError, LabResult};
pub use output::{csv_string, Row, Summary};
