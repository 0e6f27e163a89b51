//! Command-line driver for the `eviohmm` crate: model files, CSV traces,
//! effectiveness reports, synthetic trace generation and the bundled
//! two-state walkthrough.

pub mod commands;
pub mod demo;
pub mod error;
pub mod generate;
pub mod model_file;
pub mod report;
pub mod trace;

pub use error::{CliError, Result};
