//! Command-line front end: configuration, parallel sweeps and reports on
//! top of `ballasy-core`.

pub mod cli;
pub mod config;
pub mod error;
pub mod report;
pub mod sweep;

pub use config::{Format, RunConfig};
pub use error::CliError;
