//! Experiment commands, gate files and reports on top of `epower-core`.

pub mod commands;
pub mod error;
pub mod gate_io;
pub mod parallel;
pub mod sidecar;

pub use error::{CliError, CliResult};
