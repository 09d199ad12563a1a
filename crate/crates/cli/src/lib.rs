//! File formats, scenario families and report writers behind the `bmlab` binary.

pub mod config;
pub mod error;
pub mod report;
pub mod scenario;
pub mod setfile;
pub mod verify;

pub use error::{CliError, CliResult};
