//! Configuration parsing, snapshot and CSV formats, and the command drivers
//! of the `nsfv` binary.

pub mod commands;
pub mod config;
pub mod csvout;
pub mod error;
pub mod snapshot;

pub use config::{parse_config, parse_config_with, RunConfig};
pub use error::{CliError, Result};
