//! Configuration parsing and the pipeline behind the `cavity-modes` binary.

pub mod config;
pub mod run;

pub use config::{parse_config, parse_entries, ConfigError, RunConfig};
pub use run::{Outcome, RunError};
