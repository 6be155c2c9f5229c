//! Command-line driver around `supercyc-core`: configuration, seeded
//! experiment runners and the JSON/CSV report formats.

pub mod commands;
pub mod config;
pub mod families;
pub mod formats;
pub mod lemmas;
pub mod num;

use thiserror::Error;

pub use config::{Mode, RunConfig};

/// Process exit codes.
pub mod exit {
    pub const PASS: u8 = 0;
    pub const VIOLATION: u8 = 1;
    pub const CONFIG: u8 = 2;
    pub const NULL_LIMIT: u8 = 3;
    pub const EXACT_REQUIRED: u8 = 4;
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("cannot read config: {0}")]
    Io(String),
    #[error("malformed config: {0}")]
    Parse(String),
    #[error("invalid config: {0}")]
    Invalid(String),
}
