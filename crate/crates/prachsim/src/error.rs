//! Error type shared across the simulator.

use std::fmt;

/// Errors surfaced by configuration, synthesis and detection code.
#[derive(Debug, Clone, PartialEq)]
pub enum SimError {
    /// Invalid parameter value or parameter combination.
    Config(String),
    /// Feature outside the supported scope (e.g. restricted cyclic-shift sets).
    Unsupported(String),
    /// Internal consistency violation (length mismatches and the like).
    Internal(String),
    /// I/O failure, annotated with the path involved.
    Io(String),
}

impl fmt::Display for SimError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimError::Config(msg) => write!(f, "configuration error: {msg}"),
            SimError::Unsupported(msg) => write!(f, "unsupported feature: {msg}"),
            SimError::Internal(msg) => write!(f, "internal error: {msg}"),
            SimError::Io(msg) => write!(f, "i/o error: {msg}"),
        }
    }
}

impl std::error::Error for SimError {}

pub type Result<T> = std::result::Result<T, SimError>;
