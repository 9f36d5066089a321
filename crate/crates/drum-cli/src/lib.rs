//! Library side of the command-line front end; the binary in `main.rs` is a
//! thin wrapper so integration tests can reach the config and output types.

pub mod commands;
pub mod config;
pub mod output;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad configuration, bad input files, bad flags. Exit code 1.
    #[error("{0}")]
    Validation(String),
    /// Numeric or I/O failure during a run. Exit code 2.
    #[error("{0}")]
    Runtime(String),
}
