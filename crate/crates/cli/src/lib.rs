//! Sweeps, reports and field maps behind the `mesoqed` binary.

pub mod commands;
pub mod config;

use thiserror::Error;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Numerics(#[from] mesoqed::Error),

    #[error("at {param} = {value}: {source}")]
    AtPoint {
        param: &'static str,
        value: f64,
        #[source]
        source: mesoqed::Error,
    },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

fn core_exit_code(e: &mesoqed::Error) -> i32 {
    use mesoqed::Error as E;
    match e {
        e if e.is_convergence() => 3,
        E::InvalidArgument(_) | E::ExpansionInvalid { .. } | E::NoBoundMode(_) => 2,
        _ => 1,
    }
}

impl CliError {
    /// 0 success, 2 configuration, 3 numerical non-convergence, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerics(e) | CliError::AtPoint { source: e, .. } => core_exit_code(e),
            CliError::Io(_) => 1,
        }
    }
}
