use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("argument {z} outside the supported domain of {func}")]
    OutOfRange { func: &'static str, z: Complex64 },

    #[error("argument {z} lies on the branch cut of {func}")]
    BranchCut { func: &'static str, z: Complex64 },

    #[error("no bound mode: {0}")]
    NoBoundMode(String),

    #[error("{what} did not converge (achieved tolerance {achieved:.3e})")]
    NonConvergence { what: String, achieved: f64 },

    #[error("found {} candidate roots where one was expected: {roots:?}", roots.len())]
    MultipleRoots { roots: Vec<f64> },

    #[error("multipole expansion invalid: kL = {kl:.4} >= 1")]
    ExpansionInvalid { kl: f64 },

    #[error("negative total rate {total:.6e}: bundle outside the validity of the truncated expansion")]
    NegativeTotal { total: f64 },

    #[error("inconsistent Green bundle: {0}")]
    InconsistentBundle(String),

    #[error("mode not normalized: {0}")]
    Unnormalized(String),

    #[error("harmonic sum not converged at m = {m_max}; partial sums {partial:?}")]
    HarmonicSum { m_max: usize, partial: Vec<f64> },

    #[error("zero overlap between envelopes")]
    ZeroOverlap,
}

impl Error {
    /// True for errors that come from a failed iterative or adaptive procedure.
    pub fn is_convergence(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. } | Error::HarmonicSum { .. } | Error::MultipleRoots { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
