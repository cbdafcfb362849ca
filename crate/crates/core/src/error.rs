//! Error type shared by the library.

use thiserror::Error;

/// Errors reported by the demodulators, channel models and analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The 16-DAPSK ring ratio must be strictly greater than one.
    #[error("ring ratio must be greater than 1, got {0}")]
    InvalidRingRatio(f64),
    /// Bit sequences are mapped four bits per symbol.
    #[error("bit count {0} is not a multiple of 4")]
    BitCountNotMultipleOf4(usize),
    /// Block fading needs a reference symbol plus at least one data symbol.
    #[error("coherence length must be at least 2 symbols, got {0}")]
    CoherenceTooShort(usize),
    /// β outside the permitted range.
    #[error("beta must be between {min} and {max}, got {got}")]
    InvalidBeta { got: usize, min: usize, max: usize },
    /// The Pawula closed form needs M ≥ 3.
    #[error("Pawula approximation requires M >= 3, got {0}")]
    PawulaOrder(u32),
    /// A (|d|, |α|) pair that cannot occur in the 16-DAPSK constellation.
    #[error("amplitude pair (|d|={d}, |alpha|={alpha}) is not a valid 16-DAPSK hypothesis")]
    DisallowedHypothesis { d: f64, alpha: f64 },
    /// LT code parameters out of range.
    #[error("invalid LT parameters: {0}")]
    InvalidLtParams(String),
    /// A bit-error target that a given β cannot meet in the searched SNR range.
    #[error("target BER {target:e} not reachable by beta={beta} within {lo_db}..{hi_db} dB")]
    UnattainableTarget {
        target: f64,
        beta: usize,
        lo_db: f64,
        hi_db: f64,
    },
    /// Adaptive quadrature stopped before meeting the requested tolerance.
    #[error("quadrature did not converge: achieved {achieved:e}, requested {requested:e}")]
    Quadrature { achieved: f64, requested: f64 },
    /// Any other out-of-range argument.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
