//! Error type shared by the whole crate.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("state vectors live in different representations (j_max {0} vs {1})")]
    ConfigMismatch(u32, u32),

    #[error("truncation j_max = {j_max} inadequate: top-shell mass {tail:.3e} exceeds {limit:.1e}")]
    InadequateTruncation { j_max: u32, tail: f64, limit: f64 },

    #[error("rotation generator degenerates at z3 = ±1")]
    DegenerateAxis,

    #[error("expectation value of the zero state is undefined")]
    ZeroState,

    #[error("phase of <X+> undefined at t = {0} (magnitude below threshold)")]
    UndefinedPhase(f64),

    #[error("sampling too coarse: consecutive extrema separated by fewer than {0} samples")]
    TooCoarseSampling(usize),

    #[error("event at t* indeterminate: residual amplitude below the noise floor")]
    IndeterminateEvent,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("coefficient magnitude exceeds the floating-point range (|l| too large)")]
    Overflow,
}

pub type Result<T> = std::result::Result<T, Error>;
