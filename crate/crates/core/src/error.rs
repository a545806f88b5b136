use alloc::string::String;
use alloc::vec::Vec;

use crate::airport::AirportCode;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unknown airport {0}")]
    UnknownAirport(AirportCode),

    #[error("duplicate airport {0} in registry")]
    DuplicateAirport(AirportCode),

    #[error("no workload statistics for airport {0}")]
    MissingStats(AirportCode),

    #[error("bearing is undefined between coincident points")]
    UndefinedBearing,

    #[error("shape mismatch: expected {expected} nodes, got {actual}")]
    ShapeMismatch { expected: usize, actual: usize },

    #[error("autoencoder training diverged: final loss {last} exceeds initial loss {first}")]
    NonConvergent {
        first: f64,
        last: f64,
        log: Vec<f64>,
    },

    #[error("degenerate configuration: {0}")]
    Degenerate(String),

    #[error("eigen solver did not converge within {0} sweeps")]
    EigenNoConvergence(usize),
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
