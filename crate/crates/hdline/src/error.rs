use crate::rational::ExtRational;

/// Errors surfaced by the library. Variants are stable and map one-to-one
/// onto the status codes of the C ABI.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("network must contain at least one link")]
    EmptyNetwork,

    /// A single-link network has no relay to schedule; its capacity is the
    /// capacity of that link, reported here so callers can still use it.
    #[error("network has no relay; the end-to-end capacity is the single link capacity {capacity}")]
    NoRelay { capacity: ExtRational },

    #[error("link {index} has zero capacity")]
    ZeroCapacity { index: usize },

    #[error("link {index} has capacity {value}; this operation requires {expected}")]
    UnsupportedCapacity {
        index: usize,
        value: String,
        expected: &'static str,
    },

    #[error("channel gain {index} is not a finite number")]
    InvalidGain { index: usize },

    #[error("denominator {denominator} is too coarse: link {index} truncates to zero")]
    ResolutionTooCoarse { index: usize, denominator: u64 },

    #[error("{what}: size {requested} exceeds the limit {limit}")]
    LimitExceeded {
        what: &'static str,
        requested: usize,
        limit: usize,
    },

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("index {index} out of range [{lo}:{hi}]")]
    IndexOutOfRange { index: usize, lo: usize, hi: usize },

    #[error("negative value {0} is not a capacity or weight")]
    NegativeValue(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("cut is not induced by a primitive punctured set")]
    WitnessNotApplicable,

    #[error("graph error: {0}")]
    Graph(String),

    #[error("formula error: {0}")]
    Formula(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
