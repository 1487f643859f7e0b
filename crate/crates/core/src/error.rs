//! Error type shared by all measurement operations.

use thiserror::Error;

/// Errors raised by consensus measurement operations.
///
/// Operations validate their inputs and refuse to produce a result from
/// inconsistent ones; a measurement taken from impossible counts would be
/// meaningless rather than merely imprecise.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConsensusError {
    /// The proportion of zero votes is undefined. Callers deciding an
    /// outcome should treat this as a null result, not a negative one.
    #[error("proportion is undefined: no votes were cast")]
    DivisionUndefined,

    /// A parameter is outside its documented range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Counts contradict each other (e.g. more voting than present).
    #[error("inconsistent counts: {0}")]
    InconsistentCounts(String),

    /// A near-unanimity shortfall must stay strictly below half the
    /// population; the caller must shrink the shortfall or rethink the
    /// population before a result can be produced.
    #[error("near-unanimity shortfall {shortfall} is not below half of population {population}")]
    ShortfallTooLarge { shortfall: u64, population: u64 },

    /// Inputs claim that a threshold above half the population was met by
    /// more than one side or choice at once.
    #[error("contradictory tally: {0}")]
    ContradictoryTally(String),

    /// A ballot that cannot be interpreted. `ordinal` is 1-based, in
    /// document order.
    #[error("malformed ballot {ordinal}: {reason}")]
    MalformedBallot { ordinal: usize, reason: String },
}

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, ConsensusError>;
