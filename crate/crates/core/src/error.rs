use thiserror::Error;

/// Errors raised by rule evaluation, audits, and searches.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("round index {round} out of range (instance has {rounds} rounds)")]
    RoundOutOfRange { round: usize, rounds: usize },

    #[error("voter group is empty")]
    EmptyGroup,

    #[error("voter index {0} out of range")]
    VoterOutOfRange(usize),

    #[error("unknown alternative '{label}' in round {round}")]
    UnknownAlternative { round: usize, label: String },

    #[error("enumerating groups over {n} voters exceeds the cap of {cap}")]
    GroupCapExceeded { n: usize, cap: usize },

    #[error("strategy space of {size} approval tuples exceeds the cap of {cap}")]
    StrategyCapExceeded { size: u128, cap: u64 },

    #[error("rule horizon {declared} does not match instance horizon {actual}")]
    HorizonMismatch { declared: usize, actual: usize },

    #[error("invalid weight-update catalog: {0}")]
    InvalidWeightUpdate(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}
