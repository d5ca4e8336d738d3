use thiserror::Error;

/// Errors produced by the library operations.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("word {0:?} is not admissible for the subshift")]
    InadmissibleWord(String),

    #[error("stopping threshold {0} outside (0, 1)")]
    ThresholdOutOfRange(f64),

    #[error("decay-gap inequality violated: eps - (k-1)/2 + (1/2+delta)(k-2) = {0} >= 0")]
    DecayGapViolated(f64),

    #[error("word has length {got}, expected n(xi) = {expected}")]
    WrongLength { got: usize, expected: usize },

    #[error("word budget of {budget} exceeded (needed about {needed})")]
    WordBudgetExceeded { budget: usize, needed: usize },

    #[error("function grids are not compatible: {0}")]
    GridMismatch(String),

    #[error("evaluator incompatible with this measure: {0}")]
    IncompatibleEvaluator(String),

    #[error("tolerance too tight: stopping family exceeds the word budget of {0}")]
    TolTooTight(usize),

    #[error("no admissible word of length {0}")]
    EmptyAdmissibleSet(usize),

    #[error("subshift matrix is not primitive (no power up to {0} is strictly positive)")]
    NonPrimitiveSubshift(usize),

    #[error("restricted-product hypothesis ({0}) violated: {1}")]
    HypothesisViolation(usize, String),

    #[error("beta prefix of length {got} too short, need at least {need}")]
    PrefixTooShort { got: usize, need: usize },

    #[error("band index {0} outside the admitted range [{1}, {2}]")]
    BandOutOfRange(i64, f64, f64),

    #[error("precision budget exceeded: {need} bits needed, {have} configured")]
    PrecisionBudgetExceeded { need: u64, have: u64 },

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("invalid input: {0}")]
    Invalid(String),
}

impl CoreError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        CoreError::Invalid(msg.into())
    }
}
