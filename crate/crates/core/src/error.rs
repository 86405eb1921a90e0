use thiserror::Error;

/// Errors produced by the laboratory.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An exact computation would need more bits than the configured budget.
    #[error("digit budget exceeded: {needed} bits needed, budget is {budget}")]
    DigitBudget { needed: String, budget: u64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    /// A constructive search ran out of its budget; carries the best distance reached.
    #[error("search budget exhausted after {tried} candidates, best distance {best}")]
    SearchExhausted { tried: u64, best: f64 },

    #[error("too few acceptances: {accepted} of {total} samples (need at least {required})")]
    TooFewAcceptances {
        accepted: usize,
        total: usize,
        required: usize,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn budget(needed: impl ToString, budget: u64) -> Self {
        Error::DigitBudget {
            needed: needed.to_string(),
            budget,
        }
    }
}
