use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoverError {
    #[error("the zero cocycle defines a disconnected cover")]
    ZeroCocycle,

    #[error("cocycle does not vanish on relator {relator}")]
    NotACocycle { relator: usize },

    #[error("cocycle has {got} entries, group has {expected} generators")]
    CocycleLength { expected: usize, got: usize },

    #[error("letter {letter} is outside the {generators} generators")]
    BadLetter { letter: i32, generators: usize },

    #[error("word {0} is trivial in the group")]
    TrivialWord(String),

    #[error("genus must be at least 1, got {0}")]
    BadGenus(usize),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("tower is malformed at level {level}: {reason}")]
    Malformed { level: usize, reason: String },

    #[error("verification mismatch for {word}: tower claims {claimed}, coset table gives {found}")]
    Mismatch {
        word: String,
        claimed: String,
        found: String,
    },
}

pub type Result<T> = std::result::Result<T, CoverError>;
