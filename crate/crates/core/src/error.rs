use thiserror::Error;

/// Errors raised by the library. Bound violations are reported as errors,
/// never turned into a guessed answer.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(String, String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("invalid field tag `{0}` (expected `Q`, `GF(p)` or `GFp` with p prime < 2^31)")]
    InvalidField(String),
    #[error("absolute value is only defined over Q")]
    NoAbsoluteValue,
    #[error("malformed matrix: {0}")]
    MalformedMatrix(String),

    #[error("invalid letter {letter} (alphabet has {size} letters)")]
    InvalidLetter { letter: usize, size: usize },
    #[error("invalid word: {0}")]
    InvalidWord(String),
    #[error("invalid action system: {0}")]
    InvalidSystem(String),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("non-contracting trajectory: no cycle after {0} steps")]
    NonContracting(usize),
    #[error("undecided at bound: {what} exceeded {bound}")]
    Undecided { what: &'static str, bound: usize },
    #[error("contraction not certified: nucleus search exceeded {0} elements")]
    ContractionNotCertified(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("katsura: {0}")]
    Katsura(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn undecided(what: &'static str, bound: usize) -> Self {
        Error::Undecided { what, bound }
    }

    /// True for errors meaning "a search hit its bound" rather than bad input.
    pub fn is_bound(&self) -> bool {
        matches!(
            self,
            Error::Undecided { .. } | Error::NonContracting(_) | Error::ContractionNotCertified(_)
        )
    }
}
