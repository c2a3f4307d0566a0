use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("line {line}: relation side `{side}` has length {len}, expected 2")]
    RelationLength { line: usize, side: String, len: usize },

    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),

    #[error("duplicate generator `{0}`")]
    DuplicateGenerator(String),

    #[error("invalid generator name `{0}`")]
    InvalidGeneratorName(String),

    #[error("congruence class of `{word}` exceeds {limit} words")]
    ClassBudgetExceeded { word: String, limit: usize },

    #[error("multiple search exceeds length {limit}")]
    SearchBudgetExceeded { limit: usize },

    #[error("time budget of {seconds} s exceeded")]
    TimeBudgetExceeded { seconds: u64 },

    #[error("elements belong to different presentations")]
    ForeignElement,

    #[error("`{divisor}` is not a left divisor of `{element}`")]
    NotADivisor { divisor: String, element: String },

    #[error("`{0}` and `{1}` have no unique maximal common left divisor")]
    NoUniqueGcd(String, String),

    #[error("`{0}` and `{1}` have several minimal common right multiples")]
    MultipleMinimalMultiples(String, String),

    #[error("presentation does not define a divisibility monoid ({0} violation(s))")]
    NotDivisibility(usize),

    #[error("monoid is not Garside: `{0}` and `{1}` have no common right multiple")]
    NotGarside(String, String),

    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("unknown export format `{0}`")]
    UnknownFormat(String),

    #[error("internal verification failed: {0}")]
    Verification(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Budget exhaustion is an explicit outcome, never a wrong answer.
    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            Error::ClassBudgetExceeded { .. }
                | Error::SearchBudgetExceeded { .. }
                | Error::TimeBudgetExceeded { .. }
        )
    }
}
