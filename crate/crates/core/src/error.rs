use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("DMU `{id}`: {column} = {value} is not strictly positive")]
    NonPositiveValue {
        id: String,
        column: String,
        value: f64,
    },
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: String,
        expected: usize,
        found: usize,
    },
    #[error("duplicate DMU id `{0}`")]
    DuplicateId(String),
    #[error("dataset has {0} unit(s); at least 2 are required")]
    TooFewUnits(usize),
    #[error("DMU ids must be non-empty")]
    EmptyId,
    #[error("unknown DMU `{0}`")]
    UnknownDmu(String),
    #[error("value {value} at component {component} is not finite")]
    NonFinite { component: usize, value: f64 },
    #[error("target does not dominate its origin: component {component} deviates by {deviation}")]
    DominanceViolation { component: usize, deviation: f64 },
    #[error("DMU `{id}` is at level {level}; {expected}")]
    LevelMismatch {
        id: String,
        level: usize,
        expected: &'static str,
    },
    #[error("peeling emptied the data before level {level} could be formed")]
    EmptyStratum { level: usize },
    #[error("alpha = {0} is outside [0, 1]")]
    InvalidAlpha(f64),
    #[error("reference set is empty")]
    EmptyReferenceSet,
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("branch-and-bound exceeded the node limit of {0}")]
    NodeLimitExceeded(usize),
    #[error("solver failure: {0}")]
    SolverFailure(String),
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("row {row}, column {column}: {message}")]
    Parse {
        row: usize,
        column: usize,
        message: String,
    },
    #[error("{0}")]
    Io(String),
    #[error("oracle refuses {size} units (cap {cap})")]
    TooLarge { size: usize, cap: usize },
}

impl Error {
    /// True for failures of the optimization machinery, as opposed to bad input.
    pub fn is_solver_failure(&self) -> bool {
        matches!(
            self,
            Error::NumericalFailure(_) | Error::NodeLimitExceeded(_) | Error::SolverFailure(_)
        )
    }
}
