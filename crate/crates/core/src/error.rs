use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate vector")]
    DegenerateVector,

    #[error("observable is not ±1-valued")]
    NotInvolution,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("operator is not Hermitian")]
    NotHermitian,

    #[error("not a projector: {0}")]
    NotProjector(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("instance too large for exact mode (n = {n}, limit = {limit})")]
    TooLarge { n: usize, limit: usize },

    #[error("theta undetermined: lower bound {lower}, upper bound {upper}")]
    ThetaUndetermined { lower: f64, upper: f64 },

    #[error("semidefinite solver failed: {0}")]
    Sdp(String),

    #[error("incompatible sequence: {0}")]
    IncompatibleSequence(String),

    #[error("correspondence broken: {0}")]
    CorrespondenceBroken(String),

    #[error("inadmissible assignment: edge {{{0}, {1}}} has both tests answering yes")]
    InadmissibleAssignment(u32, u32),

    #[error("no balanced box strategy found")]
    NoBoxStrategy,

    #[error("unknown state code `{0}`")]
    UnknownState(String),

    #[error("visibility {0} outside [0, 1]")]
    VisibilityOutOfRange(f64),

    #[error("epsilon {0} outside [0, 1)")]
    EpsilonOutOfRange(f64),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("record {record}: value {value} outside [{min}, {max}]")]
    ValueOutOfRange {
        record: String,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("unexpected record {0}")]
    UnexpectedRecord(String),

    #[error("empty input")]
    EmptyInput,

    #[error("missing terms for {state}: {}", missing.join(", "))]
    MissingTerms { state: String, missing: Vec<String> },

    #[error("graph: {0}")]
    Graph(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
