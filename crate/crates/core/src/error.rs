use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("graph has no vertices")]
    EmptyGraph,

    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),

    #[error("duplicate vertex `{0}`")]
    DuplicateVertex(String),

    #[error("self-loop at vertex `{0}`")]
    SelfLoop(String),

    #[error("more than one edge between `{0}` and `{1}`")]
    MultiEdge(String, String),

    #[error("edge `{a}`-`{b}` has non-positive or non-finite weight {w}")]
    InvalidWeight { a: String, b: String, w: f64 },

    #[error("measure at vertex `{0}` must be positive and finite")]
    InvalidMeasure(String),

    #[error("explicit measure requires `mu` on every vertex (missing at `{0}`)")]
    MissingMeasure(String),

    #[error("domain is empty")]
    EmptyDomain,

    #[error("empty interior: every vertex of the domain touches its complement")]
    EmptyInterior,

    #[error("vertex `{0}` is not an interior vertex of the domain")]
    NotInterior(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("time {t} lies outside the sampled profile range [{start}, {end}]")]
    OutsideSamples { t: f64, start: f64, end: f64 },

    #[error("invalid time profile: {0}")]
    InvalidProfile(String),

    #[error("conjugate gradient stopped after {iterations} iterations with relative residual {residual:e}")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("symmetric eigensolver did not converge")]
    EigenFailure,

    #[error("eigenvalue {0:e} is not positive: boundary missing or an interior component touches no boundary")]
    DegenerateSpectrum(f64),

    #[error("a-priori bounds are only valid for step length <= 1 (got {0})")]
    StepTooLong(f64),

    #[error("energy identity requires f = 0")]
    NonzeroForcing,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("JSON error at line {line}, column {column}: {message}")]
    Json {
        line: usize,
        column: usize,
        message: String,
    },
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

impl Error {
    /// True for errors caused by malformed or inconsistent input, as opposed
    /// to numerical failures.
    pub fn is_input_error(&self) -> bool {
        !matches!(
            self,
            Error::NoConvergence { .. }
                | Error::EigenFailure
                | Error::DegenerateSpectrum(_)
                | Error::NonzeroForcing
                | Error::StepTooLong(_)
        )
    }
}
