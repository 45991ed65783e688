use crate::matrix::ComplexMatrix;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("eigenvalue iteration did not converge for {}x{} matrix", .matrix.dim(), .matrix.dim())]
    NoConvergence { matrix: Box<ComplexMatrix> },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("noise strength {0} outside [0, 1]")]
    StrengthOutOfRange(f64),

    #[error("expected {expected} parameters, found {found}")]
    ParameterCount { expected: usize, found: usize },

    #[error("unknown channel family `{0}`")]
    UnknownFamily(String),

    #[error("unknown measure `{0}`")]
    UnknownMeasure(String),

    #[error("grid of {evaluations} points exceeds the evaluation guard")]
    GridTooLarge { evaluations: f64 },

    #[error("no optimizer pairs supplied")]
    EmptyPairs,

    #[error("optimizer pair replays to {replayed:e}, stored value {stored:e}")]
    StalePair { stored: f64, replayed: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("malformed csv: {0}")]
    MalformedCsv(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
