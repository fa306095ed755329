use std::path::PathBuf;

use crate::expr::ParseError;

/// Errors produced by the operator-calculus routines.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix has non-finite entry at ({row}, {col})")]
    NonFiniteEntry { row: usize, col: usize },

    #[error("eigensolver did not converge for {fingerprint}")]
    EigenNoConvergence { fingerprint: String },

    #[error("spectral value {value} lies outside the declared radius {radius}")]
    SpectrumOutsideRadius { value: f64, radius: f64 },

    #[error("function {descriptor} is not finite at ({x}, {y})")]
    NonFiniteValue { descriptor: String, x: f64, y: f64 },

    #[error("principal block size {requested} exceeds dimension {dim}")]
    BlockTooLarge { requested: usize, dim: usize },

    #[error("function {0} is not declared band-limited")]
    NotBandLimited(String),

    #[error("grid size {0} is not a power of two")]
    GridNotPowerOfTwo(usize),

    #[error("length mismatch: {left} functions but {right} coefficients")]
    LengthMismatch { left: usize, right: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
