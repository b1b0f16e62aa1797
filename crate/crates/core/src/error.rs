use thiserror::Error;

/// Errors raised across the library.
///
/// Input-shaped failures (bad dimensions, violated preconditions, malformed
/// scenarios) are distinguished from numerical failures so the CLI can map
/// them onto separate exit codes.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("unsupported geometry: {0}")]
    UnsupportedGeometry(String),

    #[error("index {index} out of range for {len} columns")]
    Index { index: usize, len: usize },

    #[error("shape error: {0}")]
    Shape(String),

    #[error("problem too large: {0}")]
    Size(String),

    #[error("malformed constraint: {0}")]
    Constraint(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("[{code}] line {line}, column {column}: {message}")]
    Parse {
        code: &'static str,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("[{code}] {message}")]
    Scenario { code: &'static str, message: String },
}

impl Error {
    /// True for failures caused by the numerics rather than by the input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Numerical(_))
    }

    /// Stable short code used in CLI diagnostics.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Dimension(_) => "dimension",
            Error::Precondition(_) => "precondition",
            Error::Geometry(_) => "geometry",
            Error::UnsupportedGeometry(_) => "unsupported-geometry",
            Error::Index { .. } => "index",
            Error::Shape(_) => "shape",
            Error::Size(_) => "size",
            Error::Constraint(_) => "constraint",
            Error::Numerical(_) => "numerical",
            Error::Parse { code, .. } | Error::Scenario { code, .. } => code,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
