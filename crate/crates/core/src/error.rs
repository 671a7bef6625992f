use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("point {0} lies outside the domain")]
    OutsideDomain(String),

    #[error("domain error: {0}")]
    DomainError(String),

    #[error("ball mass is not finite: {0}")]
    NonFiniteMass(String),

    #[error("integral diverges: {0}")]
    DivergentIntegral(String),

    #[error("quadrature failed to converge on [{a}, {b}]: estimated error {error:e} above target {target:e}")]
    QuadratureFailure { a: f64, b: f64, error: f64, target: f64 },

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("degenerate ball: {0}")]
    DegenerateBall(String),

    #[error("invalid atom: {0}")]
    InvalidAtom(String),

    #[error("unsupported geometry: {0}")]
    UnsupportedGeometry(String),

    #[error("not decomposable: {0}")]
    NotDecomposable(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
