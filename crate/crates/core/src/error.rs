use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Invalid(String),
    #[error("chain length {0} is even; the antiperiodic construction needs an odd number of sites")]
    EvenChain(usize),
    #[error("theta series did not converge within {max_terms} terms")]
    Truncation { max_terms: usize },
    #[error("imaginary part of omega must be positive (got {0})")]
    Domain(f64),
    #[error("dynamical pole: {0}")]
    Pole(String),
    #[error("eigen decomposition failed: {0}")]
    Eigen(String),
    #[error("cluster {cluster} is not scalar for the given operator (spread {spread:e})")]
    Degeneracy { cluster: usize, spread: f64 },
    #[error("not an eigenvalue: functional residual {0:e}")]
    NotEigenvalue(f64),
    #[error("vanishing pairing for SOV state {0}")]
    DegenerateMeasure(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
