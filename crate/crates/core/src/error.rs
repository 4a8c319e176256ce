use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error(
        "Gaussian not contained in the position domain: (T - |x0|)/Δ = {ratio:.3} < {threshold}; \
         the closed forms assume Δ ≪ T"
    )]
    NotContained { ratio: f64, threshold: f64 },

    #[error("invalid function: {0}")]
    InvalidFunction(String),

    #[error("point {y} lies outside the function domain [-{big_p}, {big_p}]")]
    OutOfDomain { y: f64, big_p: f64 },

    #[error("argument out of range: {0}")]
    OutOfRange(String),

    #[error("quadrature did not reach tolerance: best estimate {value} with error estimate {error_estimate}")]
    QuadratureNotConverged { value: f64, error_estimate: f64 },

    #[error("grid error: {0}")]
    Grid(String),

    #[error("derivative of the mean observable vanishes at φ = {phi}")]
    SingularDerivative { phi: f64 },

    #[error("φ is not identifiable: the outcome probability does not depend on it (b = {b:e})")]
    Unidentifiable { b: f64 },
}
