use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectraError {
    #[error("point {point:?} lies outside the parameter domain")]
    Domain { point: Vec<f64> },

    #[error("degenerate immersion at {point:?}: {reason}")]
    Degeneracy { point: Vec<f64>, reason: String },

    #[error("tensor field is not positive definite at {location}")]
    Tensor { location: String },

    #[error("evaluation failed: {0}")]
    Evaluation(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("mesh too coarse: no interior degrees of freedom")]
    MeshTooCoarse,

    #[error("mass matrix is not positive definite (pivot {pivot})")]
    MassNotSpd { pivot: usize },

    #[error("shifted matrix A - {shift}B could not be factorized (pivot {pivot}); shift too close to the spectrum")]
    Shift { shift: f64, pivot: usize },

    #[error("eigensolver did not converge after {iterations} iterations; best residuals {residuals:?}")]
    Convergence { iterations: usize, residuals: Vec<f64> },

    #[error("shifted eigenvalue {value} is not positive")]
    ShiftPositivity { value: f64 },

    #[error("expression error: {0}")]
    Expression(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for SpectraError {
    fn from(err: std::io::Error) -> Self {
        SpectraError::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, SpectraError>;
