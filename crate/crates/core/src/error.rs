use thiserror::Error;

use crate::expr::EvalError;
use crate::tensors::TensorError;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid chart: {0}")]
    InvalidChart(String),
    #[error("point has {found} coordinates, chart has {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("point {point:?} lies outside the chart domain")]
    OutOfDomain { point: Vec<f64> },
    #[error("degenerate metric at {point:?} (|det g| = {det:e})")]
    DegenerateMetric { point: Vec<f64>, det: f64 },
    #[error("J is not an almost product structure compatible with G at {point:?}: residual {residual:e}")]
    NotAlmostProduct { point: Vec<f64>, residual: f64 },
    #[error("degenerate plane: |g(X,X)g(Y,Y) - g(X,Y)^2| = {denominator:e}")]
    DegeneratePlane { denominator: f64 },
    #[error("ill-posed recurrence fit: target tensor vanishes (max-abs {max_abs:e})")]
    IllPosed { max_abs: f64 },
    #[error("only {found} of {wanted} sample points had a nondegenerate metric")]
    InsufficientSamples { found: usize, wanted: usize },
    #[error("manifest {path}: {message}")]
    Manifest { path: String, message: String },
    #[error("unknown gallery chart `{0}`")]
    UnknownChart(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

impl Error {
    /// Numeric degeneracy, as opposed to bad input.
    pub fn is_degeneracy(&self) -> bool {
        matches!(
            self,
            Error::DegenerateMetric { .. }
                | Error::InsufficientSamples { .. }
                | Error::DegeneratePlane { .. }
                | Error::IllPosed { .. }
        ) || matches!(self, Error::Tensor(TensorError::DegenerateMetric { .. }))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
