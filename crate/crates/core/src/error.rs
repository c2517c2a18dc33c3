use thiserror::Error;

/// Errors produced by mesh construction, assembly, solving and study orchestration.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("mesh is not strictly monotone on the {axis} axis (transition point sigma = {sigma})")]
    NonMonotoneMesh { axis: &'static str, sigma: f64 },

    #[error("quadrature order {order} out of range (expected {min}..={max})")]
    QuadratureOrder {
        order: usize,
        min: usize,
        max: usize,
    },

    #[error("quadrature order {order} too low for degree {degree} (need at least {needed})")]
    QuadratureTooLow {
        order: usize,
        degree: usize,
        needed: usize,
    },

    #[error("point ({x}, {y}) outside the unit square")]
    OutOfDomain { x: f64, y: f64 },

    #[error("matrix is singular (pivot {pivot:e} at step {step})")]
    SingularMatrix { pivot: f64, step: usize },

    #[error("solver did not converge: residual {residual:e} after {iterations} iterations")]
    NotConverged { residual: f64, iterations: usize },

    #[error("unknown layer kind `{0}`")]
    UnknownLayerKind(String),

    #[error("unknown problem `{0}` (available: {1})")]
    UnknownProblem(String, String),

    #[error("case (N={n}, k={k}, eps1={eps1:e}, eps2={eps2:e}) failed: {source}")]
    Case {
        n: usize,
        k: usize,
        eps1: f64,
        eps2: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
