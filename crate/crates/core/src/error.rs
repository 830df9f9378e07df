use thiserror::Error;

/// Errors raised by the solver library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("curve touches or crosses the rotation axis: {0}")]
    AxisViolation(String),

    #[error("invalid geometry: {0}")]
    Geometry(String),

    #[error("curve is not smooth at s = {0}")]
    NonSmoothPoint(f64),

    #[error("kernel derivative requested at its jump point x = {0} without a side")]
    KernelJump(f64),

    #[error("refinement target {0} is not a panel boundary")]
    Refinement(f64),

    #[error("point {x} lies outside the panel [{a}, {b}]")]
    Extrapolation { x: f64, a: f64, b: f64 },

    #[error("split point {x} is not interior to [{a}, {b}]")]
    DegenerateSplit { x: f64, a: f64, b: f64 },

    #[error("ill-posed problem: {0}")]
    WellPosedness(String),

    #[error("assembly failed: {0}")]
    Assembly(String),

    #[error("linear solver did not converge after {iterations} iterations (relative residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("right-hand side is not in the range of the operator: relative surface mean {0:e}")]
    Solvability(f64),

    #[error("singular data: {0}")]
    SingularData(String),

    #[error("reference field has zero norm")]
    DegenerateReference,
}

pub type Result<T> = std::result::Result<T, Error>;
