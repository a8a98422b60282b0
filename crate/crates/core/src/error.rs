use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the mapping, solver and capacity routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid geometry: {0}")]
    Geometry(String),

    #[error("boundary curves overlap: {0}")]
    Overlap(String),

    #[error("base point {0} is not inside the domain")]
    BasePoint(Complex64),

    #[error("coincident boundary nodes at global index {0} and {1}")]
    CoincidentNodes(usize, usize),

    #[error("point {0} lies on the boundary (distance {1:e})")]
    OnBoundary(Complex64, f64),

    #[error("point {0} is outside the domain")]
    OutsideDomain(Complex64),

    #[error("GMRES did not converge in {iterations} iterations (relative residual {residual:e})")]
    NonConvergence {
        iterations: usize,
        residual: f64,
        history: Vec<f64>,
    },

    #[error("degenerate slit image on component {component}: length {length:e}")]
    DegenerateSlit { component: usize, length: f64 },

    #[error("singular linear system: {0}")]
    Singular(String),

    #[error("invalid problem file: {0}")]
    Problem(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for failures of an iterative numerical process, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NonConvergence { .. } | Error::Singular(_))
    }
}
