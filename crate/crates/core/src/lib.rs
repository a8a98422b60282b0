//! Numerical conformal mapping for an infinite strip with rectilinear slits.
//!
//! Given `Ω = S \ ∪[a_j, b_j]` with `S = {|Im z| < π/2}`, the crate computes a
//! conformally equivalent domain `G` inside the unit disk bounded by smooth
//! curves, together with the map `Φ: G → Ω` and its inverse. The machinery
//! is used to compute condenser capacities and the complex potential of
//! uniform flow past the slits.
//!
//! All boundary operators use the generalized Neumann kernel discretised by
//! the Nyström method with the trapezoidal rule, and the resulting
//! second-kind systems are solved with restart-free GMRES.

pub mod bie;
pub mod capacity;
pub mod elliptic;
pub mod error;
pub mod flow;
pub mod geometry;
pub mod gmres;
pub mod kernel;
pub mod linalg;
pub mod map;
pub mod preimage;
pub mod problem;
#[cfg(test)]
mod proptests;
pub mod spectral;
pub mod study;

pub use capacity::{capacity, CapacityResult, CondenserSpec};
pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use flow::{Flow, FlowField, GridSpec};
pub use geometry::{psi, psi_inv, BoundaryParametrization, CurveShape, EllipseParams, SlitSpec, StripSlitDomain};
pub use map::{MapData, SlitExtraction, SlitImage};
pub use preimage::{iterate, IterationConfig, PreimageResult};
pub use problem::ProblemFile;
