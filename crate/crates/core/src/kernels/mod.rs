//! FTLE extraction: flowmap gradient, Cauchy–Green tensor, largest
//! eigenvalue and the exponent itself, plus the two executors that apply the
//! per-point pipeline over a whole mesh.

mod eigen;
mod executor;
mod exponent;
mod gradient;
mod tensor;

use thiserror::Error;

pub use eigen::{max_eigenvalue, max_eigenvalue_sym2, max_eigenvalue_sym3};
pub(crate) use executor::run_chunked;
pub use executor::{compute_ftle_field, ExecutionStrategy, DEFAULT_CHUNK};
pub use exponent::{ftle_point, DEGENERACY_FLOOR};
pub use gradient::flowmap_gradient;
pub use tensor::{cauchy_green, SymmetricTensor};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KernelError {
    #[error("point {point} has no neighbor along axis {axis}")]
    DegenerateStencil { point: usize, axis: usize },
    #[error("point {point} out of range [0, {npoints})")]
    PointOutOfRange { point: usize, npoints: usize },
    #[error("integration horizon must be non-zero")]
    ZeroHorizon,
    #[error("invalid execution strategy: {0}")]
    InvalidStrategy(String),
    #[error("tensor is not symmetric")]
    NotSymmetric,
    #[error(transparent)]
    Shape(#[from] crate::mesh::MeshError),
}
