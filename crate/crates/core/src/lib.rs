//! Finite-time Lyapunov exponent (FTLE) fields from discrete 2D/3D flowmaps.
//!
//! The per-point pipeline is flowmap gradient → Cauchy–Green tensor →
//! largest eigenvalue → `ln(λ_max) / (2|T|)`. It can be applied over a mesh
//! by a chunked data-parallel executor (many workers pulling contiguous
//! index ranges) or by a single sequential pass; both produce bit-identical
//! fields.
//!
//! ```
//! use ftle_core::{compute_ftle_field, generate_flowmap, make_structured_grid};
//! use ftle_core::{ExecutionStrategy, FlowSpec};
//!
//! let mesh = make_structured_grid(&[50, 25], &[0.04, 0.04], &[0.0, 0.0]).unwrap();
//! let flowmap = generate_flowmap(&mesh, &FlowSpec::double_gyre(), 0.0, 5.0, 0.1).unwrap();
//! let a = compute_ftle_field(&flowmap, &mesh, ExecutionStrategy::SinglePass).unwrap();
//! let b = compute_ftle_field(&flowmap, &mesh, ExecutionStrategy::data_parallel(4, 64).unwrap()).unwrap();
//! assert!(a.bit_eq(&b));
//! ```

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod cli;
mod error;
pub mod field;
pub mod flows;
pub mod io;
pub mod kernels;
pub mod mesh;

pub use error::{Error, Result};
pub use field::{validate_flowmap, Diagnostics, FlowmapField, FtleField, Jacobian, Violation};
pub use flows::{advect_rk4, generate_flowmap, FlowError, FlowSpec};
pub use kernels::{
    cauchy_green, compute_ftle_field, flowmap_gradient, ftle_point, max_eigenvalue,
    max_eigenvalue_sym2, max_eigenvalue_sym3, ExecutionStrategy, KernelError, SymmetricTensor,
};
pub use mesh::{
    grid_on_box, jitter_grid, make_structured_grid, AxisNeighbors, Dim, MeshError, MeshKind,
    MeshTopology, StructuredGrid,
};
