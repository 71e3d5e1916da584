use thiserror::Error;

use crate::field::Diagnostics;
use crate::flows::FlowError;
use crate::io::FormatError;
use crate::kernels::KernelError;
use crate::mesh::MeshError;

/// Top-level error for operations that span several modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error("invalid flowmap: {0}")]
    InvalidFlowmap(Diagnostics),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error("{0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
