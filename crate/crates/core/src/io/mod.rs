//! On-disk formats.
//!
//! * `.ftlm`: flowmap plus mesh, little-endian, fixed width (see [`ftlm`]).
//! * `.ftlf`: an FTLE field, same conventions.
//! * CSV: `x,y[,z],ftle`, one row per point.

pub mod csv;
pub mod ftlm;

use thiserror::Error;

use crate::mesh::MeshError;

pub use self::csv::{format_ftle_csv, write_ftle_csv};
pub use self::ftlm::{
    decode_flowmap, decode_ftle_field, decode_neighbor_table, encode_flowmap, encode_ftle_field,
    encode_neighbor_table, read_flowmap, read_ftle_field, read_neighbor_table, write_flowmap,
    write_ftle_field, write_neighbor_table, FLOWMAP_MAGIC, FORMAT_VERSION, FTLE_MAGIC,
};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("bad magic {0:?}")]
    BadMagic([u8; 4]),
    #[error("unsupported format version {0}")]
    UnsupportedVersion(u32),
    #[error("truncated payload: needed {needed} bytes at offset {offset}, {available} available")]
    Truncated {
        offset: usize,
        needed: u64,
        available: usize,
    },
    #[error("unsupported dimension {0}")]
    BadDim(u32),
    #[error("dimension mismatch: header says {header}, mesh is {mesh}")]
    DimMismatch { header: usize, mesh: usize },
    #[error("point count mismatch: header says {header}, grid has {grid}")]
    NpointsMismatch { header: u64, grid: u128 },
    #[error("unknown mesh kind {0}")]
    BadKind(u32),
    #[error("{0} trailing bytes after payload")]
    TrailingBytes(usize),
    #[error("invalid topology: {0}")]
    Topology(#[from] MeshError),
    #[error("invalid field: {0}")]
    Invalid(String),
}
