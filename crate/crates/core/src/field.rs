//! Flowmaps, FTLE fields and flowmap Jacobians.

use std::fmt;

use crate::mesh::{Dim, MeshTopology};

/// Final particle positions `φ(x; t0, T)` for every seed point of a mesh.
///
/// `values` is point-major: point `p` occupies `values[p*dim..(p+1)*dim]`.
/// The horizon is signed; negative values describe backward-time maps.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowmapField {
    pub dim: Dim,
    pub npoints: usize,
    pub values: Vec<f64>,
    pub t0: f64,
    pub horizon: f64,
}

impl FlowmapField {
    /// Checked constructor; returns the diagnostics of a field that would
    /// break the type's invariants.
    pub fn new(dim: Dim, values: Vec<f64>, t0: f64, horizon: f64) -> Result<Self, Diagnostics> {
        let field = FlowmapField {
            dim,
            npoints: values.len() / dim.n(),
            values,
            t0,
            horizon,
        };
        let diag = field.self_check();
        if diag.is_ok() {
            Ok(field)
        } else {
            Err(diag)
        }
    }

    /// The identity map on `mesh`: every point stays where it is.
    pub fn identity(mesh: &MeshTopology, horizon: f64) -> Self {
        FlowmapField {
            dim: mesh.dim(),
            npoints: mesh.npoints(),
            values: mesh.coords().to_vec(),
            t0: 0.0,
            horizon,
        }
    }

    #[inline]
    pub fn position(&self, p: usize) -> &[f64] {
        let d = self.dim.n();
        &self.values[p * d..(p + 1) * d]
    }

    fn self_check(&self) -> Diagnostics {
        let mut violations = Vec::new();
        let d = self.dim.n();
        if self.values.len() != self.npoints * d {
            violations.push(Violation::ValuesLength {
                expected: self.npoints * d,
                got: self.values.len(),
            });
        }
        if !self.t0.is_finite() || !self.horizon.is_finite() {
            violations.push(Violation::NonFiniteTime);
        }
        if self.horizon == 0.0 {
            violations.push(Violation::ZeroHorizon);
        }
        for (p, chunk) in self.values.chunks(d).enumerate() {
            if chunk.iter().any(|v| !v.is_finite()) {
                violations.push(Violation::NonFiniteValue { point: p });
            }
        }
        Diagnostics { violations }
    }
}

/// A single problem found by [`validate_flowmap`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    DimMismatch { field: Dim, mesh: Dim },
    NpointsMismatch { field: usize, mesh: usize },
    ValuesLength { expected: usize, got: usize },
    NonFiniteValue { point: usize },
    NonFiniteTime,
    ZeroHorizon,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DimMismatch { field, mesh } => {
                write!(f, "dimension mismatch: field is {field}, mesh is {mesh}")
            }
            Violation::NpointsMismatch { field, mesh } => {
                write!(
                    f,
                    "point count mismatch: field has {field}, mesh has {mesh}"
                )
            }
            Violation::ValuesLength { expected, got } => {
                write!(f, "values length {got}, expected {expected}")
            }
            Violation::NonFiniteValue { point } => write!(f, "non-finite value at point {point}"),
            Violation::NonFiniteTime => write!(f, "non-finite start time or horizon"),
            Violation::ZeroHorizon => write!(f, "zero integration horizon"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Diagnostics {
    pub violations: Vec<Violation>,
}

impl Diagnostics {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for Diagnostics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Checks a flowmap against the mesh it is supposed to live on.
pub fn validate_flowmap(field: &FlowmapField, mesh: &MeshTopology) -> Diagnostics {
    let mut diag = field.self_check();
    if field.dim != mesh.dim() {
        diag.violations.insert(
            0,
            Violation::DimMismatch {
                field: field.dim,
                mesh: mesh.dim(),
            },
        );
    }
    if field.npoints != mesh.npoints() {
        diag.violations.insert(
            0,
            Violation::NpointsMismatch {
                field: field.npoints,
                mesh: mesh.npoints(),
            },
        );
    }
    diag
}

/// One FTLE value per point. Degenerate points hold `NaN`.
#[derive(Debug, Clone, PartialEq)]
pub struct FtleField {
    pub dim: Dim,
    pub values: Vec<f64>,
    pub degenerate_count: usize,
}

impl FtleField {
    pub fn npoints(&self) -> usize {
        self.values.len()
    }

    /// Bitwise equality, treating identical NaN payloads as equal.
    pub fn bit_eq(&self, other: &FtleField) -> bool {
        self.dim == other.dim
            && self.degenerate_count == other.degenerate_count
            && self.values.len() == other.values.len()
            && self
                .values
                .iter()
                .zip(&other.values)
                .all(|(a, b)| a.to_bits() == b.to_bits())
    }
}

/// Gradient `∂φᵢ/∂xⱼ` of the flowmap at one point, row `i`, column `j`.
/// Only the leading `dim × dim` block is meaningful.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jacobian {
    pub dim: Dim,
    pub entries: [[f64; 3]; 3],
}

impl Jacobian {
    pub fn from_rows(rows: &[&[f64]]) -> Result<Self, crate::mesh::MeshError> {
        let dim = Dim::new(rows.len())?;
        let mut entries = [[0.0; 3]; 3];
        for (i, row) in rows.iter().enumerate() {
            if row.len() != rows.len() {
                return Err(crate::mesh::MeshError::AxisCount {
                    expected: rows.len(),
                    got: row.len(),
                });
            }
            entries[i][..row.len()].copy_from_slice(row);
        }
        Ok(Jacobian { dim, entries })
    }

    pub fn identity(dim: Dim) -> Self {
        let mut entries = [[0.0; 3]; 3];
        for (i, row) in entries.iter_mut().enumerate().take(dim.n()) {
            row[i] = 1.0;
        }
        Jacobian { dim, entries }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i][j]
    }
}
