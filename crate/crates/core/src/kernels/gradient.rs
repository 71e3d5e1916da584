use crate::field::{FlowmapField, Jacobian};
use crate::mesh::{AxisNeighbors, Dim, MeshTopology};

use super::KernelError;

/// Finite-difference gradient of the flowmap at `point`.
///
/// Central differences where both neighbors along an axis exist, one-sided
/// differences against the point itself where only one does.
pub fn flowmap_gradient(
    field: &FlowmapField,
    mesh: &MeshTopology,
    point: usize,
) -> Result<Jacobian, KernelError> {
    if point >= mesh.npoints() || point >= field.npoints {
        return Err(KernelError::PointOutOfRange {
            point,
            npoints: mesh.npoints().min(field.npoints),
        });
    }
    gradient_at(
        mesh.dim(),
        &field.values,
        mesh.coords(),
        mesh.neighbor_table(),
        point,
    )
}

/// Unchecked core of [`flowmap_gradient`], shared by both executors so they
/// evaluate every entry with the same expression.
#[inline]
pub(crate) fn gradient_at(
    dim: Dim,
    values: &[f64],
    coords: &[f64],
    neighbors: &[AxisNeighbors],
    point: usize,
) -> Result<Jacobian, KernelError> {
    let d = dim.n();
    let mut entries = [[0.0; 3]; 3];
    for j in 0..d {
        let nb = neighbors[point * d + j];
        let (hi, lo) = match (nb.forward(), nb.backward()) {
            (Some(f), Some(b)) => (f, b),
            (Some(f), None) => (f, point),
            (None, Some(b)) => (point, b),
            (None, None) => return Err(KernelError::DegenerateStencil { point, axis: j }),
        };
        let dx = coords[hi * d + j] - coords[lo * d + j];
        for (i, row) in entries.iter_mut().enumerate().take(d) {
            row[j] = (values[hi * d + i] - values[lo * d + i]) / dx;
        }
    }
    Ok(Jacobian { dim, entries })
}
