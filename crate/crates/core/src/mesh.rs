//! Point sets and their per-axis neighbor relations.
//!
//! Every mesh, structured or not, is described by the same table: for each
//! point and each axis, an optional forward and an optional backward
//! neighbor. Structured grids derive the table from their shape; unstructured
//! tables are taken as given (after validation). Boundary points simply have
//! absent entries; how the gradient treats them is up to [`crate::kernels`].

use std::fmt;

use thiserror::Error;

/// Spatial dimension of a mesh or field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dim {
    Two,
    Three,
}

impl Dim {
    pub fn new(n: usize) -> Result<Self, MeshError> {
        match n {
            2 => Ok(Dim::Two),
            3 => Ok(Dim::Three),
            other => Err(MeshError::UnsupportedDim(other)),
        }
    }

    #[inline]
    pub fn n(self) -> usize {
        match self {
            Dim::Two => 2,
            Dim::Three => 3,
        }
    }
}

impl fmt::Display for Dim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}D", self.n())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeshError {
    #[error("dimension must be 2 or 3, got {0}")]
    UnsupportedDim(usize),
    #[error("expected {expected} per-axis values, got {got}")]
    AxisCount { expected: usize, got: usize },
    #[error("axis {axis} has {count} points; at least 3 are required")]
    TooFewPoints { axis: usize, count: usize },
    #[error("axis {axis} spacing must be positive and finite, got {spacing}")]
    BadSpacing { axis: usize, spacing: f64 },
    #[error("axis {axis} origin must be finite, got {origin}")]
    BadOrigin { axis: usize, origin: f64 },
    #[error("mesh with {0} points exceeds the supported size")]
    TooLarge(u128),
    #[error("coordinate array has length {got}, expected {expected}")]
    CoordsLength { expected: usize, got: usize },
    #[error("neighbor table has length {got}, expected {expected}")]
    NeighborsLength { expected: usize, got: usize },
    #[error("non-finite coordinate at point {point}")]
    NonFiniteCoord { point: usize },
    #[error("point {point} axis {axis}: neighbor index {index} out of range [0, {npoints})")]
    NeighborOutOfRange {
        point: usize,
        axis: usize,
        index: i64,
        npoints: usize,
    },
    #[error("point {point} axis {axis}: neighbor relation is not symmetric")]
    Asymmetric { point: usize, axis: usize },
    #[error("point {point} axis {axis}: neighbors are not ordered along the axis")]
    NotOrdered { point: usize, axis: usize },
    #[error("operation needs a structured grid")]
    NotStructured,
    #[error("jitter must lie in [0, 1), got {0}")]
    BadJitter(f64),
}

/// Forward/backward neighbors of one point along one axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub struct AxisNeighbors {
    forward: Option<u32>,
    backward: Option<u32>,
}

impl AxisNeighbors {
    pub fn new(forward: Option<usize>, backward: Option<usize>) -> Self {
        // Callers go through `MeshTopology` constructors, which bound indices
        // by `MAX_POINTS` before building these.
        AxisNeighbors {
            forward: forward.map(|i| i as u32),
            backward: backward.map(|i| i as u32),
        }
    }

    #[inline]
    pub fn forward(&self) -> Option<usize> {
        self.forward.map(|i| i as usize)
    }

    #[inline]
    pub fn backward(&self) -> Option<usize> {
        self.backward.map(|i| i as usize)
    }
}

/// Largest supported point count (neighbor indices are stored as `u32`).
pub const MAX_POINTS: usize = u32::MAX as usize;

/// Shape of a regular grid.
#[derive(Debug, Clone, PartialEq)]
pub struct StructuredGrid {
    pub dims: Vec<usize>,
    pub spacing: Vec<f64>,
    pub origin: Vec<f64>,
}

impl StructuredGrid {
    /// Row-major linear index, last axis fastest.
    pub fn linear_index(&self, idx: &[usize]) -> usize {
        idx.iter()
            .zip(&self.dims)
            .fold(0, |acc, (&i, &n)| acc * n + i)
    }

    /// Inverse of [`StructuredGrid::linear_index`]; unused trailing entries are zero.
    pub fn grid_index(&self, mut p: usize) -> [usize; 3] {
        let mut out = [0; 3];
        for a in (0..self.dims.len()).rev() {
            out[a] = p % self.dims[a];
            p /= self.dims[a];
        }
        out
    }

    pub fn npoints(&self) -> usize {
        self.dims.iter().product()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MeshKind {
    Structured(StructuredGrid),
    /// Explicit neighbor table. `symmetric` records that the forward/backward
    /// relation was checked to be mutual when the table was accepted.
    Unstructured {
        symmetric: bool,
    },
}

/// Point coordinates plus the per-axis neighbor table.
///
/// Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshTopology {
    dim: Dim,
    coords: Vec<f64>,
    neighbors: Vec<AxisNeighbors>,
    kind: MeshKind,
}

impl MeshTopology {
    /// Builds an unstructured topology from flat coordinate and neighbor
    /// arrays (`npoints * dim` entries each, point-major).
    ///
    /// Rejects out-of-range indices, non-finite coordinates and neighbors
    /// that are not on the expected side of the point along their axis. When
    /// `require_symmetric` is set, `forward(p, a) = q` must imply
    /// `backward(q, a) = p` and vice versa.
    pub fn unstructured(
        dim: Dim,
        coords: Vec<f64>,
        neighbors: Vec<AxisNeighbors>,
        require_symmetric: bool,
    ) -> Result<Self, MeshError> {
        let d = dim.n();
        if !coords.len().is_multiple_of(d) {
            return Err(MeshError::CoordsLength {
                expected: coords.len() / d * d,
                got: coords.len(),
            });
        }
        let npoints = coords.len() / d;
        if npoints > MAX_POINTS {
            return Err(MeshError::TooLarge(npoints as u128));
        }
        if neighbors.len() != npoints * d {
            return Err(MeshError::NeighborsLength {
                expected: npoints * d,
                got: neighbors.len(),
            });
        }
        let mesh = MeshTopology {
            dim,
            coords,
            neighbors,
            kind: MeshKind::Unstructured {
                symmetric: require_symmetric,
            },
        };
        mesh.check(require_symmetric)?;
        Ok(mesh)
    }

    fn check(&self, require_symmetric: bool) -> Result<(), MeshError> {
        let d = self.dim.n();
        let npoints = self.npoints();
        for p in 0..npoints {
            if self.coord(p).iter().any(|c| !c.is_finite()) {
                return Err(MeshError::NonFiniteCoord { point: p });
            }
        }
        for p in 0..npoints {
            for axis in 0..d {
                let nb = self.neighbors(p, axis);
                for q in [nb.forward, nb.backward].into_iter().flatten() {
                    if q as usize >= npoints {
                        return Err(MeshError::NeighborOutOfRange {
                            point: p,
                            axis,
                            index: q as i64,
                            npoints,
                        });
                    }
                }
                let x = self.coord(p)[axis];
                if let Some(f) = nb.forward() {
                    if !(self.coord(f)[axis] - x > 0.0) {
                        return Err(MeshError::NotOrdered { point: p, axis });
                    }
                    if require_symmetric && self.neighbors(f, axis).backward() != Some(p) {
                        return Err(MeshError::Asymmetric { point: p, axis });
                    }
                }
                if let Some(b) = nb.backward() {
                    if !(x - self.coord(b)[axis] > 0.0) {
                        return Err(MeshError::NotOrdered { point: p, axis });
                    }
                    if require_symmetric && self.neighbors(b, axis).forward() != Some(p) {
                        return Err(MeshError::Asymmetric { point: p, axis });
                    }
                }
            }
        }
        Ok(())
    }

    #[inline]
    pub fn dim(&self) -> Dim {
        self.dim
    }

    #[inline]
    pub fn npoints(&self) -> usize {
        self.coords.len() / self.dim.n()
    }

    pub fn kind(&self) -> &MeshKind {
        &self.kind
    }

    pub fn structured(&self) -> Option<&StructuredGrid> {
        match &self.kind {
            MeshKind::Structured(g) => Some(g),
            MeshKind::Unstructured { .. } => None,
        }
    }

    /// Position of point `p` (length `dim`).
    #[inline]
    pub fn coord(&self, p: usize) -> &[f64] {
        let d = self.dim.n();
        &self.coords[p * d..(p + 1) * d]
    }

    #[inline]
    pub fn neighbors(&self, p: usize, axis: usize) -> AxisNeighbors {
        self.neighbors[p * self.dim.n() + axis]
    }

    /// Flat point-major coordinate array.
    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Flat point-major, axis-minor neighbor table.
    pub fn neighbor_table(&self) -> &[AxisNeighbors] {
        &self.neighbors
    }

    /// Same points and neighbor relation, re-labelled as an explicit table.
    pub fn to_unstructured(&self) -> MeshTopology {
        let symmetric = match self.kind {
            MeshKind::Structured(_) => true,
            MeshKind::Unstructured { symmetric } => symmetric,
        };
        MeshTopology {
            dim: self.dim,
            coords: self.coords.clone(),
            neighbors: self.neighbors.clone(),
            kind: MeshKind::Unstructured { symmetric },
        }
    }

    /// Checks `forward(p, a) = q ⇒ backward(q, a) = p` (and the converse) for
    /// every point and axis.
    pub fn is_symmetric(&self) -> bool {
        let d = self.dim.n();
        (0..self.npoints()).all(|p| {
            (0..d).all(|a| {
                let nb = self.neighbors(p, a);
                nb.forward()
                    .is_none_or(|f| self.neighbors(f, a).backward() == Some(p))
                    && nb
                        .backward()
                        .is_none_or(|b| self.neighbors(b, a).forward() == Some(p))
            })
        })
    }
}

/// Builds a regular grid with row-major ordering (last axis fastest).
///
/// Interior points get both neighbors on every axis; points on a boundary
/// face have the outward neighbor absent.
pub fn make_structured_grid(
    dims: &[usize],
    spacing: &[f64],
    origin: &[f64],
) -> Result<MeshTopology, MeshError> {
    let dim = Dim::new(dims.len())?;
    let d = dim.n();
    for got in [spacing.len(), origin.len()] {
        if got != d {
            return Err(MeshError::AxisCount { expected: d, got });
        }
    }
    for a in 0..d {
        if dims[a] < 3 {
            return Err(MeshError::TooFewPoints {
                axis: a,
                count: dims[a],
            });
        }
        if !(spacing[a] > 0.0 && spacing[a].is_finite()) {
            return Err(MeshError::BadSpacing {
                axis: a,
                spacing: spacing[a],
            });
        }
        if !origin[a].is_finite() {
            return Err(MeshError::BadOrigin {
                axis: a,
                origin: origin[a],
            });
        }
    }
    let total = dims
        .iter()
        .fold(1u128, |acc, &n| acc.saturating_mul(n as u128));
    if total > MAX_POINTS as u128 {
        return Err(MeshError::TooLarge(total));
    }
    let npoints = total as usize;

    let grid = StructuredGrid {
        dims: dims.to_vec(),
        spacing: spacing.to_vec(),
        origin: origin.to_vec(),
    };

    // Distance in linear index between neighbors along each axis.
    let mut strides = [1usize; 3];
    for a in (0..d.saturating_sub(1)).rev() {
        strides[a] = strides[a + 1] * dims[a + 1];
    }

    let mut coords = Vec::with_capacity(npoints * d);
    let mut neighbors = Vec::with_capacity(npoints * d);
    for p in 0..npoints {
        let idx = grid.grid_index(p);
        for a in 0..d {
            coords.push(origin[a] + idx[a] as f64 * spacing[a]);
        }
        for a in 0..d {
            let forward = (idx[a] + 1 < dims[a]).then(|| p + strides[a]);
            let backward = (idx[a] > 0).then(|| p - strides[a]);
            neighbors.push(AxisNeighbors::new(forward, backward));
        }
    }

    Ok(MeshTopology {
        dim,
        coords,
        neighbors,
        kind: MeshKind::Structured(grid),
    })
}

/// Grid spanning `[lo, hi]` on each axis, endpoints included.
pub fn grid_on_box(dims: &[usize], bounds: &[(f64, f64)]) -> Result<MeshTopology, MeshError> {
    if bounds.len() != dims.len() {
        return Err(MeshError::AxisCount {
            expected: dims.len(),
            got: bounds.len(),
        });
    }
    let spacing: Vec<f64> = dims
        .iter()
        .zip(bounds)
        .map(|(&n, &(lo, hi))| (hi - lo) / (n.max(2) - 1) as f64)
        .collect();
    let origin: Vec<f64> = bounds.iter().map(|b| b.0).collect();
    make_structured_grid(dims, &spacing, &origin)
}

/// Structured grid with interior points displaced by up to
/// `±amount/2` of the spacing on each axis, returned as a symmetric
/// unstructured table. Boundary points stay in place, so the hull of the
/// grid is unchanged. `amount` must lie in `[0, 1)`.
pub fn jitter_grid(
    mesh: &MeshTopology,
    amount: f64,
    rng: &mut impl rand::Rng,
) -> Result<MeshTopology, MeshError> {
    let grid = mesh.structured().ok_or(MeshError::NotStructured)?;
    if !(0.0..1.0).contains(&amount) {
        return Err(MeshError::BadJitter(amount));
    }
    let d = mesh.dim.n();
    let mut coords = mesh.coords.clone();
    for p in 0..mesh.npoints() {
        let interior = (0..d).all(|a| {
            let nb = mesh.neighbors(p, a);
            nb.forward.is_some() && nb.backward.is_some()
        });
        if interior {
            for a in 0..d {
                let u: f64 = rng.random_range(-0.5..=0.5);
                coords[p * d + a] += u * amount * grid.spacing[a];
            }
        }
    }
    MeshTopology::unstructured(mesh.dim, coords, mesh.neighbors.clone(), true)
}
