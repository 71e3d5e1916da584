use crate::field::Jacobian;
use crate::mesh::Dim;

use super::KernelError;

/// Symmetric 2×2 or 3×3 matrix, stored in full.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetricTensor {
    dim: Dim,
    entries: [[f64; 3]; 3],
}

impl SymmetricTensor {
    /// Accepts a full matrix whose off-diagonal entries already agree
    /// bit-for-bit.
    pub fn new(rows: &[&[f64]]) -> Result<Self, KernelError> {
        let j = Jacobian::from_rows(rows)?;
        let d = j.dim.n();
        for r in 0..d {
            for c in r + 1..d {
                if j.entries[r][c].to_bits() != j.entries[c][r].to_bits() {
                    return Err(KernelError::NotSymmetric);
                }
            }
        }
        Ok(SymmetricTensor {
            dim: j.dim,
            entries: j.entries,
        })
    }

    /// Mirrors the upper triangle (including the diagonal) into the lower.
    pub fn from_upper(dim: Dim, upper: [[f64; 3]; 3]) -> Self {
        let mut entries = [[0.0; 3]; 3];
        let d = dim.n();
        for r in 0..d {
            for c in r..d {
                entries[r][c] = upper[r][c];
                entries[c][r] = upper[r][c];
            }
        }
        SymmetricTensor { dim, entries }
    }

    #[inline]
    pub fn dim(&self) -> Dim {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i][j]
    }

    pub fn frobenius_norm(&self) -> f64 {
        let d = self.dim.n();
        let mut s = 0.0;
        for r in 0..d {
            for c in 0..d {
                s += self.entries[r][c] * self.entries[r][c];
            }
        }
        s.sqrt()
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim.n()).map(|i| self.entries[i][i]).sum()
    }
}

/// Right Cauchy–Green deformation tensor `JᵀJ`.
#[inline]
pub fn cauchy_green(j: &Jacobian) -> SymmetricTensor {
    let d = j.dim.n();
    let m = &j.entries;
    let mut upper = [[0.0; 3]; 3];
    for r in 0..d {
        for c in r..d {
            let mut s = 0.0;
            for k in 0..d {
                s += m[k][r] * m[k][c];
            }
            upper[r][c] = s;
        }
    }
    SymmetricTensor::from_upper(j.dim, upper)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn jac(rows: &[&[f64]]) -> Jacobian {
        Jacobian::from_rows(rows).unwrap()
    }

    fn sym(rows: &[&[f64]]) -> SymmetricTensor {
        SymmetricTensor::new(rows).unwrap()
    }

    #[test]
    fn identity() {
        assert_eq!(
            cauchy_green(&Jacobian::identity(Dim::Three)),
            sym(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]])
        );
    }

    #[test]
    fn diagonal_stretch() {
        let c = cauchy_green(&jac(&[&[2.0, 0.0], &[0.0, 1.0]]));
        assert_eq!(c, sym(&[&[4.0, 0.0], &[0.0, 1.0]]));
    }

    #[test]
    fn shear() {
        let c = cauchy_green(&jac(&[&[1.0, 1.0], &[0.0, 1.0]]));
        assert_eq!(c, sym(&[&[1.0, 1.0], &[1.0, 2.0]]));
    }

    #[test]
    fn rejects_asymmetric_input() {
        assert_eq!(
            SymmetricTensor::new(&[&[1.0, 2.0], &[2.0000001, 1.0]]),
            Err(KernelError::NotSymmetric)
        );
    }
}
