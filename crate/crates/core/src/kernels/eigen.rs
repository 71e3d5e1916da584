use crate::mesh::Dim;

use super::SymmetricTensor;

/// Largest eigenvalue of a symmetric tensor, dispatched on dimension.
#[inline]
pub fn max_eigenvalue(s: &SymmetricTensor) -> f64 {
    match s.dim() {
        Dim::Two => max_eigenvalue_sym2(s),
        Dim::Three => max_eigenvalue_sym3(s),
    }
}

/// Closed form for `[[a, b], [b, c]]`: `(a+c)/2 + sqrt(((a-c)/2)² + b²)`.
///
/// Only the leading 2×2 block of `s` is read.
#[inline]
pub fn max_eigenvalue_sym2(s: &SymmetricTensor) -> f64 {
    let (a, b, c) = (s.get(0, 0), s.get(0, 1), s.get(1, 1));
    0.5 * (a + c) + (0.5 * (a - c)).hypot(b)
}

/// Trigonometric solution of the characteristic cubic.
///
/// With `q = tr(S)/3` and `p = sqrt(tr((S - qI)²)/6)`, the shifted and
/// scaled matrix `B = (S - qI)/p` has eigenvalues `2cos(φ + 2πk/3)` where
/// `cos(3φ) = det(B)/2`. The largest is `q + 2p·cos(φ)` with
/// `φ = acos(det(B)/2)/3 ∈ [0, π/3]`. The acos argument is clamped to
/// [-1, 1]; when `p` vanishes relative to `q` the matrix is scalar to
/// working precision and `q` is returned.
#[inline]
pub fn max_eigenvalue_sym3(s: &SymmetricTensor) -> f64 {
    let (a00, a01, a02) = (s.get(0, 0), s.get(0, 1), s.get(0, 2));
    let (a11, a12, a22) = (s.get(1, 1), s.get(1, 2), s.get(2, 2));

    let off = a01 * a01 + a02 * a02 + a12 * a12;
    let q = (a00 + a11 + a22) / 3.0;
    let (d0, d1, d2) = (a00 - q, a11 - q, a22 - q);
    let p2 = d0 * d0 + d1 * d1 + d2 * d2 + 2.0 * off;
    if p2 == 0.0 || p2 <= (f64::EPSILON * q).powi(2) {
        return q;
    }
    let p = (p2 / 6.0).sqrt();
    let inv = 1.0 / p;
    let (b00, b11, b22) = (d0 * inv, d1 * inv, d2 * inv);
    let (b01, b02, b12) = (a01 * inv, a02 * inv, a12 * inv);
    let det = b00 * (b11 * b22 - b12 * b12) - b01 * (b01 * b22 - b12 * b02)
        + b02 * (b01 * b12 - b11 * b02);
    let r = (0.5 * det).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    q + 2.0 * p * phi.cos()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(rows: &[&[f64]]) -> SymmetricTensor {
        SymmetricTensor::new(rows).unwrap()
    }

    #[test]
    fn sym2_examples() {
        assert_eq!(max_eigenvalue_sym2(&sym(&[&[2.0, 1.0], &[1.0, 2.0]])), 3.0);
        assert_eq!(max_eigenvalue_sym2(&sym(&[&[1.0, 0.0], &[0.0, 1.0]])), 1.0);
        assert_eq!(max_eigenvalue_sym2(&sym(&[&[4.0, 0.0], &[0.0, 1.0]])), 4.0);
        assert_eq!(max_eigenvalue_sym2(&sym(&[&[1.0, 0.0], &[0.0, 4.0]])), 4.0);
    }

    #[test]
    fn sym3_examples() {
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * b.abs().max(1.0);
        let diag = sym(&[&[1.0, 0.0, 0.0], &[0.0, 4.0, 0.0], &[0.0, 0.0, 9.0]]);
        assert!(close(max_eigenvalue_sym3(&diag), 9.0));
        let id = sym(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]]);
        assert_eq!(max_eigenvalue_sym3(&id), 1.0);
        let block = sym(&[&[2.0, 1.0, 0.0], &[1.0, 2.0, 0.0], &[0.0, 0.0, 5.0]]);
        assert!(close(max_eigenvalue_sym3(&block), 5.0));
    }

    #[test]
    fn sym3_repeated_top_eigenvalue() {
        // eigenvalues {1, 3, 3}: acos argument sits at -1, where an O(ε)
        // error in det(B) becomes O(√ε) in the eigenvalue
        let s = sym(&[&[3.0, 0.0, 0.0], &[0.0, 2.0, 1.0], &[0.0, 1.0, 2.0]]);
        assert!((max_eigenvalue_sym3(&s) - 3.0).abs() < 1e-7);
    }

    #[test]
    fn sym3_nearly_scalar() {
        let s = sym(&[&[2.0, 1e-300, 0.0], &[1e-300, 2.0, 0.0], &[0.0, 0.0, 2.0]]);
        assert_eq!(max_eigenvalue_sym3(&s), 2.0);
        let z = sym(&[&[0.0, 0.0, 0.0], &[0.0, 0.0, 0.0], &[0.0, 0.0, 0.0]]);
        assert_eq!(max_eigenvalue_sym3(&z), 0.0);
    }

    #[test]
    fn sym3_negative_definite() {
        let s = sym(&[&[-1.0, 0.0, 0.0], &[0.0, -4.0, 0.0], &[0.0, 0.0, -9.0]]);
        assert!((max_eigenvalue_sym3(&s) + 1.0).abs() < 1e-12);
    }
}
