//! Independent oracles shared by the integration tests. Nothing here calls
//! into the kernel implementations it is used to check.

#![allow(dead_code)]

use ftle_core::{FlowmapField, MeshTopology, SymmetricTensor};
use rand::Rng;

/// Determinant of `S - λI` by cofactor expansion.
pub fn char_det(s: &[[f64; 3]; 3], n: usize, lambda: f64) -> f64 {
    let m = |i: usize, j: usize| s[i][j] - if i == j { lambda } else { 0.0 };
    match n {
        2 => m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0),
        3 => {
            m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1))
                - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
                + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0))
        }
        _ => unreachable!(),
    }
}

/// Largest root of `det(λI - S)` for a symmetric positive-definite 3×3 by
/// bisection. The characteristic polynomial `p(λ) = det(λI - S)` is
/// increasing to the right of its larger critical point
/// `m = (c2 + sqrt(c2² - 3c1)) / 3`, so `[max(m, 0), trace]` brackets
/// exactly the largest root.
pub fn bisect_max_eigenvalue(s: &[[f64; 3]; 3]) -> f64 {
    let c2 = s[0][0] + s[1][1] + s[2][2];
    let c1 = s[0][0] * s[1][1] + s[0][0] * s[2][2] + s[1][1] * s[2][2]
        - s[0][1] * s[0][1]
        - s[0][2] * s[0][2]
        - s[1][2] * s[1][2];
    let m = (c2 + (c2 * c2 - 3.0 * c1).max(0.0).sqrt()) / 3.0;
    let p = |l: f64| -char_det(s, 3, l);
    let mut lo = m.max(0.0);
    let mut hi = c2;
    assert!(p(hi) >= 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if p(mid) >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Random symmetric positive-definite matrix `AᵀA + δI`, `A` uniform in
/// [-scale, scale].
pub fn random_spd(rng: &mut impl Rng, n: usize, scale: f64) -> [[f64; 3]; 3] {
    let mut a = [[0.0; 3]; 3];
    for row in a.iter_mut().take(n) {
        for v in row.iter_mut().take(n) {
            *v = rng.random_range(-scale..scale);
        }
    }
    let mut s = [[0.0; 3]; 3];
    for i in 0..n {
        for j in 0..n {
            s[i][j] = (0..n).map(|k| a[k][i] * a[k][j]).sum();
        }
    }
    // exact symmetry
    for i in 0..n {
        for j in 0..i {
            s[i][j] = s[j][i];
        }
        s[i][i] += 1e-3 * scale * scale;
    }
    s
}

pub fn tensor(s: &[[f64; 3]; 3], n: usize) -> SymmetricTensor {
    let rows: Vec<&[f64]> = s.iter().take(n).map(|r| &r[..n]).collect();
    SymmetricTensor::new(&rows).unwrap()
}

pub fn frobenius(s: &[[f64; 3]; 3], n: usize) -> f64 {
    (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| s[i][j] * s[i][j])
        .sum::<f64>()
        .sqrt()
}

/// Flowmap Jacobian at a structured-grid point, recomputed from grid index
/// arithmetic alone (no neighbor table).
pub fn dense_gradient(field: &FlowmapField, mesh: &MeshTopology, p: usize) -> Vec<Vec<f64>> {
    let g = mesh.structured().expect("structured grid");
    let d = g.dims.len();
    let mut idx = vec![0usize; d];
    let mut rem = p;
    for a in (0..d).rev() {
        idx[a] = rem % g.dims[a];
        rem /= g.dims[a];
    }
    let linear = |ix: &[usize]| -> usize {
        let mut l = 0;
        for a in 0..d {
            l = l * g.dims[a] + ix[a];
        }
        l
    };
    let x = |ix: &[usize], a: usize| g.origin[a] + ix[a] as f64 * g.spacing[a];
    let mut jac = vec![vec![0.0; d]; d];
    for j in 0..d {
        let mut hi = idx.clone();
        let mut lo = idx.clone();
        if idx[j] + 1 < g.dims[j] {
            hi[j] += 1;
        }
        if idx[j] > 0 {
            lo[j] -= 1;
        }
        let (ph, pl) = (linear(&hi), linear(&lo));
        for i in 0..d {
            jac[i][j] =
                (field.values[ph * d + i] - field.values[pl * d + i]) / (x(&hi, j) - x(&lo, j));
        }
    }
    jac
}

/// Whether every axis of point `p` has both neighbors.
pub fn is_interior(mesh: &MeshTopology, p: usize) -> bool {
    (0..mesh.dim().n()).all(|a| {
        let nb = mesh.neighbors(p, a);
        nb.forward().is_some() && nb.backward().is_some()
    })
}
