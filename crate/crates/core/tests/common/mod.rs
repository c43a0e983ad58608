#![allow(dead_code)]

use cfs_core::linalg::{c64, CMatrix, C64};
use cfs_core::{CausalFermionSystem, OperatorPoint, SystemPoint, Tolerances};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(r: &mut ChaCha8Rng) -> f64 {
    // Box-Muller
    let u: f64 = r.gen_range(f64::EPSILON..1.0);
    let v: f64 = r.gen();
    (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos()
}

pub fn complex_gaussian(r: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| c64(gaussian(r), gaussian(r)))
}

/// Orthonormal `f x k` frame (Haar-like via QR).
pub fn frame(r: &mut ChaCha8Rng, f: usize, k: usize) -> CMatrix {
    complex_gaussian(r, f, k).qr().q()
}

pub fn unitary(r: &mut ChaCha8Rng, f: usize) -> CMatrix {
    frame(r, f, f)
}

pub fn hermitian(r: &mut ChaCha8Rng, f: usize) -> CMatrix {
    let a = complex_gaussian(r, f, f);
    (&a + a.adjoint()).scale(0.5)
}

/// Eigenvalues with `n` positive and `n` negative entries, moduli in [0.5, 2].
pub fn signed_values(r: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut v = Vec::with_capacity(2 * n);
    for _ in 0..n {
        v.push(r.gen_range(0.5..2.0));
    }
    for _ in 0..n {
        v.push(-r.gen_range(0.5..2.0));
    }
    v
}

/// `B diag(values) B^†` as a dense matrix.
pub fn dense_from(basis: &CMatrix, values: &[f64]) -> CMatrix {
    let d = CMatrix::from_fn(values.len(), values.len(), |i, j| {
        if i == j {
            c64(values[i], 0.0)
        } else {
            C64::default()
        }
    });
    basis * d * basis.adjoint()
}

pub fn point_from(basis: &CMatrix, values: &[f64]) -> OperatorPoint {
    OperatorPoint::new(dense_from(basis, values), &Tolerances::default()).unwrap()
}

/// A random regular point of signature `(n, n)` in dimension `f`.
pub fn regular_point(r: &mut ChaCha8Rng, f: usize, n: usize) -> OperatorPoint {
    let b = frame(r, f, 2 * n);
    let v = signed_values(r, n);
    point_from(&b, &v)
}

/// Pair of points of mixed type: independent, sharing an eigenbasis,
/// orthogonal images, or a small perturbation of each other.
pub fn mixed_pair(r: &mut ChaCha8Rng, f: usize, n: usize) -> (OperatorPoint, OperatorPoint) {
    let kind = r.gen_range(0..4);
    match kind {
        0 => (regular_point(r, f, n), regular_point(r, f, n)),
        1 => {
            let b = frame(r, f, 2 * n);
            let (v, w) = (signed_values(r, n), signed_values(r, n));
            (point_from(&b, &v), point_from(&b, &w))
        }
        2 if f >= 4 * n => {
            let b = frame(r, f, 4 * n);
            let bx = b.columns(0, 2 * n).into_owned();
            let by = b.columns(2 * n, 2 * n).into_owned();
            (
                point_from(&bx, &signed_values(r, n)),
                point_from(&by, &signed_values(r, n)),
            )
        }
        _ => nearby_pair(r, f, n, 0.2),
    }
}

/// `x` and a point whose frame and eigenvalues are perturbed by `size`.
pub fn nearby_pair(
    r: &mut ChaCha8Rng,
    f: usize,
    n: usize,
    size: f64,
) -> (OperatorPoint, OperatorPoint) {
    let b = frame(r, f, 2 * n);
    let v = signed_values(r, n);
    let bump = complex_gaussian(r, f, 2 * n).scale(size);
    let b2 = (&b + bump).qr().q();
    let w: Vec<f64> = v
        .iter()
        .map(|x| x * (1.0 + size * r.gen_range(-0.5..0.5)))
        .collect();
    (point_from(&b, &v), point_from(&b2, &w))
}

pub fn system_of(n: usize, points: Vec<OperatorPoint>) -> CausalFermionSystem {
    let pts = points
        .into_iter()
        .enumerate()
        .map(|(i, x)| SystemPoint::new(format!("p{i}"), 1.0, x))
        .collect();
    CausalFermionSystem::new(n, pts, Tolerances::default()).unwrap()
}

/// Nonzero eigenvalues of a dense matrix, largest moduli first, `k` of them.
pub fn top_eigenvalues(m: &CMatrix, k: usize) -> Vec<C64> {
    let mut ev = cfs_core::linalg::eigenvalues(m).unwrap();
    ev.truncate(k);
    ev
}

/// Multiset distance: greedy matching of two spectra.
pub fn spectra_close(a: &[C64], b: &[C64], rel: f64) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let scale = a
        .iter()
        .chain(b)
        .fold(0.0_f64, |m, z| m.max(z.norm()))
        .max(1e-300);
    let mut used = vec![false; b.len()];
    for z in a {
        let best = (0..b.len())
            .filter(|&j| !used[j])
            .min_by(|&i, &j| (b[i] - z).norm().total_cmp(&(b[j] - z).norm()));
        match best {
            Some(j) if (b[j] - z).norm() <= rel * scale => used[j] = true,
            _ => return false,
        }
    }
    true
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0_f64, |a, z| a.max(z.norm()))
}
