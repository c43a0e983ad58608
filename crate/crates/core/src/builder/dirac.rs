//! Dirac matrices in the Dirac representation, signature `(+, -, -, -)`.

use crate::linalg::{c64, CMatrix, C64};

pub const METRIC: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

fn pauli(i: usize) -> [[C64; 2]; 2] {
    let (o, z) = (c64(1.0, 0.0), C64::default());
    match i {
        1 => [[z, o], [o, z]],
        2 => [[z, c64(0.0, -1.0)], [c64(0.0, 1.0), z]],
        3 => [[o, z], [z, -o]],
        _ => panic!("pauli index {i} out of range"),
    }
}

/// `gamma^mu` for `mu = 0..4`.
pub fn gamma(mu: usize) -> CMatrix {
    let mut g = CMatrix::zeros(4, 4);
    if mu == 0 {
        for i in 0..4 {
            g[(i, i)] = c64(if i < 2 { 1.0 } else { -1.0 }, 0.0);
        }
        return g;
    }
    let s = pauli(mu);
    for a in 0..2 {
        for b in 0..2 {
            g[(a, b + 2)] = s[a][b];
            g[(a + 2, b)] = -s[a][b];
        }
    }
    g
}

/// Gram matrix of the spinor inner product `psi^† gamma^0 phi`, signature (2, 2).
pub fn spinor_signature() -> CMatrix {
    gamma(0)
}

/// `v-slash = gamma^mu eta_{mu nu} v^nu` for a contravariant 4-vector.
pub fn slash(v: &[f64; 4]) -> CMatrix {
    let mut out = CMatrix::zeros(4, 4);
    for mu in 0..4 {
        out += gamma(mu).scale(METRIC[mu] * v[mu]);
    }
    out
}

/// Minkowski product `eta(u, v)`.
pub fn minkowski_dot(u: &[f64; 4], v: &[f64; 4]) -> f64 {
    (0..4).map(|i| METRIC[i] * u[i] * v[i]).sum()
}

/// Columns of the pure boost taking `(1, 0, 0, 0)` to the future-directed
/// unit timelike vector `u`; column 0 is `u` itself.
pub fn boosted_frame(u: &[f64; 4]) -> [[f64; 4]; 4] {
    let mut frame = [[0.0; 4]; 4];
    frame[0] = *u;
    for j in 1..4 {
        let mut e = [0.0; 4];
        e[0] = u[j];
        for i in 1..4 {
            e[i] = if i == j { 1.0 } else { 0.0 } + u[i] * u[j] / (1.0 + u[0]);
        }
        frame[j] = e;
    }
    frame
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;

    #[test]
    fn clifford_relations() {
        for mu in 0..4 {
            for nu in 0..4 {
                let ac = gamma(mu) * gamma(nu) + gamma(nu) * gamma(mu);
                let expected = if mu == nu { 2.0 * METRIC[mu] } else { 0.0 };
                let diff = ac - CMatrix::identity(4, 4).scale(expected);
                assert!(max_abs(&diff) < 1e-15, "mu={mu} nu={nu}");
            }
        }
    }

    #[test]
    fn gammas_are_symmetric_for_spinor_product() {
        let s = spinor_signature();
        for mu in 0..4 {
            let g = gamma(mu);
            let adj = &s * g.adjoint() * &s;
            assert!(max_abs(&(adj - g)) < 1e-15);
        }
    }

    #[test]
    fn boost_frame_is_orthonormal() {
        let v = [0.3, -0.2, 0.5];
        let g = 1.0 / (1.0 - v.iter().map(|x| x * x).sum::<f64>()).sqrt();
        let u = [g, g * v[0], g * v[1], g * v[2]];
        let f = boosted_frame(&u);
        for a in 0..4 {
            for b in 0..4 {
                let expected = if a == b { METRIC[a] } else { 0.0 };
                assert!((minkowski_dot(&f[a], &f[b]) - expected).abs() < 1e-14);
            }
        }
    }
}
