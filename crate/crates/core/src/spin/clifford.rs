use nalgebra::DMatrix;

use crate::error::{CfsError, Result};
use crate::linalg::{c64, frobenius, identity, indefinite_adjoint, CMatrix};

/// Default relative tolerance of the Clifford relations.
pub const CLIFFORD_TOL: f64 = 1e-9;

/// A space of spin-symmetric operators whose anticommutators are scalar.
///
/// The generators are kept in the given order. [`CliffordSubspace::frame`]
/// is the pseudo-orthonormal frame obtained from them by Gram-Schmidt in
/// that order; splice maps align frames element by element.
#[derive(Debug, Clone)]
pub struct CliffordSubspace {
    generators: Vec<CMatrix>,
    metric: DMatrix<f64>,
    signature: (usize, usize),
    frame: Vec<CMatrix>,
    eta: Vec<f64>,
}

impl CliffordSubspace {
    pub fn generators(&self) -> &[CMatrix] {
        &self.generators
    }

    /// `<u, v>` on the generators: `{u, v} / 2 = <u, v> 1`.
    pub fn metric(&self) -> &DMatrix<f64> {
        &self.metric
    }

    pub fn signature(&self) -> (usize, usize) {
        self.signature
    }

    pub fn dim(&self) -> usize {
        self.generators.len()
    }

    pub fn frame(&self) -> &[CMatrix] {
        &self.frame
    }

    /// `e_a^2 = eta_a` for the frame elements.
    pub fn eta(&self) -> &[f64] {
        &self.eta
    }

    /// Distance of the span of `other` from the span of this subspace.
    pub fn mismatch(&self, other: &[CMatrix]) -> f64 {
        span_distance(&self.generators, other)
    }
}

/// Checks symmetry, the anticommutation relations and non-degeneracy.
/// Deviations are measured relative to the Frobenius norms involved.
pub fn verify_clifford(
    generators: Vec<CMatrix>,
    gram: &CMatrix,
    tol: f64,
) -> Result<CliffordSubspace> {
    let d = gram.nrows();
    if generators.is_empty() {
        return Err(CfsError::Clifford("no generators".into()));
    }
    for (a, g) in generators.iter().enumerate() {
        if g.nrows() != d || g.ncols() != d {
            return Err(CfsError::DimensionMismatch {
                expected: d,
                found: g.nrows(),
            });
        }
        let dev = frobenius(&(indefinite_adjoint(g, gram, gram)? - g));
        if dev > tol * frobenius(g) {
            return Err(CfsError::Clifford(format!(
                "generator {a} is not symmetric (deviation {dev:.3e})"
            )));
        }
    }
    let k = generators.len();
    let mut metric = DMatrix::<f64>::zeros(k, k);
    for a in 0..k {
        for b in a..k {
            let (u, v) = (&generators[a], &generators[b]);
            let half = (u * v + v * u).scale(0.5);
            let c = half.trace() / c64(d as f64, 0.0);
            let dev = frobenius(&(&half - identity(d) * c));
            let scale = frobenius(u) * frobenius(v);
            if dev > tol * scale || c.im.abs() > tol * scale {
                return Err(CfsError::Clifford(format!(
                    "anticommutator of generators {a} and {b} is not a real multiple of the identity (deviation {dev:.3e})"
                )));
            }
            metric[(a, b)] = c.re;
            metric[(b, a)] = c.re;
        }
    }
    let eig = metric.clone().symmetric_eigen();
    let top = eig.eigenvalues.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if eig.eigenvalues.iter().any(|v| v.abs() <= tol * top) || top == 0.0 {
        return Err(CfsError::Clifford("degenerate bilinear form".into()));
    }
    let pos = eig.eigenvalues.iter().filter(|v| **v > 0.0).count();
    let (coeffs, eta) = pseudo_orthonormal(&metric, tol)?;
    let frame = coeffs
        .iter()
        .map(|c| {
            let mut m = CMatrix::zeros(d, d);
            for (g, w) in generators.iter().zip(c) {
                m += g.scale(*w);
            }
            m
        })
        .collect();
    Ok(CliffordSubspace {
        generators,
        metric,
        signature: (pos, k - pos),
        frame,
        eta,
    })
}

/// Gram-Schmidt for the indefinite form `metric`, falling back to the
/// eigenbasis (positive directions first) when a null vector is met.
fn pseudo_orthonormal(metric: &DMatrix<f64>, tol: f64) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    let k = metric.nrows();
    let top = metric.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let form = |u: &[f64], v: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..k {
            for j in 0..k {
                s += u[i] * metric[(i, j)] * v[j];
            }
        }
        s
    };
    let mut coeffs: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut eta = Vec::with_capacity(k);
    for a in 0..k {
        let mut w = vec![0.0; k];
        w[a] = 1.0;
        for (c, e) in coeffs.iter().zip(&eta) {
            let p = form(&w, c) * e;
            for i in 0..k {
                w[i] -= p * c[i];
            }
        }
        let nrm = form(&w, &w);
        if nrm.abs() <= 1e3 * tol * top {
            return eigen_frame(metric);
        }
        let s = nrm.abs().sqrt();
        coeffs.push(w.iter().map(|v| v / s).collect());
        eta.push(nrm.signum());
    }
    Ok((coeffs, eta))
}

fn eigen_frame(metric: &DMatrix<f64>) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    let k = metric.nrows();
    let eig = metric.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .total_cmp(&eig.eigenvalues[a])
            .then(a.cmp(&b))
    });
    let mut coeffs = Vec::with_capacity(k);
    let mut eta = Vec::with_capacity(k);
    for i in order {
        let lambda = eig.eigenvalues[i];
        let mut c: Vec<f64> = eig.eigenvectors.column(i).iter().copied().collect();
        // sign convention: the largest component is positive
        let big = c
            .iter()
            .copied()
            .fold(0.0_f64, |m, v| if v.abs() > m.abs() { v } else { m });
        let s = big.signum() / lambda.abs().sqrt();
        c.iter_mut().for_each(|v| *v *= s);
        coeffs.push(c);
        eta.push(lambda.signum());
    }
    Ok((coeffs, eta))
}

fn real_vectorize(ms: &[CMatrix]) -> DMatrix<f64> {
    let len = ms.first().map_or(0, |m| 2 * m.len());
    let mut out = DMatrix::<f64>::zeros(len, ms.len());
    for (j, m) in ms.iter().enumerate() {
        for (i, z) in m.iter().enumerate() {
            out[(2 * i, j)] = z.re;
            out[(2 * i + 1, j)] = z.im;
        }
    }
    out
}

/// Chordal distance `|sin theta|` between the real spans of two families of
/// matrices, `theta` the principal angles. Missing dimensions count as
/// right angles.
pub fn span_distance(a: &[CMatrix], b: &[CMatrix]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return (a.len().max(b.len()) as f64).sqrt();
    }
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let qs = real_vectorize(small).qr().q();
    let ql = real_vectorize(large).qr().q();
    // residual form, no cancellation near zero
    let outside = &qs - &ql * (ql.transpose() * &qs);
    let r2: f64 = outside.iter().map(|v| v * v).sum();
    (r2 + (large.len() - small.len()) as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builder::dirac::{gamma, spinor_signature};

    fn dirac() -> Vec<CMatrix> {
        (0..4).map(gamma).collect()
    }

    #[test]
    fn dirac_matrices_have_lorentzian_signature() {
        let k = verify_clifford(dirac(), &spinor_signature(), CLIFFORD_TOL).unwrap();
        assert_eq!(k.signature(), (1, 3));
        assert_eq!(k.eta(), &[1.0, -1.0, -1.0, -1.0]);
    }

    #[test]
    fn single_sign_operator() {
        let g = spinor_signature();
        let k = verify_clifford(vec![g.clone()], &g, CLIFFORD_TOL).unwrap();
        assert_eq!(k.signature(), (1, 0));
    }

    #[test]
    fn perturbed_generators_rejected() {
        let eps = 10.0 * CLIFFORD_TOL;
        let mut gens = dirac();
        gens[1] += (gamma(1) * gamma(2)).map(|z| z * c64(0.0, eps));
        assert!(verify_clifford(gens, &spinor_signature(), CLIFFORD_TOL).is_err());
    }

    #[test]
    fn null_generators_fall_back_to_eigenframe() {
        let gens = vec![gamma(0) + gamma(1), gamma(0) - gamma(1)];
        let k = verify_clifford(gens, &spinor_signature(), CLIFFORD_TOL).unwrap();
        assert_eq!(k.signature(), (1, 1));
        for (e, eta) in k.frame().iter().zip(k.eta()) {
            assert!(frobenius(&(e * e - identity(4).scale(*eta))) < 1e-12);
        }
    }

    #[test]
    fn span_distance_ignores_basis_choice() {
        let a = dirac();
        let b: Vec<CMatrix> = vec![
            &a[0] + &a[1],
            &a[1] * c64(2.0, 0.0),
            a[2].clone(),
            &a[3] - &a[2],
        ];
        assert!(span_distance(&a, &b) < 1e-12);
        assert!((span_distance(&a[..1], &a[1..2]) - 1.0).abs() < 1e-12);
    }
}
