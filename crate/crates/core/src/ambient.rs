//! Hilbert-Schmidt geometry of the operator manifold: distance, the
//! Riemannian metric `h(u, v) = tr(uv)`, projection to the tangent space of
//! the fixed-rank stratum, and a first-order retraction.

use crate::error::{CfsError, Result, UNINDEXED};
use crate::linalg::{hermitian_deviation, hermitian_eigen, real_pairing, singular_values, CMatrix};
use crate::operator::{OperatorPoint, SELF_ADJOINT_REL};
use crate::tolerance::Tolerances;

/// Relative size of the normal block tolerated when a tangent vector is built
/// from a supplied matrix.
pub const TANGENCY_REL: f64 = 1e-10;

/// A self-adjoint matrix attached to the point with index `base`.
#[derive(Debug, Clone)]
pub struct TangentVector {
    pub base: usize,
    pub matrix: CMatrix,
    /// The `(1 - pi_x) u (1 - pi_x)` block vanishes.
    pub tangent: bool,
}

/// `sqrt(tr((x - y)^2))`, the Frobenius norm of the difference.
pub fn hs_distance(x: &OperatorPoint, y: &OperatorPoint) -> Result<f64> {
    if x.dim() != y.dim() {
        return Err(CfsError::DimensionMismatch {
            expected: x.dim(),
            found: y.dim(),
        });
    }
    // entrywise difference: O(f^2), no products needed
    let d = x.matrix() - y.matrix();
    Ok(d.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
}

/// `x` and `y` written in a common orthonormal frame of `image(x) + image(y)`.
pub fn joint_frame(x: &OperatorPoint, y: &OperatorPoint) -> Result<(CMatrix, CMatrix)> {
    if x.dim() != y.dim() {
        return Err(CfsError::DimensionMismatch {
            expected: x.dim(),
            found: y.dim(),
        });
    }
    let (bx, by) = (x.basis(), y.basis());
    let mut stacked = CMatrix::zeros(x.dim(), bx.ncols() + by.ncols());
    stacked.columns_mut(0, bx.ncols()).copy_from(bx);
    stacked.columns_mut(bx.ncols(), by.ncols()).copy_from(by);
    if stacked.ncols() == 0 {
        return Ok((CMatrix::zeros(0, 0), CMatrix::zeros(0, 0)));
    }
    let q = if stacked.ncols() <= stacked.nrows() {
        stacked.qr().q()
    } else {
        CMatrix::identity(x.dim(), x.dim())
    };
    let cx = q.adjoint() * bx;
    let cy = q.adjoint() * by;
    let xs = &cx * x.restricted() * cx.adjoint();
    let ys = &cy * y.restricted() * cy.adjoint();
    Ok((xs, ys))
}

/// Operator norm of `x - y`.
pub fn operator_distance(x: &OperatorPoint, y: &OperatorPoint) -> Result<f64> {
    let (xs, ys) = joint_frame(x, y)?;
    Ok(singular_values(&(xs - ys)).first().copied().unwrap_or(0.0))
}

fn check_base(base: usize, u: &TangentVector) -> Result<()> {
    if u.base != base {
        return Err(CfsError::BaseMismatch {
            expected: base,
            found: u.base,
        });
    }
    Ok(())
}

/// `h(u, v) = tr(u v)` at the point with index `base`.
pub fn metric_h(base: usize, u: &TangentVector, v: &TangentVector) -> Result<f64> {
    check_base(base, u)?;
    check_base(base, v)?;
    if u.matrix.shape() != v.matrix.shape() {
        return Err(CfsError::DimensionMismatch {
            expected: u.matrix.nrows(),
            found: v.matrix.nrows(),
        });
    }
    // tr(uv) = sum conj(u_ij) v_ij for self-adjoint u
    Ok(real_pairing(&u.matrix, &v.matrix))
}

fn require_regular(x: &OperatorPoint, n: usize) -> Result<()> {
    if !x.is_regular(n) {
        return Err(CfsError::SingularPoint {
            index: UNINDEXED,
            rank: x.rank(),
            expected: 2 * n,
        });
    }
    Ok(())
}

fn check_self_adjoint(w: &CMatrix, f: usize) -> Result<()> {
    if w.nrows() != f || w.ncols() != f {
        return Err(CfsError::DimensionMismatch {
            expected: f,
            found: if w.nrows() != f { w.nrows() } else { w.ncols() },
        });
    }
    let deviation = hermitian_deviation(w);
    if deviation > SELF_ADJOINT_REL {
        return Err(CfsError::NotSelfAdjoint { deviation });
    }
    Ok(())
}

/// `w - (1 - pi) w (1 - pi) = pi w + w pi - pi w pi`.
pub fn project_tangent(
    x: &OperatorPoint,
    base: usize,
    n: usize,
    w: &CMatrix,
) -> Result<TangentVector> {
    require_regular(x, n)?;
    check_self_adjoint(w, x.dim())?;
    let b = x.basis();
    let bw = b.adjoint() * w; // B^† w
    let pw = b * &bw; // pi w
    let pwp = &pw * b * b.adjoint();
    let mut u = &pw + pw.adjoint() - pwp;
    u = (&u + u.adjoint()).scale(0.5);
    Ok(TangentVector {
        base,
        matrix: u,
        tangent: true,
    })
}

/// Wraps `w` after checking that its normal block vanishes.
pub fn tangent_vector(
    x: &OperatorPoint,
    base: usize,
    n: usize,
    w: CMatrix,
) -> Result<TangentVector> {
    let projected = project_tangent(x, base, n, &w)?;
    let scale = w
        .iter()
        .fold(0.0_f64, |a, z| a.max(z.norm()))
        .max(f64::MIN_POSITIVE);
    let normal = (&w - &projected.matrix)
        .iter()
        .fold(0.0_f64, |a, z| a.max(z.norm()));
    Ok(TangentVector {
        base,
        matrix: w,
        tangent: normal <= TANGENCY_REL * scale,
    })
}

/// `x + t u` truncated to its `2n` eigenvalues of largest modulus. The
/// result must keep the signature of `x`.
pub fn retract(
    x: &OperatorPoint,
    n: usize,
    u: &TangentVector,
    t: f64,
    tol: &Tolerances,
) -> Result<OperatorPoint> {
    require_regular(x, n)?;
    check_self_adjoint(&u.matrix, x.dim())?;
    if t == 0.0 {
        return Ok(x.clone());
    }
    // x + t u lives on image(x) + image(u B_x) for tangent u; for a general u
    // fall back to the full space
    let b = x.basis();
    let frame = if u.tangent {
        let ub = &u.matrix * b;
        let mut stacked = CMatrix::zeros(x.dim(), 2 * b.ncols());
        stacked.columns_mut(0, b.ncols()).copy_from(b);
        stacked.columns_mut(b.ncols(), b.ncols()).copy_from(&ub);
        if stacked.ncols() <= stacked.nrows() {
            Some(stacked.qr().q())
        } else {
            None
        }
    } else {
        None
    };
    let moved = x.matrix() + u.matrix.scale(t);
    let (values, vectors) = match &frame {
        Some(q) => {
            let small = q.adjoint() * &moved * q;
            let eig = hermitian_eigen(&small);
            (eig.values, q * eig.vectors)
        }
        None => {
            let eig = hermitian_eigen(&moved);
            (eig.values, eig.vectors)
        }
    };
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].abs().total_cmp(&values[a].abs()).then(a.cmp(&b)));
    let keep = &order[..(2 * n).min(order.len())];
    let scale = values.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    let cut = tol.zero_cutoff(scale);
    let pos = keep.iter().filter(|&&i| values[i] > cut).count();
    let neg = keep.iter().filter(|&&i| values[i] < -cut).count();
    if (pos, neg) != x.signature() {
        let mut all = values.clone();
        all.sort_by(|a, b| b.total_cmp(a));
        return Err(CfsError::LeftManifold { eigenvalues: all });
    }
    let mut factor = CMatrix::zeros(keep.len(), x.dim());
    let mut core = CMatrix::zeros(keep.len(), keep.len());
    for (r, &i) in keep.iter().enumerate() {
        factor.set_row(r, &vectors.column(i).adjoint());
        core[(r, r)] = crate::linalg::c64(values[i], 0.0);
    }
    OperatorPoint::from_factor(&factor, &core, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c64, real_diag};

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn distance_of_diagonal_pair() {
        let x = OperatorPoint::diagonal(&[1.0, -1.0], &tol()).unwrap();
        let y = OperatorPoint::diagonal(&[1.0, 1.0], &tol()).unwrap();
        assert!((hs_distance(&x, &y).unwrap() - 2.0).abs() < 1e-15);
        assert_eq!(hs_distance(&x, &x).unwrap(), 0.0);
        assert!((operator_distance(&x, &y).unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn projection_blocks() {
        let x = OperatorPoint::diagonal(&[2.0, -1.0, 0.0], &tol()).unwrap();
        let inside = real_diag(&[1.0, 3.0, 0.0]);
        let u = project_tangent(&x, 0, 1, &inside).unwrap();
        assert!(crate::linalg::max_abs(&(&u.matrix - &inside)) < 1e-15);
        let kernel = real_diag(&[0.0, 0.0, 5.0]);
        let k = project_tangent(&x, 0, 1, &kernel).unwrap();
        assert!(crate::linalg::max_abs(&k.matrix) < 1e-15);
        let mut mixed = CMatrix::zeros(3, 3);
        mixed[(0, 2)] = c64(1.0, 2.0);
        mixed[(2, 0)] = c64(1.0, -2.0);
        mixed[(2, 2)] = c64(4.0, 0.0);
        let once = project_tangent(&x, 0, 1, &mixed).unwrap();
        let twice = project_tangent(&x, 0, 1, &once.matrix).unwrap();
        assert!(crate::linalg::max_abs(&(&once.matrix - &twice.matrix)) < 1e-15);
        assert_eq!(once.matrix[(0, 2)], c64(1.0, 2.0));
        assert_eq!(once.matrix[(2, 2)], c64(0.0, 0.0));
    }

    #[test]
    fn metric_of_unit_diagonal() {
        let u = TangentVector {
            base: 3,
            matrix: real_diag(&[1.0, 0.0]),
            tangent: true,
        };
        assert_eq!(metric_h(3, &u, &u).unwrap(), 1.0);
        assert!(matches!(
            metric_h(2, &u, &u),
            Err(CfsError::BaseMismatch { .. })
        ));
    }

    #[test]
    fn retraction_at_zero_and_sign_flip() {
        let x = OperatorPoint::diagonal(&[2.0, -1.0, 0.0], &tol()).unwrap();
        let u = project_tangent(&x, 0, 1, &real_diag(&[0.0, 1.0, 0.0])).unwrap();
        let same = retract(&x, 1, &u, 0.0, &tol()).unwrap();
        assert_eq!(same.matrix(), x.matrix());
        let moved = retract(&x, 1, &u, 0.5, &tol()).unwrap();
        assert!((moved.eigenvalues()[1] + 0.5).abs() < 1e-14);
        assert!(matches!(
            retract(&x, 1, &u, 3.0, &tol()),
            Err(CfsError::LeftManifold { .. })
        ));
    }

    #[test]
    fn singular_base_rejected() {
        let x = OperatorPoint::diagonal(&[2.0, 0.0], &tol()).unwrap();
        assert!(project_tangent(&x, 0, 1, &real_diag(&[1.0, 0.0])).is_err());
    }
}
