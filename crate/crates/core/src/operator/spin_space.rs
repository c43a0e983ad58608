use super::point::OperatorPoint;
use crate::linalg::{c64, real_diag, CMatrix, CVector};

/// The spin space `S_x = x(H)` with its indefinite spin scalar product
/// `<u|v>_x = -<u | x v>` written in an orthonormal eigenbasis of `x`.
#[derive(Debug, Clone)]
pub struct SpinSpace {
    pub base: Option<usize>,
    /// `f x rank` orthonormal basis of the image.
    pub basis: CMatrix,
    /// Gram matrix of the spin scalar product in `basis`.
    pub gram: CMatrix,
    pub signature: (usize, usize),
}

impl SpinSpace {
    pub fn of(x: &OperatorPoint) -> Self {
        let gram_diag: Vec<f64> = x.eigenvalues().iter().map(|v| -v).collect();
        Self {
            base: None,
            basis: x.basis().clone(),
            gram: real_diag(&gram_diag),
            // the positive part of the spin product is the negative spectral part of x
            signature: (x.neg_eigs(), x.pos_eigs()),
        }
    }

    pub fn at(x: &OperatorPoint, base: usize) -> Self {
        Self {
            base: Some(base),
            ..Self::of(x)
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    /// Coordinates of `pi_x u` in the spin basis.
    pub fn project(&self, u: &CVector) -> CVector {
        self.basis.adjoint() * u
    }

    /// Hilbert vector of a spin-space coordinate vector.
    pub fn embed(&self, coords: &CVector) -> CVector {
        &self.basis * coords
    }

    /// `<u|v>_x` for coordinate vectors.
    pub fn product(&self, u: &CVector, v: &CVector) -> crate::linalg::C64 {
        (u.adjoint() * &self.gram * v)[(0, 0)]
    }

    /// `pi_x` as an `f x f` matrix.
    pub fn projector(&self) -> CMatrix {
        &self.basis * self.basis.adjoint()
    }

    pub fn identity(&self) -> CMatrix {
        CMatrix::identity(self.dim(), self.dim()).map(|z| z * c64(1.0, 0.0))
    }
}

/// Spin space of `x` (free-function form).
pub fn spin_space(x: &OperatorPoint) -> SpinSpace {
    SpinSpace::of(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;
    use crate::tolerance::Tolerances;

    #[test]
    fn two_dimensional_examples() {
        let tol = Tolerances::default();
        let x = OperatorPoint::diagonal(&[1.0, -1.0], &tol).unwrap();
        let s = spin_space(&x);
        assert!(max_abs(&(&s.basis - CMatrix::identity(2, 2))) < 1e-15);
        assert!(max_abs(&(&s.gram - real_diag(&[-1.0, 1.0]))) < 1e-15);

        let y = OperatorPoint::diagonal(&[2.0, -1.0], &tol).unwrap();
        let s = spin_space(&y);
        assert!(max_abs(&(&s.gram - real_diag(&[-2.0, 1.0]))) < 1e-15);
        assert_eq!(s.signature, (1, 1));
    }

    #[test]
    fn gram_matches_definition() {
        let tol = Tolerances::default();
        let e = CMatrix::from_fn(2, 4, |i, j| {
            c64(0.2 * (i + j) as f64 - 0.3, 0.1 * j as f64 - 0.05 * i as f64)
        });
        let x = OperatorPoint::from_factor(&e, &real_diag(&[1.0, -1.0]), &tol).unwrap();
        let s = spin_space(&x);
        let direct = -(s.basis.adjoint() * x.matrix() * &s.basis);
        assert!(max_abs(&(direct - &s.gram)) < 1e-12);
    }
}
