use crate::error::{CfsError, Result};
use crate::linalg::{c64, hermitian_deviation, hermitian_eigen, max_abs, CMatrix};
use crate::tolerance::Tolerances;

/// Deviation from self-adjointness accepted on construction, relative to the
/// largest matrix entry.
pub const SELF_ADJOINT_REL: f64 = 1e-12;

/// A point of the operator manifold: a self-adjoint finite-rank operator on
/// the Hilbert space, stored together with its nonzero spectral data.
#[derive(Debug, Clone)]
pub struct OperatorPoint {
    matrix: CMatrix,
    eigenvalues: Vec<f64>,
    basis: CMatrix,
    pos_eigs: usize,
    neg_eigs: usize,
}

impl OperatorPoint {
    /// Builds a point from a dense self-adjoint matrix. The matrix is stored
    /// as given; eigenvalues at or below the zero cutoff are discarded.
    pub fn new(matrix: CMatrix, tol: &Tolerances) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(CfsError::DimensionMismatch {
                expected: matrix.nrows(),
                found: matrix.ncols(),
            });
        }
        let deviation = hermitian_deviation(&matrix);
        if deviation > SELF_ADJOINT_REL {
            return Err(CfsError::NotSelfAdjoint { deviation });
        }
        let eig = hermitian_eigen(&matrix);
        Ok(Self::from_parts(matrix, &eig.values, &eig.vectors, tol))
    }

    /// Builds `x = factor^† core factor` for a `k x f` factor and a Hermitian
    /// `k x k` core. The spectral data come from a `k x k` eigenproblem.
    pub fn from_factor(factor: &CMatrix, core: &CMatrix, tol: &Tolerances) -> Result<Self> {
        let k = factor.nrows();
        if core.nrows() != k || core.ncols() != k {
            return Err(CfsError::DimensionMismatch {
                expected: k,
                found: core.nrows(),
            });
        }
        let adj = factor.adjoint();
        let mut matrix = &adj * core * factor;
        matrix = (&matrix + matrix.adjoint()).scale(0.5);
        if k == 0 || factor.ncols() == 0 {
            return Self::new(matrix, tol);
        }
        // image(x) lies in range(factor^†); reduce to a k x k problem there
        let qr = adj.clone().qr();
        let q = qr.q();
        let r = qr.r();
        let small = &r * core * r.adjoint();
        let eig = hermitian_eigen(&small);
        let vectors = &q * &eig.vectors;
        Ok(Self::from_parts(matrix, &eig.values, &vectors, tol))
    }

    fn from_parts(matrix: CMatrix, values: &[f64], vectors: &CMatrix, tol: &Tolerances) -> Self {
        let scale = values.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        let cut = tol.zero_cutoff(scale);
        let keep: Vec<usize> = (0..values.len())
            .filter(|&i| values[i].abs() > cut)
            .collect();
        let mut basis = CMatrix::zeros(matrix.nrows(), keep.len());
        for (col, &i) in keep.iter().enumerate() {
            basis.set_column(col, &vectors.column(i));
        }
        let eigenvalues: Vec<f64> = keep.iter().map(|&i| values[i]).collect();
        let pos_eigs = eigenvalues.iter().filter(|v| **v > 0.0).count();
        let neg_eigs = eigenvalues.len() - pos_eigs;
        Self {
            matrix,
            eigenvalues,
            basis,
            pos_eigs,
            neg_eigs,
        }
    }

    /// Diagonal operator, mainly for examples and tests.
    pub fn diagonal(values: &[f64], tol: &Tolerances) -> Result<Self> {
        Self::new(crate::linalg::real_diag(values), tol)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Hilbert space dimension.
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn rank(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn pos_eigs(&self) -> usize {
        self.pos_eigs
    }

    pub fn neg_eigs(&self) -> usize {
        self.neg_eigs
    }

    pub fn signature(&self) -> (usize, usize) {
        (self.pos_eigs, self.neg_eigs)
    }

    /// Nonzero eigenvalues, descending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Orthonormal eigenvectors of the nonzero eigenvalues (`f x rank`),
    /// column `i` belonging to `eigenvalues()[i]`.
    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    /// Largest eigenvalue modulus.
    pub fn spectral_norm(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0_f64, |a, v| a.max(v.abs()))
    }

    /// Orthogonal projection onto the image.
    pub fn projector(&self) -> CMatrix {
        &self.basis * self.basis.adjoint()
    }

    /// Restriction of the operator to its image, `diag(eigenvalues)`.
    pub fn restricted(&self) -> CMatrix {
        crate::linalg::real_diag(&self.eigenvalues)
    }

    pub fn max_entry(&self) -> f64 {
        max_abs(&self.matrix)
    }

    pub fn check_spin_dimension(&self, id: &str, n: usize) -> Result<()> {
        if self.pos_eigs > n || self.neg_eigs > n {
            return Err(CfsError::SignatureBound {
                id: id.to_string(),
                pos: self.pos_eigs,
                neg: self.neg_eigs,
                n,
            });
        }
        Ok(())
    }

    /// Maximal rank `2n`.
    pub fn is_regular(&self, n: usize) -> bool {
        self.rank() == 2 * n
    }

    /// The point `s x`.
    pub fn scaled(&self, s: f64, tol: &Tolerances) -> Result<Self> {
        Self::new(self.matrix.map(|z| z * c64(s, 0.0)), tol)
    }
}

/// `B_x^† B_y`, the overlap of the two image bases.
pub fn overlap(x: &OperatorPoint, y: &OperatorPoint) -> Result<CMatrix> {
    if x.dim() != y.dim() {
        return Err(CfsError::DimensionMismatch {
            expected: x.dim(),
            found: y.dim(),
        });
    }
    Ok(x.basis().adjoint() * y.basis())
}
