//! Small dense complex linear algebra on top of `nalgebra` (and `faer` for
//! Hermitian eigendecompositions).
//!
//! Everything here is deterministic for fixed input: eigenvalues are sorted,
//! and eigenvector phases are normalized so that the largest-modulus
//! component is real and positive.

use faer::complex_native::c64 as Fc64;
use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{CfsError, Result};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Residual threshold (relative to the spectral scale) for accepting a
/// numerically computed null space of `A - mu`.
pub const NULL_SPACE_REL: f64 = 1e-6;

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn real_diag(values: &[f64]) -> CMatrix {
    let n = values.len();
    CMatrix::from_fn(n, n, |i, j| {
        if i == j {
            c64(values[i], 0.0)
        } else {
            C64::default()
        }
    })
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Relative deviation of `m` from its conjugate transpose.
pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    let scale = max_abs(m);
    if scale == 0.0 {
        return 0.0;
    }
    max_abs(&(m - m.adjoint())) / scale
}

/// Sum of squares of `m`'s entries in `Re tr(a^† b)` form, i.e. the real
/// Frobenius pairing.
pub fn real_pairing(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum()
}

/// Eigenvalues (descending) and orthonormal eigenvectors of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

pub fn hermitian_eigen(m: &CMatrix) -> HermitianEigen {
    let n = m.nrows();
    if n == 0 {
        return HermitianEigen {
            values: Vec::new(),
            vectors: CMatrix::zeros(0, 0),
        };
    }
    // nalgebra's complex `symmetric_eigen` can return a wrong basis for nearly
    // diagonal input with degenerate eigenvalues, so this goes through faer.
    let eig =
        to_faer(&(m + m.adjoint()).scale(0.5)).selfadjoint_eigendecomposition(faer::Side::Lower);
    let s = eig.s().column_vector();
    let u = eig.u();
    let raw: Vec<f64> = (0..n).map(|i| s.read(i).re).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| raw[b].total_cmp(&raw[a]).then(a.cmp(&b)));
    let values = order.iter().map(|&i| raw[i]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        let mut v = CVector::from_fn(n, |r, _| {
            let z = u.read(r, i);
            c64(z.re, z.im)
        });
        normalize_phase(&mut v);
        vectors.set_column(col, &v);
    }
    HermitianEigen { values, vectors }
}

/// Rotates `v` so that its largest-modulus component is real and positive.
pub fn normalize_phase(v: &mut CVector) {
    let mut best = 0;
    let mut best_norm = -1.0;
    for (i, z) in v.iter().enumerate() {
        // ties resolved towards the first index; the margin avoids flip-flopping
        // between nearly equal components
        if z.norm() > best_norm * (1.0 + 1e-12) {
            best = i;
            best_norm = z.norm();
        }
    }
    if best_norm > 0.0 {
        let phase = v[best] / best_norm;
        *v *= phase.conj();
    }
}

/// Eigenvalues of a general complex matrix via the complex Schur form,
/// sorted by descending modulus (ties: real part, then imaginary part).
pub fn eigenvalues(m: &CMatrix) -> Result<Vec<C64>> {
    let n = m.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut values: Vec<C64> = to_faer(m)
        .complex_eigenvalues()
        .into_iter()
        .map(|z| c64(z.re, z.im))
        .collect();
    if values
        .iter()
        .any(|z| !z.re.is_finite() || !z.im.is_finite())
    {
        return Err(CfsError::Numeric("Schur iteration did not converge".into()));
    }
    sort_spectrum(&mut values);
    Ok(values)
}

/// Singular values, descending.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut s: Vec<f64> = to_faer(m).singular_values();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

fn to_faer(m: &CMatrix) -> faer::Mat<Fc64> {
    faer::Mat::<Fc64>::from_fn(m.nrows(), m.ncols(), |i, j| {
        Fc64::new(m[(i, j)].re, m[(i, j)].im)
    })
}

pub fn sort_spectrum(values: &mut [C64]) {
    values.sort_by(|a, b| {
        b.norm()
            .total_cmp(&a.norm())
            .then(b.re.total_cmp(&a.re))
            .then(b.im.total_cmp(&a.im))
    });
}

pub fn inverse(m: &CMatrix) -> Result<CMatrix> {
    m.clone()
        .try_inverse()
        .ok_or_else(|| CfsError::Numeric("matrix is not invertible".into()))
}

/// Adjoint of `t: S_source -> S_target` with respect to the indefinite inner
/// products with Gram matrices `g_target` and `g_source`:
/// `t* = g_source^{-1} t^† g_target`.
pub fn indefinite_adjoint(t: &CMatrix, g_target: &CMatrix, g_source: &CMatrix) -> Result<CMatrix> {
    Ok(inverse(g_source)? * t.adjoint() * g_target)
}

/// Inertia (positive, negative, zero counts) of a Hermitian matrix.
pub fn inertia(m: &CMatrix, rel_tol: f64) -> (usize, usize, usize) {
    let eig = hermitian_eigen(m);
    let scale = eig.values.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    let cut = rel_tol * scale;
    let pos = eig.values.iter().filter(|v| **v > cut).count();
    let neg = eig.values.iter().filter(|v| **v < -cut).count();
    (pos, neg, eig.values.len() - pos - neg)
}

/// Columns spanning the approximate null space of a square matrix, together
/// with the largest singular value that was treated as zero.
fn null_space(m: &CMatrix, dim: usize) -> Result<(CMatrix, f64)> {
    let n = m.nrows();
    let svd = to_faer(m).svd();
    let (s, v) = (svd.s_diagonal(), svd.v());
    let sigma: Vec<f64> = (0..n).map(|i| s.read(i).re).collect();
    if sigma.iter().any(|x| !x.is_finite()) {
        return Err(CfsError::Numeric("SVD did not converge".into()));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| sigma[a].total_cmp(&sigma[b]).then(a.cmp(&b)));
    let mut basis = CMatrix::zeros(n, dim);
    let mut worst = 0.0_f64;
    for (col, &i) in order.iter().take(dim).enumerate() {
        worst = worst.max(sigma[i]);
        let mut w = CVector::from_fn(n, |r, _| {
            let z = v.read(r, i);
            c64(z.re, z.im)
        });
        normalize_phase(&mut w);
        basis.set_column(col, &w);
    }
    Ok((basis, worst))
}

/// Group of (numerically) equal eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    pub value: f64,
    /// Column range of the cluster's eigenvectors in [`RealDiagonalization::vectors`].
    pub start: usize,
    pub len: usize,
}

/// Diagonalization `A = V diag(values) V^{-1}` of a matrix with real spectrum.
#[derive(Debug, Clone)]
pub struct RealDiagonalization {
    pub vectors: CMatrix,
    pub inverse: CMatrix,
    pub clusters: Vec<Cluster>,
}

impl RealDiagonalization {
    /// Eigenvalue attached to each column of `vectors`.
    pub fn column_values(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.vectors.ncols());
        for c in &self.clusters {
            out.extend(std::iter::repeat_n(c.value, c.len));
        }
        out
    }

    /// `V diag(g(lambda)) V^{-1}`.
    pub fn apply(&self, g: impl Fn(f64) -> C64) -> CMatrix {
        let mut scaled = self.vectors.clone();
        for c in &self.clusters {
            let factor = g(c.value);
            for j in c.start..c.start + c.len {
                let mut col = scaled.column_mut(j);
                col *= factor;
            }
        }
        scaled * &self.inverse
    }

    /// `V diag(g(k, lambda_k)) V^{-1}` with `k` the cluster index.
    pub fn apply_per_cluster(&self, g: impl Fn(usize, f64) -> C64) -> CMatrix {
        let mut scaled = self.vectors.clone();
        for (k, c) in self.clusters.iter().enumerate() {
            let factor = g(k, c.value);
            for j in c.start..c.start + c.len {
                let mut col = scaled.column_mut(j);
                col *= factor;
            }
        }
        scaled * &self.inverse
    }

    /// Columns of one cluster's eigenspace.
    pub fn eigenspace(&self, cluster: &Cluster) -> CMatrix {
        self.vectors
            .columns(cluster.start, cluster.len)
            .into_owned()
    }
}

/// Groups sorted real values by single linkage with gap threshold `tol`.
pub fn cluster_values(sorted_desc: &[f64], tol: f64) -> Vec<(f64, usize, usize)> {
    let mut out: Vec<(f64, usize, usize)> = Vec::new();
    let mut start = 0;
    for i in 1..=sorted_desc.len() {
        let split = i == sorted_desc.len() || sorted_desc[i - 1] - sorted_desc[i] > tol;
        if split {
            let slice = &sorted_desc[start..i];
            let mean = slice.iter().sum::<f64>() / slice.len() as f64;
            out.push((mean, start, i - start));
            start = i;
        }
    }
    out
}

/// Diagonalizes `a` given its (real) spectrum. Eigenvalues closer than
/// `cluster_tol` are merged into one eigenspace. Returns `None` when `a` is
/// not diagonalizable at the given resolution.
pub fn diagonalize_real(
    a: &CMatrix,
    spectrum: &[f64],
    cluster_tol: f64,
) -> Result<Option<RealDiagonalization>> {
    let n = a.nrows();
    if spectrum.len() != n {
        return Err(CfsError::DimensionMismatch {
            expected: n,
            found: spectrum.len(),
        });
    }
    let mut sorted = spectrum.to_vec();
    sorted.sort_by(|x, y| y.total_cmp(x));
    let scale = sorted
        .iter()
        .fold(max_abs(a), |acc, v| acc.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    let null_tol = NULL_SPACE_REL * scale;

    let mut vectors = CMatrix::zeros(n, n);
    let mut clusters = Vec::new();
    for (value, start, len) in cluster_values(&sorted, cluster_tol) {
        let shifted = a - identity(n).scale(value);
        let (basis, worst) = null_space(&shifted, len)?;
        if worst > null_tol {
            return Ok(None);
        }
        vectors.columns_mut(start, len).copy_from(&basis);
        clusters.push(Cluster { value, start, len });
    }
    let Some(inv) = vectors.clone().try_inverse() else {
        return Ok(None);
    };
    let diag = RealDiagonalization {
        vectors,
        inverse: inv,
        clusters,
    };
    let rebuilt = diag.apply(|v| c64(v, 0.0));
    if max_abs(&(rebuilt - a)) > null_tol.max(cluster_tol) * 10.0 {
        return Ok(None);
    }
    Ok(Some(diag))
}
