//! Wave functions, the kernel `P(x, y)` and the closed chain `A_xy`.

use crate::error::{CfsError, Result};
use crate::linalg::{
    diagonalize_real, eigenvalues, inertia, CMatrix, CVector, RealDiagonalization, C64,
};
use crate::operator::{overlap, restricted_product, CausalFermionSystem, OperatorPoint};
use crate::tolerance::Tolerances;

/// `P(x, y) = pi_x y |_{S_y}` as a matrix from the spin basis of `y` to that of `x`.
#[derive(Debug, Clone)]
pub struct KernelMap {
    pub target: usize,
    pub source: usize,
    pub matrix: CMatrix,
}

/// `P(x, y)` in the eigenbases: `B_x^† y B_y = O diag(lambda_y)`.
pub fn kernel_matrix(x: &OperatorPoint, y: &OperatorPoint) -> Result<CMatrix> {
    Ok(overlap(x, y)? * y.restricted())
}

pub fn kernel(system: &CausalFermionSystem, x: usize, y: usize) -> Result<KernelMap> {
    Ok(KernelMap {
        target: x,
        source: y,
        matrix: kernel_matrix(system.operator(x), system.operator(y))?,
    })
}

/// `psi^u(x) = pi_x u` in the spin basis of every point.
pub fn physical_wave_function(u: &CVector, system: &CausalFermionSystem) -> Result<Vec<CVector>> {
    if u.len() != system.f() {
        return Err(CfsError::DimensionMismatch {
            expected: system.f(),
            found: u.len(),
        });
    }
    Ok(system
        .points()
        .iter()
        .map(|p| p.operator.basis().adjoint() * u)
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Definiteness {
    Positive,
    Negative,
    Indefinite,
}

/// One eigenspace of `A_xy`.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigenspace {
    pub value: f64,
    pub dim: usize,
    pub definiteness: Definiteness,
}

/// `A_xy = P(x, y) P(y, x)` on `S_x` with its spectral analysis.
#[derive(Debug, Clone)]
pub struct ClosedChain {
    pub matrix: CMatrix,
    /// Eigenvalues of `A_xy`, sorted by descending modulus.
    pub spectrum: Vec<C64>,
    /// Present when the spectrum is real and `A_xy` is diagonalizable.
    pub diagonalization: Option<RealDiagonalization>,
    pub eigenspaces: Vec<Eigenspace>,
    pub properly_timelike: bool,
}

impl ClosedChain {
    pub fn scale(&self) -> f64 {
        self.spectrum.first().map_or(0.0, |z| z.norm())
    }
}

pub fn closed_chain(
    x: &OperatorPoint,
    y: &OperatorPoint,
    n: usize,
    tol: &Tolerances,
) -> Result<ClosedChain> {
    let o = overlap(x, y)?;
    let matrix = &o * y.restricted() * o.adjoint() * x.restricted();
    // A_xy is similar to the restricted product diag(lambda_x) O diag(lambda_y) O^†
    let spectrum = eigenvalues(&restricted_product(x, y)?)?;
    let mut chain = ClosedChain {
        matrix,
        spectrum,
        diagonalization: None,
        eigenspaces: Vec::new(),
        properly_timelike: false,
    };
    let scale = chain.scale();
    let regular = x.is_regular(n) && y.is_regular(n);
    let real = chain
        .spectrum
        .iter()
        .all(|z| z.im.abs() <= tol.imag_rel * scale);
    if !real || scale == 0.0 {
        return Ok(chain);
    }
    let values: Vec<f64> = chain.spectrum.iter().map(|z| z.re).collect();
    let Some(diag) = diagonalize_real(&chain.matrix, &values, tol.eig_rel * scale)? else {
        return Ok(chain);
    };
    let gram = x.restricted().map(|z| -z);
    for c in &diag.clusters {
        let v = diag.eigenspace(c);
        let (pos, neg, _) = inertia(&(v.adjoint() * &gram * &v), tol.eig_rel);
        let definiteness = if pos == c.len {
            Definiteness::Positive
        } else if neg == c.len {
            Definiteness::Negative
        } else {
            Definiteness::Indefinite
        };
        chain.eigenspaces.push(Eigenspace {
            value: c.value,
            dim: c.len,
            definiteness,
        });
    }
    let positive = values.iter().all(|v| *v > tol.zero_abs * scale);
    let definite = chain
        .eigenspaces
        .iter()
        .all(|e| e.definiteness != Definiteness::Indefinite);
    chain.properly_timelike = regular && positive && definite;
    chain.diagonalization = Some(diag);
    Ok(chain)
}

pub fn properly_timelike(
    x: &OperatorPoint,
    y: &OperatorPoint,
    n: usize,
    tol: &Tolerances,
) -> Result<bool> {
    Ok(closed_chain(x, y, n, tol)?.properly_timelike)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c64, max_abs, real_diag};
    use crate::operator::SystemPoint;

    fn diag(v: &[f64]) -> OperatorPoint {
        OperatorPoint::diagonal(v, &Tolerances::default()).unwrap()
    }

    #[test]
    fn kernel_on_diagonal_is_the_point_itself() {
        let x = diag(&[2.0, -1.0]);
        let p = kernel_matrix(&x, &x).unwrap();
        assert!(max_abs(&(p - real_diag(&[2.0, -1.0]))) < 1e-15);
    }

    #[test]
    fn closed_chain_of_diagonal_point() {
        let x = diag(&[2.0, -1.0]);
        let chain = closed_chain(&x, &x, 1, &Tolerances::default()).unwrap();
        assert!(max_abs(&(&chain.matrix - real_diag(&[4.0, 1.0]))) < 1e-14);
        assert!(chain.properly_timelike);
        assert_eq!(chain.eigenspaces.len(), 2);
        assert_eq!(chain.eigenspaces[0].definiteness, Definiteness::Negative);
    }

    #[test]
    fn orthogonal_images_are_not_properly_timelike() {
        let x = diag(&[2.0, -1.0, 0.0, 0.0]);
        let y = diag(&[0.0, 0.0, 3.0, -1.0]);
        assert!(!properly_timelike(&x, &y, 1, &Tolerances::default()).unwrap());
    }

    #[test]
    fn wave_function_projects() {
        let tol = Tolerances::default();
        let s = CausalFermionSystem::new(
            1,
            vec![SystemPoint::new("a", 1.0, diag(&[1.0, -1.0, 0.0]))],
            tol,
        )
        .unwrap();
        let u = CVector::from_vec(vec![c64(0.0, 0.0), c64(0.0, 0.0), c64(1.0, 0.0)]);
        let psi = physical_wave_function(&u, &s).unwrap();
        assert!(psi[0].norm() < 1e-15);
    }
}
