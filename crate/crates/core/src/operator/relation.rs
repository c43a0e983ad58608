//! Pair relations read off from the spectrum of the operator product `xy`.

use serde::{Deserialize, Serialize};

use super::point::{overlap, OperatorPoint};
use crate::error::{CfsError, Result};
use crate::linalg::{eigenvalues, CMatrix, C64};
use crate::tolerance::Tolerances;

/// Causal relation between two points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CausalClass {
    Spacelike,
    Timelike,
    Lightlike,
}

impl CausalClass {
    pub fn letter(self) -> char {
        match self {
            CausalClass::Spacelike => 'S',
            CausalClass::Timelike => 'T',
            CausalClass::Lightlike => 'L',
        }
    }
}

/// Sign of the time-direction functional.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TimeOrientation {
    /// The second point lies in the future of the first.
    Future,
    /// The second point lies in the past of the first.
    Past,
    /// `|C(x, y)|` is below the noise threshold.
    Undirected,
}

impl TimeOrientation {
    pub fn sign(self) -> char {
        match self {
            TimeOrientation::Future => '+',
            TimeOrientation::Past => '-',
            TimeOrientation::Undirected => '0',
        }
    }
}

fn check_rank(x: &OperatorPoint, n: usize) -> Result<()> {
    if x.rank() > 2 * n {
        return Err(CfsError::SignatureBound {
            id: String::from("<operator>"),
            pos: x.pos_eigs(),
            neg: x.neg_eigs(),
            n,
        });
    }
    Ok(())
}

/// `x y` restricted to the image of `x`, written in the eigenbasis of `x`:
/// `diag(lambda_x) O diag(lambda_y) O^†` with `O = B_x^† B_y`.
pub fn restricted_product(x: &OperatorPoint, y: &OperatorPoint) -> Result<CMatrix> {
    let o = overlap(x, y)?;
    Ok(x.restricted() * &o * y.restricted() * o.adjoint())
}

/// Eigenvalues of `xy` with modulus below this fraction of `|x| |y|` are
/// rounding noise and flushed to zero.
pub const PRODUCT_NOISE_REL: f64 = 1e-13;

/// The `2n` nontrivial eigenvalues of `xy` (algebraic multiplicity), padded
/// with zeros and sorted by descending modulus.
///
/// Since `xy` maps the Hilbert space into `image(x)`, its nonzero spectrum is
/// the spectrum of the restriction to `image(x)`, a `rank(x)`-dimensional
/// dense eigenproblem.
pub fn product_spectrum(x: &OperatorPoint, y: &OperatorPoint, n: usize) -> Result<Vec<C64>> {
    check_rank(x, n)?;
    check_rank(y, n)?;
    let m = restricted_product(x, y)?;
    let mut values = eigenvalues(&m)?;
    let noise = PRODUCT_NOISE_REL * x.spectral_norm() * y.spectral_norm();
    for z in &mut values {
        if z.norm() <= noise {
            *z = C64::default();
        }
    }
    values.resize(2 * n, C64::default());
    crate::linalg::sort_spectrum(&mut values);
    Ok(values)
}

/// Classification of a spectrum: equal moduli first, then realness.
pub fn classify_spectrum(spectrum: &[C64], tol: &Tolerances) -> CausalClass {
    let (mut lo, mut hi) = (f64::INFINITY, 0.0_f64);
    for z in spectrum {
        lo = lo.min(z.norm());
        hi = hi.max(z.norm());
    }
    if spectrum.is_empty() || hi - lo <= tol.eig_rel * hi {
        return CausalClass::Spacelike;
    }
    if spectrum.iter().all(|z| z.im.abs() <= tol.imag_rel * hi) {
        CausalClass::Timelike
    } else {
        CausalClass::Lightlike
    }
}

pub fn classify(
    x: &OperatorPoint,
    y: &OperatorPoint,
    n: usize,
    tol: &Tolerances,
) -> Result<CausalClass> {
    Ok(classify_spectrum(&product_spectrum(x, y, n)?, tol))
}

/// `C(x, y) = i tr(y x pi_y pi_x - x y pi_x pi_y) = -2 Im tr(y x pi_y pi_x)`,
/// evaluated on the images: `tr(O^† L_x O O^† O L_y)`. Averaged with the
/// swapped evaluation so that antisymmetry holds exactly in floating point.
pub fn time_direction(x: &OperatorPoint, y: &OperatorPoint) -> Result<f64> {
    let half = |a: &OperatorPoint, b: &OperatorPoint| -> Result<f64> {
        let o = overlap(a, b)?;
        let oa = o.adjoint();
        let m = &oa * a.restricted() * &o * &oa * &o * b.restricted();
        Ok(-2.0 * m.trace().im)
    };
    Ok(0.5 * (half(x, y)? - half(y, x)?))
}

/// Threshold below which `C(x, y)` counts as zero.
pub fn time_threshold(x: &OperatorPoint, y: &OperatorPoint, tol: &Tolerances) -> f64 {
    tol.imag_rel * x.spectral_norm() * y.spectral_norm()
}

pub fn orient(value: f64, threshold: f64) -> TimeOrientation {
    if value > threshold {
        TimeOrientation::Future
    } else if value < -threshold {
        TimeOrientation::Past
    } else {
        TimeOrientation::Undirected
    }
}

/// Everything the pair analysis reports about `(x, y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairRelation {
    pub spectrum: Vec<C64>,
    pub class: CausalClass,
    pub time: f64,
    pub orientation: TimeOrientation,
}

pub fn relate(
    x: &OperatorPoint,
    y: &OperatorPoint,
    n: usize,
    tol: &Tolerances,
) -> Result<PairRelation> {
    let spectrum = product_spectrum(x, y, n)?;
    let class = classify_spectrum(&spectrum, tol);
    let time = time_direction(x, y)?;
    let orientation = orient(time, time_threshold(x, y, tol));
    Ok(PairRelation {
        spectrum,
        class,
        time,
        orientation,
    })
}

/// Spectral radius of `xy`.
pub fn spectral_radius(x: &OperatorPoint, y: &OperatorPoint, n: usize) -> Result<f64> {
    Ok(product_spectrum(x, y, n)?.first().map_or(0.0, |z| z.norm()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c64;

    fn diag(v: &[f64]) -> OperatorPoint {
        OperatorPoint::diagonal(v, &Tolerances::default()).unwrap()
    }

    #[test]
    fn diagonal_product_spectrum() {
        let x = diag(&[2.0, -1.0]);
        let s = product_spectrum(&x, &x, 1).unwrap();
        assert!((s[0] - c64(4.0, 0.0)).norm() < 1e-14);
        assert!((s[1] - c64(1.0, 0.0)).norm() < 1e-14);
        assert_eq!(
            classify(&x, &x, 1, &Tolerances::default()).unwrap(),
            CausalClass::Timelike
        );
    }

    #[test]
    fn zero_operator_gives_zero_spectrum() {
        let x = diag(&[2.0, -1.0]);
        let zero = diag(&[0.0, 0.0]);
        let s = product_spectrum(&x, &zero, 1).unwrap();
        assert_eq!(s, vec![C64::default(); 2]);
        assert_eq!(
            classify(&x, &zero, 1, &Tolerances::default()).unwrap(),
            CausalClass::Spacelike
        );
    }

    #[test]
    fn orthogonal_images_are_spacelike() {
        let x = diag(&[2.0, -1.0, 0.0, 0.0]);
        let y = diag(&[0.0, 0.0, 1.0, -3.0]);
        assert_eq!(
            classify(&x, &y, 1, &Tolerances::default()).unwrap(),
            CausalClass::Spacelike
        );
    }

    #[test]
    fn time_direction_vanishes_on_diagonal() {
        let x = diag(&[2.0, -1.0, 0.5]);
        assert_eq!(time_direction(&x, &x).unwrap(), 0.0);
    }

    #[test]
    fn dimension_mismatch() {
        let x = diag(&[2.0, -1.0]);
        let y = diag(&[2.0, -1.0, 1.0]);
        assert!(matches!(
            product_spectrum(&x, &y, 2),
            Err(CfsError::DimensionMismatch { .. })
        ));
        assert!(time_direction(&x, &y).is_err());
    }

    #[test]
    fn classification_letters() {
        assert_eq!(CausalClass::Lightlike.letter(), 'L');
        assert_eq!(orient(1.0, 0.5).sign(), '+');
        assert_eq!(orient(-0.2, 0.5), TimeOrientation::Undirected);
    }
}
