//! Tangent cone histograms: the measure near `x` pushed forward under
//! `y -> pi_x (y - x) x |_{S_x}` and sorted into conical bins.

use serde::{Deserialize, Serialize};

use crate::ambient::operator_distance;
use crate::error::{CfsError, Result};
use crate::linalg::{real_pairing, CMatrix};
use crate::operator::{overlap, CausalFermionSystem, OperatorPoint};

/// A scale-invariant set of operators on `S_x`, written in the eigenbasis of `x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConeBin {
    All,
    /// `Re tr(normal^† a) > 0`, or `>= 0` when not strict.
    HalfSpace {
        #[serde(with = "matrix_serde")]
        normal: CMatrix,
        strict: bool,
    },
    /// Signs of the real parts of the diagonal entries: `Some(true)` positive,
    /// `Some(false)` negative, `None` unconstrained.
    DiagonalSigns {
        signs: Vec<Option<bool>>,
    },
    Intersection {
        bins: Vec<ConeBin>,
    },
}

impl ConeBin {
    pub fn contains(&self, a: &CMatrix) -> bool {
        match self {
            ConeBin::All => true,
            ConeBin::HalfSpace { normal, strict } => {
                if normal.shape() != a.shape() {
                    return false;
                }
                let v = real_pairing(normal, a);
                if *strict {
                    v > 0.0
                } else {
                    v >= 0.0
                }
            }
            ConeBin::DiagonalSigns { signs } => {
                signs.len() == a.nrows().min(a.ncols())
                    && signs.iter().enumerate().all(|(i, s)| match s {
                        None => true,
                        Some(true) => a[(i, i)].re > 0.0,
                        Some(false) => a[(i, i)].re < 0.0,
                    })
            }
            ConeBin::Intersection { bins } => bins.iter().all(|b| b.contains(a)),
        }
    }
}

mod matrix_serde {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::linalg::{c64, CMatrix};

    pub fn serialize<S: Serializer>(m: &CMatrix, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> = (0..m.nrows())
            .map(|i| {
                (0..m.ncols())
                    .map(|j| [m[(i, j)].re, m[(i, j)].im])
                    .collect()
            })
            .collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<CMatrix, D::Error> {
        let rows: Vec<Vec<[f64; 2]>> = Vec::deserialize(d)?;
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(serde::de::Error::custom("ragged matrix"));
        }
        Ok(CMatrix::from_fn(r, c, |i, j| {
            c64(rows[i][j][0], rows[i][j][1])
        }))
    }
}

/// `pi_x (y - x) x` restricted to `S_x`, in the eigenbasis of `x`:
/// `(O L_y O^† - L_x) L_x` with `O = B_x^† B_y`.
pub fn tangent_map(x: &OperatorPoint, y: &OperatorPoint) -> Result<CMatrix> {
    let o = overlap(x, y)?;
    let lx = x.restricted();
    Ok((&o * y.restricted() * o.adjoint() - &lx) * lx)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeHistogram {
    pub base: usize,
    pub delta: f64,
    /// `rho(B_delta(x))`.
    pub ball_weight: f64,
    pub ball_points: Vec<usize>,
    /// Normalized mass per bin, in the order the bins were given.
    pub masses: Vec<f64>,
}

/// Histogram over the open operator-norm ball of radius `delta`.
pub fn tangent_cone_histogram(
    system: &CausalFermionSystem,
    x: usize,
    delta: f64,
    bins: &[ConeBin],
) -> Result<ConeHistogram> {
    if !(delta > 0.0) {
        return Err(CfsError::InvalidConfig(format!(
            "delta must be positive (got {delta})"
        )));
    }
    if x >= system.len() {
        return Err(CfsError::UnknownPoint(format!("#{x}")));
    }
    let base = system.operator(x);
    let mut ball_points = Vec::new();
    let mut ball_weight = 0.0;
    let mut masses = vec![0.0; bins.len()];
    for (i, p) in system.points().iter().enumerate() {
        if p.weight <= 0.0 || operator_distance(base, &p.operator)? >= delta {
            continue;
        }
        ball_points.push(i);
        ball_weight += p.weight;
        let a = tangent_map(base, &p.operator)?;
        for (m, b) in masses.iter_mut().zip(bins) {
            if b.contains(&a) {
                *m += p.weight;
            }
        }
    }
    if ball_weight <= 0.0 {
        return Err(CfsError::EmptyBall { index: x, delta });
    }
    for m in &mut masses {
        *m /= ball_weight;
    }
    Ok(ConeHistogram {
        base: x,
        delta,
        ball_weight,
        ball_points,
        masses,
    })
}

/// Histograms over a grid of radii, standing in for the small-ball limit.
pub fn tangent_cone_table(
    system: &CausalFermionSystem,
    x: usize,
    deltas: &[f64],
    bins: &[ConeBin],
) -> Result<Vec<ConeHistogram>> {
    deltas
        .iter()
        .map(|&d| tangent_cone_histogram(system, x, d, bins))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::SystemPoint;
    use crate::Tolerances;

    #[test]
    fn base_point_maps_to_zero_and_all_bin_is_normalized() {
        let tol = Tolerances::default();
        let pts = vec![
            SystemPoint::new(
                "a",
                1.0,
                OperatorPoint::diagonal(&[2.0, -1.0], &tol).unwrap(),
            ),
            SystemPoint::new(
                "b",
                3.0,
                OperatorPoint::diagonal(&[2.5, -1.0], &tol).unwrap(),
            ),
            SystemPoint::new(
                "c",
                1.0,
                OperatorPoint::diagonal(&[20.0, -1.0], &tol).unwrap(),
            ),
        ];
        let sys = CausalFermionSystem::new(1, pts, tol).unwrap();
        let a = tangent_map(sys.operator(0), sys.operator(0)).unwrap();
        assert!(a.iter().all(|z| z.norm() == 0.0));
        let bins = [
            ConeBin::All,
            ConeBin::DiagonalSigns {
                signs: vec![Some(true), None],
            },
        ];
        let h = tangent_cone_histogram(&sys, 0, 1.0, &bins).unwrap();
        assert_eq!(h.ball_points, vec![0, 1]);
        assert_eq!(h.masses[0], 1.0);
        assert!((h.masses[1] - 0.75).abs() < 1e-15);
    }
}
