use super::clifford::{verify_clifford, CliffordSubspace};
use super::geometry::SpinGeometry;
use super::holonomy::CliffordProvider;
use crate::builder::dirac::{boosted_frame, gamma, minkowski_dot, slash, spinor_signature};
use crate::builder::{build_modes, torus_displacement, MinkowskiConfig, ModeSet};
use crate::error::{CfsError, Result};
use crate::linalg::{frobenius, inverse, CMatrix};
use crate::operator::{CausalFermionSystem, Coordinates};

/// Relative tolerance of the Clifford relations for transported Dirac matrices.
pub const FRAME_TOL: f64 = 1e-8;

/// Clifford subspaces of a system built from Dirac seas on `R x T^3`.
///
/// The evaluation map `Phi_x = E(p_x) B_x` identifies `S_x` isometrically
/// with spinors at `p_x`, `(C^4, gamma^0)`. `K_xy` is spanned by the images
/// of the Dirac matrices contracted with the boosted frame of the unit
/// direction from `p_x` to `p_y` (nearest periodic image; the rest frame is
/// used when the direction is not timelike).
#[derive(Debug, Clone)]
pub struct MinkowskiFrames {
    frames: Vec<CMatrix>,
    inverses: Vec<CMatrix>,
    coords: Vec<Coordinates>,
    torus_radius: Vec<f64>,
}

impl MinkowskiFrames {
    pub fn from_system(system: &CausalFermionSystem) -> Result<Self> {
        let params = &system.metadata.components;
        if params.is_empty() {
            return Err(CfsError::InvalidConfig(
                "system carries no model parameters".into(),
            ));
        }
        let mut modes: Vec<Option<ModeSet>> = vec![None; params.len()];
        let mut out = Self {
            frames: Vec::with_capacity(system.len()),
            inverses: Vec::with_capacity(system.len()),
            coords: Vec::with_capacity(system.len()),
            torus_radius: Vec::with_capacity(system.len()),
        };
        for (i, point) in system.points().iter().enumerate() {
            let coords = point.coords.ok_or_else(|| {
                CfsError::InvalidConfig(format!("point `{}` has no coordinates", point.id))
            })?;
            let k = if params.len() == 1 {
                0
            } else {
                point.component
            };
            let p = params.get(k).ok_or_else(|| {
                CfsError::InvalidConfig(format!("no model parameters for component {k}"))
            })?;
            if modes[k].is_none() {
                let mut config = MinkowskiConfig::new(p.mass, p.eps, p.torus_radius, p.kmax);
                config.max_dim = usize::MAX;
                config.regularization = p.regularization;
                modes[k] = Some(build_modes(&config)?);
            }
            let set = modes[k].as_ref().expect("built above");
            if set.len() != system.f() {
                return Err(CfsError::DimensionMismatch {
                    expected: system.f(),
                    found: set.len(),
                });
            }
            let op = point.operator.clone();
            if op.rank() != 4 {
                return Err(CfsError::SingularPoint {
                    index: i,
                    rank: op.rank(),
                    expected: 4,
                });
            }
            let phi = set.evaluation(&coords, p.eps, p.regularization) * op.basis();
            let gram = op.restricted().map(|z| -z);
            let dev = frobenius(&(phi.adjoint() * spinor_signature() * &phi - &gram));
            if dev > 1e-8 * frobenius(&gram) {
                return Err(CfsError::Numeric(format!(
                    "evaluation map at point `{}` is not isometric (deviation {dev:.3e})",
                    point.id
                )));
            }
            out.inverses.push(inverse(&phi)?);
            out.frames.push(phi);
            out.coords.push(coords);
            out.torus_radius.push(p.torus_radius);
        }
        Ok(out)
    }

    /// `Phi_x: S_x -> C^4`.
    pub fn trivialization(&self, x: usize) -> &CMatrix {
        &self.frames[x]
    }

    pub fn trivialization_inverse(&self, x: usize) -> &CMatrix {
        &self.inverses[x]
    }

    fn pull_back(&self, x: usize, m: &CMatrix) -> CMatrix {
        &self.inverses[x] * m * &self.frames[x]
    }

    /// The Clifford extension `span{Phi_x^{-1} gamma^mu Phi_x}`; its first
    /// generator is the Euclidean sign operator.
    pub fn extension(&self, geom: &SpinGeometry, x: usize) -> Result<CliffordSubspace> {
        let gens = (0..4).map(|mu| self.pull_back(x, &gamma(mu))).collect();
        verify_clifford(gens, &geom.gram(x), FRAME_TOL)
    }

    /// Future-directed unit direction from `x` to `y`, if timelike.
    pub fn direction(&self, x: usize, y: usize) -> Option<[f64; 4]> {
        let d = torus_displacement(&self.coords[x], &self.coords[y], self.torus_radius[x]);
        let norm2 = minkowski_dot(&d, &d);
        if norm2 <= 0.0 {
            return None;
        }
        let s = d[0].signum() / norm2.sqrt();
        Some(d.map(|v| v * s))
    }
}

impl CliffordProvider for MinkowskiFrames {
    fn subspace(&self, geom: &SpinGeometry, x: usize, y: usize) -> Result<CliffordSubspace> {
        let u = self.direction(x, y).unwrap_or([1.0, 0.0, 0.0, 0.0]);
        let frame = boosted_frame(&u);
        let gens = frame.iter().map(|e| self.pull_back(x, &slash(e))).collect();
        verify_clifford(gens, &geom.gram(x), FRAME_TOL)
    }

    fn pins_phase(&self) -> bool {
        true
    }
}
