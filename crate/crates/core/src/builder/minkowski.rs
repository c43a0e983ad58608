//! Regularized Dirac sea on the space-time `R x T^3`.
//!
//! The Hilbert space is spanned by the negative-energy plane waves with
//! momenta `k = j / L`, `j` an integer vector with `|j|_inf <= kmax`, two
//! spin states each. Every mode is damped by a regularization factor
//! depending on its frequency, and the local correlation operator at `p` is
//! `F(p) = -E(p)^† gamma^0 E(p)` with `E(p)` the `4 x f` matrix of
//! regularized mode values at `p`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::dirac::spinor_signature;
use crate::error::{CfsError, Result};
use crate::linalg::{c64, CMatrix, C64};
use crate::operator::{
    CausalFermionSystem, Coordinates, ModelParams, OperatorPoint, SystemMetadata, SystemPoint,
};
use crate::tolerance::Tolerances;

/// Damping profile `R(eps * omega)` applied to each mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regularization {
    /// `exp(-eps * omega)`
    #[default]
    Exponential,
    /// `exp(-(eps * omega)^2)`
    Gaussian,
}

impl Regularization {
    pub fn factor(self, eps: f64, omega: f64) -> f64 {
        match self {
            Regularization::Exponential => (-eps * omega).exp(),
            Regularization::Gaussian => (-(eps * omega).powi(2)).exp(),
        }
    }
}

fn default_max_dim() -> usize {
    2000
}

/// Parameters of a Minkowski-torus system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinkowskiConfig {
    pub mass: f64,
    pub eps: f64,
    pub torus_radius: f64,
    pub kmax: u32,
    #[serde(default)]
    pub sample_points: Vec<Coordinates>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    #[serde(default = "default_max_dim")]
    pub max_dim: usize,
    #[serde(default)]
    pub regularization: Regularization,
}

impl MinkowskiConfig {
    pub fn new(mass: f64, eps: f64, torus_radius: f64, kmax: u32) -> Self {
        Self {
            mass,
            eps,
            torus_radius,
            kmax,
            sample_points: Vec::new(),
            weights: None,
            max_dim: default_max_dim(),
            regularization: Regularization::default(),
        }
    }

    pub fn with_points(mut self, points: Vec<Coordinates>) -> Self {
        self.sample_points = points;
        self
    }

    /// Hilbert space dimension `2 (2 kmax + 1)^3`.
    pub fn hilbert_dim(&self) -> usize {
        let side = 2 * self.kmax as usize + 1;
        2 * side * side * side
    }

    pub fn params(&self) -> ModelParams {
        ModelParams {
            mass: self.mass,
            eps: self.eps,
            torus_radius: self.torus_radius,
            kmax: self.kmax,
            regularization: self.regularization,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.mass) || !positive(self.eps) || !positive(self.torus_radius) {
            return Err(CfsError::InvalidConfig(
                "mass, eps and torus_radius must be positive and finite".into(),
            ));
        }
        if self.hilbert_dim() > self.max_dim {
            return Err(CfsError::InvalidConfig(format!(
                "kmax = {} gives f = {} modes, above the maximum {}",
                self.kmax,
                self.hilbert_dim(),
                self.max_dim
            )));
        }
        if let Some(w) = &self.weights {
            if w.len() != self.sample_points.len() {
                return Err(CfsError::InvalidConfig(format!(
                    "{} weights for {} sample points",
                    w.len(),
                    self.sample_points.len()
                )));
            }
            if w.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(CfsError::InvalidConfig(
                    "weights must be nonnegative".into(),
                ));
            }
        }
        if self.sample_points.iter().flatten().any(|c| !c.is_finite()) {
            return Err(CfsError::InvalidConfig(
                "non-finite sample coordinate".into(),
            ));
        }
        Ok(())
    }

    /// Soft violations of the admissible scale hierarchy.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.eps * self.mass > 0.1 {
            out.push(format!(
                "eps * m = {:.3e} is not small; the regularization is not microscopic",
                self.eps * self.mass
            ));
        }
        if self.eps * self.kmax as f64 / self.torus_radius < 1e-3 && self.kmax > 0 {
            out.push("the momentum cutoff, not eps, dominates the regularization".into());
        }
        out
    }
}

/// One negative-energy plane wave.
#[derive(Debug, Clone, PartialEq)]
pub struct Mode {
    pub momentum: [f64; 3],
    /// 1 or 2.
    pub spin: u8,
    pub omega: f64,
    /// Unit-norm spinor amplitude (before the volume normalization).
    pub spinor: [C64; 4],
}

/// All modes of a configuration together with the common normalization
/// making them orthonormal for `(psi|phi) = 2 pi int psi^† phi d^3x`.
#[derive(Debug, Clone)]
pub struct ModeSet {
    pub modes: Vec<Mode>,
    pub mass: f64,
    pub torus_radius: f64,
    pub normalization: f64,
}

/// Negative-energy spinor with lower components `xi`:
/// `sqrt((w + m) / 2w) (-(sigma.k) xi / (w + m), xi)`.
pub fn negative_energy_spinor(k: &[f64; 3], mass: f64, spin: u8) -> [C64; 4] {
    let omega = (k.iter().map(|v| v * v).sum::<f64>() + mass * mass).sqrt();
    let xi = if spin == 1 {
        [c64(1.0, 0.0), C64::default()]
    } else {
        [C64::default(), c64(1.0, 0.0)]
    };
    // sigma.k = [[k3, k1 - i k2], [k1 + i k2, -k3]]
    let sk = [
        [c64(k[2], 0.0), c64(k[0], -k[1])],
        [c64(k[0], k[1]), c64(-k[2], 0.0)],
    ];
    let scale = ((omega + mass) / (2.0 * omega)).sqrt();
    let upper0 = -(sk[0][0] * xi[0] + sk[0][1] * xi[1]) / (omega + mass);
    let upper1 = -(sk[1][0] * xi[0] + sk[1][1] * xi[1]) / (omega + mass);
    [upper0 * scale, upper1 * scale, xi[0] * scale, xi[1] * scale]
}

/// Free Dirac Hamiltonian `alpha.k + beta m` in the Dirac representation.
pub fn dirac_hamiltonian(k: &[f64; 3], mass: f64) -> CMatrix {
    use super::dirac::gamma;
    let g0 = gamma(0);
    let mut h = g0.scale(mass);
    for i in 0..3 {
        h += &g0 * gamma(i + 1).scale(k[i]);
    }
    h
}

pub fn build_modes(config: &MinkowskiConfig) -> Result<ModeSet> {
    config.validate()?;
    let kmax = config.kmax as i64;
    let l = config.torus_radius;
    let mut modes = Vec::with_capacity(config.hilbert_dim());
    for j1 in -kmax..=kmax {
        for j2 in -kmax..=kmax {
            for j3 in -kmax..=kmax {
                let k = [j1 as f64 / l, j2 as f64 / l, j3 as f64 / l];
                let omega =
                    (k.iter().map(|v| v * v).sum::<f64>() + config.mass * config.mass).sqrt();
                for spin in 1..=2u8 {
                    modes.push(Mode {
                        momentum: k,
                        spin,
                        omega,
                        spinor: negative_energy_spinor(&k, config.mass, spin),
                    });
                }
            }
        }
    }
    let volume = (2.0 * PI * l).powi(3);
    Ok(ModeSet {
        modes,
        mass: config.mass,
        torus_radius: l,
        normalization: 1.0 / (2.0 * PI * volume).sqrt(),
    })
}

impl ModeSet {
    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    /// Unregularized mode value `psi_a(p)` (normalized wave function).
    pub fn value(&self, a: usize, p: &Coordinates) -> [C64; 4] {
        let mode = &self.modes[a];
        let phase = mode.omega * p[0] + (0..3).map(|i| mode.momentum[i] * p[i + 1]).sum::<f64>();
        let factor = C64::from_polar(self.normalization, phase);
        mode.spinor.map(|s| s * factor)
    }

    /// `E(p)`: column `a` is the regularized value of mode `a` at `p`.
    pub fn evaluation(&self, p: &Coordinates, eps: f64, reg: Regularization) -> CMatrix {
        let mut e = CMatrix::zeros(4, self.len());
        for a in 0..self.len() {
            let damp = reg.factor(eps, self.modes[a].omega);
            for (r, v) in self.value(a, p).iter().enumerate() {
                e[(r, a)] = v * damp;
            }
        }
        e
    }
}

/// `F(p)` with entries `-<(R psi_a)(p) | (R psi_b)(p)>`, using exponential damping.
pub fn local_correlation(
    modes: &ModeSet,
    p: &Coordinates,
    eps: f64,
    tol: &Tolerances,
) -> Result<OperatorPoint> {
    local_correlation_with(modes, p, eps, Regularization::Exponential, tol)
}

pub fn local_correlation_with(
    modes: &ModeSet,
    p: &Coordinates,
    eps: f64,
    reg: Regularization,
    tol: &Tolerances,
) -> Result<OperatorPoint> {
    let e = modes.evaluation(p, eps, reg);
    OperatorPoint::from_factor(&e, &(-spinor_signature()), tol)
}

/// One point per sample coordinate, spin dimension 2.
pub fn build_system(config: &MinkowskiConfig, tol: &Tolerances) -> Result<CausalFermionSystem> {
    if config.sample_points.is_empty() {
        return Err(CfsError::InvalidConfig("no sample points".into()));
    }
    let modes = build_modes(config)?;
    let ops = map_points(&config.sample_points, |p| {
        local_correlation_with(&modes, p, config.eps, config.regularization, tol)
    })?;
    let points = ops
        .into_iter()
        .enumerate()
        .map(|(i, op)| {
            let w = config.weights.as_ref().map_or(1.0, |w| w[i]);
            SystemPoint::new(format!("p{i}"), w, op).with_coords(config.sample_points[i])
        })
        .collect();
    let metadata = SystemMetadata {
        generator: "minkowski".into(),
        components: vec![config.params()],
        scales: None,
    };
    Ok(CausalFermionSystem::new(2, points, *tol)?.with_metadata(metadata))
}

#[cfg(feature = "parallel")]
fn map_points<F>(points: &[Coordinates], f: F) -> Result<Vec<OperatorPoint>>
where
    F: Fn(&Coordinates) -> Result<OperatorPoint> + Sync + Send,
{
    use rayon::prelude::*;
    points.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_points<F>(points: &[Coordinates], f: F) -> Result<Vec<OperatorPoint>>
where
    F: Fn(&Coordinates) -> Result<OperatorPoint>,
{
    points.iter().map(f).collect()
}

/// Spatial displacement `b - a` reduced to the nearest periodic image.
pub fn torus_displacement(a: &Coordinates, b: &Coordinates, torus_radius: f64) -> [f64; 4] {
    let period = 2.0 * PI * torus_radius;
    let mut d = [b[0] - a[0], 0.0, 0.0, 0.0];
    for i in 1..4 {
        let raw = b[i] - a[i];
        d[i] = raw - period * (raw / period).round();
    }
    d
}
