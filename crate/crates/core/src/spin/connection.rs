use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::clifford::{span_distance, CliffordSubspace};
use super::kernel::{closed_chain, kernel_matrix, ClosedChain};
use super::sign::directional_sign_of;
use crate::error::{CfsError, Result, UNINDEXED};
use crate::linalg::{c64, identity, CMatrix};
use crate::operator::{orient, time_direction, time_threshold, OperatorPoint, TimeOrientation};
use crate::tolerance::Tolerances;

/// Lower and upper end of the positive admissible phase range; the negative
/// range is its mirror image.
pub const PHASE_RANGE: (f64, f64) = (PI / 2.0, 3.0 * PI / 4.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ConnectionConfig {
    /// Modulus of the phase used when no Clifford subspaces are supplied.
    pub default_phase: f64,
    /// Interior grid points scanned per admissible range.
    pub scan_points: usize,
    /// Golden-section iterations after the scan.
    pub refine_iters: usize,
    /// Largest accepted subspace mismatch when solving for the phase.
    pub residual_tol: f64,
}

impl Default for ConnectionConfig {
    fn default() -> Self {
        Self {
            default_phase: 5.0 * PI / 8.0,
            scan_points: 24,
            refine_iters: 60,
            residual_tol: 5e-2,
        }
    }
}

impl ConnectionConfig {
    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = PHASE_RANGE;
        if !(self.default_phase > lo && self.default_phase < hi) {
            return Err(CfsError::InvalidConfig(format!(
                "default phase {} is outside the open range ({lo}, {hi})",
                self.default_phase
            )));
        }
        if self.scan_points == 0 || !(self.residual_tol > 0.0) {
            return Err(CfsError::InvalidConfig(
                "scan_points and residual_tol must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// How the phase of a connection was determined.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PhaseSource {
    /// `x = y`; the connection is the identity.
    Coincident,
    /// No Clifford subspaces: default modulus with the time-orientation sign.
    Default,
    /// Solved from the mapping condition on the supplied subspaces.
    Clifford { mismatch: f64 },
}

/// `D_{x,y}: S_y -> S_x`.
#[derive(Debug, Clone)]
pub struct SpinConnection {
    pub target: usize,
    pub source: usize,
    pub phase: f64,
    pub phase_source: PhaseSource,
    pub matrix: CMatrix,
}

/// All pair data the connection between spin-connectable `x` and `y` needs.
#[derive(Debug, Clone)]
pub struct ConnectablePair {
    pub chain_xy: ClosedChain,
    pub chain_yx: ClosedChain,
    pub v_xy: CMatrix,
    pub v_yx: CMatrix,
    pub p_xy: CMatrix,
    pub p_yx: CMatrix,
    inv_sqrt_xy: CMatrix,
    inv_sqrt_yx: CMatrix,
}

fn not_connectable(reason: impl Into<String>) -> CfsError {
    CfsError::NotSpinConnectable {
        x: UNINDEXED,
        y: UNINDEXED,
        reason: reason.into(),
    }
}

fn inverse_sqrt(chain: &ClosedChain) -> CMatrix {
    let diag = chain
        .diagonalization
        .as_ref()
        .expect("properly timelike chains are diagonalized");
    diag.apply(|v| c64(v.sqrt().recip(), 0.0))
}

impl ConnectablePair {
    /// Spin-connectable: spin dimension two, properly timelike in both
    /// orders, and both directional splittings `(2, 2)`-definite.
    pub fn new(x: &OperatorPoint, y: &OperatorPoint, n: usize, tol: &Tolerances) -> Result<Self> {
        if n != 2 {
            return Err(CfsError::UnsupportedSpinDimension(n));
        }
        let chain_xy = closed_chain(x, y, n, tol)?;
        let chain_yx = closed_chain(y, x, n, tol)?;
        if !chain_xy.properly_timelike || !chain_yx.properly_timelike {
            return Err(not_connectable("not properly timelike"));
        }
        let v_xy = directional_sign_of(&chain_xy, n).map_err(not_connectable)?;
        let v_yx = directional_sign_of(&chain_yx, n).map_err(not_connectable)?;
        Ok(Self {
            inv_sqrt_xy: inverse_sqrt(&chain_xy),
            inv_sqrt_yx: inverse_sqrt(&chain_yx),
            p_xy: kernel_matrix(x, y)?,
            p_yx: kernel_matrix(y, x)?,
            chain_xy,
            chain_yx,
            v_xy,
            v_yx,
        })
    }

    /// `D_{x,y} = e^{i phi v_xy} A_xy^{-1/2} P(x, y)`.
    pub fn forward(&self, phi: f64) -> CMatrix {
        exp_sign(phi, &self.v_xy) * &self.inv_sqrt_xy * &self.p_xy
    }

    /// `D_{y,x}` with `phi_yx = -phi_xy`.
    pub fn backward(&self, phi: f64) -> CMatrix {
        exp_sign(-phi, &self.v_yx) * &self.inv_sqrt_yx * &self.p_yx
    }

    /// Distance between `D_{y,x} K_xy D_{x,y}` and `K_yx`.
    pub fn mismatch(&self, phi: f64, k_xy: &CliffordSubspace, k_yx: &CliffordSubspace) -> f64 {
        let (d, d_back) = (self.forward(phi), self.backward(phi));
        let moved: Vec<CMatrix> = k_xy.generators().iter().map(|k| &d_back * k * &d).collect();
        span_distance(&moved, k_yx.generators())
    }
}

/// `e^{i phi v} = cos(phi) + i sin(phi) v` for an involution `v`.
pub fn exp_sign(phi: f64, v: &CMatrix) -> CMatrix {
    identity(v.nrows()).scale(phi.cos()) + v.map(|z| z * c64(0.0, phi.sin()))
}

/// Sign of the default phase for the ordered pair: negative when `y` lies in
/// the future of `x`, positive in the past; an undirected pair gets the
/// positive sign when `x` precedes `y` in the point list.
pub fn default_phase_sign(orientation: TimeOrientation, x_first: bool) -> f64 {
    match orientation {
        TimeOrientation::Future => -1.0,
        TimeOrientation::Past => 1.0,
        TimeOrientation::Undirected if x_first => 1.0,
        TimeOrientation::Undirected => -1.0,
    }
}

pub fn default_phase(
    x: &OperatorPoint,
    y: &OperatorPoint,
    x_first: bool,
    tol: &Tolerances,
    config: &ConnectionConfig,
) -> Result<f64> {
    let c = time_direction(x, y)?;
    let orientation = orient(c, time_threshold(x, y, tol));
    Ok(default_phase_sign(orientation, x_first) * config.default_phase)
}

/// Minimizes the mapping mismatch over both admissible ranges. Returns the
/// phase and the mismatch reached; equal minima resolve to the positive range.
pub fn solve_phase(
    pair: &ConnectablePair,
    k_xy: &CliffordSubspace,
    k_yx: &CliffordSubspace,
    config: &ConnectionConfig,
) -> Result<(f64, f64)> {
    let (lo, hi) = PHASE_RANGE;
    let f = |phi: f64| pair.mismatch(phi, k_xy, k_yx);
    let positive = minimize_on(&f, lo, hi, config);
    let negative = minimize_on(&f, -hi, -lo, config);
    let tie = 1e-12 * positive.1.max(negative.1).max(1.0);
    let best = if negative.1 < positive.1 - tie {
        negative
    } else {
        positive
    };
    if best.1 > config.residual_tol {
        return Err(CfsError::PhaseResidual {
            best: best.1,
            phi: best.0,
        });
    }
    Ok(best)
}

fn minimize_on(f: &impl Fn(f64) -> f64, lo: f64, hi: f64, config: &ConnectionConfig) -> (f64, f64) {
    let m = config.scan_points;
    let h = (hi - lo) / m as f64;
    let grid: Vec<f64> = (0..m).map(|j| lo + (j as f64 + 0.5) * h).collect();
    let values: Vec<f64> = grid.iter().map(|&p| f(p)).collect();
    let mut j = 0;
    for i in 1..m {
        if values[i] < values[j] {
            j = i;
        }
    }
    let (mut a, mut b) = ((grid[j] - h).max(lo), (grid[j] + h).min(hi));
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..config.refine_iters {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d);
        }
    }
    let mut best = (grid[j], values[j]);
    for cand in [(c, fc), (d, fd)] {
        if cand.1 < best.1 {
            best = cand;
        }
    }
    best
}
