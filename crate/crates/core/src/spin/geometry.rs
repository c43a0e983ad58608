use super::clifford::{verify_clifford, CliffordSubspace, CLIFFORD_TOL};
use super::connection::{
    default_phase, solve_phase, ConnectablePair, ConnectionConfig, PhaseSource, SpinConnection,
};
use super::kernel::{self, ClosedChain, KernelMap};
use super::sign::{self, SignOperator};
use crate::error::{CfsError, Result};
use crate::linalg::{identity, CMatrix};
use crate::operator::{CausalFermionSystem, SpinSpace};

/// Spin-geometric queries on one system, addressed by point index.
#[derive(Debug, Clone, Copy)]
pub struct SpinGeometry<'a> {
    pub system: &'a CausalFermionSystem,
    pub config: ConnectionConfig,
}

impl<'a> SpinGeometry<'a> {
    pub fn new(system: &'a CausalFermionSystem) -> Self {
        Self {
            system,
            config: ConnectionConfig::default(),
        }
    }

    pub fn with_config(system: &'a CausalFermionSystem, config: ConnectionConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self { system, config })
    }

    pub fn n(&self) -> usize {
        self.system.n()
    }

    pub fn spin_space(&self, x: usize) -> SpinSpace {
        SpinSpace::at(self.system.operator(x), x)
    }

    /// Gram matrix of the spin scalar product at `x`.
    pub fn gram(&self, x: usize) -> CMatrix {
        self.system.operator(x).restricted().map(|z| -z)
    }

    pub fn kernel(&self, x: usize, y: usize) -> Result<KernelMap> {
        kernel::kernel(self.system, x, y)
    }

    pub fn closed_chain(&self, x: usize, y: usize) -> Result<ClosedChain> {
        kernel::closed_chain(
            self.system.operator(x),
            self.system.operator(y),
            self.n(),
            self.system.tolerances(),
        )
    }

    pub fn properly_timelike(&self, x: usize, y: usize) -> Result<bool> {
        Ok(self.closed_chain(x, y)?.properly_timelike)
    }

    pub fn euclidean_sign(&self, x: usize) -> Result<SignOperator> {
        sign::euclidean_sign(self.system.operator(x), self.n()).map_err(|e| e.at_indices(x, x))
    }

    pub fn directional_sign(&self, x: usize, y: usize) -> Result<SignOperator> {
        sign::directional_sign(
            self.system.operator(x),
            self.system.operator(y),
            self.n(),
            self.system.tolerances(),
        )
        .map_err(|e| e.at_indices(x, y))
    }

    pub fn clifford(&self, x: usize, generators: Vec<CMatrix>) -> Result<CliffordSubspace> {
        verify_clifford(generators, &self.gram(x), CLIFFORD_TOL)
    }

    pub fn connectable(&self, x: usize, y: usize) -> Result<ConnectablePair> {
        ConnectablePair::new(
            self.system.operator(x),
            self.system.operator(y),
            self.n(),
            self.system.tolerances(),
        )
        .map_err(|e| e.at_indices(x, y))
    }

    pub fn spin_connectable(&self, x: usize, y: usize) -> bool {
        x == y || self.connectable(x, y).is_ok()
    }

    /// `D_{x,y}`. With `hint = (K_xy, K_yx)` the phase solves the mapping
    /// condition; otherwise the default phase is used. The pair is always
    /// evaluated with the lower index first so that `D_{y,x} = D_{x,y}^*`
    /// holds for every choice.
    pub fn connection(
        &self,
        x: usize,
        y: usize,
        hint: Option<(&CliffordSubspace, &CliffordSubspace)>,
    ) -> Result<SpinConnection> {
        if x == y {
            return Ok(SpinConnection {
                target: x,
                source: y,
                phase: 0.0,
                phase_source: PhaseSource::Coincident,
                matrix: identity(self.system.operator(x).rank()),
            });
        }
        let forward = x < y;
        let (lo, hi) = if forward { (x, y) } else { (y, x) };
        let pair = self.connectable(lo, hi)?;
        let (phi, phase_source) = match hint {
            Some((k_xy, k_yx)) => {
                let (k_lo, k_hi) = if forward { (k_xy, k_yx) } else { (k_yx, k_xy) };
                let (phi, mismatch) = solve_phase(&pair, k_lo, k_hi, &self.config)?;
                (phi, PhaseSource::Clifford { mismatch })
            }
            None => {
                let phi = default_phase(
                    self.system.operator(lo),
                    self.system.operator(hi),
                    true,
                    self.system.tolerances(),
                    &self.config,
                )?;
                (phi, PhaseSource::Default)
            }
        };
        let (phase, matrix) = if forward {
            (phi, pair.forward(phi))
        } else {
            (-phi, pair.backward(phi))
        };
        Ok(SpinConnection {
            target: x,
            source: y,
            phase,
            phase_source,
            matrix,
        })
    }

    /// Checks that `x` is a valid index.
    pub fn check_index(&self, x: usize) -> Result<()> {
        if x >= self.system.len() {
            return Err(CfsError::UnknownPoint(format!("#{x}")));
        }
        Ok(())
    }
}
