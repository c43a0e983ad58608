use serde::{Deserialize, Serialize};

use super::point::OperatorPoint;
use crate::error::{CfsError, Result};
use crate::linalg::max_abs;
use crate::tolerance::Tolerances;

/// Space-time coordinates `(t, x1, x2, x3)` of a point built from Minkowski data.
pub type Coordinates = [f64; 4];

/// One atom of the discrete universal measure.
#[derive(Debug, Clone)]
pub struct SystemPoint {
    pub id: String,
    pub weight: f64,
    pub operator: OperatorPoint,
    /// Generating coordinates, when the point was built from a Lorentzian model.
    pub coords: Option<Coordinates>,
    /// Mixture component the point came from.
    pub component: usize,
}

impl SystemPoint {
    pub fn new(id: impl Into<String>, weight: f64, operator: OperatorPoint) -> Self {
        Self {
            id: id.into(),
            weight,
            operator,
            coords: None,
            component: 0,
        }
    }

    pub fn with_coords(mut self, coords: Coordinates) -> Self {
        self.coords = Some(coords);
        self
    }
}

/// Parameters of the regularized Dirac-sea model a system was generated from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub mass: f64,
    pub eps: f64,
    pub torus_radius: f64,
    pub kmax: u32,
    #[serde(default)]
    pub regularization: crate::builder::Regularization,
}

/// Provenance carried along with a system (and through its file format).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SystemMetadata {
    /// `minkowski`, `mixture`, or free-form for hand-built systems.
    #[serde(default)]
    pub generator: String,
    /// Model parameters per mixture component (a single entry for plain systems).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub components: Vec<ModelParams>,
    /// `(l_min, l_max)` when known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scales: Option<(f64, f64)>,
}

/// A causal fermion system with a discrete universal measure: space-time is
/// exactly the list of points with positive weight.
#[derive(Debug, Clone)]
pub struct CausalFermionSystem {
    n: usize,
    f: usize,
    points: Vec<SystemPoint>,
    tolerances: Tolerances,
    pub metadata: SystemMetadata,
}

impl CausalFermionSystem {
    pub fn new(n: usize, points: Vec<SystemPoint>, tolerances: Tolerances) -> Result<Self> {
        tolerances.validate()?;
        let first = points.first().ok_or(CfsError::EmptySystem)?;
        let f = first.operator.dim();
        let mut any_positive = false;
        for p in &points {
            if p.operator.dim() != f {
                return Err(CfsError::DimensionMismatch {
                    expected: f,
                    found: p.operator.dim(),
                });
            }
            p.operator.check_spin_dimension(&p.id, n)?;
            if !p.weight.is_finite() || p.weight < 0.0 {
                return Err(CfsError::InvalidWeight {
                    id: p.id.clone(),
                    weight: p.weight,
                });
            }
            any_positive |= p.weight > 0.0;
        }
        if !any_positive {
            return Err(CfsError::NoPositiveWeight);
        }
        Ok(Self {
            n,
            f,
            points,
            tolerances,
            metadata: SystemMetadata::default(),
        })
    }

    pub fn with_metadata(mut self, metadata: SystemMetadata) -> Self {
        self.metadata = metadata;
        self
    }

    /// Spin dimension.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Hilbert space dimension.
    pub fn f(&self) -> usize {
        self.f
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tolerances
    }

    pub fn set_tolerances(&mut self, tolerances: Tolerances) -> Result<()> {
        tolerances.validate()?;
        self.tolerances = tolerances;
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[SystemPoint] {
        &self.points
    }

    pub fn point(&self, index: usize) -> &SystemPoint {
        &self.points[index]
    }

    pub fn operator(&self, index: usize) -> &OperatorPoint {
        &self.points[index].operator
    }

    pub fn into_points(self) -> Vec<SystemPoint> {
        self.points
    }

    pub fn index_of(&self, id: &str) -> Result<usize> {
        self.points
            .iter()
            .position(|p| p.id == id)
            .ok_or_else(|| CfsError::UnknownPoint(id.to_string()))
    }

    pub fn total_weight(&self) -> f64 {
        self.points.iter().map(|p| p.weight).sum()
    }

    /// Pairs of distinct points whose operators coincide; in the operator
    /// picture these would be one space-time point.
    pub fn coincident_operators(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                let a = self.points[i].operator.matrix();
                let b = self.points[j].operator.matrix();
                let scale = max_abs(a).max(max_abs(b)).max(f64::MIN_POSITIVE);
                if max_abs(&(a - b)) <= 1e-12 * scale {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// The regular subsystem: singular points are dropped, the remaining
    /// weights are kept unchanged.
    pub fn restrict_to_regular(&self) -> Result<Self> {
        let n = self.n;
        let points: Vec<SystemPoint> = self
            .points
            .iter()
            .filter(|p| p.operator.is_regular(n))
            .cloned()
            .collect();
        if points.is_empty() {
            return Err(CfsError::EmptySystem);
        }
        Ok(Self::new(n, points, self.tolerances)?.with_metadata(self.metadata.clone()))
    }

    pub fn is_regular(&self) -> bool {
        self.points.iter().all(|p| p.operator.is_regular(self.n))
    }

    /// Indices of the regular points.
    pub fn regular_indices(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.operator(i).is_regular(self.n))
            .collect()
    }
}
