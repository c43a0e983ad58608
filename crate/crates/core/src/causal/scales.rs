use serde::{Deserialize, Serialize};

use crate::error::{CfsError, Result};
use crate::linalg::{singular_values, CMatrix};
use crate::operator::{overlap, product_spectrum, CausalFermionSystem, OperatorPoint};

/// How `|xy|` is measured in the length function.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProductNorm {
    /// Largest modulus of an eigenvalue of `xy`.
    #[default]
    SpectralRadius,
    /// Largest singular value of `xy`.
    OperatorNorm,
}

/// The window `(l_min, l_max)` of length scales on which `ell` is nonzero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LengthScales {
    pub l_min: f64,
    pub l_max: f64,
    #[serde(default)]
    pub norm: ProductNorm,
}

impl LengthScales {
    pub fn new(l_min: f64, l_max: f64) -> Result<Self> {
        let s = Self {
            l_min,
            l_max,
            norm: ProductNorm::SpectralRadius,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn with_norm(mut self, norm: ProductNorm) -> Self {
        self.norm = norm;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.l_min.is_finite()
            && self.l_max.is_finite()
            && self.l_min > 0.0
            && self.l_min < self.l_max;
        if !ok {
            return Err(CfsError::InvalidConfig(format!(
                "length scales need 0 < l_min < l_max (got {}, {})",
                self.l_min, self.l_max
            )));
        }
        Ok(())
    }

    /// Warnings when the window leaves the range between the regularization
    /// length and the Compton length of any model the system was built from.
    pub fn warnings(&self, system: &CausalFermionSystem) -> Vec<String> {
        let mut out = Vec::new();
        for p in &system.metadata.components {
            if self.l_min <= p.eps {
                out.push(format!(
                    "l_min = {} does not exceed eps = {}",
                    self.l_min, p.eps
                ));
            }
            if self.l_max >= 1.0 / p.mass {
                out.push(format!(
                    "l_max = {} is not below 1/m = {}",
                    self.l_max,
                    1.0 / p.mass
                ));
            }
        }
        out
    }
}

/// `|xy|` in the chosen norm.
pub fn product_norm(
    x: &OperatorPoint,
    y: &OperatorPoint,
    n: usize,
    norm: ProductNorm,
) -> Result<f64> {
    match norm {
        ProductNorm::SpectralRadius => {
            Ok(product_spectrum(x, y, n)?.first().map_or(0.0, |z| z.norm()))
        }
        ProductNorm::OperatorNorm => {
            // xy = B_x L_x O L_y B_y^† with orthonormal B's
            let o = overlap(x, y)?;
            let core: CMatrix = x.restricted() * o * y.restricted();
            Ok(singular_values(&core).first().copied().unwrap_or(0.0))
        }
    }
}

/// Length function from a value of `|xy|`: `|xy|^{-1/6}` strictly inside the
/// window, otherwise 0.
pub fn ell_from_norm(norm: f64, scales: &LengthScales) -> f64 {
    if !(norm > 0.0) || !norm.is_finite() {
        return 0.0;
    }
    let l = norm.powf(-1.0 / 6.0);
    if l > scales.l_min && l < scales.l_max {
        l
    } else {
        0.0
    }
}

pub fn ell(x: &OperatorPoint, y: &OperatorPoint, n: usize, scales: &LengthScales) -> Result<f64> {
    Ok(ell_from_norm(product_norm(x, y, n, scales.norm)?, scales))
}
