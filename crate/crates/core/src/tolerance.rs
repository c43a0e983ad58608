use serde::{Deserialize, Serialize};

use crate::error::{CfsError, Result};

/// Numerical tolerances shared by every spectral decision.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Relative tolerance for "same eigenvalue" / "same modulus" decisions.
    pub eig_rel: f64,
    /// Relative tolerance below which an imaginary part counts as zero.
    pub imag_rel: f64,
    /// Absolute cutoff below which an eigenvalue counts as zero.
    pub zero_abs: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            eig_rel: 1e-9,
            imag_rel: 1e-9,
            zero_abs: 1e-12,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        let all_positive = self.eig_rel > 0.0 && self.imag_rel > 0.0 && self.zero_abs > 0.0;
        if !all_positive || self.eig_rel >= 1e-3 || self.imag_rel >= 1e-3 {
            return Err(CfsError::InvalidConfig(format!(
                "tolerances must be positive with eig_rel, imag_rel < 1e-3 (got {self:?})"
            )));
        }
        Ok(())
    }

    /// Zero threshold for eigenvalues of an operator whose largest eigenvalue
    /// modulus is `scale`: absolute for small operators, relative for large ones.
    pub fn zero_cutoff(&self, scale: f64) -> f64 {
        self.zero_abs * scale.max(1.0)
    }
}
