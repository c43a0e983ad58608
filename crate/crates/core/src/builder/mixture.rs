use serde::{Deserialize, Serialize};

use super::minkowski::{build_system, MinkowskiConfig};
use crate::error::{CfsError, Result};
use crate::operator::{CausalFermionSystem, SystemMetadata, SystemPoint};
use crate::tolerance::Tolerances;

/// A finite family of systems over one Hilbert space with mixing weights.
#[derive(Debug, Clone)]
pub struct MixtureSpec {
    pub components: Vec<CausalFermionSystem>,
    pub weights: Vec<f64>,
}

/// Mixing weights must sum to one within this tolerance.
pub const WEIGHT_SUM_TOL: f64 = 1e-9;

/// `rho = sum_k w_k rho_k`. Points of component `k` get ids `c{k}:{id}` and
/// weights scaled by `w_k`; components with `w_k = 0` do not contribute.
pub fn mix_systems(spec: &MixtureSpec) -> Result<CausalFermionSystem> {
    let first = spec.components.first().ok_or(CfsError::EmptySystem)?;
    if spec.weights.len() != spec.components.len() {
        return Err(CfsError::InvalidConfig(format!(
            "{} weights for {} components",
            spec.weights.len(),
            spec.components.len()
        )));
    }
    if spec.weights.iter().any(|w| !w.is_finite() || *w < 0.0)
        || (spec.weights.iter().sum::<f64>() - 1.0).abs() > WEIGHT_SUM_TOL
    {
        return Err(CfsError::InvalidConfig(
            "mixture weights must be nonnegative and sum to 1".into(),
        ));
    }
    let (n, f) = (first.n(), first.f());
    let mut points = Vec::new();
    let mut metadata = SystemMetadata {
        generator: "mixture".into(),
        ..Default::default()
    };
    let mut params = Vec::new();
    for (k, (sys, &w)) in spec.components.iter().zip(&spec.weights).enumerate() {
        if sys.n() != n || sys.f() != f {
            return Err(CfsError::InvalidConfig(format!(
                "component {k} has (n, f) = ({}, {}), expected ({n}, {f})",
                sys.n(),
                sys.f()
            )));
        }
        params.push(sys.metadata.components.first().copied());
        if w == 0.0 {
            continue;
        }
        for p in sys.points() {
            points.push(SystemPoint {
                id: format!("c{k}:{}", p.id),
                weight: p.weight * w,
                operator: p.operator.clone(),
                coords: p.coords,
                component: k,
            });
        }
    }
    // model parameters are only meaningful when every component carries them
    if let Some(all) = params.into_iter().collect::<Option<Vec<_>>>() {
        metadata.components = all;
    }
    Ok(CausalFermionSystem::new(n, points, *first.tolerances())?.with_metadata(metadata))
}

/// A family of Dirac-sea systems differing only in the mass, sampled at the
/// same coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MassFamilyConfig {
    pub base: MinkowskiConfig,
    pub masses: Vec<f64>,
    pub weights: Vec<f64>,
}

pub fn build_mass_family(
    config: &MassFamilyConfig,
    tol: &Tolerances,
) -> Result<CausalFermionSystem> {
    let components = config
        .masses
        .iter()
        .map(|&m| {
            let mut c = config.base.clone();
            c.mass = m;
            build_system(&c, tol)
        })
        .collect::<Result<Vec<_>>>()?;
    mix_systems(&MixtureSpec {
        components,
        weights: config.weights.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::OperatorPoint;

    fn two_point(prefix: &str) -> CausalFermionSystem {
        let tol = Tolerances::default();
        let pts = vec![
            SystemPoint::new(
                format!("{prefix}a"),
                1.0,
                OperatorPoint::diagonal(&[1.0, -1.0], &tol).unwrap(),
            ),
            SystemPoint::new(
                format!("{prefix}b"),
                3.0,
                OperatorPoint::diagonal(&[2.0, -1.0], &tol).unwrap(),
            ),
        ];
        CausalFermionSystem::new(1, pts, tol).unwrap()
    }

    #[test]
    fn single_component_is_identity() {
        let s = two_point("");
        let m = mix_systems(&MixtureSpec {
            components: vec![s.clone()],
            weights: vec![1.0],
        })
        .unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m.point(1).weight, 3.0);
    }

    #[test]
    fn halves_weights() {
        let m = mix_systems(&MixtureSpec {
            components: vec![two_point("x"), two_point("y")],
            weights: vec![0.5, 0.5],
        })
        .unwrap();
        assert_eq!(m.len(), 4);
        let w: Vec<f64> = m.points().iter().map(|p| p.weight).collect();
        assert_eq!(w, vec![0.5, 1.5, 0.5, 1.5]);
        assert!((m.total_weight() - (0.5 * 4.0 + 0.5 * 4.0)).abs() < 1e-15);
    }

    #[test]
    fn rejects_incompatible_components() {
        let tol = Tolerances::default();
        let other = CausalFermionSystem::new(
            1,
            vec![SystemPoint::new(
                "z",
                1.0,
                OperatorPoint::diagonal(&[1.0, -1.0, 0.0], &tol).unwrap(),
            )],
            tol,
        )
        .unwrap();
        let err = mix_systems(&MixtureSpec {
            components: vec![two_point(""), other],
            weights: vec![0.5, 0.5],
        })
        .unwrap_err();
        assert!(matches!(err, CfsError::InvalidConfig(_)));
    }

    #[test]
    fn rejects_unnormalized_weights() {
        assert!(mix_systems(&MixtureSpec {
            components: vec![two_point("")],
            weights: vec![0.7],
        })
        .is_err());
    }
}
