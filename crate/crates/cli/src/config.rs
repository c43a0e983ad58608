//! Generator configurations for `cfs generate`.

use cfs_core::builder::{
    build_mass_family, build_system, mix_systems, MassFamilyConfig, MinkowskiConfig, MixtureSpec,
};
use cfs_core::operator::Coordinates;
use cfs_core::{CausalFermionSystem, Tolerances};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{load_error, CliError, CliResult};

/// Uniform sample points in `[0, time_extent] x [0, space_extent]^3`,
/// appended to any explicit sample points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sampling {
    pub count: usize,
    pub seed: u64,
    pub time_extent: f64,
    pub space_extent: f64,
}

impl Sampling {
    pub fn points(&self) -> Vec<Coordinates> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        (0..self.count)
            .map(|_| {
                [
                    rng.gen::<f64>() * self.time_extent,
                    rng.gen::<f64>() * self.space_extent,
                    rng.gen::<f64>() * self.space_extent,
                    rng.gen::<f64>() * self.space_extent,
                ]
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinkowskiSpec {
    #[serde(flatten)]
    pub config: MinkowskiConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sampling: Option<Sampling>,
}

impl MinkowskiSpec {
    pub fn resolved(&self) -> MinkowskiConfig {
        let mut c = self.config.clone();
        if let Some(s) = &self.sampling {
            c.sample_points.extend(s.points());
        }
        c
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Generator {
    Minkowski(MinkowskiSpec),
    /// Independently built Minkowski systems over the same Hilbert space.
    Mixture {
        components: Vec<MinkowskiSpec>,
        weights: Vec<f64>,
    },
    MassFamily(MassFamilyConfig),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerateConfig {
    #[serde(flatten)]
    pub generator: Generator,
    #[serde(default)]
    pub tolerances: Tolerances,
    /// `(l_min, l_max)` recorded in the system metadata.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scales: Option<(f64, f64)>,
}

impl GenerateConfig {
    pub fn parse(text: &str, source_name: &str) -> CliResult<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            CliError::Parse {
                source_name: source_name.into(),
                message: format!(
                    "at `{path}` (line {}, column {}): {inner}",
                    inner.line(),
                    inner.column()
                ),
            }
        })
    }

    pub fn warnings(&self) -> Vec<String> {
        match &self.generator {
            Generator::Minkowski(s) => s.config.warnings(),
            Generator::Mixture { components, .. } => components
                .iter()
                .flat_map(|c| c.config.warnings())
                .collect(),
            Generator::MassFamily(m) => m.base.warnings(),
        }
    }

    pub fn build(&self) -> CliResult<CausalFermionSystem> {
        let tol = &self.tolerances;
        let mut sys = match &self.generator {
            Generator::Minkowski(s) => build_system(&s.resolved(), tol).map_err(load_error)?,
            Generator::Mixture {
                components,
                weights,
            } => {
                let built = components
                    .iter()
                    .map(|c| build_system(&c.resolved(), tol))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(load_error)?;
                mix_systems(&MixtureSpec {
                    components: built,
                    weights: weights.clone(),
                })
                .map_err(load_error)?
            }
            Generator::MassFamily(m) => build_mass_family(m, tol).map_err(load_error)?,
        };
        if let Some((lo, hi)) = self.scales {
            cfs_core::causal::LengthScales::new(lo, hi).map_err(load_error)?;
            sys.metadata.scales = Some((lo, hi));
        }
        Ok(sys)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minkowski_with_sampling() {
        let text = r#"{"kind": "minkowski", "mass": 1.0, "eps": 0.01, "torus_radius": 1.0, "kmax": 0,
            "sample_points": [[0, 0, 0, 0]], "sampling": {"count": 3, "seed": 1, "time_extent": 1, "space_extent": 1},
            "scales": [0.01, 10.0]}"#;
        let cfg = GenerateConfig::parse(text, "mem").unwrap();
        let sys = cfg.build().unwrap();
        assert_eq!(sys.len(), 4);
        assert_eq!(sys.metadata.scales, Some((0.01, 10.0)));
    }

    #[test]
    fn sampling_is_reproducible() {
        let s = Sampling {
            count: 5,
            seed: 9,
            time_extent: 2.0,
            space_extent: 1.0,
        };
        assert_eq!(s.points(), s.points());
        assert!(s.points().iter().all(|p| p[0] <= 2.0 && p[1] <= 1.0));
    }

    #[test]
    fn unknown_kind_is_a_parse_error() {
        let err = GenerateConfig::parse(r#"{"kind": "sprinkle"}"#, "mem").unwrap_err();
        assert!(matches!(err, CliError::Parse { .. }));
    }
}
