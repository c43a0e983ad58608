//! Transport along a discretized timelike geodesic of the Minkowski model
//! under joint refinement of the regularization and the path.

use cfs_core::builder::{build_system, MinkowskiConfig};
use cfs_core::par::map_range;
use cfs_core::spin::{
    identity_deviation, projective_deviation, transport, DirectionalFrames, MinkowskiFrames,
    PhaseSource, SpinGeometry,
};
use cfs_core::Tolerances;
use serde::{Deserialize, Serialize};

use crate::commands::trivialized;
use crate::error::{load_error, CliError, CliResult};
use crate::report::{num, tolerance_comment, ReportBundle};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConvergeConfig {
    pub mass: f64,
    pub torus_radius: f64,
    pub kmax: u32,
    /// Coordinate time from the first to the last point of the path.
    pub duration: f64,
    /// Velocity of the geodesic along `x1`; must be below 1.
    pub velocity: f64,
    pub eps_list: Vec<f64>,
    /// Numbers of intermediate points.
    pub refine_list: Vec<usize>,
    pub tolerances: Tolerances,
}

impl Default for ConvergeConfig {
    fn default() -> Self {
        Self {
            mass: 1.0,
            torus_radius: 0.5,
            kmax: 2,
            duration: 0.5,
            velocity: 0.0,
            eps_list: vec![1e-3, 5e-4, 2.5e-4],
            refine_list: vec![4, 8, 16],
            tolerances: Tolerances::default(),
        }
    }
}

impl ConvergeConfig {
    pub fn validate(&self) -> CliResult<()> {
        if !(self.velocity.abs() < 1.0) || !(self.duration > 0.0) {
            return Err(CliError::Usage(
                "the path must be timelike: duration > 0 and |velocity| < 1".into(),
            ));
        }
        if self.eps_list.is_empty() || self.refine_list.is_empty() || self.refine_list.contains(&0)
        {
            return Err(CliError::Usage(
                "eps and refinement lists must be nonempty, N >= 1".into(),
            ));
        }
        Ok(())
    }

    /// `N + 2` equally spaced points from the origin to `duration (1, velocity, 0, 0)`.
    pub fn path(&self, intermediate: usize) -> Vec<[f64; 4]> {
        let last = intermediate + 1;
        (0..=last)
            .map(|i| {
                let t = self.duration * i as f64 / last as f64;
                [t, self.velocity * t, 0.0, 0.0]
            })
            .collect()
    }
}

/// How the connections along the path were fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseRule {
    /// Phases solved from the boosted Dirac frames.
    Clifford,
    /// Default phase with the directional sign subspaces.
    Default,
}

impl PhaseRule {
    fn label(self) -> &'static str {
        match self {
            PhaseRule::Clifford => "clifford",
            PhaseRule::Default => "default",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceRow {
    pub eps: f64,
    pub intermediate: usize,
    pub rule: PhaseRule,
    /// `|Phi_N T Phi_0^{-1} - 1| / 2`; `None` when the transport failed.
    pub identity_deviation: Option<f64>,
    pub projective_deviation: Option<f64>,
    /// Largest mapping mismatch of a solved phase.
    pub max_mismatch: Option<f64>,
    pub error: Option<String>,
}

fn rows_for(
    config: &ConvergeConfig,
    eps: f64,
    intermediate: usize,
) -> CliResult<Vec<ConvergenceRow>> {
    let model = MinkowskiConfig::new(config.mass, eps, config.torus_radius, config.kmax)
        .with_points(config.path(intermediate));
    let system = build_system(&model, &config.tolerances).map_err(load_error)?;
    let geom = SpinGeometry::new(&system);
    let frames =
        MinkowskiFrames::from_system(&system).map_err(|e| CliError::Numeric(e.to_string()))?;
    let path: Vec<usize> = (0..system.len()).collect();
    let last = path.len() - 1;
    let mut out = Vec::with_capacity(2);
    for rule in [PhaseRule::Clifford, PhaseRule::Default] {
        let result = match rule {
            PhaseRule::Clifford => transport(&geom, &frames, &path),
            PhaseRule::Default => transport(&geom, &DirectionalFrames, &path),
        };
        let row = match result {
            Ok(t) => {
                let m = trivialized(&frames, 0, last, &t.matrix);
                let mismatch = t
                    .connections
                    .iter()
                    .filter_map(|c| match c.phase_source {
                        PhaseSource::Clifford { mismatch } => Some(mismatch),
                        _ => None,
                    })
                    .reduce(f64::max);
                ConvergenceRow {
                    eps,
                    intermediate,
                    rule,
                    identity_deviation: Some(identity_deviation(&m)),
                    projective_deviation: Some(projective_deviation(&m)),
                    max_mismatch: mismatch,
                    error: None,
                }
            }
            Err(e) => ConvergenceRow {
                eps,
                intermediate,
                rule,
                identity_deviation: None,
                projective_deviation: None,
                max_mismatch: None,
                error: Some(e.to_string()),
            },
        };
        out.push(row);
    }
    Ok(out)
}

/// One pair of rows per `(eps, N)` in the grid, ordered as the lists.
pub fn convergence_rows(config: &ConvergeConfig) -> CliResult<Vec<ConvergenceRow>> {
    config.validate()?;
    let grid: Vec<(f64, usize)> = config
        .eps_list
        .iter()
        .flat_map(|&e| config.refine_list.iter().map(move |&n| (e, n)))
        .collect();
    let rows = map_range(grid.len(), |k| rows_for(config, grid[k].0, grid[k].1));
    Ok(rows
        .into_iter()
        .collect::<CliResult<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect())
}

pub fn convergence_csv(config: &ConvergeConfig, rows: &[ConvergenceRow]) -> String {
    let opt = |v: Option<f64>| v.map_or(String::new(), num);
    let mut s = tolerance_comment("#", &config.tolerances);
    s += &format!(
        "# mass={} torus_radius={} kmax={} duration={} velocity={}\n",
        num(config.mass),
        num(config.torus_radius),
        config.kmax,
        num(config.duration),
        num(config.velocity)
    );
    s += "eps,intermediate,rule,identity_deviation,projective_deviation,max_mismatch,error\n";
    for r in rows {
        s += &format!(
            "{},{},{},{},{},{},{}\n",
            num(r.eps),
            r.intermediate,
            r.rule.label(),
            opt(r.identity_deviation),
            opt(r.projective_deviation),
            opt(r.max_mismatch),
            r.error.as_deref().unwrap_or("").replace(',', ";")
        );
    }
    s
}

pub fn cmd_converge(config: &ConvergeConfig) -> CliResult<ReportBundle> {
    let rows = convergence_rows(config)?;
    let mut b = ReportBundle::default();
    b.push("convergence.csv", convergence_csv(config, &rows));
    Ok(b)
}
