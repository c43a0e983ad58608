//! Invariant suite run by `cfs validate`.

use cfs_core::linalg::{c64, eigenvalues, max_abs, C64};
use cfs_core::operator::{classify_spectrum, product_spectrum, time_direction};
use cfs_core::par::map_pairs;
use cfs_core::spin::{kernel_matrix, DirectionalFrames, SpinGeometry};
use cfs_core::{CausalFermionSystem, OperatorPoint, Tolerances};
use serde::Serialize;

use crate::commands::link_report;
use crate::report::{to_json, ReportBundle};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ValidateOptions {
    /// Relative tolerance of the algebraic identities.
    pub identity_tol: f64,
    /// Relative tolerance of spectra and spin-connection properties.
    pub spectral_tol: f64,
    /// The dense classification oracle runs only up to this dimension.
    pub dense_oracle_max_f: usize,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        Self {
            identity_tol: 1e-12,
            spectral_tol: 1e-9,
            dense_oracle_max_f: 64,
        }
    }
}

/// Number of offending pairs listed per check.
const LISTED: usize = 20;

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub checked: usize,
    pub max_residual: f64,
    pub failures: usize,
    pub examples: Vec<[String; 2]>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub passed: bool,
    pub tolerances: Tolerances,
    pub options: ValidateOptions,
    pub singular_points: Vec<String>,
    pub checks: Vec<CheckResult>,
}

/// Residual of one check on one pair; `None` when it does not apply.
type Residuals = Vec<Option<(f64, bool)>>;

const NAMES: [&str; 5] = [
    "time_direction_antisymmetry",
    "spectrum_xy_yx",
    "kernel_adjointness",
    "dense_classification",
    "spin_connection",
];

fn spectra_distance(a: &[C64], b: &[C64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let scale = a
        .iter()
        .chain(b)
        .fold(0.0_f64, |m, z| m.max(z.norm()))
        .max(f64::MIN_POSITIVE);
    let mut used = vec![false; b.len()];
    let mut worst = 0.0_f64;
    for z in a {
        let j = (0..b.len())
            .filter(|&j| !used[j])
            .min_by(|&i, &j| (b[i] - z).norm().total_cmp(&(b[j] - z).norm()))
            .expect("same length");
        used[j] = true;
        worst = worst.max((b[j] - z).norm());
    }
    worst / scale
}

/// Relative noise floor of eigenvalues of the dense `f x f` product.
const DENSE_NOISE_REL: f64 = 1e-11;

/// Nonzero spectrum of the dense product, `2n` largest moduli.
fn dense_spectrum(x: &OperatorPoint, y: &OperatorPoint, n: usize) -> Option<Vec<C64>> {
    let mut ev = eigenvalues(&(x.matrix() * y.matrix())).ok()?;
    ev.truncate(2 * n);
    let floor = DENSE_NOISE_REL * x.spectral_norm() * y.spectral_norm();
    Some(
        ev.into_iter()
            .map(|z| if z.norm() <= floor { c64(0.0, 0.0) } else { z })
            .collect(),
    )
}

fn pair_checks(
    system: &CausalFermionSystem,
    geom: &SpinGeometry,
    opt: &ValidateOptions,
    i: usize,
    j: usize,
) -> Residuals {
    let (x, y) = (system.operator(i), system.operator(j));
    let (n, tol) = (system.n(), system.tolerances());
    let scale = x.spectral_norm() * y.spectral_norm();
    let mut out: Residuals = vec![None; NAMES.len()];
    if let (Ok(a), Ok(b)) = (time_direction(x, y), time_direction(y, x)) {
        let r = (a + b).abs() / scale.max(f64::MIN_POSITIVE);
        out[0] = Some((r, r <= opt.identity_tol));
    }
    if let (Ok(sxy), Ok(syx)) = (product_spectrum(x, y, n), product_spectrum(y, x, n)) {
        let r = spectra_distance(&sxy, &syx);
        out[1] = Some((r, r <= opt.spectral_tol));
        if system.f() <= opt.dense_oracle_max_f {
            if let Some(dense) = dense_spectrum(x, y, n) {
                let same = classify_spectrum(&dense, tol) == classify_spectrum(&sxy, tol);
                out[3] = Some((if same { 0.0 } else { 1.0 }, same));
            }
        }
    }
    if let (Ok(pxy), Ok(pyx)) = (kernel_matrix(x, y), kernel_matrix(y, x)) {
        // G_x P(x, y) = (G_y P(y, x))^† with G = -diag(lambda)
        let lhs = x.restricted() * &pxy;
        let rhs = (y.restricted() * &pyx).adjoint();
        let r = max_abs(&(lhs - rhs)) / (scale * scale).max(f64::MIN_POSITIVE);
        out[2] = Some((r, r <= opt.identity_tol));
    }
    if n == 2 && geom.connectable(i, j).is_ok() {
        let r = match link_report(geom, &DirectionalFrames, i, j) {
            Ok(l) => l.unitarity.max(l.inverse).max(l.adjoint).max(l.chain),
            Err(_) => f64::INFINITY,
        };
        out[4] = Some((r, r <= opt.spectral_tol));
    }
    out
}

pub fn validate(system: &CausalFermionSystem, opt: &ValidateOptions) -> ValidationReport {
    let geom = SpinGeometry::new(system);
    let per_pair = map_pairs(system.len(), |i, j| {
        ((i, j), pair_checks(system, &geom, opt, i, j))
    });
    let mut checks: Vec<CheckResult> = NAMES
        .iter()
        .map(|&name| CheckResult {
            name,
            checked: 0,
            max_residual: 0.0,
            failures: 0,
            examples: Vec::new(),
        })
        .collect();
    for ((i, j), res) in per_pair {
        for (c, r) in checks.iter_mut().zip(res) {
            let Some((value, ok)) = r else { continue };
            c.checked += 1;
            c.max_residual = c.max_residual.max(value);
            if !ok {
                c.failures += 1;
                if c.examples.len() < LISTED {
                    c.examples
                        .push([system.point(i).id.clone(), system.point(j).id.clone()]);
                }
            }
        }
    }
    let singular_points = system
        .points()
        .iter()
        .filter(|p| !p.operator.is_regular(system.n()))
        .map(|p| p.id.clone())
        .collect();
    ValidationReport {
        passed: checks.iter().all(|c| c.failures == 0),
        tolerances: *system.tolerances(),
        options: *opt,
        singular_points,
        checks,
    }
}

pub fn cmd_validate(system: &CausalFermionSystem, opt: &ValidateOptions) -> (ReportBundle, bool) {
    let report = validate(system, opt);
    let mut b = ReportBundle::default();
    b.push("validation.json", to_json(&report));
    (b, report.passed)
}
