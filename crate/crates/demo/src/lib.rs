//! Three small computations on the Minkowski model, exported to JavaScript as
//! JSON strings. Everything runs on the calling thread.

use cfs_core::builder::{build_system, MinkowskiConfig};
use cfs_core::operator::{relate, CausalClass, TimeOrientation};
use cfs_core::spin::{
    identity_deviation, projective_deviation, transport, DirectionalFrames, MinkowskiFrames,
    PhaseSource, SpinGeometry,
};
use cfs_core::{CausalFermionSystem, Result, Tolerances};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Spin dimension of the Dirac sea model.
const N: usize = 2;
const MASS: f64 = 1.0;
const TORUS_RADIUS: f64 = 0.5;
/// Keeps a page interaction under a few seconds.
const MAX_KMAX: u32 = 2;
const MAX_GRID: usize = 41;
const MAX_INTERMEDIATE: usize = 32;

fn model(kmax: u32, eps: f64, points: Vec<[f64; 4]>) -> Result<CausalFermionSystem> {
    if kmax == 0 || kmax > MAX_KMAX {
        return Err(cfs_core::CfsError::InvalidConfig(format!(
            "kmax must be 1..={MAX_KMAX}"
        )));
    }
    let config = MinkowskiConfig::new(MASS, eps, TORUS_RADIUS, kmax).with_points(points);
    build_system(&config, &Tolerances::default())
}

fn code(class: CausalClass, orientation: TimeOrientation) -> String {
    let c = match class {
        CausalClass::Spacelike => 'S',
        CausalClass::Timelike => 'T',
        CausalClass::Lightlike => 'L',
    };
    let s = match orientation {
        TimeOrientation::Future => '+',
        TimeOrientation::Past => '-',
        TimeOrientation::Undirected => '0',
    };
    format!("{c}{s}")
}

#[derive(Debug, Serialize)]
pub struct LightConeMap {
    pub f: usize,
    pub extent: f64,
    pub steps: usize,
    /// Relation of the origin to `(t, x, 0, 0)`; rows run over `t` from
    /// `-extent` to `extent`, columns over `x`.
    pub cells: Vec<Vec<String>>,
}

/// Relation of the origin to every point of a `steps x steps` grid in the
/// `(t, x)` plane.
pub fn light_cone_map(kmax: u32, eps: f64, extent: f64, steps: usize) -> Result<LightConeMap> {
    let steps = steps.clamp(3, MAX_GRID);
    let coord = |k: usize| -extent + 2.0 * extent * k as f64 / (steps - 1) as f64;
    let mut points = vec![[0.0; 4]];
    for i in 0..steps {
        for j in 0..steps {
            points.push([coord(i), coord(j), 0.0, 0.0]);
        }
    }
    let sys = model(kmax, eps, points)?;
    let origin = sys.operator(0);
    let mut cells = Vec::with_capacity(steps);
    for i in 0..steps {
        let mut row = Vec::with_capacity(steps);
        for j in 0..steps {
            let k = 1 + i * steps + j;
            row.push(if coord(i) == 0.0 && coord(j) == 0.0 {
                "-".to_string()
            } else {
                let r = relate(origin, sys.operator(k), N, sys.tolerances())?;
                code(r.class, r.orientation)
            });
        }
        cells.push(row);
    }
    Ok(LightConeMap {
        f: sys.f(),
        extent,
        steps,
        cells,
    })
}

#[derive(Debug, Serialize)]
pub struct PairSpectrum {
    pub f: usize,
    /// Eigenvalues of the closed chain as `[re, im]`, largest modulus first.
    pub spectrum: Vec<[f64; 2]>,
    pub relation: String,
    pub time_direction: f64,
    pub spin_connectable: bool,
    pub minkowski_interval: f64,
}

/// The origin and `(t, x, 0, 0)`.
pub fn pair_spectrum(kmax: u32, eps: f64, t: f64, x: f64) -> Result<PairSpectrum> {
    let sys = model(kmax, eps, vec![[0.0; 4], [t, x, 0.0, 0.0]])?;
    let r = relate(sys.operator(0), sys.operator(1), N, sys.tolerances())?;
    Ok(PairSpectrum {
        f: sys.f(),
        spectrum: r.spectrum.iter().map(|z| [z.re, z.im]).collect(),
        relation: code(r.class, r.orientation),
        time_direction: r.time,
        spin_connectable: SpinGeometry::new(&sys).spin_connectable(0, 1),
        minkowski_interval: t * t - x * x,
    })
}

#[derive(Debug, Serialize)]
pub struct TransportRow {
    pub rule: &'static str,
    pub identity_deviation: Option<f64>,
    pub projective_deviation: Option<f64>,
    pub max_mismatch: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct TransportStudy {
    pub f: usize,
    pub points: usize,
    pub rows: Vec<TransportRow>,
}

/// Spin transport along `N + 2` equally spaced points from the origin to
/// `duration (1, velocity, 0, 0)`, read in the Dirac trivialization.
pub fn transport_study(
    kmax: u32,
    eps: f64,
    intermediate: usize,
    duration: f64,
    velocity: f64,
) -> Result<TransportStudy> {
    if !(velocity.abs() < 1.0 && duration > 0.0)
        || intermediate == 0
        || intermediate > MAX_INTERMEDIATE
    {
        return Err(cfs_core::CfsError::InvalidConfig(format!(
            "need duration > 0, |velocity| < 1 and 1 <= N <= {MAX_INTERMEDIATE}"
        )));
    }
    let last = intermediate + 1;
    let points = (0..=last)
        .map(|i| {
            let t = duration * i as f64 / last as f64;
            [t, velocity * t, 0.0, 0.0]
        })
        .collect();
    let sys = model(kmax, eps, points)?;
    let geom = SpinGeometry::new(&sys);
    let frames = MinkowskiFrames::from_system(&sys)?;
    let path: Vec<usize> = (0..sys.len()).collect();
    let mut rows = Vec::new();
    for rule in ["clifford", "default"] {
        let result = if rule == "clifford" {
            transport(&geom, &frames, &path)
        } else {
            transport(&geom, &DirectionalFrames, &path)
        };
        rows.push(match result {
            Ok(t) => {
                let m = frames.trivialization(last) * &t.matrix * frames.trivialization_inverse(0);
                TransportRow {
                    rule,
                    identity_deviation: Some(identity_deviation(&m)),
                    projective_deviation: Some(projective_deviation(&m)),
                    max_mismatch: t
                        .connections
                        .iter()
                        .filter_map(|c| match c.phase_source {
                            PhaseSource::Clifford { mismatch } => Some(mismatch),
                            _ => None,
                        })
                        .reduce(f64::max),
                    error: None,
                }
            }
            Err(e) => TransportRow {
                rule,
                identity_deviation: None,
                projective_deviation: None,
                max_mismatch: None,
                error: Some(e.to_string()),
            },
        });
    }
    Ok(TransportStudy {
        f: sys.f(),
        points: sys.len(),
        rows,
    })
}

fn to_js<T: Serialize>(r: Result<T>) -> std::result::Result<String, JsError> {
    let v = r.map_err(|e| JsError::new(&e.to_string()))?;
    serde_json::to_string(&v).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen(js_name = lightConeMap)]
pub fn light_cone_map_js(
    kmax: u32,
    eps: f64,
    extent: f64,
    steps: usize,
) -> std::result::Result<String, JsError> {
    to_js(light_cone_map(kmax, eps, extent, steps))
}

#[wasm_bindgen(js_name = pairSpectrum)]
pub fn pair_spectrum_js(
    kmax: u32,
    eps: f64,
    t: f64,
    x: f64,
) -> std::result::Result<String, JsError> {
    to_js(pair_spectrum(kmax, eps, t, x))
}

#[wasm_bindgen(js_name = transportStudy)]
pub fn transport_study_js(
    kmax: u32,
    eps: f64,
    intermediate: usize,
    duration: f64,
    velocity: f64,
) -> std::result::Result<String, JsError> {
    to_js(transport_study(kmax, eps, intermediate, duration, velocity))
}
