//! The analysis subcommands. Each returns a report bundle; pair and triple
//! work runs on the current rayon pool and is assembled in point order.

use cfs_core::causal::{
    build_causal_graph, enumerate_lattice, mask_to_set, CausalGraph, CausalOrder, GraphConfig,
    LengthScales, ProductNorm,
};
use cfs_core::linalg::{identity, indefinite_adjoint, max_abs, CMatrix};
use cfs_core::operator::{relate, CausalClass, PairRelation, TimeOrientation};
use cfs_core::par::{map_pairs, map_range};
use cfs_core::spin::{
    holonomy, identity_deviation, projective_deviation, provider_connection, transport,
    unitarity_residual, CliffordProvider, DirectionalFrames, MinkowskiFrames, PhaseSource,
    SpinGeometry,
};
use cfs_core::{CausalFermionSystem, Tolerances};
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::report::{complex_rows, labelled_matrix, num, to_json, tolerance_comment, ReportBundle};

/// Placeholder for the diagonal of the classification matrix.
pub const DIAGONAL_MARK: &str = "-";

pub fn relation_code(r: &PairRelation) -> String {
    let c = match r.class {
        CausalClass::Spacelike => 'S',
        CausalClass::Timelike => 'T',
        CausalClass::Lightlike => 'L',
    };
    let s = match r.orientation {
        TimeOrientation::Future => '+',
        TimeOrientation::Past => '-',
        TimeOrientation::Undirected => '0',
    };
    format!("{c}{s}")
}

fn flipped(code: &str) -> String {
    let mut c = code.chars();
    let class = c.next().unwrap_or('?');
    let sign = match c.next() {
        Some('+') => '-',
        Some('-') => '+',
        Some(other) => other,
        None => '?',
    };
    format!("{class}{sign}")
}

fn pair_ids(system: &CausalFermionSystem, i: usize, j: usize) -> [&str; 2] {
    [&system.point(i).id, &system.point(j).id]
}

fn ids(system: &CausalFermionSystem) -> Vec<String> {
    system.points().iter().map(|p| p.id.clone()).collect()
}

/// Relation codes for every ordered pair; the diagonal holds the
/// self-relation or [`DIAGONAL_MARK`].
pub fn classification_matrix(
    system: &CausalFermionSystem,
    include_diagonal: bool,
) -> CliResult<Vec<Vec<String>>> {
    let (n, tol) = (system.n(), *system.tolerances());
    let rel = |i: usize, j: usize| {
        relate(system.operator(i), system.operator(j), n, &tol)
            .map(|r| relation_code(&r))
            .map_err(|e| CliError::numeric(&pair_ids(system, i, j), e))
    };
    let upper = map_pairs(system.len(), rel);
    let diag = if include_diagonal {
        map_range(system.len(), |i| rel(i, i))
    } else {
        map_range(system.len(), |_| Ok(DIAGONAL_MARK.to_string()))
    };
    let len = system.len();
    let mut m = vec![vec![String::new(); len]; len];
    let mut it = upper.into_iter();
    for i in 0..len {
        for j in i + 1..len {
            let code = it.next().expect("one entry per pair")?;
            m[j][i] = flipped(&code);
            m[i][j] = code;
        }
    }
    for (i, d) in diag.into_iter().enumerate() {
        m[i][i] = d?;
    }
    Ok(m)
}

pub fn cmd_classify(
    system: &CausalFermionSystem,
    include_diagonal: bool,
) -> CliResult<ReportBundle> {
    let m = classification_matrix(system, include_diagonal)?;
    let mut csv = tolerance_comment("#", system.tolerances());
    csv += &labelled_matrix(&ids(system), |i, j| m[i][j].clone());
    let mut b = ReportBundle::default();
    b.push("classification.csv", csv);
    Ok(b)
}

/// Scales from the flags, else from the system metadata.
pub fn resolve_scales(
    system: &CausalFermionSystem,
    l_min: Option<f64>,
    l_max: Option<f64>,
    norm: ProductNorm,
) -> CliResult<LengthScales> {
    let (lo, hi) = match (l_min, l_max, system.metadata.scales) {
        (Some(lo), Some(hi), _) => (lo, hi),
        (None, None, Some(s)) => s,
        (lo, hi, Some(s)) => (lo.unwrap_or(s.0), hi.unwrap_or(s.1)),
        _ => {
            return Err(CliError::Usage(
                "length scales needed: pass --lmin and --lmax or record them in the system".into(),
            ))
        }
    };
    Ok(LengthScales::new(lo, hi)
        .map_err(|e| CliError::Usage(e.to_string()))?
        .with_norm(norm))
}

fn graph_of(system: &CausalFermionSystem, config: &GraphConfig) -> CliResult<CausalGraph> {
    build_causal_graph(system, config).map_err(|e| CliError::numeric(&[], e))
}

#[derive(Serialize)]
struct DistanceSummary {
    tolerances: Tolerances,
    scales: LengthScales,
    require_spin_connectable: bool,
    edges: usize,
    warnings: Vec<String>,
}

pub fn cmd_distance(system: &CausalFermionSystem, config: &GraphConfig) -> CliResult<ReportBundle> {
    let graph = graph_of(system, config)?;
    let d = graph.distance_matrix();
    let order = CausalOrder::from_graph(&graph);
    let ids = ids(system);
    let mut b = ReportBundle::default();
    let header = tolerance_comment("#", system.tolerances());
    b.push(
        "distance.csv",
        header.clone() + &labelled_matrix(&ids, |i, j| num(d[i][j])),
    );
    b.push(
        "order.csv",
        header + &labelled_matrix(&ids, |i, j| if order.leq(i, j) { "1" } else { "0" }.into()),
    );
    b.push(
        "graph.dot",
        tolerance_comment("//", system.tolerances()) + &graph.to_dot(),
    );
    b.push(
        "summary.json",
        to_json(&DistanceSummary {
            tolerances: *system.tolerances(),
            scales: config.scales,
            require_spin_connectable: config.require_spin_connectable,
            edges: graph.edge_count(),
            warnings: config.scales.warnings(system),
        }),
    );
    Ok(b)
}

#[derive(Serialize)]
struct LatticeReport {
    tolerances: Tolerances,
    scales: LengthScales,
    points: usize,
    sets: Vec<Vec<String>>,
}

pub fn cmd_lattice(
    system: &CausalFermionSystem,
    config: &GraphConfig,
    max_points: usize,
) -> CliResult<ReportBundle> {
    let graph = graph_of(system, config)?;
    let lattice =
        enumerate_lattice(&graph, max_points).map_err(|e| CliError::Usage(e.to_string()))?;
    let ids = ids(system);
    let sets = lattice
        .masks
        .iter()
        .map(|&m| mask_to_set(m).into_iter().map(|i| ids[i].clone()).collect())
        .collect();
    let mut b = ReportBundle::default();
    b.push(
        "lattice.json",
        to_json(&LatticeReport {
            tolerances: *system.tolerances(),
            scales: config.scales,
            points: lattice.points,
            sets,
        }),
    );
    Ok(b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FrameKind {
    /// `K_xy` spanned by the directional sign operator; default phase.
    Directional,
    /// Dirac matrices of the Minkowski model boosted along the link; solved phase.
    Minkowski,
}

pub enum Provider {
    Directional(DirectionalFrames),
    Minkowski(Box<MinkowskiFrames>),
}

impl Provider {
    pub fn new(system: &CausalFermionSystem, kind: FrameKind) -> CliResult<Self> {
        Ok(match kind {
            FrameKind::Directional => Provider::Directional(DirectionalFrames),
            FrameKind::Minkowski => Provider::Minkowski(Box::new(
                MinkowskiFrames::from_system(system).map_err(|e| CliError::Usage(e.to_string()))?,
            )),
        })
    }

    pub fn get(&self) -> &dyn CliffordProvider {
        match self {
            Provider::Directional(p) => p,
            Provider::Minkowski(p) => p.as_ref(),
        }
    }

    pub fn frames(&self) -> Option<&MinkowskiFrames> {
        match self {
            Provider::Minkowski(p) => Some(p),
            Provider::Directional(_) => None,
        }
    }
}

/// Residuals of the defining properties of one connection `D_{x,y}`.
#[derive(Debug, Clone, Serialize)]
pub struct LinkReport {
    pub target: String,
    pub source: String,
    pub phase: f64,
    pub phase_source: PhaseSource,
    /// Departure of `D_{x,y}` from spin unitarity.
    pub unitarity: f64,
    /// `|D_{y,x} D_{x,y} - 1|`.
    pub inverse: f64,
    /// `|D_{x,y}^* - D_{y,x}| / |D_{y,x}|`.
    pub adjoint: f64,
    /// `|A_xy - D_{x,y} A_yx D_{y,x}| / |A_xy|`.
    pub chain: f64,
}

pub fn link_report(
    geom: &SpinGeometry,
    provider: &dyn CliffordProvider,
    x: usize,
    y: usize,
) -> CliResult<LinkReport> {
    let sys = geom.system;
    let err = |e| CliError::numeric(&pair_ids(sys, x, y), e);
    let d = provider_connection(geom, provider, x, y).map_err(err)?;
    let back = provider_connection(geom, provider, y, x).map_err(err)?;
    let (gx, gy) = (geom.gram(x), geom.gram(y));
    let unitarity = unitarity_residual(&d.matrix, &gx, &gy).map_err(err)?;
    let inverse = max_abs(&(&back.matrix * &d.matrix - identity(d.matrix.ncols())));
    let adj = indefinite_adjoint(&d.matrix, &gx, &gy).map_err(err)?;
    let adjoint = max_abs(&(&adj - &back.matrix)) / max_abs(&back.matrix);
    let a_xy = geom.closed_chain(x, y).map_err(err)?.matrix;
    let a_yx = geom.closed_chain(y, x).map_err(err)?.matrix;
    let chain = max_abs(&(&a_xy - &d.matrix * a_yx * &back.matrix)) / max_abs(&a_xy);
    Ok(LinkReport {
        target: sys.point(x).id.clone(),
        source: sys.point(y).id.clone(),
        phase: d.phase,
        phase_source: d.phase_source,
        unitarity,
        inverse,
        adjoint,
        chain,
    })
}

#[derive(Serialize)]
struct SpliceReport {
    at: String,
    unitarity: f64,
}

#[derive(Serialize)]
struct ConnectReport {
    tolerances: Tolerances,
    frames: FrameKind,
    path: Vec<String>,
    links: Vec<LinkReport>,
    splices: Vec<SpliceReport>,
    composite: Vec<Vec<[f64; 2]>>,
    composite_unitarity: f64,
    /// Deviation of the trivialized composite from the identity, with and
    /// without a global phase (Minkowski frames only).
    #[serde(skip_serializing_if = "Option::is_none")]
    identity_deviation: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    projective_deviation: Option<f64>,
}

pub fn resolve_ids(system: &CausalFermionSystem, list: &[String]) -> CliResult<Vec<usize>> {
    list.iter()
        .map(|id| {
            system
                .index_of(id)
                .map_err(|e| CliError::Usage(e.to_string()))
        })
        .collect()
}

/// Trivialized composite `Phi_last T Phi_first^{-1}` on `C^4`.
pub fn trivialized(frames: &MinkowskiFrames, first: usize, last: usize, m: &CMatrix) -> CMatrix {
    frames.trivialization(last) * m * frames.trivialization_inverse(first)
}

pub fn cmd_connect(
    system: &CausalFermionSystem,
    path: &[String],
    kind: FrameKind,
) -> CliResult<ReportBundle> {
    let idx = resolve_ids(system, path)?;
    if idx.len() < 2 {
        return Err(CliError::Usage("a path needs at least two points".into()));
    }
    let provider = Provider::new(system, kind)?;
    let geom = SpinGeometry::new(system);
    let path_ids: Vec<&str> = idx.iter().map(|&i| system.point(i).id.as_str()).collect();
    let t = transport(&geom, provider.get(), &idx).map_err(|e| CliError::numeric(&path_ids, e))?;
    let links = map_range(idx.len() - 1, |k| {
        link_report(&geom, provider.get(), idx[k + 1], idx[k])
    })
    .into_iter()
    .collect::<CliResult<Vec<_>>>()?;
    let splices = t
        .splices
        .iter()
        .zip(&idx[1..])
        .map(|(u, &z)| {
            let g = geom.gram(z);
            Ok(SpliceReport {
                at: system.point(z).id.clone(),
                unitarity: unitarity_residual(u, &g, &g)
                    .map_err(|e| CliError::numeric(&[&system.point(z).id], e))?,
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    let (first, last) = (idx[0], idx[idx.len() - 1]);
    let composite_unitarity = unitarity_residual(&t.matrix, &geom.gram(last), &geom.gram(first))
        .map_err(|e| CliError::numeric(&path_ids, e))?;
    let triv = provider
        .frames()
        .map(|f| trivialized(f, first, last, &t.matrix));
    let mut b = ReportBundle::default();
    b.push(
        "connection.json",
        to_json(&ConnectReport {
            tolerances: *system.tolerances(),
            frames: kind,
            path: path_ids.iter().map(|s| s.to_string()).collect(),
            links,
            splices,
            composite: complex_rows(&t.matrix),
            composite_unitarity,
            identity_deviation: triv.as_ref().map(identity_deviation),
            projective_deviation: triv.as_ref().map(projective_deviation),
        }),
    );
    Ok(b)
}

#[derive(Serialize)]
struct HolonomyReport {
    tolerances: Tolerances,
    frames: FrameKind,
    triangle: Vec<String>,
    links: Vec<LinkReport>,
    matrix: Vec<Vec<[f64; 2]>>,
    unitarity: f64,
    identity_deviation: f64,
    projective_deviation: f64,
}

pub fn cmd_holonomy(
    system: &CausalFermionSystem,
    triangle: &[String],
    kind: FrameKind,
) -> CliResult<ReportBundle> {
    let idx = resolve_ids(system, triangle)?;
    let [x, y, z] = idx[..] else {
        return Err(CliError::Usage(format!(
            "a triangle needs three points (got {})",
            idx.len()
        )));
    };
    let provider = Provider::new(system, kind)?;
    let geom = SpinGeometry::new(system);
    let tri_ids: Vec<&str> = idx.iter().map(|&i| system.point(i).id.as_str()).collect();
    let h = holonomy(&geom, provider.get(), x, y, z).map_err(|e| CliError::numeric(&tri_ids, e))?;
    let links = [(x, y), (y, z), (z, x)]
        .iter()
        .map(|&(a, b)| link_report(&geom, provider.get(), a, b))
        .collect::<CliResult<Vec<_>>>()?;
    let g = geom.gram(x);
    let unitarity =
        unitarity_residual(&h.matrix, &g, &g).map_err(|e| CliError::numeric(&tri_ids, e))?;
    let mut b = ReportBundle::default();
    b.push(
        "holonomy.json",
        to_json(&HolonomyReport {
            tolerances: *system.tolerances(),
            frames: kind,
            triangle: tri_ids.iter().map(|s| s.to_string()).collect(),
            links,
            matrix: complex_rows(&h.matrix),
            unitarity,
            identity_deviation: identity_deviation(&h.matrix),
            projective_deviation: projective_deviation(&h.matrix),
        }),
    );
    Ok(b)
}
