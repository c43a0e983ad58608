//! Composition of spin connections with splice maps: transport along
//! discrete paths, holonomy around triangles, and the metric connection.

use nalgebra::DMatrix;

use super::clifford::CliffordSubspace;
use super::connection::SpinConnection;
use super::geometry::SpinGeometry;
use super::splice::splice_map;
use crate::error::{CfsError, Result};
use crate::linalg::{frobenius, identity, indefinite_adjoint, CMatrix};

/// Source of the distinguished Clifford subspaces `K_xy`.
pub trait CliffordProvider {
    /// `K_xy`, a subspace at `x` chosen with respect to `y`.
    fn subspace(&self, geom: &SpinGeometry, x: usize, y: usize) -> Result<CliffordSubspace>;

    /// Whether the subspaces carry enough structure to fix the phase of the
    /// connection. When false the default phase is used.
    fn pins_phase(&self) -> bool;
}

/// `K_xy = span{v_xy}` (and `span{s_x}` for `x = y`). The one-dimensional
/// subspaces are always mapped onto each other, so they do not fix the phase.
#[derive(Debug, Clone, Copy, Default)]
pub struct DirectionalFrames;

impl CliffordProvider for DirectionalFrames {
    fn subspace(&self, geom: &SpinGeometry, x: usize, y: usize) -> Result<CliffordSubspace> {
        let op = if x == y {
            geom.euclidean_sign(x)?
        } else {
            geom.directional_sign(x, y)?
        };
        geom.clifford(x, vec![op.matrix])
    }

    fn pins_phase(&self) -> bool {
        false
    }
}

/// `D_{x,y}` with the phase fixed by the provider's subspaces when it pins
/// the phase, and the default phase otherwise.
pub fn provider_connection(
    geom: &SpinGeometry,
    provider: &dyn CliffordProvider,
    x: usize,
    y: usize,
) -> Result<SpinConnection> {
    if x == y || !provider.pins_phase() {
        return geom.connection(x, y, None);
    }
    let k_xy = provider.subspace(geom, x, y)?;
    let k_yx = provider.subspace(geom, y, x)?;
    geom.connection(x, y, Some((&k_xy, &k_yx)))
}

/// `U_z^{(a|b)}`: the splice map at `z` from `K_zb` to `K_za`.
pub fn splice_at(
    geom: &SpinGeometry,
    provider: &dyn CliffordProvider,
    z: usize,
    a: usize,
    b: usize,
) -> Result<CMatrix> {
    if a == b {
        return Ok(identity(geom.system.operator(z).rank()));
    }
    let from = provider.subspace(geom, z, b)?;
    let to = provider.subspace(geom, z, a)?;
    splice_map(&from, &to, &geom.gram(z))
}

/// Composite map along a path together with its pieces.
#[derive(Debug, Clone)]
pub struct Transport {
    pub path: Vec<usize>,
    pub connections: Vec<SpinConnection>,
    /// Splice map at each interior point of the path.
    pub splices: Vec<CMatrix>,
    /// `S_{x_0} -> S_{x_N}`.
    pub matrix: CMatrix,
}

/// `D_{x_N, x_{N-1}} U ... U_{x_1}^{(x_2|x_0)} D_{x_1, x_0}`.
pub fn transport(
    geom: &SpinGeometry,
    provider: &dyn CliffordProvider,
    path: &[usize],
) -> Result<Transport> {
    if path.len() < 2 {
        return Err(CfsError::InvalidConfig(
            "a path needs at least two points".into(),
        ));
    }
    for &p in path {
        geom.check_index(p)?;
    }
    let mut connections = Vec::with_capacity(path.len() - 1);
    let mut splices = Vec::with_capacity(path.len() - 2);
    let first = provider_connection(geom, provider, path[1], path[0])?;
    let mut matrix = first.matrix.clone();
    connections.push(first);
    for w in path.windows(3) {
        let u = splice_at(geom, provider, w[1], w[2], w[0])?;
        let d = provider_connection(geom, provider, w[2], w[1])?;
        matrix = &d.matrix * &u * matrix;
        splices.push(u);
        connections.push(d);
    }
    Ok(Transport {
        path: path.to_vec(),
        connections,
        splices,
        matrix,
    })
}

#[derive(Debug, Clone)]
pub struct Holonomy {
    pub triangle: [usize; 3],
    pub matrix: CMatrix,
    /// `D_{x,y}`, `D_{y,z}`, `D_{z,x}`.
    pub connections: [SpinConnection; 3],
}

/// `R(x, y, z) = U_x^{(z|y)} D_{x,y} U_y^{(x|z)} D_{y,z} U_z^{(y|x)} D_{z,x}`.
pub fn holonomy(
    geom: &SpinGeometry,
    provider: &dyn CliffordProvider,
    x: usize,
    y: usize,
    z: usize,
) -> Result<Holonomy> {
    for p in [x, y, z] {
        geom.check_index(p)?;
    }
    let d_xy = provider_connection(geom, provider, x, y)?;
    let d_yz = provider_connection(geom, provider, y, z)?;
    let d_zx = provider_connection(geom, provider, z, x)?;
    let u_x = splice_at(geom, provider, x, z, y)?;
    let u_y = splice_at(geom, provider, y, x, z)?;
    let u_z = splice_at(geom, provider, z, y, x)?;
    let matrix = u_x * &d_xy.matrix * u_y * &d_yz.matrix * u_z * &d_zx.matrix;
    Ok(Holonomy {
        triangle: [x, y, z],
        matrix,
        connections: [d_xy, d_yz, d_zx],
    })
}

/// Deviation of a unitary from the identity: `|M - 1|_F / sqrt(d)`.
pub fn identity_deviation(m: &CMatrix) -> f64 {
    frobenius(&(m - identity(m.nrows()))) / (m.nrows() as f64).sqrt()
}

/// Phase-free deviation `min_theta |M - e^{i theta} 1|_F / sqrt(d)`.
pub fn projective_deviation(m: &CMatrix) -> f64 {
    let d = m.nrows() as f64;
    let sq = frobenius(m).powi(2) - 2.0 * m.trace().norm() + d;
    sq.max(0.0).sqrt() / d.sqrt()
}

/// Largest deviation of `m` from spin unitarity at the given Gram matrices.
pub fn unitarity_residual(m: &CMatrix, g_target: &CMatrix, g_source: &CMatrix) -> Result<f64> {
    let adj = indefinite_adjoint(m, g_target, g_source)?;
    Ok(frobenius(&(adj * m - identity(m.ncols()))) / (m.ncols() as f64).sqrt())
}

/// Linear isometry `T_y -> T_x` in the generator bases.
#[derive(Debug, Clone)]
pub struct MetricConnection {
    /// Column `b` holds the coefficients of the image of generator `b` of `T_y`.
    pub matrix: DMatrix<f64>,
    /// Least-squares residual of expressing the images in `T_x`.
    pub fit_residual: f64,
    /// `|C^T g_x C - g_y| / |g_y|` with `g` the Clifford metrics.
    pub isometry_residual: f64,
    pub connection: SpinConnection,
}

/// `nabla_{x,y}`: splice `T_y -> K_yx`, conjugate with `D_{x,y}`, splice
/// `K_xy -> T_x`, and expand the images of the generators of `T_y` in the
/// generators of `T_x`.
pub fn metric_connection(
    geom: &SpinGeometry,
    x: usize,
    y: usize,
    t_x: &CliffordSubspace,
    t_y: &CliffordSubspace,
    k_xy: &CliffordSubspace,
    k_yx: &CliffordSubspace,
    pin_phase: bool,
) -> Result<MetricConnection> {
    let connection = if pin_phase {
        geom.connection(x, y, Some((k_xy, k_yx)))?
    } else {
        geom.connection(x, y, None)?
    };
    let (g_x, g_y) = (geom.gram(x), geom.gram(y));
    let (u_in, u_out) = if x == y {
        (identity(g_x.nrows()), identity(g_x.nrows()))
    } else {
        (splice_map(t_y, k_yx, &g_y)?, splice_map(k_xy, t_x, &g_x)?)
    };
    let w = u_out * &connection.matrix * u_in;
    let w_adj = indefinite_adjoint(&w, &g_x, &g_y)?;
    let basis = real_columns(t_x.generators());
    let images: Vec<CMatrix> = t_y.generators().iter().map(|t| &w * t * &w_adj).collect();
    let targets = real_columns(&images);
    let svd = basis.clone().svd(true, true);
    let coeffs = svd
        .solve(&targets, 1e-12)
        .map_err(|e| CfsError::Numeric(format!("least squares failed: {e}")))?;
    let fit = &basis * &coeffs - &targets;
    let fit_residual = fit.norm() / targets.norm().max(f64::MIN_POSITIVE);
    let pulled = coeffs.transpose() * t_x.metric() * &coeffs;
    let isometry_residual = (pulled - t_y.metric()).amax() / t_y.metric().amax();
    Ok(MetricConnection {
        matrix: coeffs,
        fit_residual,
        isometry_residual,
        connection,
    })
}

fn real_columns(ms: &[CMatrix]) -> DMatrix<f64> {
    let len = ms.first().map_or(0, |m| 2 * m.len());
    DMatrix::from_fn(len, ms.len(), |i, j| {
        let z = ms[j][i / 2];
        if i % 2 == 0 {
            z.re
        } else {
            z.im
        }
    })
}
