//! The spinorial layer: kernels and closed chains, sign operators, Clifford
//! subspaces, spin connections, splice maps, holonomy and the metric
//! connection.

mod clifford;
mod connection;
mod frames;
mod geometry;
mod holonomy;
mod kernel;
mod sign;
mod splice;

pub use clifford::{span_distance, verify_clifford, CliffordSubspace, CLIFFORD_TOL};
pub use connection::{
    default_phase, default_phase_sign, exp_sign, solve_phase, ConnectablePair, ConnectionConfig,
    PhaseSource, SpinConnection, PHASE_RANGE,
};
pub use frames::{MinkowskiFrames, FRAME_TOL};
pub use geometry::SpinGeometry;
pub use holonomy::{
    holonomy, identity_deviation, metric_connection, projective_deviation, provider_connection,
    splice_at, transport, unitarity_residual, CliffordProvider, DirectionalFrames, Holonomy,
    MetricConnection, Transport,
};
pub use kernel::{
    closed_chain, kernel, kernel_matrix, physical_wave_function, properly_timelike, ClosedChain,
    Definiteness, Eigenspace, KernelMap,
};
pub use sign::{directional_sign, directional_sign_of, euclidean_sign, SignKind, SignOperator};
pub use splice::{splice_map, SPLICE_TOL};
