//! Points of the operator manifold, the discrete universal measure, and the
//! causal relations between pairs of points.

mod point;
mod relation;
mod spin_space;
mod system;

pub use point::{overlap, OperatorPoint, SELF_ADJOINT_REL};
pub use relation::{
    classify, classify_spectrum, orient, product_spectrum, relate, restricted_product,
    spectral_radius, time_direction, time_threshold, CausalClass, PairRelation, TimeOrientation,
    PRODUCT_NOISE_REL,
};
pub use spin_space::{spin_space, SpinSpace};
pub use system::{CausalFermionSystem, Coordinates, ModelParams, SystemMetadata, SystemPoint};

/// Whether `x` has the maximal rank `2n`.
pub fn is_regular(x: &OperatorPoint, n: usize) -> bool {
    x.is_regular(n)
}
