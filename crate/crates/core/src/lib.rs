//! Finite-dimensional causal fermion systems and their inherent structures.
//!
//! A system is a weighted list of self-adjoint finite-rank operators on a
//! finite-dimensional Hilbert space. From it the crate extracts causal
//! relations and time direction ([`operator`]), the spinorial layer with
//! kernels, connections and holonomy ([`spin`]), Lorentzian distances, the
//! causal order and its orthogonality lattice ([`causal`]), and the
//! Hilbert-Schmidt geometry of the operator manifold ([`ambient`]).
//! Concrete systems are produced from regularized Dirac seas by [`builder`].

pub mod ambient;
pub mod builder;
pub mod causal;
pub mod error;
pub mod linalg;
pub mod operator;
pub mod par;
pub mod spin;
pub mod tolerance;

pub use error::{CfsError, Result};
pub use operator::{CausalClass, CausalFermionSystem, OperatorPoint, SpinSpace, SystemPoint};
pub use tolerance::Tolerances;
