//! Concrete systems: regularized Dirac seas on a spatial torus and finite
//! mixtures of such systems.

pub mod dirac;
mod minkowski;
mod mixture;

pub use minkowski::{
    build_modes, build_system, dirac_hamiltonian, local_correlation, local_correlation_with,
    negative_energy_spinor, torus_displacement, MinkowskiConfig, Mode, ModeSet, Regularization,
};
pub use mixture::{build_mass_family, mix_systems, MassFamilyConfig, MixtureSpec, WEIGHT_SUM_TOL};
