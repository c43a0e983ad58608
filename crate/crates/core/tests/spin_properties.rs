mod common;

use cfs_core::builder::{build_system, MinkowskiConfig};
use cfs_core::linalg::{c64, identity, indefinite_adjoint, CMatrix, CVector};
use cfs_core::operator::{classify, CausalClass};
use cfs_core::spin::{
    closed_chain, holonomy, identity_deviation, kernel_matrix, physical_wave_function,
    unitarity_residual, DirectionalFrames, MinkowskiFrames, PhaseSource, SpinGeometry,
};
use cfs_core::{OperatorPoint, Tolerances};
use common::*;
use proptest::prelude::*;

fn tol() -> Tolerances {
    Tolerances::default()
}

fn rel(a: &CMatrix, b: &CMatrix) -> f64 {
    max_abs(&(a - b)) / max_abs(b).max(1e-300)
}

/// Spin scalar product in the ambient space: `<u|v>_x = -<u, x v>`.
fn dense_gram(x: &OperatorPoint) -> CMatrix {
    x.basis().adjoint() * x.matrix() * x.basis() * c64(-1.0, 0.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kernel_is_adjoint_for_the_spin_products(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (x, y) = mixed_pair(&mut r, 7, 2);
        let p_xy = kernel_matrix(&x, &y).unwrap();
        let p_yx = kernel_matrix(&y, &x).unwrap();
        // <u | P(x,y) v>_x = -<u, x y v> for u in S_x, v in S_y
        let oracle = x.basis().adjoint() * x.matrix() * y.matrix() * y.basis() * c64(-1.0, 0.0);
        let g_x = dense_gram(&x);
        prop_assert!(max_abs(&(&g_x * &p_xy - &oracle)) <= 1e-12 * max_abs(&oracle).max(1.0));
        let adj = indefinite_adjoint(&p_xy, &g_x, &dense_gram(&y)).unwrap();
        prop_assert!(rel(&adj, &p_yx) <= 1e-10);
    }

    #[test]
    fn closed_chain_is_the_compressed_product(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (x, y) = mixed_pair(&mut r, 6, 2);
        let chain = closed_chain(&x, &y, 2, &tol()).unwrap();
        let oracle = x.basis().adjoint() * y.matrix() * x.matrix() * x.basis();
        prop_assert!(max_abs(&(&chain.matrix - &oracle)) <= 1e-12 * max_abs(&oracle).max(1.0));
        let dense = top_eigenvalues(&(x.matrix() * y.matrix()), 4);
        let flushed: Vec<_> = chain.spectrum.iter().map(|z| if z.norm() < 1e-12 { c64(0.0, 0.0) } else { *z }).collect();
        let dense: Vec<_> = dense.iter().map(|z| if z.norm() < 1e-12 { c64(0.0, 0.0) } else { *z }).collect();
        prop_assert!(spectra_close(&flushed, &dense, 1e-9), "{:?} vs {:?}", chain.spectrum, dense);
    }

    #[test]
    fn properly_timelike_is_symmetric_and_timelike(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (x, y) = mixed_pair(&mut r, 6, 2);
        let a = closed_chain(&x, &y, 2, &tol()).unwrap().properly_timelike;
        let b = closed_chain(&y, &x, 2, &tol()).unwrap().properly_timelike;
        prop_assert_eq!(a, b);
        if a {
            prop_assert_eq!(classify(&x, &y, 2, &tol()).unwrap(), CausalClass::Timelike);
        }
    }

    #[test]
    fn connection_is_unitary_and_reversible(seed in any::<u64>(), size in 0.01f64..0.15) {
        let mut r = rng(seed);
        let (x, y) = nearby_pair(&mut r, 6, 2, size);
        let sys = system_of(2, vec![x, y]);
        let geom = SpinGeometry::new(&sys);
        prop_assume!(geom.spin_connectable(0, 1));
        let d01 = geom.connection(0, 1, None).unwrap();
        let d10 = geom.connection(1, 0, None).unwrap();
        prop_assert_eq!(d01.phase_source, PhaseSource::Default);
        prop_assert!((d01.phase + d10.phase).abs() < 1e-15);
        let (g0, g1) = (geom.gram(0), geom.gram(1));
        prop_assert!(unitarity_residual(&d01.matrix, &g0, &g1).unwrap() < 1e-9);
        let adj = indefinite_adjoint(&d01.matrix, &g0, &g1).unwrap();
        prop_assert!(rel(&adj, &d10.matrix) < 1e-9);
        prop_assert!(max_abs(&(&d10.matrix * &d01.matrix - identity(4))) < 1e-9);
        // D_{x,y} intertwines the directional signs
        let v01 = geom.directional_sign(0, 1).unwrap().matrix;
        let v10 = geom.directional_sign(1, 0).unwrap().matrix;
        prop_assert!(max_abs(&(&d01.matrix * &v10 - &v01 * &d01.matrix)) < 1e-9);
    }

    #[test]
    fn holonomy_of_a_small_triangle_is_unitary(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (x, y) = nearby_pair(&mut r, 6, 2, 0.05);
        let b = x.basis().clone();
        let bump = complex_gaussian(&mut r, 6, 4).scale(0.05);
        let z = point_from(&(&b + bump).qr().q(), x.eigenvalues());
        let sys = system_of(2, vec![x, y, z]);
        let geom = SpinGeometry::new(&sys);
        prop_assume!(geom.spin_connectable(0, 1) && geom.spin_connectable(1, 2) && geom.spin_connectable(0, 2));
        let h = holonomy(&geom, &DirectionalFrames, 0, 1, 2).unwrap();
        let g = geom.gram(0);
        prop_assert!(unitarity_residual(&h.matrix, &g, &g).unwrap() < 1e-8);
        let trivial = holonomy(&geom, &DirectionalFrames, 0, 0, 0).unwrap();
        prop_assert!(identity_deviation(&trivial.matrix) < 1e-12);
    }
}

#[test]
fn wave_functions_reproduce_the_spin_product() {
    let mut r = rng(11);
    let points: Vec<OperatorPoint> = (0..4).map(|_| regular_point(&mut r, 6, 2)).collect();
    let sys = system_of(2, points);
    let u = CVector::from_fn(6, |i, _| c64(i as f64 * 0.3 - 0.5, 0.2 * i as f64));
    let v = CVector::from_fn(6, |i, _| c64(1.0 - 0.1 * i as f64, -0.4));
    let (psi_u, psi_v) = (
        physical_wave_function(&u, &sys).unwrap(),
        physical_wave_function(&v, &sys).unwrap(),
    );
    for (k, p) in sys.points().iter().enumerate() {
        let x = &p.operator;
        let lhs = (psi_u[k].adjoint() * dense_gram(x) * &psi_v[k])[(0, 0)];
        let rhs = -(u.adjoint() * x.matrix() * &v)[(0, 0)];
        assert!((lhs - rhs).norm() < 1e-12);
        // the embedded wave function is the projection onto S_x
        let back = x.basis() * &psi_u[k];
        assert!((x.projector() * &u - back).norm() < 1e-12);
    }
    assert!(physical_wave_function(&CVector::zeros(5), &sys).is_err());
}

#[test]
fn coincident_points_connect_trivially() {
    let x = OperatorPoint::diagonal(&[2.0, -1.0, -0.5, 1.5], &tol()).unwrap();
    let sys = system_of(2, vec![x]);
    let geom = SpinGeometry::new(&sys);
    let d = geom.connection(0, 0, None).unwrap();
    assert_eq!(d.phase_source, PhaseSource::Coincident);
    assert_eq!(d.matrix, identity(4));
    assert!(geom.properly_timelike(0, 0).unwrap());
}

#[test]
fn orthogonal_images_are_not_connectable() {
    let mut r = rng(3);
    let b = frame(&mut r, 8, 8);
    let x = point_from(&b.columns(0, 4).into_owned(), &signed_values(&mut r, 2));
    let y = point_from(&b.columns(4, 4).into_owned(), &signed_values(&mut r, 2));
    let sys = system_of(2, vec![x, y]);
    let geom = SpinGeometry::new(&sys);
    assert!(!geom.spin_connectable(0, 1));
    assert!(geom.connection(0, 1, None).is_err());
}

fn rest_line(times: &[f64]) -> cfs_core::CausalFermionSystem {
    let pts = times.iter().map(|&t| [t, 0.0, 0.0, 0.0]).collect();
    build_system(
        &MinkowskiConfig::new(1.0, 1e-3, 0.5, 2).with_points(pts),
        &tol(),
    )
    .unwrap()
}

#[test]
fn minkowski_frames_carry_the_dirac_algebra() {
    let sys = rest_line(&[0.0, 0.125]);
    let geom = SpinGeometry::new(&sys);
    let frames = MinkowskiFrames::from_system(&sys).unwrap();
    for x in 0..2 {
        let ext = frames.extension(&geom, x).unwrap();
        assert_eq!(ext.signature(), (1, 3));
        let g = geom.gram(x);
        let phi = frames.trivialization(x);
        let dev =
            max_abs(&(phi.adjoint() * cfs_core::builder::dirac::spinor_signature() * phi - &g));
        assert!(dev < 1e-8 * max_abs(&g));
    }
    assert!(frames.direction(0, 1).is_some());
}

#[test]
fn rest_frame_phase_is_solved_exactly() {
    use cfs_core::spin::CliffordProvider;
    let sys = rest_line(&[0.0, 0.125]);
    let geom = SpinGeometry::new(&sys);
    let frames = MinkowskiFrames::from_system(&sys).unwrap();
    let k01 = frames.subspace(&geom, 0, 1).unwrap();
    let k10 = frames.subspace(&geom, 1, 0).unwrap();
    let d = geom.connection(0, 1, Some((&k01, &k10))).unwrap();
    match d.phase_source {
        PhaseSource::Clifford { mismatch } => assert!(mismatch < 1e-8, "mismatch {mismatch}"),
        other => panic!("unexpected phase source {other:?}"),
    }
    let half_pi = std::f64::consts::FRAC_PI_2;
    assert!(d.phase.abs() > half_pi && d.phase.abs() < 0.75 * std::f64::consts::PI);
}
