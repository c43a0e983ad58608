mod common;

use cfs_core::linalg::{c64, hermitian_eigen, CMatrix, C64};
use cfs_core::operator::{
    classify, classify_spectrum, is_regular, product_spectrum, spin_space, time_direction,
    PRODUCT_NOISE_REL,
};
use cfs_core::{CausalClass, OperatorPoint, SystemPoint, Tolerances};
use common::*;
use proptest::prelude::*;

/// Classification from the dense `f x f` product, independent of the
/// restriction to `image(x)`.
fn full_space_class(x: &OperatorPoint, y: &OperatorPoint, n: usize) -> CausalClass {
    let prod = x.matrix() * y.matrix();
    let mut top = top_eigenvalues(&prod, 2 * n);
    let noise = PRODUCT_NOISE_REL * x.spectral_norm() * y.spectral_norm();
    for z in &mut top {
        if z.norm() <= noise {
            *z = C64::default();
        }
    }
    classify_spectrum(&top, &Tolerances::default())
}

fn conjugate(x: &OperatorPoint, u: &CMatrix) -> OperatorPoint {
    let m = u * x.matrix() * u.adjoint();
    OperatorPoint::new((&m + m.adjoint()).scale(0.5), &Tolerances::default()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn time_direction_is_antisymmetric(seed in any::<u64>(), f in 4usize..=12, n in 1usize..=2) {
        let mut r = rng(seed);
        let (x, y) = mixed_pair(&mut r, f, n);
        let (c, d) = (time_direction(&x, &y).unwrap(), time_direction(&y, &x).unwrap());
        prop_assert!((c + d).abs() <= 1e-12 * c.abs().max(1.0));
        prop_assert_eq!(time_direction(&x, &x).unwrap(), 0.0);
    }

    #[test]
    fn spectrum_of_xy_equals_spectrum_of_yx(seed in any::<u64>(), f in 4usize..=12, n in 1usize..=2) {
        let mut r = rng(seed);
        let (x, y) = mixed_pair(&mut r, f, n);
        let a = product_spectrum(&x, &y, n).unwrap();
        let b = product_spectrum(&y, &x, n).unwrap();
        prop_assert!(spectra_close(&a, &b, 1e-9));
    }

    #[test]
    fn restricted_spectrum_matches_full_product(seed in any::<u64>(), f in 4usize..=16, n in 1usize..=2) {
        let mut r = rng(seed);
        let (x, y) = mixed_pair(&mut r, f, n);
        let restricted = product_spectrum(&x, &y, n).unwrap();
        let full = top_eigenvalues(&(x.matrix() * y.matrix()), 2 * n);
        let scale = x.spectral_norm() * y.spectral_norm();
        let flushed: Vec<C64> = full.iter().map(|z| if z.norm() <= PRODUCT_NOISE_REL * scale { C64::default() } else { *z }).collect();
        prop_assert!(spectra_close(&restricted, &flushed, 1e-9));
        prop_assert_eq!(classify(&x, &y, n, &Tolerances::default()).unwrap(), full_space_class(&x, &y, n));
    }

    #[test]
    fn classification_is_unitarily_invariant(seed in any::<u64>(), f in 4usize..=10, n in 1usize..=2) {
        let mut r = rng(seed);
        let (x, y) = mixed_pair(&mut r, f, n);
        let u = unitary(&mut r, f);
        let (xu, yu) = (conjugate(&x, &u), conjugate(&y, &u));
        let tol = Tolerances::default();
        prop_assert_eq!(classify(&x, &y, n, &tol).unwrap(), classify(&xu, &yu, n, &tol).unwrap());
        let (c, cu) = (time_direction(&x, &y).unwrap(), time_direction(&xu, &yu).unwrap());
        prop_assert!((c - cu).abs() <= 1e-9 * (x.spectral_norm() * y.spectral_norm()).powi(2).max(1.0));
    }

    #[test]
    fn classification_is_scale_invariant(seed in any::<u64>(), s in 0.01f64..100.0) {
        let mut r = rng(seed);
        let (x, y) = mixed_pair(&mut r, 8, 2);
        let tol = Tolerances::default();
        let (xs, ys) = (x.scaled(s, &tol).unwrap(), y.scaled(s, &tol).unwrap());
        prop_assert_eq!(classify(&x, &y, 2, &tol).unwrap(), classify(&xs, &ys, 2, &tol).unwrap());
    }

    #[test]
    fn spin_gram_has_the_point_signature(seed in any::<u64>(), f in 4usize..=12) {
        let mut r = rng(seed);
        let x = regular_point(&mut r, f, 2);
        let s = spin_space(&x);
        // gram_ab = -<b_a | x b_b>
        let direct = -(s.basis.adjoint() * x.matrix() * &s.basis);
        prop_assert!(max_abs(&(&direct - &s.gram)) <= 1e-12 * x.spectral_norm());
        let eig = hermitian_eigen(&s.gram);
        let pos = eig.values.iter().filter(|v| **v > 0.0).count();
        let neg = eig.values.iter().filter(|v| **v < 0.0).count();
        prop_assert_eq!((pos, neg), (x.neg_eigs(), x.pos_eigs()));
    }
}

#[test]
fn spectrum_of_random_pair_against_dense_product() {
    let mut r = rng(7);
    let (x, y) = (regular_point(&mut r, 8, 2), regular_point(&mut r, 8, 2));
    let restricted = product_spectrum(&x, &y, 2).unwrap();
    let full = top_eigenvalues(&(x.matrix() * y.matrix()), 4);
    assert!(spectra_close(&restricted, &full, 1e-10));
}

#[test]
fn diagonal_examples() {
    let tol = Tolerances::default();
    let x = OperatorPoint::diagonal(&[2.0, -1.0], &tol).unwrap();
    let s = product_spectrum(&x, &x, 1).unwrap();
    assert_eq!(s, vec![c64(4.0, 0.0), c64(1.0, 0.0)]);
    assert_eq!(classify(&x, &x, 1, &tol).unwrap(), CausalClass::Timelike);
    let zero = OperatorPoint::diagonal(&[0.0, 0.0], &tol).unwrap();
    assert_eq!(
        product_spectrum(&x, &zero, 1).unwrap(),
        vec![C64::default(); 2]
    );
    assert_eq!(
        classify(&x, &zero, 1, &tol).unwrap(),
        CausalClass::Spacelike
    );
}

#[test]
fn orthogonal_random_images_are_spacelike() {
    let mut r = rng(3);
    let b = frame(&mut r, 10, 8);
    let x = point_from(&b.columns(0, 4).into_owned(), &[1.0, 2.0, -1.0, -3.0]);
    let y = point_from(&b.columns(4, 4).into_owned(), &[1.5, 0.7, -1.0, -0.2]);
    assert_eq!(
        classify(&x, &y, 2, &Tolerances::default()).unwrap(),
        CausalClass::Spacelike
    );
}

#[test]
fn regularity_examples() {
    let tol = Tolerances::default();
    assert!(is_regular(
        &OperatorPoint::diagonal(&[2.0, -1.0], &tol).unwrap(),
        1
    ));
    assert!(!is_regular(
        &OperatorPoint::diagonal(&[2.0, 0.0], &tol).unwrap(),
        1
    ));
    assert!(!is_regular(
        &OperatorPoint::diagonal(&[1.0, 2.0, -1.0, 0.0], &tol).unwrap(),
        2
    ));
}

#[test]
fn restriction_keeps_exactly_the_regular_points() {
    let mut r = rng(11);
    let mut pts = Vec::new();
    let mut expected = Vec::new();
    for i in 0..12 {
        let b = frame(&mut r, 8, 4);
        let mut v = signed_values(&mut r, 2);
        if i % 3 == 0 {
            v[1] = 0.0;
        }
        let x = point_from(&b, &v);
        if x.is_regular(2) {
            expected.push(format!("p{i}"));
        }
        pts.push(SystemPoint::new(format!("p{i}"), 1.0, x));
    }
    let sys = cfs_core::CausalFermionSystem::new(2, pts, Tolerances::default()).unwrap();
    let reg = sys.restrict_to_regular().unwrap();
    let ids: Vec<String> = reg.points().iter().map(|p| p.id.clone()).collect();
    assert_eq!(ids, expected);
    assert!(reg.points().iter().all(|p| p.operator.is_regular(2)));
}
