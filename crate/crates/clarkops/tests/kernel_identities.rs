use clarkops::examples;
use clarkops::kernel::{
    dbr_kernel, factorization_residual, gram, herglotz_fn, herglotz_kernel, schur_class_check, szego_kernel, vdomain_residual, BallPoint,
    KernelKind, SamplePlan,
};
use clarkops::poly::MatPoly;
use clarkops::{Error, C64};
use nalgebra::DVector;
use proptest::prelude::*;

fn pt1(re: f64, im: f64) -> BallPoint {
    BallPoint::new(vec![C64::new(re, im)]).unwrap()
}

#[test]
fn herglotz_kernel_of_z_has_closed_form() {
    // H = (1 + z) / (1 - z) gives K(z, w) = 1 / ((1 - z)(1 - conj(w))).
    let b = examples::z();
    let one = C64::new(1.0, 0.0);
    for (z, w) in [((0.3, 0.2), (-0.1, 0.5)), ((0.0, 0.0), (0.6, -0.2)), ((-0.7, 0.1), (-0.7, 0.1))] {
        let (zp, wp) = (pt1(z.0, z.1), pt1(w.0, w.1));
        let k = herglotz_kernel(&b, &zp, &wp, 1e-12).unwrap()[(0, 0)];
        let zc = C64::new(z.0, z.1);
        let wc = C64::new(w.0, w.1);
        let expected = one / ((one - zc) * (one - wc.conj()));
        assert!((k - expected).norm() < 1e-13);
    }
}

#[test]
fn dbr_kernel_of_z_is_one() {
    let b = examples::z();
    let k = dbr_kernel(&b, &pt1(0.4, -0.3), &pt1(-0.2, 0.6)).unwrap();
    assert!((k[(0, 0)] - C64::new(1.0, 0.0)).norm() < 1e-15);
}

#[test]
fn zero_multiplier_gives_szego_kernel() {
    let b = examples::zero(2);
    let z = BallPoint::new(vec![C64::new(0.2, 0.1), C64::new(-0.3, 0.4)]).unwrap();
    let w = BallPoint::new(vec![C64::new(0.5, 0.0), C64::new(0.1, -0.2)]).unwrap();
    let s = szego_kernel(&z, &w).unwrap();
    assert!((dbr_kernel(&b, &z, &w).unwrap()[(0, 0)] - s).norm() < 1e-15);
    assert!((herglotz_kernel(&b, &z, &w, 1e-12).unwrap()[(0, 0)] - s).norm() < 1e-15);
}

#[test]
fn two_z_is_not_purely_contractive() {
    let b = examples::monomial_1d(C64::new(2.0, 0.0), 1);
    match herglotz_fn(&b, &pt1(0.6, 0.0)) {
        Err(Error::NotPurelyContractive { norm }) => assert!((norm - 1.2).abs() < 1e-12),
        other => panic!("expected a contractivity error, got {other:?}"),
    }
    let plan = SamplePlan::new(1, 20, 0.6, 3).unwrap();
    let rep = schur_class_check(&b, &plan, 1e-10).unwrap();
    assert!(!rep.psd || !rep.purely_contractive);
}

#[test]
fn schur_examples_pass_sampled_positivity() {
    for b in [examples::theta(), examples::zhat(), examples::half_sum(), examples::half_z(), examples::z()] {
        let plan = SamplePlan::new(b.nvars(), 30, 0.6, 11).unwrap();
        let rep = schur_class_check(&b, &plan, 1e-10).unwrap();
        assert!(rep.psd && rep.purely_contractive, "min eigenvalue {}", rep.min_eigenvalue);
        assert_eq!(rep.certificate, "sampled");
    }
}

#[test]
fn szego_gram_is_positive() {
    let plan = SamplePlan::new(2, 15, 0.8, 5).unwrap();
    let e = vec![DVector::from_element(1, C64::new(1.0, 0.0))];
    let g = gram(KernelKind::Szego, &examples::zero(2), &plan.points, &e, 1e-10).unwrap();
    assert!(g.min_normalized_eigenvalue() > -1e-12);
}

fn examples_list() -> Vec<MatPoly> {
    vec![examples::zero(2), examples::z(), examples::half_z(), examples::theta(), examples::zhat(), examples::half_sum()]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn herglotz_identities_hold_at_random_pairs(seed in any::<u64>(), which in 0usize..6) {
        let b = &examples_list()[which];
        let plan = SamplePlan::new(b.nvars(), 2, 0.6, seed).unwrap();
        let (z, w) = (&plan.points[0], &plan.points[1]);
        prop_assert!(factorization_residual(b, z, w).unwrap() < 1e-10);
        prop_assert!(vdomain_residual(b, z, w, 1e-10).unwrap() < 1e-10);
    }

    #[test]
    fn herglotz_kernel_is_hermitian_symmetric(seed in any::<u64>(), which in 0usize..6) {
        let b = &examples_list()[which];
        let plan = SamplePlan::new(b.nvars(), 2, 0.6, seed).unwrap();
        let (z, w) = (&plan.points[0], &plan.points[1]);
        let kzw = herglotz_kernel(b, z, w, 1e-10).unwrap();
        let kwz = herglotz_kernel(b, w, z, 1e-10).unwrap();
        prop_assert!(clarkops::linalg::max_abs(&(kzw - kwz.adjoint())) < 1e-12);
    }
}
