use clarkops::clark::section_polynomial;
use clarkops::examples;
use clarkops::kernel::{dbr_kernel, herglotz_kernel, BallPoint, SamplePlan};
use clarkops::linalg::max_abs;
use clarkops::poly::{da_gram, MultiIndex};
use clarkops::span::{degree_for_radius, KernelSpanRep};
use clarkops::C64;
use nalgebra::DVector;
use proptest::prelude::*;

#[test]
fn orthonormal_coordinates_reproduce_the_gram_matrix() {
    for b in [examples::theta(), examples::half_sum(), examples::half_z()] {
        for rep in [KernelSpanRep::dbr(&b, 5, 1e-10).unwrap(), KernelSpanRep::herglotz(&b, 5, 1e-10).unwrap()] {
            let g = rep.phi.adjoint() * &rep.phi;
            let scale = max_abs(&rep.gram);
            assert!(max_abs(&(g - &rep.gram)) / scale < 1e-9, "{:?}", rep.kind);
            assert!(rep.min_normalized_eigenvalue > -1e-10);
        }
    }
}

#[test]
fn sections_of_inner_kernel_have_h2_inner_products() {
    // For inner b, K(b) sits isometrically in H^2, so the Gram entries are the
    // Drury-Arveson inner products of the section polynomials.
    let b = examples::theta();
    let rep = KernelSpanRep::dbr(&b, 3, 1e-10).unwrap();
    for beta in rep.indices.clone() {
        for gamma in rep.indices.clone() {
            for (i, k) in [(0, 0), (0, 2), (1, 3)] {
                let p = section_polynomial(&rep, &beta, i);
                let q = section_polynomial(&rep, &gamma, k);
                let h2 = da_gram(&q, &p).unwrap()[(0, 0)];
                let a = rep.generator(&beta, i).unwrap();
                let c = rep.generator(&gamma, k).unwrap();
                assert!((rep.gram[(a, c)] - h2).norm() < 1e-12);
            }
        }
    }
}

#[test]
fn taylor_coefficients_follow_the_reproducing_property() {
    let b = examples::half_sum();
    let rep = KernelSpanRep::dbr(&b, 6, 1e-10).unwrap();
    for gamma in rep.indices.iter().filter(|g| g.degree() <= 4) {
        let coeffs = rep.taylor_coeffs(&rep.section_coords(gamma, 0));
        let exact = section_polynomial(&rep, gamma, 0);
        assert!(coeffs.sub(&exact.truncate(6)).unwrap().max_abs() < 1e-10);
    }
}

#[test]
fn degree_for_radius_bounds_the_geometric_tail() {
    for (r, tol) in [(0.25, 1e-10), (0.5, 1e-8), (0.1, 1e-12)] {
        let n = degree_for_radius(r, tol);
        assert!(r.powi(n as i32 + 1) / (1.0 - r) <= tol);
        assert!(r.powi(n as i32) / (1.0 - r) > tol);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn section_sums_converge_to_the_kernel(seed in any::<u64>()) {
        let plan = SamplePlan::new(2, 2, 0.3, seed).unwrap();
        let (z, w) = (&plan.points[0], &plan.points[1]);
        let b = examples::half_sum();
        for rep in [KernelSpanRep::dbr(&b, 14, 1e-10).unwrap(), KernelSpanRep::herglotz(&b, 14, 1e-10).unwrap()] {
            let mut acc = nalgebra::DMatrix::<C64>::zeros(1, 1);
            for gamma in &rep.indices {
                acc += rep.section_value(gamma, z).unwrap() * gamma.monomial(w.coords()).conj();
            }
            let exact = match rep.kind {
                clarkops::span::SpanKernel::DeBrangesRovnyak => dbr_kernel(&b, z, w).unwrap(),
                clarkops::span::SpanKernel::Herglotz => herglotz_kernel(&b, z, w, 1e-10).unwrap(),
            };
            prop_assert!(max_abs(&(acc - exact)) < 1e-7);
        }
    }

    #[test]
    fn kernel_sections_have_the_kernel_norm(seed in any::<u64>()) {
        let plan = SamplePlan::new(2, 1, 0.25, seed).unwrap();
        let z = &plan.points[0];
        let b = examples::theta();
        let rep = KernelSpanRep::dbr(&b, 12, 1e-10).unwrap();
        let h = DVector::from_fn(4, |i, _| C64::new(1.0 / (1.0 + i as f64), 0.2));
        let y = rep.kernel_section_coords(z, &h);
        let kzz = (h.adjoint() * dbr_kernel(&b, z, z).unwrap() * &h)[(0, 0)].re;
        prop_assert!((y.norm_squared() - kzz).abs() <= 2.0 * rep.tail_bound(z, &h).unwrap() * kzz.sqrt() + 1e-10);
    }
}

#[test]
fn origin_coordinates_reproduce_point_evaluation_at_zero() {
    let b = examples::half_z();
    let rep = KernelSpanRep::dbr(&b, 6, 1e-10).unwrap();
    let k0 = rep.origin_coords();
    // <K_0 e, K_0 e> = 1 - |b(0)|^2 = 1.
    assert!(((k0.adjoint() * &k0)[(0, 0)].re - 1.0).abs() < 1e-12);
    let y = rep.section_coords(&MultiIndex(vec![2]), 0);
    let v = rep.eval(&y, &BallPoint::origin(1)).unwrap();
    // T_2 evaluated at 0 is its zeroth Taylor coefficient.
    assert!((v[0] - rep.taylor_coeffs(&y).coeff(&MultiIndex(vec![0]))[(0, 0)]).norm() < 1e-12);
}
