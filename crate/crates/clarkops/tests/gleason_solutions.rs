use clarkops::clark::{build_vb, sample_extension, PartialIsometryRep};
use clarkops::examples;
use clarkops::gleason::{
    backward_shift_poly, clark_perturbation, compressed_shift, compressed_shift_discrepancy, gram_h2, identity_defect, kernel_witness,
    minimal_solution_b, minimality_compare, recover_b_from_x, solution_from_components, solution_from_extension, solution_to_x,
    u_inverse, x_defect, x_identity_defect, Ordering,
};
use clarkops::kernel::SamplePlan;
use clarkops::linalg::{hermitian_eigen, max_abs, op_norm};
use clarkops::model::coefficient_distance;
use clarkops::poly::{MatPoly, MultiIndex};
use clarkops::span::KernelSpanRep;
use clarkops::C64;
use nalgebra::DMatrix;
use proptest::prelude::*;

struct Pipeline {
    vrep: PartialIsometryRep,
    krep: KernelSpanRep,
    uinv: DMatrix<C64>,
}

fn pipeline(b: &MatPoly, cap: usize) -> Pipeline {
    let vrep = build_vb(b, cap, 1e-10).unwrap();
    let krep = KernelSpanRep::dbr(b, cap, 1e-10).unwrap();
    let uinv = u_inverse(&krep, &vrep.rep).unwrap();
    Pipeline { vrep, krep, uinv }
}

fn scalar(d: usize, terms: &[(Vec<usize>, f64)]) -> MatPoly {
    let t: Vec<(Vec<usize>, C64)> = terms.iter().map(|(a, c)| (a.clone(), C64::new(*c, 0.0))).collect();
    MatPoly::scalar(d, &t)
}

#[test]
fn u_inverse_is_unitary() {
    for b in [examples::theta(), examples::half_sum(), examples::zhat(), examples::half_z()] {
        let p = pipeline(&b, 6);
        let r = p.uinv.ncols();
        assert_eq!(p.uinv.nrows(), r);
        assert!(op_norm(&(p.uinv.adjoint() * &p.uinv - DMatrix::identity(r, r))) < 1e-10);
    }
}

#[test]
fn minimal_solution_for_theta_is_the_explicit_pair() {
    let theta = examples::theta();
    let p = pipeline(&theta, 8);
    let sol = minimal_solution_b(&p.vrep, &p.krep, &p.uinv, 1e-9).unwrap();
    let (b1, b2) = examples::theta_gleason_pair().unwrap();
    assert!(coefficient_distance(&sol.components[0], &b1).unwrap() < 1e-10);
    assert!(coefficient_distance(&sol.components[1], &b2).unwrap() < 1e-10);
    // The explicit pair satisfies the identity up to rounding of 1/sqrt(2).
    let lhs = b1.shift_by(&MultiIndex::unit(2, 0)).add(&b2.shift_by(&MultiIndex::unit(2, 1))).unwrap();
    assert!(lhs.sub(&theta).unwrap().max_abs() <= 4.0 * f64::EPSILON);
    let g = gram_h2(&[b1, b2]).unwrap();
    assert!(max_abs(&(g - DMatrix::identity(4, 4))) < 1e-15);
    assert!(max_abs(&(&sol.gram - DMatrix::identity(4, 4))) < 1e-10);
    assert!(sol.is_extremal(1e-10));
}

#[test]
fn one_variable_solutions_are_backward_shifts() {
    // b = z/2: B = 1/2 and ||1||^2 = K(0, 0) = 1, so B^* B = 1/4.
    let p = pipeline(&examples::half_z(), 8);
    let sol = minimal_solution_b(&p.vrep, &p.krep, &p.uinv, 1e-9).unwrap();
    assert!(coefficient_distance(&sol.components[0], &scalar(1, &[(vec![0], 0.5)])).unwrap() < 1e-10);
    assert!((sol.gram[(0, 0)].re - 0.25).abs() < 1e-10);
    // b = z^2: B = z, an isometric solution.
    let p = pipeline(&examples::z_squared(), 8);
    let sol = minimal_solution_b(&p.vrep, &p.krep, &p.uinv, 1e-9).unwrap();
    assert!(coefficient_distance(&sol.components[0], &scalar(1, &[(vec![1], 1.0)])).unwrap() < 1e-10);
    assert!((sol.gram[(0, 0)].re - 1.0).abs() < 1e-10);
    // X^* on K(z^2) = span{1, z}: X^* 1 = 0 and X^* z = 1 after the b-correction.
    let x = solution_to_x(&sol, &p.krep).unwrap();
    let cs = compressed_shift(&p.krep);
    assert!(max_abs(&(&x.xstar - &cs.xstar)) < 1e-10);
    assert_eq!(p.krep.rank(), 2);
}

#[test]
fn solutions_are_contractive_and_satisfy_their_identities() {
    for b in [examples::theta(), examples::zhat(), examples::half_sum(), examples::half_z(), examples::z(), examples::zero(2)] {
        let p = pipeline(&b, 7);
        let sol = solution_from_extension(&p.vrep, &p.krep, &p.uinv, None).unwrap();
        assert!(sol.fit_residual < 1e-9);
        assert!(identity_defect(&sol, 7).unwrap() < 1e-12);
        assert!(hermitian_eigen(&sol.defect()).0.min() > -1e-10);
        let x = solution_to_x(&sol, &p.krep).unwrap();
        assert!(hermitian_eigen(&x_defect(&x, &p.krep)).0.min() > -1e-10);
        assert!(x_identity_defect(&x, &p.krep).unwrap() < 1e-10);
        if sol.is_extremal(1e-10) {
            assert!(max_abs(&x_defect(&x, &p.krep)) < 1e-10);
        }
    }
}

#[test]
fn b_round_trips_through_x_under_the_support_condition() {
    for b in [examples::theta(), examples::half_sum(), examples::half_z(), examples::z_squared()] {
        let p = pipeline(&b, 7);
        let sol = solution_from_extension(&p.vrep, &p.krep, &p.uinv, None).unwrap();
        let x = solution_to_x(&sol, &p.krep).unwrap();
        let rec = recover_b_from_x(&x, &p.krep, 1e-9, true).unwrap();
        assert!(rec.unique);
        assert!(rec.residual < 1e-10);
        for (a, c) in rec.solution.components.iter().zip(&sol.components) {
            assert!(coefficient_distance(a, c).unwrap() < 1e-10);
        }
    }
}

#[test]
fn zhat_violates_the_support_condition() {
    let p = pipeline(&examples::zhat(), 6);
    let sol = solution_from_extension(&p.vrep, &p.krep, &p.uinv, None).unwrap();
    let x = solution_to_x(&sol, &p.krep).unwrap();
    assert!(!recover_b_from_x(&x, &p.krep, 1e-9, false).unwrap().unique);
    assert!(recover_b_from_x(&x, &p.krep, 1e-9, true).is_err());
}

#[test]
fn inner_solutions_match_the_compressed_shift() {
    for b in [examples::theta(), examples::z(), examples::z_squared()] {
        let p = pipeline(&b, 8);
        let sol = minimal_solution_b(&p.vrep, &p.krep, &p.uinv, 1e-9).unwrap();
        assert!(compressed_shift_discrepancy(&sol, &p.krep).unwrap() < 1e-10);
        let other = recover_b_from_x(&compressed_shift(&p.krep), &p.krep, 1e-9, false).unwrap();
        for (a, c) in other.solution.components.iter().zip(&sol.components) {
            assert!(coefficient_distance(a, c).unwrap() < 1e-8);
        }
    }
}

#[test]
fn backward_shift_uses_weighted_coefficients() {
    // S_1^* z_1^2 z_2 = (2/3) z_1 z_2 in the Drury-Arveson space.
    let p = scalar(2, &[(vec![2, 1], 1.0), (vec![0, 3], 2.0)]);
    let s = backward_shift_poly(&p, 0);
    assert!(coefficient_distance(&s, &scalar(2, &[(vec![1, 1], 2.0 / 3.0)])).unwrap() < 1e-15);
}

#[test]
fn explicit_components_give_the_same_gram_as_the_extension_route() {
    let theta = examples::theta();
    let p = pipeline(&theta, 8);
    let (b1, b2) = examples::theta_gleason_pair().unwrap();
    let explicit = solution_from_components(&p.krep, vec![b1, b2]).unwrap();
    let minimal = minimal_solution_b(&p.vrep, &p.krep, &p.uinv, 1e-9).unwrap();
    assert_eq!(minimality_compare(&minimal, &explicit, 1e-10).verdict, Ordering::Equal);
}

#[test]
fn minimal_solution_sits_below_every_extension() {
    let b = examples::half_sum();
    let p = pipeline(&b, 6);
    let minimal = solution_from_extension(&p.vrep, &p.krep, &p.uinv, None).unwrap();
    assert_eq!(minimality_compare(&minimal, &minimal, 1e-10).verdict, Ordering::Equal);
    for seed in 0..5 {
        let y = sample_extension(&p.vrep, 1.0, seed).unwrap();
        let other = solution_from_extension(&p.vrep, &p.krep, &p.uinv, Some(&y)).unwrap();
        let rep = minimality_compare(&minimal, &other, 1e-10);
        assert_eq!(rep.verdict, Ordering::FirstBelow, "seed {seed}");
        assert!(*rep.eigenvalues.last().unwrap() > 1e-3);
        assert!(identity_defect(&other, 6).unwrap() < 1e-10);
    }
}

#[test]
fn kernel_of_v_is_nonzero_in_several_variables() {
    for b in [examples::zero(2), examples::theta(), examples::half_sum()] {
        let p = pipeline(&b, 8);
        let sol = solution_from_extension(&p.vrep, &p.krep, &p.uinv, None).unwrap();
        let plan = SamplePlan::new(2, 10, 0.6, 4).unwrap();
        let w = kernel_witness(&p.vrep, &p.krep, &p.uinv, &sol, &plan).unwrap();
        assert!(w.ratio < 1e-8, "ratio {}", w.ratio);
        assert_eq!(w.certificate, 0.0);
        assert!(w.pointwise < 1e-10);
        assert!(w.f.max_abs() > 0.0);
    }
}

#[test]
fn kernel_witness_needs_two_variables() {
    let b = examples::half_z();
    let p = pipeline(&b, 6);
    let sol = solution_from_extension(&p.vrep, &p.krep, &p.uinv, None).unwrap();
    let plan = SamplePlan::new(1, 4, 0.6, 4).unwrap();
    assert!(kernel_witness(&p.vrep, &p.krep, &p.uinv, &sol, &plan).is_err());
}

#[test]
fn clark_rows_of_inner_functions_are_coisometric() {
    for b in [examples::theta(), examples::z(), examples::z_squared()] {
        let p = pipeline(&b, 8);
        let sol = minimal_solution_b(&p.vrep, &p.krep, &p.uinv, 1e-9).unwrap();
        let x = solution_to_x(&sol, &p.krep).unwrap();
        let n = b.rows();
        let a = DMatrix::from_fn(n, n, |i, j| if (i + 1) % n == j { C64::new(0.0, 1.0) } else { C64::new(0.0, 0.0) });
        let row = clark_perturbation(&x, &sol, &sol, &p.krep, &a, 1e-10, 1e-10).unwrap();
        assert!(row.coisometry_defect < 1e-10);
        let half = DMatrix::identity(n, n) * C64::new(0.5, 0.0);
        assert!(clark_perturbation(&x, &sol, &sol, &p.krep, &half, 1e-10, 1e-10).is_err());
    }
}

#[test]
fn clark_rows_refuse_non_minimal_solutions() {
    let b = examples::half_sum();
    let p = pipeline(&b, 6);
    let minimal = solution_from_extension(&p.vrep, &p.krep, &p.uinv, None).unwrap();
    let y = sample_extension(&p.vrep, 1.0, 2).unwrap();
    let other = solution_from_extension(&p.vrep, &p.krep, &p.uinv, Some(&y)).unwrap();
    let x = solution_to_x(&other, &p.krep).unwrap();
    let a = DMatrix::identity(1, 1);
    assert!(clark_perturbation(&x, &other, &minimal, &p.krep, &a, 1e-10, 1e-10).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn every_extension_gives_a_contractive_solution(seed in any::<u64>(), norm in 0.0f64..1.0) {
        let b = examples::half_sum();
        let p = pipeline(&b, 5);
        let y = sample_extension(&p.vrep, norm.max(1e-3), seed).unwrap();
        let sol = solution_from_extension(&p.vrep, &p.krep, &p.uinv, Some(&y)).unwrap();
        prop_assert!(identity_defect(&sol, 5).unwrap() < 1e-10);
        prop_assert!(hermitian_eigen(&sol.defect()).0.min() > -1e-9);
        let x = solution_to_x(&sol, &p.krep).unwrap();
        prop_assert!(x_identity_defect(&x, &p.krep).unwrap() < 1e-9);
    }
}
