use std::f64::consts::PI;

use clarkops::classical::{
    ac_measure, alpha_grid, cauchy_gram, clark_operator, density_mass, expected_mass, herglotz_points, herglotz_verify, orthonormal_family,
    poly_at_origin, poly_fn, spectral_realization, DiscreteMeasure, FiniteBlaschke, ModelBasis, Orientation, ORIENTATION,
};
use clarkops::examples;
use clarkops::linalg::max_abs;
use clarkops::C64;
use nalgebra::DMatrix;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn monomial(m: usize) -> FiniteBlaschke {
    FiniteBlaschke::new(vec![c(0.0, 0.0); m], c(1.0, 0.0)).unwrap()
}

#[test]
fn measures_of_monomials_sit_on_roots_of_alpha() {
    // b = z^m: atoms are the m-th roots of alpha, each with weight 1/m.
    for m in 1..=5 {
        let b = monomial(m);
        for alpha in alpha_grid(7) {
            let mu = ac_measure(&b, alpha).unwrap();
            assert_eq!(mu.atoms.len(), m);
            for (zeta, w) in mu.atoms.iter().zip(&mu.weights) {
                assert!((zeta.powu(m as u32) - alpha).norm() < 1e-13);
                assert!((w - 1.0 / m as f64).abs() < 1e-13);
            }
            assert!((mu.total_mass() - 1.0).abs() < 1e-13);
        }
    }
}

#[test]
fn wrong_weights_break_the_herglotz_representation() {
    let b = monomial(2);
    let alpha = c(1.0, 0.0);
    let mu = ac_measure(&b, alpha).unwrap();
    let points = herglotz_points(50, 0.9);
    assert!(herglotz_verify(|z| b.eval(z), alpha, &mu, &points) < 1e-12);
    let skewed = DiscreteMeasure { atoms: mu.atoms.clone(), weights: vec![1.0 / 3.0, 2.0 / 3.0] };
    assert!(herglotz_verify(|z| b.eval(z), alpha, &skewed, &points) > 0.05);
}

#[test]
fn clark_operator_of_z_is_conj_alpha() {
    let b = monomial(1);
    for alpha in alpha_grid(5) {
        let x = clark_operator(&b, alpha).unwrap();
        assert!((x.matrix[(0, 0)] - alpha.conj()).norm() < 1e-14);
    }
}

#[test]
fn clark_operator_of_z_squared_is_a_weighted_swap() {
    // Basis {1, z}: X 1 = conj(alpha) z and X z = 1.
    let b = monomial(2);
    let alpha = C64::from_polar(1.0, 0.7);
    let x = clark_operator(&b, alpha).unwrap();
    let expected = DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), alpha.conj(), c(0.0, 0.0)]);
    assert!(max_abs(&(&x.matrix - expected)) < 1e-14);
    // Its eigenvalues square to conj(alpha), the conjugates of the atoms.
    let s = spectral_realization(&x, &ac_measure(&b, alpha).unwrap(), 1e-10).unwrap();
    for lambda in &s.eigenvalues {
        assert!((lambda * lambda - alpha.conj()).norm() < 1e-13);
    }
    assert_eq!(s.orientation, Orientation::Conjugate);
}

#[test]
fn blaschke_with_an_interior_zero_gives_a_unitary_perturbation() {
    let b = FiniteBlaschke::new(vec![c(0.0, 0.0), c(0.5, 0.0)], c(1.0, 0.0)).unwrap();
    assert!(b.boundary_defect(256) < 1e-14);
    for alpha in alpha_grid(16) {
        let mu = ac_measure(&b, alpha).unwrap();
        assert!((mu.total_mass() - 1.0).abs() < 1e-12);
        let x = clark_operator(&b, alpha).unwrap();
        assert!(x.basis_defect < 1e-13);
        assert!(x.unitarity_defect() < 1e-13);
        assert_eq!(x.cyclic_rank(1e-10), 2);
        let s = spectral_realization(&x, &mu, 1e-10).unwrap();
        assert!(s.orientation.includes(ORIENTATION));
        let g = cauchy_gram(&b, alpha, &mu, &orthonormal_family(&mu));
        assert!(g.defect < 1e-12);
        assert!(max_abs(&(g.measure_gram - DMatrix::identity(2, 2))) < 1e-12);
    }
}

#[test]
fn total_mass_matches_the_origin_value() {
    // b(0) != 0: the measure is still atomic with mass Re H(0).
    let b = FiniteBlaschke::new(vec![c(0.3, -0.4), c(-0.6, 0.2)], C64::from_polar(1.0, 1.1)).unwrap();
    for alpha in alpha_grid(9) {
        let mu = ac_measure(&b, alpha).unwrap();
        assert!((mu.total_mass() - expected_mass(b.eval(c(0.0, 0.0)), alpha)).abs() < 1e-12);
    }
    assert!(clark_operator(&b, c(1.0, 0.0)).is_err());
}

#[test]
fn non_inner_measures_have_the_boundary_density() {
    // b = z/2 has an absolutely continuous measure; its mass is Re H(0) = 1.
    let b = examples::half_z();
    let f = poly_fn(&b).unwrap();
    for alpha in alpha_grid(4) {
        let m = density_mass(&f, alpha, 4096);
        assert!((m - expected_mass(poly_at_origin(&b), alpha)).abs() < 1e-12);
        assert!((m - 1.0).abs() < 1e-12);
    }
}

#[test]
fn only_unimodular_monomials_convert_to_blaschke_products() {
    assert_eq!(FiniteBlaschke::from_poly(&examples::z_squared()).unwrap().degree(), 2);
    let err = FiniteBlaschke::from_poly(&examples::half_z()).unwrap_err().to_string();
    assert!(err.contains("inner required"));
    assert!(FiniteBlaschke::from_poly(&examples::theta()).is_err());
    assert!(FiniteBlaschke::new(vec![c(1.0, 0.0)], c(1.0, 0.0)).is_err());
    assert!(FiniteBlaschke::new(vec![c(0.0, 0.0)], c(0.5, 0.0)).is_err());
}

#[test]
fn takenaka_malmquist_basis_is_orthonormal() {
    let b = FiniteBlaschke::new(vec![c(0.0, 0.0), c(0.9, 0.1), c(-0.5, 0.5), c(0.2, -0.95)], c(0.0, 1.0)).unwrap();
    let basis = ModelBasis::new(&b);
    assert_eq!(basis.dim(), 4);
    assert!(basis.orthonormality_defect() < 1e-12);
}

#[test]
fn orientation_is_conjugate_across_the_circle() {
    let b = monomial(3);
    let mut seen = Vec::new();
    for alpha in alpha_grid(16) {
        let x = clark_operator(&b, alpha).unwrap();
        let s = spectral_realization(&x, &ac_measure(&b, alpha).unwrap(), 1e-10).unwrap();
        assert!(s.conjugate_error < 1e-12);
        seen.push(s.orientation);
    }
    // alpha = 1 and alpha = -1 give self-conjugate atom sets.
    assert_eq!(seen[0], Orientation::Both);
    assert!(seen.iter().all(|o| o.includes(Orientation::Conjugate)));
    assert!(seen.iter().any(|o| *o == Orientation::Conjugate));
}

fn blaschke() -> impl Strategy<Value = FiniteBlaschke> {
    (prop::collection::vec((0.0f64..0.9, 0.0f64..2.0 * PI), 0..4), 0.0f64..2.0 * PI).prop_map(|(zs, t)| {
        let mut zeros = vec![c(0.0, 0.0)];
        zeros.extend(zs.into_iter().map(|(r, a)| C64::from_polar(r, a)));
        FiniteBlaschke::new(zeros, C64::from_polar(1.0, t)).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn clark_theory_holds_for_random_blaschke_products(b in blaschke(), t in 0.0f64..2.0 * PI) {
        let alpha = C64::from_polar(1.0, t);
        let mu = ac_measure(&b, alpha).unwrap();
        prop_assert!((mu.total_mass() - 1.0).abs() < 1e-11);
        prop_assert!(herglotz_verify(|z| b.eval(z), alpha, &mu, &herglotz_points(50, 0.95)) < 1e-9);
        let x = clark_operator(&b, alpha).unwrap();
        prop_assert!(x.unitarity_defect() < 1e-12);
        prop_assert_eq!(x.cyclic_rank(1e-10), b.degree());
        let s = spectral_realization(&x, &mu, 1e-9).unwrap();
        prop_assert!(s.orientation.includes(ORIENTATION));
        let g = cauchy_gram(&b, alpha, &mu, &orthonormal_family(&mu));
        prop_assert!(g.defect < 1e-10);
    }
}
