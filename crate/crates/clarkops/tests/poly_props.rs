use clarkops::model::{backward_shift_coefficient, expected_backward_coefficient, shift_matrices, TruncatedBasis};
use clarkops::poly::{da_gram, indices_up_to, monomial_norm_sq, multinomial, szego_coeff, MatPoly, MultiIndex};
use clarkops::C64;
use nalgebra::DMatrix;
use num_bigint::BigUint;
use proptest::prelude::*;

fn factorial(k: usize) -> BigUint {
    (1..=k).fold(BigUint::from(1u32), |acc, i| acc * BigUint::from(i))
}

#[test]
fn multinomial_matches_factorial_quotient() {
    for alpha in indices_up_to(3, 7) {
        let denom = alpha.0.iter().fold(BigUint::from(1u32), |acc, &a| acc * factorial(a));
        assert_eq!(multinomial(&alpha), factorial(alpha.degree()) / denom);
    }
}

#[test]
fn monomial_norms_sum_to_szego_kernel_diagonal() {
    // sum_{|alpha| = k} |z^alpha|^2 / ||z^alpha||^2 = <z, z>^k.
    let z = [C64::new(0.3, 0.1), C64::new(-0.2, 0.4)];
    let r2: f64 = z.iter().map(|c| c.norm_sqr()).sum();
    for k in 0..6 {
        let s: f64 = indices_up_to(2, k)
            .into_iter()
            .filter(|a| a.degree() == k)
            .map(|a| a.monomial(&z).norm_sqr() * szego_coeff(&a))
            .sum();
        assert!((s - r2.powi(k as i32)).abs() < 1e-15);
    }
}

#[test]
fn backward_shift_coefficients_are_exact_for_small_words() {
    for d in [2, 3] {
        let shifts = shift_matrices(d, 1, 6).unwrap();
        let basis = TruncatedBasis::new(d, 1, 6);
        let lower = TruncatedBasis::new(d, 1, 5);
        for alpha in indices_up_to(d, 6) {
            for j in 0..d {
                let Some(exact) = backward_shift_coefficient(&alpha, j) else {
                    assert_eq!(alpha.0[j], 0);
                    continue;
                };
                assert_eq!(exact, expected_backward_coefficient(&alpha, j));
                // The weighted adjoint of the forward shift carries the same number.
                let adj = shifts[j].adjoint();
                let c = basis.position(&alpha, 0).unwrap();
                let r = lower.position(&alpha.sub_unit(j).unwrap(), 0).unwrap();
                let expected = alpha.0[j] as f64 / alpha.degree() as f64;
                assert!((adj.matrix[(r, c)].re - expected).abs() < 1e-14);
            }
        }
    }
}

#[test]
fn monomial_norm_of_z1_z2_is_one_half() {
    let a = MultiIndex(vec![1, 1]);
    assert_eq!(monomial_norm_sq(&a), num_rational::BigRational::new(1.into(), 2.into()));
}

fn small_poly() -> impl Strategy<Value = MatPoly> {
    prop::collection::vec(((0usize..3, 0usize..3), (-1.0f64..1.0, -1.0f64..1.0)), 1..5).prop_map(|terms| {
        let t: Vec<(Vec<usize>, C64)> = terms.into_iter().map(|((a, b), (x, y))| (vec![a, b], C64::new(x, y))).collect();
        MatPoly::scalar(2, &t)
    })
}

fn point() -> impl Strategy<Value = [C64; 2]> {
    (-0.5f64..0.5, -0.5f64..0.5, -0.5f64..0.5, -0.5f64..0.5).prop_map(|(a, b, c, d)| [C64::new(a, b), C64::new(c, d)])
}

proptest! {
    #[test]
    fn product_evaluates_to_product_of_values(p in small_poly(), q in small_poly(), z in point()) {
        let pq = p.mul(&q).unwrap();
        let lhs = pq.eval(&z).unwrap()[(0, 0)];
        let rhs = p.eval(&z).unwrap()[(0, 0)] * q.eval(&z).unwrap()[(0, 0)];
        prop_assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn da_gram_is_hermitian_and_positive(p in small_poly(), q in small_poly()) {
        let pq = da_gram(&p, &q).unwrap()[(0, 0)];
        let qp = da_gram(&q, &p).unwrap()[(0, 0)];
        prop_assert!((pq - qp.conj()).norm() < 1e-14);
        prop_assert!(da_gram(&p, &p).unwrap()[(0, 0)].re >= 0.0);
    }

    #[test]
    fn shift_multiplies_by_monomial(p in small_poly(), z in point(), j in 0usize..2) {
        let s = p.shift_by(&MultiIndex::unit(2, j));
        let lhs = s.eval(&z).unwrap()[(0, 0)];
        prop_assert!((lhs - z[j] * p.eval(&z).unwrap()[(0, 0)]).norm() < 1e-13);
    }

    #[test]
    fn graded_order_puts_lower_degree_first(a in prop::collection::vec(0usize..4, 3), b in prop::collection::vec(0usize..4, 3)) {
        let (x, y) = (MultiIndex(a), MultiIndex(b));
        if x.degree() < y.degree() {
            prop_assert!(x < y);
        }
    }

    #[test]
    fn basis_vector_round_trip(p in small_poly()) {
        let basis = TruncatedBasis::new(2, 1, 4);
        let v = basis.to_vector(&p).unwrap();
        let back = basis.from_vector(&v);
        prop_assert!(back.sub(&p).unwrap().max_abs() < 1e-15);
    }
}

#[test]
fn matrix_polynomial_identity_is_multiplicative_unit() {
    let p = MatPoly::from_terms(
        2,
        2,
        2,
        vec![(MultiIndex(vec![1, 0]), DMatrix::from_row_slice(2, 2, &[C64::new(1.0, 0.0), C64::new(2.0, 0.0), C64::new(0.0, 1.0), C64::new(0.0, 0.0)]))],
    )
    .unwrap();
    let id = MatPoly::identity(2, 2);
    assert_eq!(id.mul(&p).unwrap().sub(&p).unwrap().max_abs(), 0.0);
}
