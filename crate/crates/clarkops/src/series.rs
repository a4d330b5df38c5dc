//! Truncated power series with matrix coefficients, stored as [`MatPoly`].

use nalgebra::DMatrix;

use crate::linalg::inverse;
use crate::poly::{indices_up_to, MatPoly};
use crate::{Error, Result, C64};

/// Inverse of a square series with invertible constant term, up to degree `cap`.
///
/// Solves `sum_{beta <= gamma} A_beta R_{gamma - beta} = [gamma = 0] I` degree by degree.
pub fn series_inverse(a: &MatPoly, cap: usize) -> Result<MatPoly> {
    let d = a.nvars();
    let n = a.rows();
    if a.cols() != n {
        return Err(Error::DimensionMismatch("series inverse needs a square series".into()));
    }
    let a0 = a.coeff(&crate::poly::MultiIndex::zero(d));
    let r0 = inverse(&a0)?;
    let mut out = MatPoly::zero(d, n, n);
    let idx = indices_up_to(d, cap);
    let mut coeffs: std::collections::BTreeMap<crate::poly::MultiIndex, DMatrix<C64>> = Default::default();
    for gamma in &idx {
        let r = if gamma.is_zero() {
            r0.clone()
        } else {
            let mut acc = DMatrix::<C64>::zeros(n, n);
            for (beta, ab) in a.terms() {
                if beta.is_zero() {
                    continue;
                }
                if let Some(rest) = gamma.checked_sub(beta) {
                    if let Some(rr) = coeffs.get(&rest) {
                        acc += ab * rr;
                    }
                }
            }
            -(&r0 * acc)
        };
        coeffs.insert(gamma.clone(), r.clone());
        out.add_term(gamma.clone(), r);
    }
    Ok(out)
}

/// Taylor coefficients of `(I - b)^{-1}` up to degree `cap`.
pub fn inv_one_minus(b: &MatPoly, cap: usize) -> Result<MatPoly> {
    let id = MatPoly::identity(b.nvars(), b.rows());
    series_inverse(&id.sub(b)?, cap)
}

/// Taylor coefficients of the Herglotz function `(I - b)^{-1} (I + b)` up to degree `cap`.
pub fn herglotz_series(b: &MatPoly, cap: usize) -> Result<MatPoly> {
    let id = MatPoly::identity(b.nvars(), b.rows());
    inv_one_minus(b, cap)?.mul_truncated(&id.add(b)?, cap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::MultiIndex;

    #[test]
    fn geometric_series_of_z() {
        let b = MatPoly::scalar(1, &[(vec![1], C64::new(1.0, 0.0))]);
        let h = herglotz_series(&b, 6).unwrap();
        assert_eq!(h.coeff(&MultiIndex(vec![0]))[(0, 0)], C64::new(1.0, 0.0));
        for k in 1..=6 {
            assert_eq!(h.coeff(&MultiIndex(vec![k]))[(0, 0)], C64::new(2.0, 0.0));
        }
    }
}
