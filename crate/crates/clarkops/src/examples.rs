//! Standard multipliers used by the tests, the acceptance suite and the CLI.

use nalgebra::DMatrix;

use crate::model::embed_inner_sequence;
use crate::poly::{MatPoly, MultiIndex};
use crate::{re, Result, C64};

fn one() -> C64 {
    re(1.0)
}

/// `b = 0` as a scalar multiplier in `d` variables.
pub fn zero(d: usize) -> MatPoly {
    MatPoly::zero(d, 1, 1)
}

/// `b(z) = c z^k` in one variable.
pub fn monomial_1d(c: C64, k: usize) -> MatPoly {
    MatPoly::scalar(1, &[(vec![k], c)])
}

/// `b(z) = z`.
pub fn z() -> MatPoly {
    monomial_1d(one(), 1)
}

/// `b(z) = z^2`.
pub fn z_squared() -> MatPoly {
    monomial_1d(one(), 2)
}

/// `b(z) = z / 2`.
pub fn half_z() -> MatPoly {
    monomial_1d(re(0.5), 1)
}

/// `b(z) = (z_1 + z_2) / 2`.
pub fn half_sum() -> MatPoly {
    MatPoly::scalar(2, &[(vec![1, 0], re(0.5)), (vec![0, 1], re(0.5))])
}

/// Row `(z_1^3, z_1^2 z_2, sqrt(2) z_1 z_2, z_2^2)`.
pub fn theta_row_with(mixed: f64) -> MatPoly {
    let entries = [
        MatPoly::scalar(2, &[(vec![3, 0], one())]),
        MatPoly::scalar(2, &[(vec![2, 1], one())]),
        MatPoly::scalar(2, &[(vec![1, 1], re(mixed))]),
        MatPoly::scalar(2, &[(vec![0, 2], one())]),
    ];
    MatPoly::from_row(2, &entries).expect("scalar entries")
}

pub fn theta_row() -> MatPoly {
    theta_row_with(2f64.sqrt())
}

/// The row above embedded as the first row of a `4 x 4` multiplier.
pub fn theta() -> MatPoly {
    embed_inner_sequence(&theta_row()).expect("row")
}

/// Row `(z_1, 0, z_2)`, whose middle entry makes it non-minimal.
pub fn zhat_row() -> MatPoly {
    let entries = [
        MatPoly::scalar(2, &[(vec![1, 0], one())]),
        MatPoly::zero(2, 1, 1),
        MatPoly::scalar(2, &[(vec![0, 1], one())]),
    ];
    MatPoly::from_row(2, &entries).expect("scalar entries")
}

pub fn zhat() -> MatPoly {
    embed_inner_sequence(&zhat_row()).expect("row")
}

fn unit_matrix(n: usize, i: usize, k: usize, c: C64) -> DMatrix<C64> {
    let mut m = DMatrix::zeros(n, n);
    m[(i, k)] = c;
    m
}

/// Explicit Gleason solution `(B_1, B_2)` for [`theta`] with `z_1 B_1 + z_2 B_2 = Theta`.
/// `z1_sq_scale` multiplies the `z_1^2` entry of `B_1`; `1.0` gives the true solution.
pub fn theta_gleason_pair_with(z1_sq_scale: f64) -> Result<(MatPoly, MatPoly)> {
    let r2 = 1.0 / 2f64.sqrt();
    let b1 = MatPoly::from_terms(
        2,
        4,
        4,
        vec![
            (MultiIndex(vec![2, 0]), unit_matrix(4, 0, 0, re(z1_sq_scale))),
            (MultiIndex(vec![0, 1]), unit_matrix(4, 0, 2, re(r2))),
        ],
    )?;
    let b2 = MatPoly::from_terms(
        2,
        4,
        4,
        vec![
            (MultiIndex(vec![2, 0]), unit_matrix(4, 0, 1, re(1.0))),
            (MultiIndex(vec![1, 0]), unit_matrix(4, 0, 2, re(r2))),
            (MultiIndex(vec![0, 1]), unit_matrix(4, 0, 3, re(1.0))),
        ],
    )?;
    Ok((b1, b2))
}

pub fn theta_gleason_pair() -> Result<(MatPoly, MatPoly)> {
    theta_gleason_pair_with(1.0)
}
