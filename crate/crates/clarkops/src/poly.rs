//! Multi-indices, matrix-valued polynomials and the Drury-Arveson monomial metric.
//!
//! Multi-indices are ordered graded-lexicographically: total degree first, then
//! larger leading exponents first, so that in two variables the degree-2 block
//! reads `z1^2, z1 z2, z2^2`.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use crate::{Error, Result, C64};

/// Exponent vector `alpha = (alpha_1, ..., alpha_d)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiIndex(pub Vec<usize>);

impl MultiIndex {
    pub fn new(exps: Vec<usize>) -> Self {
        MultiIndex(exps)
    }

    pub fn zero(d: usize) -> Self {
        MultiIndex(vec![0; d])
    }

    pub fn unit(d: usize, j: usize) -> Self {
        let mut e = vec![0; d];
        e[j] = 1;
        MultiIndex(e)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn add_unit(&self, j: usize) -> MultiIndex {
        let mut e = self.0.clone();
        e[j] += 1;
        MultiIndex(e)
    }

    /// `self - other` when it stays non-negative.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        let mut out = Vec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(&other.0) {
            out.push(a.checked_sub(*b)?);
        }
        Some(MultiIndex(out))
    }

    pub fn sub_unit(&self, j: usize) -> Option<MultiIndex> {
        if self.0[j] == 0 {
            return None;
        }
        let mut e = self.0.clone();
        e[j] -= 1;
        Some(MultiIndex(e))
    }

    /// Componentwise `self <= other`.
    pub fn le(&self, other: &MultiIndex) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `z^alpha` at a point.
    pub fn monomial(&self, z: &[C64]) -> C64 {
        let mut acc = C64::new(1.0, 0.0);
        for (zj, &a) in z.iter().zip(&self.0) {
            for _ in 0..a {
                acc *= zj;
            }
        }
        acc
    }

    /// Letter-count of a word over the alphabet `{0, ..., d-1}`.
    pub fn from_word(d: usize, word: &[usize]) -> MultiIndex {
        let mut e = vec![0; d];
        for &l in word {
            e[l] += 1;
        }
        MultiIndex(e)
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// All multi-indices in `d` variables of total degree exactly `k`, graded-lex order.
pub fn indices_of_degree(d: usize, k: usize) -> Vec<MultiIndex> {
    fn rec(d: usize, k: usize, prefix: &mut Vec<usize>, out: &mut Vec<MultiIndex>) {
        if d == 1 {
            prefix.push(k);
            out.push(MultiIndex(prefix.clone()));
            prefix.pop();
            return;
        }
        for a in (0..=k).rev() {
            prefix.push(a);
            rec(d - 1, k - a, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if d == 0 {
        if k == 0 {
            out.push(MultiIndex(vec![]));
        }
        return out;
    }
    rec(d, k, &mut Vec::with_capacity(d), &mut out);
    out
}

/// All multi-indices of total degree at most `cap`, graded-lex order.
pub fn indices_up_to(d: usize, cap: usize) -> Vec<MultiIndex> {
    (0..=cap).flat_map(|k| indices_of_degree(d, k)).collect()
}

fn binomial(n: usize, k: usize) -> BigUint {
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= BigUint::from(n - i);
        acc /= BigUint::from(i + 1);
    }
    acc
}

/// Multinomial coefficient `|alpha|! / alpha!`, built from successive binomials.
pub fn multinomial(alpha: &MultiIndex) -> BigUint {
    let mut acc = BigUint::one();
    let mut partial = 0;
    for &a in &alpha.0 {
        partial += a;
        acc *= binomial(partial, a);
    }
    acc
}

/// Exact squared norm `||z^alpha||^2 = alpha! / |alpha|!` in the Drury-Arveson space.
pub fn monomial_norm_sq(alpha: &MultiIndex) -> BigRational {
    BigRational::new(One::one(), multinomial(alpha).into())
}

/// `|alpha|! / alpha!` as a float: the coefficient of `z^alpha conj(w)^alpha` in the
/// Szego kernel and the reciprocal of the monomial weight.
pub fn szego_coeff(alpha: &MultiIndex) -> f64 {
    multinomial(alpha).to_f64().unwrap_or(f64::INFINITY)
}

/// Floating-point monomial weight `alpha! / |alpha|!`.
pub fn monomial_weight(alpha: &MultiIndex) -> f64 {
    1.0 / szego_coeff(alpha)
}

/// Polynomial in `d` variables with `rows x cols` complex matrix coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct MatPoly {
    d: usize,
    rows: usize,
    cols: usize,
    terms: BTreeMap<MultiIndex, DMatrix<C64>>,
}

impl MatPoly {
    pub fn zero(d: usize, rows: usize, cols: usize) -> Self {
        MatPoly { d, rows, cols, terms: BTreeMap::new() }
    }

    pub fn constant(d: usize, m: DMatrix<C64>) -> Self {
        let mut p = MatPoly::zero(d, m.nrows(), m.ncols());
        p.add_term(MultiIndex::zero(d), m);
        p
    }

    pub fn identity(d: usize, n: usize) -> Self {
        MatPoly::constant(d, DMatrix::identity(n, n))
    }

    /// Scalar polynomial from `(exponent, coefficient)` pairs.
    pub fn scalar(d: usize, terms: &[(Vec<usize>, C64)]) -> Self {
        let mut p = MatPoly::zero(d, 1, 1);
        for (e, c) in terms {
            p.add_term(MultiIndex(e.clone()), DMatrix::from_element(1, 1, *c));
        }
        p
    }

    /// Builds a polynomial from explicit terms after checking shapes.
    pub fn from_terms(
        d: usize,
        rows: usize,
        cols: usize,
        terms: Vec<(MultiIndex, DMatrix<C64>)>,
    ) -> Result<Self> {
        let mut p = MatPoly::zero(d, rows, cols);
        for (a, m) in terms {
            if a.dim() != d {
                return Err(Error::DimensionMismatch(format!(
                    "exponent {:?} has length {}, expected {}",
                    a.0,
                    a.dim(),
                    d
                )));
            }
            if m.nrows() != rows || m.ncols() != cols {
                return Err(Error::DimensionMismatch(format!(
                    "coefficient is {}x{}, expected {}x{}",
                    m.nrows(),
                    m.ncols(),
                    rows,
                    cols
                )));
            }
            p.add_term(a, m);
        }
        Ok(p)
    }

    /// Places the scalar polynomials of `row` side by side as a `1 x m` polynomial.
    pub fn from_row(d: usize, row: &[MatPoly]) -> Result<Self> {
        let m = row.len();
        let mut p = MatPoly::zero(d, 1, m);
        for (k, e) in row.iter().enumerate() {
            if e.d != d || e.rows != 1 || e.cols != 1 {
                return Err(Error::DimensionMismatch("row entries must be scalar".into()));
            }
            for (a, c) in &e.terms {
                let mut m_ = DMatrix::zeros(1, m);
                m_[(0, k)] = c[(0, 0)];
                p.add_term(a.clone(), m_);
            }
        }
        Ok(p)
    }

    pub fn nvars(&self) -> usize {
        self.d
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn terms(&self) -> &BTreeMap<MultiIndex, DMatrix<C64>> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `m z^alpha`, dropping coefficients that cancel to exactly zero.
    pub fn add_term(&mut self, alpha: MultiIndex, m: DMatrix<C64>) {
        let entry = self
            .terms
            .entry(alpha.clone())
            .or_insert_with(|| DMatrix::zeros(m.nrows(), m.ncols()));
        *entry += m;
        if entry.iter().all(|c| *c == C64::new(0.0, 0.0)) {
            self.terms.remove(&alpha);
        }
    }

    pub fn coeff(&self, alpha: &MultiIndex) -> DMatrix<C64> {
        self.terms
            .get(alpha)
            .cloned()
            .unwrap_or_else(|| DMatrix::zeros(self.rows, self.cols))
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(|a| a.degree()).max().unwrap_or(0)
    }

    pub fn eval(&self, z: &[C64]) -> Result<DMatrix<C64>> {
        if z.len() != self.d {
            return Err(Error::DimensionMismatch(format!(
                "point has {} coordinates, polynomial has {} variables",
                z.len(),
                self.d
            )));
        }
        let mut acc = DMatrix::zeros(self.rows, self.cols);
        for (a, m) in &self.terms {
            acc += m * a.monomial(z);
        }
        Ok(acc)
    }

    fn check_same_shape(&self, other: &MatPoly) -> Result<()> {
        if self.d != other.d || self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "shapes differ: d={} {}x{} versus d={} {}x{}",
                self.d, self.rows, self.cols, other.d, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &MatPoly) -> Result<MatPoly> {
        self.check_same_shape(other)?;
        let mut out = self.clone();
        for (a, m) in &other.terms {
            out.add_term(a.clone(), m.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &MatPoly) -> Result<MatPoly> {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, c: C64) -> MatPoly {
        let mut out = MatPoly::zero(self.d, self.rows, self.cols);
        for (a, m) in &self.terms {
            out.add_term(a.clone(), m * c);
        }
        out
    }

    /// Matrix product of polynomials.
    pub fn mul(&self, other: &MatPoly) -> Result<MatPoly> {
        self.mul_truncated(other, usize::MAX)
    }

    /// Product with all terms above total degree `cap` discarded.
    pub fn mul_truncated(&self, other: &MatPoly, cap: usize) -> Result<MatPoly> {
        if self.d != other.d || self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply d={} {}x{} by d={} {}x{}",
                self.d, self.rows, self.cols, other.d, other.rows, other.cols
            )));
        }
        let mut out = MatPoly::zero(self.d, self.rows, other.cols);
        for (a, ma) in &self.terms {
            for (b, mb) in &other.terms {
                if a.degree() + b.degree() <= cap {
                    out.add_term(a.add(b), ma * mb);
                }
            }
        }
        Ok(out)
    }

    /// Multiplies by the scalar monomial `z^alpha`.
    pub fn shift_by(&self, alpha: &MultiIndex) -> MatPoly {
        let mut out = MatPoly::zero(self.d, self.rows, self.cols);
        for (a, m) in &self.terms {
            out.add_term(a.add(alpha), m.clone());
        }
        out
    }

    /// Multiplies on the right by a constant matrix.
    pub fn mul_const_right(&self, c: &DMatrix<C64>) -> MatPoly {
        let mut out = MatPoly::zero(self.d, self.rows, c.ncols());
        for (a, m) in &self.terms {
            out.add_term(a.clone(), m * c);
        }
        out
    }

    /// Multiplies on the left by a constant matrix.
    pub fn mul_const_left(&self, c: &DMatrix<C64>) -> MatPoly {
        let mut out = MatPoly::zero(self.d, c.nrows(), self.cols);
        for (a, m) in &self.terms {
            out.add_term(a.clone(), c * m);
        }
        out
    }

    pub fn column(&self, k: usize) -> MatPoly {
        let mut out = MatPoly::zero(self.d, self.rows, 1);
        for (a, m) in &self.terms {
            out.add_term(a.clone(), m.columns(k, 1).into_owned());
        }
        out
    }

    pub fn row(&self, i: usize) -> MatPoly {
        let mut out = MatPoly::zero(self.d, 1, self.cols);
        for (a, m) in &self.terms {
            out.add_term(a.clone(), m.rows(i, 1).into_owned());
        }
        out
    }

    /// Drops every term of total degree above `cap`.
    pub fn truncate(&self, cap: usize) -> MatPoly {
        let mut out = MatPoly::zero(self.d, self.rows, self.cols);
        for (a, m) in &self.terms {
            if a.degree() <= cap {
                out.add_term(a.clone(), m.clone());
            }
        }
        out
    }

    /// Largest entry modulus over all coefficients.
    pub fn max_abs(&self) -> f64 {
        self.terms
            .values()
            .flat_map(|m| m.iter().map(|c| c.norm()))
            .fold(0.0, f64::max)
    }
}

/// Drury-Arveson Gram `<p, q>` of the columns of `p` and `q`: the matrix whose
/// `(k, l)` entry is the inner product of column `k` of `p` with column `l` of `q`.
pub fn da_gram(p: &MatPoly, q: &MatPoly) -> Result<DMatrix<C64>> {
    if p.d != q.d || p.rows != q.rows {
        return Err(Error::DimensionMismatch(
            "inner product needs equal variable count and row count".into(),
        ));
    }
    let mut acc = DMatrix::zeros(p.cols, q.cols);
    for (a, pa) in &p.terms {
        if let Some(qa) = q.terms.get(a) {
            acc += pa.adjoint() * qa * C64::new(monomial_weight(a), 0.0);
        }
    }
    Ok(acc)
}

/// Drury-Arveson inner product `<p, q>` of vector-valued polynomials, conjugate
/// linear in `p`.
pub fn da_inner(p: &MatPoly, q: &MatPoly) -> Result<C64> {
    if p.cols != 1 || q.cols != 1 {
        return Err(Error::DimensionMismatch(
            "inner product is defined for column polynomials".into(),
        ));
    }
    Ok(da_gram(p, q)?[(0, 0)])
}
