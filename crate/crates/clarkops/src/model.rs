//! Monomial models of the Drury-Arveson space and of `K(Theta)` for inner `Theta`.
//!
//! A [`TruncatedBasis`] is `P_N (x) C^n`, vector polynomials of degree at most `N`,
//! with the diagonal metric `||z^alpha e_i||^2 = alpha! / |alpha|!`. Operators carry
//! the metric of both sides so that adjoints are taken in the right inner product.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_rational::BigRational;

use crate::kernel::SamplePlan;
use crate::linalg::{max_abs, op_norm, range_basis};
use crate::poly::{indices_up_to, monomial_norm_sq, monomial_weight, MatPoly, MultiIndex};
use crate::{Error, Result, C64};

/// Basis `{z^alpha e_i : |alpha| <= cap, 1 <= i <= n}`, index-major.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedBasis {
    pub d: usize,
    pub n: usize,
    pub cap: usize,
    pub indices: Vec<MultiIndex>,
    weights: Vec<f64>,
    pos: BTreeMap<MultiIndex, usize>,
}

impl TruncatedBasis {
    pub fn new(d: usize, n: usize, cap: usize) -> Self {
        let indices = indices_up_to(d, cap);
        let weights = indices.iter().map(monomial_weight).collect();
        let pos = indices.iter().cloned().enumerate().map(|(i, a)| (a, i)).collect();
        TruncatedBasis { d, n, cap, indices, weights, pos }
    }

    pub fn dim(&self) -> usize {
        self.indices.len() * self.n
    }

    /// Position of `z^alpha e_i`.
    pub fn position(&self, alpha: &MultiIndex, i: usize) -> Option<usize> {
        self.pos.get(alpha).map(|p| p * self.n + i)
    }

    /// Squared norms of the basis vectors.
    pub fn metric(&self) -> DVector<f64> {
        DVector::from_fn(self.dim(), |k, _| self.weights[k / self.n])
    }

    /// Degree of basis vector `k`.
    pub fn degree_of(&self, k: usize) -> usize {
        self.indices[k / self.n].degree()
    }

    /// Coefficient vector of a column polynomial.
    pub fn to_vector(&self, p: &MatPoly) -> Result<DVector<C64>> {
        if p.cols() != 1 || p.rows() != self.n || p.nvars() != self.d {
            return Err(Error::DimensionMismatch("column polynomial does not fit the basis".into()));
        }
        let mut v = DVector::zeros(self.dim());
        for (a, m) in p.terms() {
            let base = self
                .position(a, 0)
                .ok_or_else(|| Error::Precondition(format!("degree {} exceeds cap {}", a.degree(), self.cap)))?;
            for i in 0..self.n {
                v[base + i] = m[(i, 0)];
            }
        }
        Ok(v)
    }

    /// Column polynomial with the given coefficient vector.
    pub fn from_vector(&self, v: &DVector<C64>) -> MatPoly {
        let mut p = MatPoly::zero(self.d, self.n, 1);
        for (k, a) in self.indices.iter().enumerate() {
            let c = DMatrix::from_fn(self.n, 1, |i, _| v[k * self.n + i]);
            p.add_term(a.clone(), c);
        }
        p
    }
}

/// Inner-product space an operator acts on.
#[derive(Clone, Debug, PartialEq)]
pub enum Space {
    /// Monomial truncation with its diagonal metric.
    Truncated(TruncatedBasis),
    /// Euclidean coordinates with respect to an orthonormal basis.
    Orthonormal(usize),
}

impl Space {
    pub fn dim(&self) -> usize {
        match self {
            Space::Truncated(t) => t.dim(),
            Space::Orthonormal(r) => *r,
        }
    }

    pub fn metric(&self) -> DVector<f64> {
        match self {
            Space::Truncated(t) => t.metric(),
            Space::Orthonormal(r) => DVector::from_element(*r, 1.0),
        }
    }
}

/// Matrix of an operator between two spaces, with the degree window on which the
/// matrix agrees with the untruncated operator.
#[derive(Clone, Debug)]
pub struct OperatorRep {
    pub matrix: DMatrix<C64>,
    pub dom: Space,
    pub cod: Space,
    pub window: Option<usize>,
}

impl OperatorRep {
    /// Adjoint in the weighted metrics: `T^# = W_dom^{-1} T^* W_cod`.
    pub fn adjoint(&self) -> OperatorRep {
        let wd = self.dom.metric();
        let wc = self.cod.metric();
        let t = self.matrix.adjoint();
        let m = DMatrix::from_fn(t.nrows(), t.ncols(), |i, j| t[(i, j)] * (wc[j] / wd[i]));
        OperatorRep { matrix: m, dom: self.cod.clone(), cod: self.dom.clone(), window: self.window }
    }

    /// Matrix in orthonormal coordinates: `W_cod^{1/2} T W_dom^{-1/2}`.
    pub fn orthonormal_matrix(&self) -> DMatrix<C64> {
        let wd = self.dom.metric();
        let wc = self.cod.metric();
        DMatrix::from_fn(self.matrix.nrows(), self.matrix.ncols(), |i, j| {
            self.matrix[(i, j)] * (wc[i].sqrt() / wd[j].sqrt())
        })
    }

    /// Spectral norm in the weighted metrics.
    pub fn norm(&self) -> f64 {
        op_norm(&self.orthonormal_matrix())
    }

    pub fn compose(&self, inner: &OperatorRep) -> Result<OperatorRep> {
        if inner.cod != self.dom {
            return Err(Error::DimensionMismatch("composition of operators with mismatched spaces".into()));
        }
        let window = match (self.window, inner.window) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        Ok(OperatorRep { matrix: &self.matrix * &inner.matrix, dom: inner.dom.clone(), cod: self.cod.clone(), window })
    }
}

/// Forward shifts `S_j : P_{N-1} (x) C^n -> P_N (x) C^n`, `z^alpha e_i -> z^{alpha + e_j} e_i`.
/// Their weighted adjoints are the backward shifts, exact on the whole truncation.
pub fn shift_matrices(d: usize, n: usize, cap: usize) -> Result<Vec<OperatorRep>> {
    if cap == 0 {
        return Err(Error::Precondition("shift needs a truncation degree of at least 1".into()));
    }
    let dom = TruncatedBasis::new(d, n, cap - 1);
    let cod = TruncatedBasis::new(d, n, cap);
    let mut out = Vec::with_capacity(d);
    for j in 0..d {
        let mut m = DMatrix::zeros(cod.dim(), dom.dim());
        for a in &dom.indices {
            let b = a.add_unit(j);
            for i in 0..n {
                let c = dom.position(a, i).expect("in domain");
                let r = cod.position(&b, i).expect("in codomain");
                m[(r, c)] = C64::new(1.0, 0.0);
            }
        }
        out.push(OperatorRep {
            matrix: m,
            dom: Space::Truncated(dom.clone()),
            cod: Space::Truncated(cod.clone()),
            window: Some(cap - 1),
        });
    }
    Ok(out)
}

/// Exact backward-shift coefficient `||z^alpha||^2 / ||z^{alpha - e_j}||^2`, the
/// multiple of `z^{alpha - e_j}` in `S_j^* z^alpha`.
pub fn backward_shift_coefficient(alpha: &MultiIndex, j: usize) -> Option<BigRational> {
    let lower = alpha.sub_unit(j)?;
    Some(monomial_norm_sq(alpha) / monomial_norm_sq(&lower))
}

/// `alpha_j / |alpha|` as an exact rational.
pub fn expected_backward_coefficient(alpha: &MultiIndex, j: usize) -> BigRational {
    BigRational::new(BigInt::from(alpha.0[j]), BigInt::from(alpha.degree()))
}

/// Multiplication by `b` from `P_{N-D} (x) C^m` to `P_N (x) C^n`, `D = deg b`.
pub fn multiplier_matrix(b: &MatPoly, cap: usize) -> Result<OperatorRep> {
    let deg = b.degree();
    if cap < deg {
        return Err(Error::Precondition(format!("truncation {cap} is below the degree {deg}")));
    }
    let dom = TruncatedBasis::new(b.nvars(), b.cols(), cap - deg);
    let cod = TruncatedBasis::new(b.nvars(), b.rows(), cap);
    let mut m = DMatrix::zeros(cod.dim(), dom.dim());
    for a in &dom.indices {
        for (beta, coef) in b.terms() {
            let g = a.add(beta);
            for k in 0..b.cols() {
                let c = dom.position(a, k).expect("domain");
                for i in 0..b.rows() {
                    let r = cod.position(&g, i).expect("codomain");
                    m[(r, c)] += coef[(i, k)];
                }
            }
        }
    }
    Ok(OperatorRep { matrix: m, dom: Space::Truncated(dom), cod: Space::Truncated(cod), window: Some(cap - deg) })
}

/// Outcome of the partial-isometry test for `M_Theta`.
#[derive(Clone, Debug)]
pub struct InnerReport {
    pub defect: f64,
    pub window: usize,
    pub inner: bool,
}

/// Weighted norm of `M M^# M - M` on the degrees `<= N - 2D` where the truncated
/// matrix reproduces the true operator.
pub fn inner_check(theta: &MatPoly, cap: usize, op_tol: f64) -> Result<InnerReport> {
    let deg = theta.degree();
    if cap < 2 * deg {
        return Err(Error::Precondition(format!("inner test needs N >= 2 deg = {}", 2 * deg)));
    }
    let m = multiplier_matrix(theta, cap)?;
    let ms = m.adjoint();
    let prod = &m.matrix * &ms.matrix * &m.matrix - &m.matrix;
    let window = cap - 2 * deg;
    let Space::Truncated(dom) = &m.dom else { unreachable!() };
    let cols: Vec<usize> = (0..dom.dim()).filter(|&k| dom.degree_of(k) <= window).collect();
    let wd = dom.metric();
    let wc = m.cod.metric();
    let t = DMatrix::from_fn(prod.nrows(), cols.len(), |i, c| {
        prod[(i, cols[c])] * (wc[i].sqrt() / wd[cols[c]].sqrt())
    });
    let defect = op_norm(&t);
    Ok(InnerReport { defect, window, inner: defect < op_tol })
}

/// Orthogonal projection of `P_N (x) C^n` onto `K(Theta)`, reliable on degrees
/// `<= N - D`.
#[derive(Clone, Debug)]
pub struct ProjectorRep {
    pub op: OperatorRep,
    pub rank: usize,
}

pub fn kb_projector(theta: &MatPoly, cap: usize, op_tol: f64) -> Result<ProjectorRep> {
    let rep = inner_check(theta, cap, op_tol)?;
    if !rep.inner {
        return Err(Error::NotInner { defect: rep.defect, tol: op_tol });
    }
    let m = multiplier_matrix(theta, cap)?;
    let mo = m.orthonormal_matrix();
    let u = range_basis(&mo, 1e-12);
    let q = &u * u.adjoint();
    let wc = m.cod.metric();
    let dim = wc.len();
    let p = DMatrix::from_fn(dim, dim, |i, j| {
        let id = if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
        id - q[(i, j)] * (wc[j].sqrt() / wc[i].sqrt())
    });
    Ok(ProjectorRep {
        rank: dim - u.ncols(),
        op: OperatorRep { matrix: p, dom: m.cod.clone(), cod: m.cod.clone(), window: Some(cap - theta.degree()) },
    })
}

/// Norm of the component of `f` in `ran M_Theta = K(Theta)^perp`, for inner `Theta`
/// and `deg f <= cap - deg Theta`.
pub fn range_component_norm(theta: &MatPoly, f: &MatPoly, cap: usize, op_tol: f64) -> Result<f64> {
    if f.degree() + theta.degree() > cap {
        return Err(Error::Precondition("polynomial degree exceeds the reliable window".into()));
    }
    let proj = kb_projector(theta, cap, op_tol)?;
    let basis = TruncatedBasis::new(theta.nvars(), theta.rows(), cap);
    let v = basis.to_vector(f)?;
    let w = &v - &proj.op.matrix * &v;
    let metric = basis.metric();
    Ok(w.iter().zip(metric.iter()).map(|(c, m)| c.norm_sqr() * m).sum::<f64>().sqrt())
}

/// Square `m x m` multiplier with `theta` as its first row and zeros below.
pub fn embed_inner_sequence(theta: &MatPoly) -> Result<MatPoly> {
    if theta.rows() != 1 {
        return Err(Error::DimensionMismatch("expected a row multiplier".into()));
    }
    let m = theta.cols();
    let mut out = MatPoly::zero(theta.nvars(), m, m);
    for (a, c) in theta.terms() {
        let mut big = DMatrix::zeros(m, m);
        big.rows_mut(0, 1).copy_from(c);
        out.add_term(a.clone(), big);
    }
    Ok(out)
}

/// First row of a square multiplier whose remaining rows vanish, if it has that shape.
pub fn hat_row(b: &MatPoly) -> Option<MatPoly> {
    if b.rows() != b.cols() {
        return None;
    }
    if b.rows() > 1 && (1..b.rows()).any(|i| !b.row(i).is_zero()) {
        return None;
    }
    Some(b.row(0))
}

/// Rank of the sampled evaluations of a row multiplier.
#[derive(Clone, Debug)]
pub struct MinimalityReport {
    pub rank: usize,
    pub minimal: bool,
    pub points: usize,
    /// Unit vector `h` with `theta(z) h` vanishing at every sample, when not minimal.
    pub null_vector: Option<DVector<C64>>,
    pub null_residual: Option<f64>,
}

/// Rank of the stacked rows `theta(z_i)`; full rank `m` means the entries are
/// linearly independent.
pub fn minimality_check(theta: &MatPoly, plan: &SamplePlan, rank_tol: f64) -> Result<MinimalityReport> {
    if theta.rows() != 1 {
        return Err(Error::DimensionMismatch("expected a row multiplier".into()));
    }
    let m = theta.cols();
    let pts = &plan.points;
    let mut t = DMatrix::zeros(pts.len(), m);
    for (i, p) in pts.iter().enumerate() {
        t.row_mut(i).copy_from(&theta.eval(p.coords())?);
    }
    let rank = crate::linalg::rank(&t, rank_tol);
    let minimal = rank == m;
    let (null_vector, null_residual) = if minimal {
        (None, None)
    } else {
        let (s, v) = crate::linalg::smallest_right_singular(&t);
        (Some(v), Some(s))
    };
    Ok(MinimalityReport { rank, minimal, points: pts.len(), null_vector, null_residual })
}

/// Max-entry difference of two column polynomials viewed in a common truncation.
pub fn coefficient_distance(p: &MatPoly, q: &MatPoly) -> Result<f64> {
    Ok(p.sub(q)?.terms().values().map(max_abs).fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shift_adjoint_round_trip() {
        let s = shift_matrices(2, 1, 4).unwrap();
        for op in &s {
            let back = op.adjoint().adjoint();
            assert!(max_abs(&(back.matrix - &op.matrix)) < 1e-15);
        }
    }

    #[test]
    fn z_is_inner_and_half_z_is_not() {
        let z = MatPoly::scalar(1, &[(vec![1], C64::new(1.0, 0.0))]);
        assert!(inner_check(&z, 6, 1e-10).unwrap().inner);
        let h = z.scale(C64::new(0.5, 0.0));
        let r = inner_check(&h, 6, 1e-10).unwrap();
        assert!((r.defect - 0.375).abs() < 1e-12);
    }
}
