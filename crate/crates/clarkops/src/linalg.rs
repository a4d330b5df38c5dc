//! Dense complex linear algebra helpers on `nalgebra` matrices, with singular value
//! and Hermitian eigen-decompositions computed by `faer`.

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result, C64};

/// Spectral norm.
pub fn op_norm(m: &DMatrix<C64>) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    singular_values(m).into_iter().fold(0.0, f64::max)
}

fn to_faer(m: &DMatrix<C64>) -> faer::Mat<C64> {
    faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn from_faer(m: &faer::Mat<C64>) -> DMatrix<C64> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn singular_values(m: &DMatrix<C64>) -> Vec<f64> {
    to_faer(m).singular_values().expect("SVD converges")
}

/// Thin SVD `m = U diag(s) V^*`.
fn thin_svd(m: &DMatrix<C64>) -> (DMatrix<C64>, Vec<f64>, DMatrix<C64>) {
    let svd = to_faer(m).thin_svd().expect("SVD converges");
    let k = m.nrows().min(m.ncols());
    let u = DMatrix::from_fn(m.nrows(), k, |i, j| svd.U()[(i, j)]);
    let v = DMatrix::from_fn(m.ncols(), k, |i, j| svd.V()[(i, j)]);
    let s = (0..k).map(|i| svd.S()[i].re).collect();
    (u, s, v)
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eigen(m: &DMatrix<C64>) -> (DVector<f64>, DMatrix<C64>) {
    let n = m.nrows();
    if n == 0 {
        return (DVector::zeros(0), DMatrix::zeros(0, 0));
    }
    let h = faer::Mat::<C64>::from_fn(n, n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5);
    let eig = h.self_adjoint_eigen(faer::Side::Lower).expect("Hermitian eigensolver converges");
    let vals = DVector::from_fn(n, |i, _| eig.S()[i].re);
    let vecs = DMatrix::from_fn(n, n, |i, j| eig.U()[(i, j)]);
    (vals, vecs)
}

/// Eigenvalues of a general square matrix.
pub fn eigenvalues(m: &DMatrix<C64>) -> Vec<C64> {
    to_faer(m).eigenvalues().expect("eigensolver converges")
}

/// Eigenvalues and unit eigenvectors of a general square matrix.
pub fn eigen(m: &DMatrix<C64>) -> (Vec<C64>, DMatrix<C64>) {
    let n = m.nrows();
    let evd = to_faer(m).eigen().expect("eigensolver converges");
    let vals = (0..n).map(|i| evd.S()[i]).collect();
    let mut vecs = DMatrix::from_fn(n, n, |i, j| evd.U()[(i, j)]);
    for mut c in vecs.column_iter_mut() {
        let nrm = c.norm();
        if nrm > 0.0 {
            c /= C64::new(nrm, 0.0);
        }
    }
    (vals, vecs)
}

/// Smallest and largest eigenvalue of a Hermitian matrix.
pub fn eig_range(m: &DMatrix<C64>) -> (f64, f64) {
    let (v, _) = hermitian_eigen(m);
    if v.is_empty() {
        return (0.0, 0.0);
    }
    (v[0], v[v.len() - 1])
}

/// Orthonormal basis of the column space, keeping singular values above
/// `rel_tol * sigma_max`.
pub fn range_basis(m: &DMatrix<C64>, rel_tol: f64) -> DMatrix<C64> {
    if m.ncols() == 0 || m.nrows() == 0 {
        return DMatrix::zeros(m.nrows(), 0);
    }
    let (u, s, _) = thin_svd(m);
    let smax = s.iter().cloned().fold(0.0, f64::max);
    let keep: Vec<usize> = (0..s.len()).filter(|&i| smax > 0.0 && s[i] > rel_tol * smax).collect();
    let mut out = DMatrix::zeros(m.nrows(), keep.len());
    for (k, &i) in keep.iter().enumerate() {
        out.set_column(k, &u.column(i));
    }
    out
}

/// Numerical rank relative to the largest singular value.
pub fn rank(m: &DMatrix<C64>, rel_tol: f64) -> usize {
    if m.ncols() == 0 || m.nrows() == 0 {
        return 0;
    }
    let s = singular_values(m);
    let smax = s.iter().cloned().fold(0.0, f64::max);
    s.iter().filter(|&&x| smax > 0.0 && x > rel_tol * smax).count()
}

/// Smallest singular value with its right singular vector.
pub fn smallest_right_singular(m: &DMatrix<C64>) -> (f64, DVector<C64>) {
    // The Gram matrix keeps a null vector visible for wide matrices too.
    let g = m.adjoint() * m;
    let (vals, vecs) = hermitian_eigen(&g);
    (vals[0].max(0.0).sqrt(), vecs.column(0).into_owned())
}

/// Moore-Penrose pseudo-inverse with a relative singular value cutoff.
pub fn pinv(m: &DMatrix<C64>, rel_tol: f64) -> DMatrix<C64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return DMatrix::zeros(m.ncols(), m.nrows());
    }
    let (u, s, v) = thin_svd(m);
    let smax = s.iter().cloned().fold(0.0, f64::max);
    let mut out = DMatrix::zeros(m.ncols(), m.nrows());
    for (i, &si) in s.iter().enumerate() {
        if smax > 0.0 && si > rel_tol * smax {
            out += v.column(i) * u.column(i).adjoint() * C64::new(1.0 / si, 0.0);
        }
    }
    out
}

/// Solves `a x = b` for square invertible `a` by LU with partial pivoting.
pub fn solve(a: &DMatrix<C64>, b: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    use faer::linalg::solvers::Solve;
    if a.nrows() != a.ncols() || a.nrows() != b.nrows() {
        return Err(Error::DimensionMismatch("solve needs a square system".into()));
    }
    let lu = to_faer(a).partial_piv_lu();
    let mut x = to_faer(b);
    lu.solve_in_place(&mut x);
    let out = from_faer(&x);
    if out.iter().any(|c| !c.is_finite()) {
        return Err(Error::Numerical("singular linear system".into()));
    }
    Ok(out)
}

/// `a^* a`.
pub fn gram_of_columns(a: &DMatrix<C64>) -> DMatrix<C64> {
    let f = to_faer(a);
    from_faer(&(f.adjoint() * &f))
}

pub fn inverse(a: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    a.clone()
        .try_inverse()
        .ok_or_else(|| Error::Numerical("matrix is not invertible".into()))
}

/// Largest entry modulus.
pub fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Stacks matrices with equal column counts vertically.
pub fn vstack(blocks: &[DMatrix<C64>]) -> DMatrix<C64> {
    let cols = blocks.first().map(|b| b.ncols()).unwrap_or(0);
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = DMatrix::zeros(rows, cols);
    let mut r = 0;
    for b in blocks {
        out.view_mut((r, 0), (b.nrows(), cols)).copy_from(b);
        r += b.nrows();
    }
    out
}

/// Stacks matrices with equal row counts horizontally.
pub fn hstack(blocks: &[DMatrix<C64>]) -> DMatrix<C64> {
    let rows = blocks.first().map(|b| b.nrows()).unwrap_or(0);
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = DMatrix::zeros(rows, cols);
    let mut c = 0;
    for b in blocks {
        out.view_mut((0, c), (rows, b.ncols())).copy_from(b);
        c += b.ncols();
    }
    out
}

/// Whitens a Hermitian positive pencil: returns the largest generalized eigenvalue
/// of `a x = lambda g x` and its eigenvector, with `g` positive definite.
pub fn top_generalized_eigen(a: &DMatrix<C64>, g: &DMatrix<C64>) -> Result<(f64, DVector<C64>)> {
    let (gv, gq) = hermitian_eigen(g);
    if gv.is_empty() || gv[0] <= 0.0 {
        return Err(Error::Numerical("metric is not positive definite".into()));
    }
    let n = gv.len();
    let mut w = DMatrix::zeros(n, n);
    for k in 0..n {
        let c = gq.column(k) * C64::new(1.0 / gv[k].sqrt(), 0.0);
        w.set_column(k, &c);
    }
    let m = w.adjoint() * a * &w;
    let (v, q) = hermitian_eigen(&m);
    let top = q.column(n - 1).into_owned();
    let x = &w * top;
    let nrm = x.norm();
    Ok((v[n - 1], x / C64::new(nrm, 0.0)))
}
