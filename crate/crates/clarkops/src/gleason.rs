//! Gleason solutions for `b` and for `K(b)`.
//!
//! A solution for `b` is a tuple `B = (B_1, ..., B_d)` with columns in `K(b)` and
//! `sum_j z_j B_j(z) = b(z) - b(0)`. A solution for `K(b)` is a row `X` with
//! `sum_j z_j (X_j^* f)(z) = f(z) - f(0)`. They determine each other through
//! `X^* k_w h = conj(w) k_w h - B b(w)^* h`.
//!
//! Every extension `D = V + Y` of the partial isometry on `L(b)` yields the solution
//! `B^D h = (I - b) (D^* K_0 (I - b(0)) h)`; `D = V` gives the minimal one. Both
//! `K(b)` and `L(b)` are represented by Taylor sections of the same degree, and the
//! unitary `U = (I - b)^{-1} : K(b) -> L(b)` maps one span onto the other.

use nalgebra::{DMatrix, DVector};

use crate::clark::{section_polynomial, PartialIsometryRep};
use crate::kernel::{BallPoint, SamplePlan};
use crate::linalg::{hermitian_eigen, hstack, max_abs, op_norm, pinv, range_basis, rank, solve};
use crate::poly::{da_gram, MatPoly, MultiIndex};
use crate::series::inv_one_minus;
use crate::span::{KernelSpanRep, SpanKernel};
use crate::{Error, Result, C64};

/// Gleason solution for `b`.
#[derive(Clone, Debug)]
pub struct GleasonB {
    pub b: MatPoly,
    /// `B_j` as `n x n` Taylor polynomials (exact polynomials when `polynomial_fit`).
    pub components: Vec<MatPoly>,
    /// Per component, the `r x n` coordinates of `B_j e_k` in the `K(b)` span.
    pub coords: Vec<DMatrix<C64>>,
    /// `B^* B = sum_j <B_j e_k, B_j e_l>`.
    pub gram: DMatrix<C64>,
    /// Largest Taylor coefficient above degree `deg b - 1`, relative to the rest.
    pub fit_residual: f64,
    pub polynomial_fit: bool,
}

impl GleasonB {
    /// `I - b(0)^* b(0) - B^* B`; positive semidefinite for contractive solutions.
    pub fn defect(&self) -> DMatrix<C64> {
        let b0 = self.b.coeff(&MultiIndex::zero(self.b.nvars()));
        DMatrix::identity(self.gram.nrows(), self.gram.ncols()) - b0.adjoint() * b0 - &self.gram
    }

    /// Extremal when the defect vanishes.
    pub fn is_extremal(&self, psd_tol: f64) -> bool {
        max_abs(&self.defect()) <= psd_tol
    }
}

/// Gleason solution for `K(b)`, as `X^*` in orthonormal coordinates of the `K(b)` span.
#[derive(Clone, Debug)]
pub struct GleasonX {
    /// `(d r) x r`; block `j` is `X_j^*`.
    pub xstar: DMatrix<C64>,
    pub d: usize,
}

/// Either kind of solution.
#[derive(Clone, Debug)]
pub enum GleasonSolution {
    ForB(GleasonB),
    ForKb(GleasonX),
}

impl GleasonX {
    pub fn component_adjoint(&self, j: usize) -> DMatrix<C64> {
        let r = self.xstar.ncols();
        self.xstar.rows(j * r, r).into_owned()
    }
}

/// The unitary `U^{-1} = (I - b) : L(b) -> K(b)` between spans of equal degree,
/// as an `r_K x r_L` matrix.
///
/// From `U^{-1} K_w h = k_w (I - b(w)^*)^{-1} h` one gets
/// `U^{-1} T_gamma h = sum_{delta <= gamma} t_{gamma - delta} R_delta^* h` with
/// `R = (I - b)^{-1}`.
pub fn u_inverse(krep: &KernelSpanRep, lrep: &KernelSpanRep) -> Result<DMatrix<C64>> {
    if krep.kind != SpanKernel::DeBrangesRovnyak || lrep.kind != SpanKernel::Herglotz || krep.cap != lrep.cap {
        return Err(Error::Precondition("expected K(b) and L(b) spans of equal degree".into()));
    }
    let n = krep.n;
    let r_ser = inv_one_minus(&krep.b, krep.cap)?;
    let mut map = DMatrix::<C64>::zeros(krep.size(), lrep.size());
    for gamma in &lrep.indices {
        for (delta, rd) in r_ser.terms() {
            let Some(rest) = gamma.checked_sub(delta) else { continue };
            for k in 0..n {
                let col = lrep.generator(gamma, k).expect("generator");
                for i in 0..n {
                    let row = krep.generator(&rest, i).expect("generator");
                    map[(row, col)] += rd[(k, i)].conj();
                }
            }
        }
    }
    Ok(&krep.phi * map * &lrep.lift)
}

/// Truncated-series tuple from `K(b)` coordinates of `B_j e_k`.
fn components_from_coords(krep: &KernelSpanRep, coords: &[DMatrix<C64>]) -> Vec<MatPoly> {
    coords
        .iter()
        .map(|c| {
            let mut p = MatPoly::zero(krep.d, krep.n, krep.n);
            for k in 0..krep.n {
                let col = krep.taylor_coeffs(&c.column(k).into_owned());
                for (a, m) in col.terms() {
                    let mut big = DMatrix::zeros(krep.n, krep.n);
                    big.set_column(k, &m.column(0));
                    p.add_term(a.clone(), big);
                }
            }
            p
        })
        .collect()
}

fn split_fit(components: &[MatPoly], deg: usize) -> (Vec<MatPoly>, f64) {
    let keep = deg.saturating_sub(1);
    let mut low = 0.0f64;
    let mut high = 0.0f64;
    let mut out = Vec::new();
    for c in components {
        let mut p = MatPoly::zero(c.nvars(), c.rows(), c.cols());
        for (a, m) in c.terms() {
            if deg > 0 && a.degree() <= keep {
                low = low.max(max_abs(m));
                p.add_term(a.clone(), m.clone());
            } else {
                high = high.max(max_abs(m));
            }
        }
        out.push(p);
    }
    (out, high / low.max(1.0))
}

fn gram_of(coords: &[DMatrix<C64>]) -> DMatrix<C64> {
    let n = coords.first().map(|c| c.ncols()).unwrap_or(0);
    let mut g = DMatrix::zeros(n, n);
    for c in coords {
        g += c.adjoint() * c;
    }
    g
}

/// The solution `B^D` attached to `D = V + Y` (`Y = None` for `D = V`).
pub fn solution_from_extension(
    vrep: &PartialIsometryRep,
    krep: &KernelSpanRep,
    uinv: &DMatrix<C64>,
    y: Option<&DMatrix<C64>>,
) -> Result<GleasonB> {
    let b = &krep.b;
    let n = krep.n;
    let d = vrep.d;
    let r = vrep.r();
    let b0 = b.coeff(&MultiIndex::zero(d));
    let c0 = DMatrix::<C64>::identity(n, n) - b0;
    let mut dstar = vrep.adjoint();
    if let Some(y) = y {
        dstar += y.adjoint();
    }
    let src = dstar * vrep.rep.origin_coords() * c0;
    let coords: Vec<DMatrix<C64>> = (0..d).map(|j| uinv * src.rows(j * r, r)).collect();
    let series = components_from_coords(krep, &coords);
    let (fit, fit_residual) = split_fit(&series, b.degree());
    Ok(GleasonB {
        b: b.clone(),
        components: if y.is_none() { fit } else { series },
        gram: gram_of(&coords),
        coords,
        fit_residual,
        polynomial_fit: y.is_none(),
    })
}

/// Minimal solution `B^V`; fails when its Taylor coefficients above degree
/// `deg b - 1` exceed `fit_tol`.
pub fn minimal_solution_b(
    vrep: &PartialIsometryRep,
    krep: &KernelSpanRep,
    uinv: &DMatrix<C64>,
    fit_tol: f64,
) -> Result<GleasonB> {
    let sol = solution_from_extension(vrep, krep, uinv, None)?;
    if sol.fit_residual > fit_tol {
        return Err(Error::CrossCheck { what: "polynomial fit of the minimal solution".into(), value: sol.fit_residual, tol: fit_tol });
    }
    Ok(sol)
}

/// Solution for `b` from explicit polynomial components, with coordinates obtained
/// through the reproducing property of the `K(b)` span.
pub fn solution_from_components(krep: &KernelSpanRep, components: Vec<MatPoly>) -> Result<GleasonB> {
    let n = krep.n;
    if components.len() != krep.d || components.iter().any(|c| c.rows() != n || c.cols() != n) {
        return Err(Error::DimensionMismatch("expected d components of size n x n".into()));
    }
    let coords: Vec<DMatrix<C64>> = components
        .iter()
        .map(|c| {
            let cols: Vec<DVector<C64>> = (0..n).map(|k| krep.coords_from_taylor(&c.column(k))).collect();
            DMatrix::from_columns(&cols)
        })
        .collect();
    Ok(GleasonB {
        b: krep.b.clone(),
        gram: gram_of(&coords),
        coords,
        components,
        fit_residual: 0.0,
        polynomial_fit: true,
    })
}

/// Largest Taylor coefficient of `sum_j z_j B_j - (b - b(0))` up to degree `cap`.
pub fn identity_defect(sol: &GleasonB, cap: usize) -> Result<f64> {
    let d = sol.b.nvars();
    let mut acc = sol.b.scale(C64::new(-1.0, 0.0));
    acc.add_term(MultiIndex::zero(d), sol.b.coeff(&MultiIndex::zero(d)));
    for (j, c) in sol.components.iter().enumerate() {
        acc = acc.add(&c.shift_by(&MultiIndex::unit(d, j)))?;
    }
    Ok(acc.truncate(cap).max_abs())
}

/// `X^*` from `B`: `X_j^* t_gamma h = t_{gamma - e_j} h - B_j b_gamma^* h`.
pub fn solution_to_x(sol: &GleasonB, krep: &KernelSpanRep) -> Result<GleasonX> {
    let d = krep.d;
    let n = krep.n;
    let r = krep.rank();
    let mut images = DMatrix::<C64>::zeros(d * r, krep.size());
    for gamma in &krep.indices {
        let bg_star = sol.b.coeff(gamma).adjoint();
        for k in 0..n {
            let col = krep.generator(gamma, k).expect("generator");
            for j in 0..d {
                let mut img = match gamma.sub_unit(j) {
                    Some(lower) => krep.section_coords(&lower, k),
                    None => DVector::zeros(r),
                };
                img -= &sol.coords[j] * bg_star.column(k);
                images.view_mut((j * r, col), (r, 1)).copy_from(&img);
            }
        }
    }
    Ok(GleasonX { xstar: images * &krep.lift, d })
}

/// Defect form `I - k_0 k_0^* - X X^*` on the span; it must be positive
/// semidefinite, and it vanishes exactly for extremal solutions.
pub fn x_defect(x: &GleasonX, krep: &KernelSpanRep) -> DMatrix<C64> {
    let r = krep.rank();
    let k0 = krep.origin_coords();
    DMatrix::identity(r, r) - &k0 * k0.adjoint() - x.xstar.adjoint() * &x.xstar
}

/// Residual of the Gleason identity for `X` on the generators: Taylor coefficients
/// of `sum_j z_j X_j^* f - f + f(0)` for every section `f`, up to degree `cap`.
pub fn x_identity_defect(x: &GleasonX, krep: &KernelSpanRep) -> Result<f64> {
    let d = krep.d;
    let mut worst = 0.0f64;
    for gamma in &krep.indices {
        for k in 0..krep.n {
            let f = krep.section_coords(gamma, k);
            let fp = krep.taylor_coeffs(&f);
            let mut acc = fp.scale(C64::new(-1.0, 0.0));
            acc.add_term(MultiIndex::zero(d), fp.coeff(&MultiIndex::zero(d)));
            for j in 0..d {
                let img = x.component_adjoint(j) * &f;
                acc = acc.add(&krep.taylor_coeffs(&img).shift_by(&MultiIndex::unit(d, j)))?;
            }
            worst = worst.max(acc.truncate(krep.cap).max_abs());
        }
    }
    Ok(worst)
}

/// `S_j^*` on polynomial coefficients: `z^alpha -> (alpha_j / |alpha|) z^{alpha - e_j}`.
pub fn backward_shift_poly(p: &MatPoly, j: usize) -> MatPoly {
    let mut out = MatPoly::zero(p.nvars(), p.rows(), p.cols());
    for (a, m) in p.terms() {
        if let Some(lower) = a.sub_unit(j) {
            out.add_term(lower, m * C64::new(a.0[j] as f64 / a.degree() as f64, 0.0));
        }
    }
    out
}

/// Compressed shift for inner `b`: `X_j^* = S_j^*` restricted to `K(b)`, built from
/// the exact backward shift of each section polynomial.
pub fn compressed_shift(krep: &KernelSpanRep) -> GleasonX {
    let d = krep.d;
    let r = krep.rank();
    let mut images = DMatrix::<C64>::zeros(d * r, krep.size());
    for gamma in &krep.indices {
        for k in 0..krep.n {
            let col = krep.generator(gamma, k).expect("generator");
            let f = section_polynomial(krep, gamma, k);
            for j in 0..d {
                let img = krep.coords_from_taylor(&backward_shift_poly(&f, j));
                images.view_mut((j * r, col), (r, 1)).copy_from(&img);
            }
        }
    }
    GleasonX { xstar: images * &krep.lift, d }
}

/// Largest coefficient discrepancy between `S_j^* f` and `X_j^* f` over all section
/// polynomials `f`, with `X` built from `sol`. Compares exact polynomials.
pub fn compressed_shift_discrepancy(sol: &GleasonB, krep: &KernelSpanRep) -> Result<f64> {
    let d = krep.d;
    let mut worst = 0.0f64;
    for gamma in &krep.indices {
        let bg_star = sol.b.coeff(gamma).adjoint();
        for k in 0..krep.n {
            let f = section_polynomial(krep, gamma, k);
            for j in 0..d {
                let shifted = backward_shift_poly(&f, j);
                let mut img = match gamma.sub_unit(j) {
                    Some(lower) => section_polynomial(krep, &lower, k),
                    None => MatPoly::zero(d, krep.n, 1),
                };
                let v = DMatrix::from_column_slice(krep.n, 1, bg_star.column(k).as_slice());
                img = img.sub(&sol.components[j].mul_const_right(&v))?;
                worst = worst.max(shifted.sub(&img)?.max_abs());
            }
        }
    }
    Ok(worst)
}

/// Outcome of [`recover_b_from_x`].
#[derive(Clone, Debug)]
pub struct Recovery {
    pub solution: GleasonB,
    /// Largest coefficient residual of the least-squares solve.
    pub residual: f64,
    /// Whether the coefficients of `b` have no common kernel vector, which makes `B` unique.
    pub unique: bool,
}

/// Recovers `B` from `X` by least squares on `B_j b_gamma^* h = t_{gamma - e_j} h - X_j^* t_gamma h`
/// over the support of `b`. The common kernel of the `b(z)` is the common kernel of the
/// coefficients, so uniqueness is the rank `n` of the stacked `b_gamma^*`; without it the
/// minimum-norm solution is returned, or an error when `require_unique` is set.
pub fn recover_b_from_x(x: &GleasonX, krep: &KernelSpanRep, rank_tol: f64, require_unique: bool) -> Result<Recovery> {
    let d = krep.d;
    let n = krep.n;
    let b = &krep.b;
    let support: Vec<(MultiIndex, DMatrix<C64>)> =
        b.terms().iter().map(|(a, m)| (a.clone(), m.adjoint())).collect();
    let vblocks: Vec<DMatrix<C64>> = support.iter().map(|(_, m)| m.clone()).collect();
    let unique = !vblocks.is_empty() && rank(&hstack(&vblocks), rank_tol) == n;
    if !unique && require_unique {
        return Err(Error::Precondition("kernels of the values of b intersect nontrivially".into()));
    }
    let mut components = Vec::with_capacity(d);
    let mut residual = 0.0f64;
    if vblocks.is_empty() {
        components = vec![MatPoly::zero(d, n, n); d];
    } else {
        let vmat = hstack(&vblocks);
        let vp = pinv(&vmat, rank_tol);
        for j in 0..d {
            // One Taylor right-hand side per (gamma, k).
            let mut rhs: Vec<MatPoly> = Vec::new();
            for (gamma, _) in &support {
                for k in 0..n {
                    let f = krep.section_coords(gamma, k);
                    let mut lhs = match gamma.sub_unit(j) {
                        Some(lower) => krep.section_coords(&lower, k),
                        None => DVector::zeros(krep.rank()),
                    };
                    lhs -= x.component_adjoint(j) * f;
                    rhs.push(krep.taylor_coeffs(&lhs));
                }
            }
            let mut comp = MatPoly::zero(d, n, n);
            for a in &krep.indices {
                let cols: Vec<DVector<C64>> = rhs.iter().map(|p| p.coeff(a).column(0).into_owned()).collect();
                let rmat = DMatrix::from_columns(&cols);
                let coef = &rmat * &vp;
                residual = residual.max(max_abs(&(&coef * &vmat - &rmat)));
                comp.add_term(a.clone(), coef);
            }
            components.push(comp);
        }
    }
    let (fit, fit_residual) = split_fit(&components, b.degree());
    let mut solution = solution_from_components(krep, fit)?;
    solution.fit_residual = fit_residual;
    Ok(Recovery { solution, residual, unique })
}

/// Positive-semidefinite ordering of two solutions through `B^* B`.
#[derive(Clone, Debug, PartialEq)]
pub enum Ordering {
    Equal,
    FirstBelow,
    SecondBelow,
    Incomparable,
}

#[derive(Clone, Debug)]
pub struct OrderingReport {
    /// Eigenvalues of `B2^* B2 - B1^* B1`, ascending.
    pub eigenvalues: Vec<f64>,
    pub verdict: Ordering,
}

pub fn minimality_compare(b1: &GleasonB, b2: &GleasonB, psd_tol: f64) -> OrderingReport {
    let diff = &b2.gram - &b1.gram;
    let (vals, _) = hermitian_eigen(&diff);
    let v: Vec<f64> = vals.iter().copied().collect();
    let lo = v.first().copied().unwrap_or(0.0);
    let hi = v.last().copied().unwrap_or(0.0);
    let verdict = if lo.abs() <= psd_tol && hi.abs() <= psd_tol {
        Ordering::Equal
    } else if lo >= -psd_tol {
        Ordering::FirstBelow
    } else if hi <= psd_tol {
        Ordering::SecondBelow
    } else {
        Ordering::Incomparable
    };
    OrderingReport { eigenvalues: v, verdict }
}

/// `B^* B` of polynomial components in the Drury-Arveson metric, which equals the
/// `K(b)` metric when `b` is inner.
pub fn gram_h2(components: &[MatPoly]) -> Result<DMatrix<C64>> {
    let n = components.first().map(|c| c.cols()).unwrap_or(0);
    let mut g = DMatrix::zeros(n, n);
    for c in components {
        g += da_gram(c, c)?;
    }
    Ok(g)
}

/// Witness that `ker V` is nontrivial for `d >= 2`.
#[derive(Clone, Debug)]
pub struct KernelWitness {
    /// `F in K(b)` orthogonal to the ranges of all `B_j`, so that `z_j F in K(b)`.
    pub f: MatPoly,
    /// `||V H|| / ||H||` in the representation, `H = (-U z_2 F, U z_1 F, 0, ...)`.
    pub ratio: f64,
    /// Largest coefficient of `z_1 (z_2 F) - z_2 (z_1 F)`, computed exactly.
    pub certificate: f64,
    /// Largest `|sum_j z_j H_j(z)|` over the sample points.
    pub pointwise: f64,
    /// Distance of `z_j F` from the `K(b)` span, relative to its size.
    pub membership: f64,
}

pub fn kernel_witness(
    vrep: &PartialIsometryRep,
    krep: &KernelSpanRep,
    uinv: &DMatrix<C64>,
    sol: &GleasonB,
    plan: &SamplePlan,
) -> Result<KernelWitness> {
    let d = krep.d;
    let n = krep.n;
    if d < 2 {
        return Err(Error::Precondition("a nonzero kernel needs d >= 2".into()));
    }
    // F: the lowest section whose part orthogonal to ran B is not negligible.
    let bcols: Vec<DVector<C64>> = sol.coords.iter().flat_map(|c| c.column_iter().map(|x| x.into_owned()).collect::<Vec<_>>()).collect();
    let bmat = DMatrix::from_columns(&bcols);
    let qb = if bcols.is_empty() { DMatrix::zeros(krep.rank(), 0) } else { range_basis(&bmat, 1e-9) };
    let mut chosen = None;
    'outer: for gamma in krep.indices.iter().filter(|g| g.degree() + 1 < krep.cap) {
        for k in 0..n {
            let t = krep.section_coords(gamma, k);
            let rest = &t - &qb * (qb.adjoint() * &t);
            if t.norm() > 0.0 && rest.norm() > 1e-6 * t.norm() {
                chosen = Some((gamma.clone(), k));
                break 'outer;
            }
        }
    }
    let (gamma, k) = chosen.ok_or_else(|| Error::NotFound("no section orthogonal to ran B".into()))?;
    // F = t_gamma e_k minus its K(b)-projection onto the columns of B.
    let gb = bmat.adjoint() * &bmat;
    let pair = bmat.adjoint() * krep.section_coords(&gamma, k);
    let c = pinv(&gb, 1e-12) * pair;
    let mut f = section_polynomial(krep, &gamma, k);
    let mut idx = 0;
    for comp in &sol.components {
        for l in 0..n {
            f = f.sub(&comp.column(l).scale(c[idx]))?;
            idx += 1;
        }
    }
    let zf: Vec<MatPoly> = (0..d).map(|j| f.shift_by(&MultiIndex::unit(d, j))).collect();
    let certificate = zf[1].shift_by(&MultiIndex::unit(d, 0)).sub(&zf[0].shift_by(&MultiIndex::unit(d, 1)))?.max_abs();
    let mut membership = 0.0f64;
    let mut lcoords = Vec::new();
    for p in &zf {
        let kc = krep.coords_from_taylor(p);
        let back = krep.taylor_coeffs(&kc);
        membership = membership.max(back.sub(&p.truncate(krep.cap))?.max_abs() / p.max_abs().max(1e-300));
        lcoords.push(uinv.adjoint() * kc);
    }
    let r = vrep.r();
    let mut hvec = DVector::<C64>::zeros(d * r);
    hvec.rows_mut(0, r).copy_from(&(-&lcoords[1]));
    hvec.rows_mut(r, r).copy_from(&lcoords[0]);
    let ratio = (&vrep.v * &hvec).norm() / hvec.norm();
    let id = DMatrix::<C64>::identity(n, n);
    let mut pointwise = 0.0f64;
    for p in &plan.points {
        let z = p.coords();
        let m = id.clone() - krep.b.eval(z)?;
        let fz = f.eval(z)?;
        let h1 = solve(&m, &(&fz * z[0]))?;
        let h2 = solve(&m, &(&fz * z[1]))?;
        pointwise = pointwise.max(max_abs(&(h2 * (-z[0]) + h1 * z[1])));
    }
    Ok(KernelWitness { f, ratio, certificate, pointwise, membership })
}

/// Clark-type row attached to a unitary `A` and the minimal solution:
/// its adjoint is `X^* + B A^* (I - b(0) A^*)^{-1} k_0^*`.
#[derive(Clone, Debug)]
pub struct ClarkRow {
    /// `(d r) x r` matrix of the adjoint in orthonormal coordinates.
    pub cstar: DMatrix<C64>,
    /// `||I - C C^*||`.
    pub coisometry_defect: f64,
}

pub fn clark_perturbation(
    x: &GleasonX,
    sol: &GleasonB,
    minimal: &GleasonB,
    krep: &KernelSpanRep,
    a: &DMatrix<C64>,
    psd_tol: f64,
    op_tol: f64,
) -> Result<ClarkRow> {
    let n = krep.n;
    if a.nrows() != n || a.ncols() != n {
        return Err(Error::DimensionMismatch("A must be n x n".into()));
    }
    let id = DMatrix::<C64>::identity(n, n);
    if op_norm(&(a.adjoint() * a - &id)) > op_tol {
        return Err(Error::Precondition("A is not unitary".into()));
    }
    if minimality_compare(minimal, sol, psd_tol).verdict != Ordering::Equal {
        return Err(Error::Precondition("the Gleason solution is not minimal".into()));
    }
    let b0 = krep.b.coeff(&MultiIndex::zero(krep.d));
    let mid = solve(&(&id - &b0 * a.adjoint()).adjoint(), &a)?.adjoint();
    let r = krep.rank();
    let k0 = krep.origin_coords();
    let mut cstar = x.xstar.clone();
    for j in 0..krep.d {
        let term = &sol.coords[j] * &mid * k0.adjoint();
        let mut blk = cstar.rows_mut(j * r, r);
        blk += term;
    }
    let coisometry_defect = op_norm(&(cstar.adjoint() * &cstar - DMatrix::identity(r, r)));
    Ok(ClarkRow { cstar, coisometry_defect })
}

/// Values `sum_j z_j H_j(z)` are exact zeros for the witness; this evaluates one
/// component of `H` at a point for reports.
pub fn witness_value(krep: &KernelSpanRep, f: &MatPoly, z: &BallPoint, j: usize) -> Result<DMatrix<C64>> {
    let n = krep.n;
    let m = DMatrix::<C64>::identity(n, n) - krep.b.eval(z.coords())?;
    solve(&m, &(f.eval(z.coords())? * z.coords()[j]))
}
