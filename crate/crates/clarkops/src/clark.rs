//! The canonical partial isometry `V` on the Herglotz space `L(b)`, its
//! extensions, moments, quasi-extremality tests and Clark perturbations.
//!
//! `V` is determined by `V (conj(w) (x) K_w h) = (K_w - K_0) h`. Expanding in
//! `conj(w)` gives its action on Taylor sections: the domain vector
//! `u_{gamma,h} = sum_j e_j (x) T_{gamma - e_j} h` goes to `T_gamma h`, for
//! `1 <= |gamma|`. The finite representation keeps these for `|gamma| <= N`, so it
//! coincides with `V` on the span of the kept domain vectors and vanishes on the
//! rest of `span{T} (x) C^d`.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::kernel::BallPoint;
use crate::linalg::{gram_of_columns, hermitian_eigen, op_norm, range_basis, solve, top_generalized_eigen};
use crate::model::{hat_row, inner_check, minimality_check};
use crate::poly::{da_gram, indices_of_degree, indices_up_to, MatPoly, MultiIndex};
use crate::span::{KernelSpanRep, GRAM_CUTOFF};
use crate::{Error, Result, C64};

/// Finite representation of `V : dom(V) -> L(b)` in orthonormal coordinates.
#[derive(Clone, Debug)]
pub struct PartialIsometryRep {
    pub rep: KernelSpanRep,
    pub d: usize,
    /// `r x (d r)` matrix; block `j` is `V_j`, with `V (f_1, ..., f_d) = sum_j V_j f_j`.
    pub v: DMatrix<C64>,
    /// Orthonormal basis of the represented domain, `(d r) x k`.
    pub dom_basis: DMatrix<C64>,
    /// Image of `dom_basis`, `r x k`.
    pub ran_basis: DMatrix<C64>,
    /// `||E^* E - I||` for the image `E` of the domain basis.
    pub isometry_defect: f64,
}

impl PartialIsometryRep {
    pub fn r(&self) -> usize {
        self.rep.rank()
    }

    pub fn n(&self) -> usize {
        self.rep.n
    }

    /// Block `V_j`, `r x r`.
    pub fn component(&self, j: usize) -> DMatrix<C64> {
        let r = self.r();
        self.v.columns(j * r, r).into_owned()
    }

    /// `V^*`, `(d r) x r`.
    pub fn adjoint(&self) -> DMatrix<C64> {
        self.v.adjoint()
    }

    /// Orthogonal projection onto the represented domain.
    pub fn dom_projector(&self) -> DMatrix<C64> {
        &self.dom_basis * self.dom_basis.adjoint()
    }

    /// Orthogonal projection onto the represented range.
    pub fn ran_projector(&self) -> DMatrix<C64> {
        &self.v * self.v.adjoint()
    }

    /// `||I - V V^*||`, zero exactly when the represented `V` is a coisometry.
    pub fn coisometry_defect(&self) -> f64 {
        let r = self.r();
        op_norm(&(DMatrix::identity(r, r) - self.ran_projector()))
    }

    /// `V z^* = sum_j conj(z_j) V_j`, with `z^* : f -> conj(z) (x) f`.
    fn times_zstar(&self, z: &BallPoint) -> DMatrix<C64> {
        let r = self.r();
        let mut out = DMatrix::zeros(r, r);
        for (j, c) in z.coords().iter().enumerate() {
            out += self.v.columns(j * r, r) * c.conj();
        }
        out
    }
}

/// Builds `V` on the Taylor-section representation of `L(b)` of degree `cap`.
pub fn build_vb(b: &MatPoly, cap: usize, psd_tol: f64) -> Result<PartialIsometryRep> {
    if cap < 1 {
        return Err(Error::Precondition("representation degree must be at least 1".into()));
    }
    let rep = KernelSpanRep::herglotz(b, cap, psd_tol)?;
    let d = rep.d;
    let n = rep.n;
    let r = rep.rank();
    let mut a_cols = Vec::new();
    let mut b_cols = Vec::new();
    for gamma in indices_up_to(d, cap).into_iter().filter(|g| !g.is_zero()) {
        for k in 0..n {
            let col = domain_vector(&rep, &gamma, k);
            let img = rep.section_coords(&gamma, k);
            let s = img.norm().max(col.norm());
            if s > 0.0 {
                a_cols.push(col / C64::new(s, 0.0));
                b_cols.push(img / C64::new(s, 0.0));
            }
        }
    }
    let a = DMatrix::from_columns(&a_cols);
    let bm = DMatrix::from_columns(&b_cols);
    // Right singular vectors of `a` from the eigenvectors of its Gram matrix.
    let (vals, w) = hermitian_eigen(&gram_of_columns(&a));
    let lmax = vals.max();
    let keep: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] > GRAM_CUTOFF * lmax).collect();
    let k = keep.len();
    let mut dom_basis = DMatrix::zeros(d * r, k);
    let mut ran_basis = DMatrix::zeros(r, k);
    for (c, &i) in keep.iter().enumerate() {
        let s = C64::new(vals[i].sqrt(), 0.0);
        let wi = w.column(i);
        dom_basis.set_column(c, &(&a * wi / s));
        ran_basis.set_column(c, &(&bm * wi / s));
    }
    let v = &ran_basis * dom_basis.adjoint();
    let isometry_defect = op_norm(&(ran_basis.adjoint() * &ran_basis - DMatrix::identity(k, k)));
    Ok(PartialIsometryRep { rep, d, v, dom_basis, ran_basis, isometry_defect })
}

/// Residual of the resolvent identity `(I - V z^*)^{-1} K_0 h = K_z h`.
#[derive(Clone, Debug)]
pub struct ResolventReport {
    /// Upper bound for `||(I - V z^*)^{-1} K_0 h - K_z h|| / ||K_z h||`.
    pub residual: f64,
    /// Part of the residual measured inside the representation.
    pub in_span: f64,
    /// Bound on the neglected Taylor tail of `K_z h`.
    pub tail: f64,
}

/// Coordinates of `(I - V z^*)^{-1} K_0 h`.
pub fn resolvent_apply(vrep: &PartialIsometryRep, z: &BallPoint, h: &DVector<C64>) -> Result<DVector<C64>> {
    let r = vrep.r();
    let m = DMatrix::identity(r, r) - vrep.times_zstar(z);
    let rhs = vrep.rep.origin_coords() * h;
    let x = solve(&m, &DMatrix::from_column_slice(r, 1, rhs.as_slice()))?;
    Ok(x.column(0).into_owned())
}

pub fn resolvent_kernel_check(vrep: &PartialIsometryRep, z: &BallPoint, h: &DVector<C64>) -> Result<ResolventReport> {
    if z.dim() != vrep.d {
        return Err(Error::DimensionMismatch("point dimension".into()));
    }
    let f = resolvent_apply(vrep, z, h)?;
    let section = vrep.rep.kernel_section_coords(z, h);
    let in_span = (&f - &section).norm();
    let tail = vrep.rep.tail_bound(z, h)?;
    let kzz = vrep.rep.kernel(z, z)?;
    let nrm = (h.adjoint() * kzz * h)[(0, 0)].re.max(0.0).sqrt();
    Ok(ResolventReport { residual: (in_span + tail) / nrm, in_span, tail })
}

/// `K_0^* (I - V w^*)^{-1} K_0`, which equals `K(0, w)` when the resolvent identity holds.
pub fn resolvent_compression(vrep: &PartialIsometryRep, w: &BallPoint) -> Result<DMatrix<C64>> {
    let n = vrep.n();
    let k0 = vrep.rep.origin_coords();
    let mut out = DMatrix::zeros(n, n);
    for c in 0..n {
        let h = DVector::from_fn(n, |i, _| if i == c { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) });
        let f = resolvent_apply(vrep, w, &h)?;
        out.set_column(c, &(k0.adjoint() * f));
    }
    Ok(out)
}

/// Maximum word length accepted by the moment routines.
pub const MAX_WORD: usize = 6;

fn word_product(comps: &[DMatrix<C64>], word: &[usize], r: usize) -> DMatrix<C64> {
    let mut acc = DMatrix::identity(r, r);
    for &l in word {
        acc = acc * &comps[l];
    }
    acc
}

/// Moment `K_0^* V^alpha K_0` for a word `alpha` over `{0, ..., d-1}`, with
/// `V^alpha = V_{alpha_1} ... V_{alpha_k}`.
pub fn tight_moment(vrep: &PartialIsometryRep, word: &[usize]) -> Result<DMatrix<C64>> {
    extension_moment(vrep, None, word)
}

/// Moment `K_0^* D^alpha K_0` for the extension `D = V + Y`.
pub fn extension_moment(vrep: &PartialIsometryRep, y: Option<&DMatrix<C64>>, word: &[usize]) -> Result<DMatrix<C64>> {
    if word.len() > MAX_WORD {
        return Err(Error::Precondition(format!("word length {} exceeds {}", word.len(), MAX_WORD)));
    }
    if word.iter().any(|&l| l >= vrep.d) {
        return Err(Error::Precondition("letter outside the alphabet".into()));
    }
    let r = vrep.r();
    let comps: Vec<DMatrix<C64>> = (0..vrep.d)
        .map(|j| {
            let mut c = vrep.component(j);
            if let Some(y) = y {
                c += y.columns(j * r, r);
            }
            c
        })
        .collect();
    let k0 = vrep.rep.origin_coords();
    Ok(k0.adjoint() * word_product(&comps, word, r) * k0)
}

/// All words over `{0, ..., d-1}` with letter count `counts`.
pub fn words_with_counts(counts: &MultiIndex) -> Vec<Vec<usize>> {
    fn rec(rem: &mut Vec<usize>, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for j in 0..rem.len() {
            if rem[j] > 0 {
                rem[j] -= 1;
                cur.push(j);
                rec(rem, left - 1, cur, out);
                cur.pop();
                rem[j] += 1;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut counts.0.clone(), counts.degree(), &mut Vec::new(), &mut out);
    out
}

/// Symmetrised moment `sum_{lambda(alpha) = counts} K_0^* D^alpha K_0`.
pub fn symmetrized_moment(vrep: &PartialIsometryRep, y: Option<&DMatrix<C64>>, counts: &MultiIndex) -> Result<DMatrix<C64>> {
    let n = vrep.n();
    let mut acc = DMatrix::zeros(n, n);
    for w in words_with_counts(counts) {
        acc += extension_moment(vrep, y, &w)?;
    }
    Ok(acc)
}

/// Domain vector `sum_j e_j (x) T_{gamma - e_j} e_k`, which `V` maps to `T_gamma e_k`.
fn domain_vector(rep: &KernelSpanRep, gamma: &MultiIndex, k: usize) -> DVector<C64> {
    let r = rep.rank();
    let mut col = DVector::<C64>::zeros(rep.d * r);
    for j in 0..rep.d {
        if let Some(lower) = gamma.sub_unit(j) {
            col.rows_mut(j * r, r).copy_from(&rep.section_coords(&lower, k));
        }
    }
    col
}

/// Orthonormal bases of the numerical kernel of `V` inside `span{T} (x) C^d` and of
/// the orthogonal complement of its range in `span{T}`.
///
/// Domain vectors of degree `cap + 1` still lie in the represented space although
/// their images do not; the kernel is taken orthogonal to them as well, so that it
/// holds no directions produced only by the truncation.
pub fn defect_spaces(vrep: &PartialIsometryRep) -> (DMatrix<C64>, DMatrix<C64>) {
    fn complement(p: &DMatrix<C64>) -> DMatrix<C64> {
        let (vals, vecs) = hermitian_eigen(p);
        let cols: Vec<DVector<C64>> = (0..vals.len()).filter(|&k| vals[k] < 0.5).map(|k| vecs.column(k).into_owned()).collect();
        if cols.is_empty() {
            DMatrix::zeros(p.nrows(), 0)
        } else {
            DMatrix::from_columns(&cols)
        }
    }
    let rep = &vrep.rep;
    let mut cols: Vec<DVector<C64>> = vrep.dom_basis.column_iter().map(|c| c.into_owned()).collect();
    for gamma in indices_of_degree(rep.d, rep.cap + 1) {
        for k in 0..rep.n {
            let u = domain_vector(rep, &gamma, k);
            let s = u.norm();
            if s > 0.0 {
                cols.push(u / C64::new(s, 0.0));
            }
        }
    }
    let full = range_basis(&DMatrix::from_columns(&cols), GRAM_CUTOFF);
    (complement(&(&full * full.adjoint())), complement(&vrep.ran_projector()))
}

/// Checks the support conditions of an extension `Y : ker V -> (ran V)^perp`
/// with `||Y|| <= 1`.
pub fn check_extension(vrep: &PartialIsometryRep, y: &DMatrix<C64>, op_tol: f64) -> Result<()> {
    let scale = op_norm(y).max(1.0);
    let on_dom = op_norm(&(y * vrep.dom_projector())) / scale;
    let into_ran = op_norm(&(vrep.ran_projector() * y)) / scale;
    if on_dom > op_tol || into_ran > op_tol {
        return Err(Error::Precondition(format!(
            "extension is not supported on ker V -> (ran V)^perp (defects {on_dom:e}, {into_ran:e})"
        )));
    }
    if op_norm(y) > 1.0 + op_tol {
        return Err(Error::Precondition("extension is not contractive".into()));
    }
    Ok(())
}

/// Seeded extension `Y = C R K^*` with Gaussian `R` rescaled to `||Y|| = norm`.
/// `None` when the representation has no room for a nonzero extension.
pub fn sample_extension(vrep: &PartialIsometryRep, norm: f64, seed: u64) -> Option<DMatrix<C64>> {
    let (ker, coker) = defect_spaces(vrep);
    if ker.ncols() == 0 || coker.ncols() == 0 || norm == 0.0 {
        return None;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rmat = DMatrix::from_fn(coker.ncols(), ker.ncols(), |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let s = op_norm(&rmat);
    Some(&coker * rmat * ker.adjoint() * C64::new(norm / s, 0.0))
}

/// Result of one quasi-extremality sub-test.
#[derive(Clone, Debug)]
pub struct SubTest {
    pub name: &'static str,
    pub applicable: bool,
    pub quasi_extreme: Option<bool>,
    pub value: f64,
    pub tolerance: f64,
    pub witness: Option<DVector<C64>>,
}

/// Combined verdict; `quasi_extreme` is `None` when applicable sub-tests disagree.
#[derive(Clone, Debug)]
pub struct QeVerdict {
    pub quasi_extreme: Option<bool>,
    pub agreement: bool,
    pub subtests: Vec<SubTest>,
    pub witness: Option<DVector<C64>>,
}

/// Tolerances and sizes for [`qe_test`].
#[derive(Clone, Debug)]
pub struct QeOptions {
    pub cap: usize,
    pub coisometry_tol: f64,
    pub membership_tol: f64,
    pub op_tol: f64,
    pub rank_tol: f64,
    pub psd_tol: f64,
    pub seed: u64,
}

impl Default for QeOptions {
    fn default() -> Self {
        QeOptions {
            cap: 8,
            coisometry_tol: 1e-8,
            membership_tol: 1e-10,
            op_tol: 1e-10,
            rank_tol: 1e-9,
            psd_tol: 1e-10,
            seed: 0,
        }
    }
}

/// Test (a): `V` coisometric on the representation. A witness `h` maximises the
/// part of `K_0 h` outside the range of `V`.
pub fn qe_coisometry(vrep: &PartialIsometryRep, tol: f64) -> Result<SubTest> {
    let defect = vrep.coisometry_defect();
    let qe = defect < tol;
    let witness = if qe {
        None
    } else {
        let k0 = vrep.rep.origin_coords();
        let r = vrep.r();
        let p = DMatrix::identity(r, r) - vrep.ran_projector();
        let a = k0.adjoint() * &p * &k0;
        let g = k0.adjoint() * &k0;
        Some(top_generalized_eigen(&a, &g)?.1)
    };
    Ok(SubTest { name: "coisometry", applicable: true, quasi_extreme: Some(qe), value: defect, tolerance: tol, witness })
}

/// Test (b): whether some `b h`, `h != 0`, lies in `K(b)`. Membership is measured
/// against the span of the Taylor sections of the de Branges-Rovnyak kernel up to
/// degree `cap`, in the Drury-Arveson metric.
pub fn qe_membership(b: &MatPoly, cap: usize, tol: f64, psd_tol: f64) -> Result<SubTest> {
    let krep = KernelSpanRep::dbr(b, cap, psd_tol)?;
    let deg = b.degree();
    let basis = crate::model::TruncatedBasis::new(b.nvars(), b.rows(), cap + deg);
    let wsqrt: DVector<f64> = basis.metric().map(|w| w.sqrt());
    let mut cols = Vec::new();
    for gamma in &krep.indices {
        for k in 0..krep.n {
            let f = section_polynomial(&krep, gamma, k);
            let v = basis.to_vector(&f)?;
            cols.push(v.component_mul(&wsqrt.map(|x| C64::new(x, 0.0))));
        }
    }
    let sec = DMatrix::from_columns(&cols);
    let q = crate::linalg::range_basis(&sec, 1e-9);
    let mut bcols = Vec::new();
    for k in 0..b.cols() {
        let v = basis.to_vector(&b.column(k))?;
        bcols.push(v.component_mul(&wsqrt.map(|x| C64::new(x, 0.0))));
    }
    let bm = DMatrix::from_columns(&bcols);
    let resid = &bm - &q * (q.adjoint() * &bm);
    let (s, h) = crate::linalg::smallest_right_singular(&resid);
    let qe = s >= tol;
    Ok(SubTest {
        name: "membership",
        applicable: true,
        quasi_extreme: Some(qe),
        value: s,
        tolerance: tol,
        witness: if qe { None } else { Some(h) },
    })
}

/// Polynomial `T_gamma e_k` of the de Branges-Rovnyak kernel.
pub fn section_polynomial(krep: &KernelSpanRep, gamma: &MultiIndex, k: usize) -> MatPoly {
    let mut f = MatPoly::zero(krep.d, krep.n, 1);
    let deg = krep.b.degree();
    for beta in indices_up_to(krep.d, gamma.degree() + deg) {
        let c = krep.coefficient_block(&beta, gamma).columns(k, 1).into_owned();
        if c.iter().any(|x| *x != C64::new(0.0, 0.0)) {
            f.add_term(beta, c);
        }
    }
    f
}

/// Test (c), for inner `b`: a unit `h` with `b h = 0`.
pub fn qe_kernel_of_multiplier(b: &MatPoly, tol: f64) -> Result<SubTest> {
    let mut g = DMatrix::zeros(b.cols(), b.cols());
    g += da_gram(b, b)?;
    let (vals, vecs) = hermitian_eigen(&g);
    let s = vals[0].max(0.0).sqrt();
    let qe = s >= tol;
    Ok(SubTest {
        name: "kernel",
        applicable: true,
        quasi_extreme: Some(qe),
        value: s,
        tolerance: tol,
        witness: if qe { None } else { Some(vecs.column(0).into_owned()) },
    })
}

/// Runs the applicable sub-tests and combines them.
pub fn qe_test(b: &MatPoly, opts: &QeOptions) -> Result<QeVerdict> {
    let mut subtests = Vec::new();
    let vrep = build_vb(b, opts.cap, opts.psd_tol)?;
    subtests.push(qe_coisometry(&vrep, opts.coisometry_tol)?);
    subtests.push(qe_membership(b, opts.cap, opts.membership_tol, opts.psd_tol)?);
    let deg = b.degree();
    let inner = inner_check(b, (2 * deg).max(opts.cap), opts.op_tol)?.inner;
    if inner {
        subtests.push(qe_kernel_of_multiplier(b, opts.op_tol)?);
        if let Some(row) = hat_row(b) {
            let count = (3 * row.cols()).max(20);
            let plan = crate::kernel::SamplePlan::new(b.nvars(), count, 0.6, opts.seed)?;
            let rep = minimality_check(&row, &plan, opts.rank_tol)?;
            let mut witness = rep.null_vector.clone();
            // The null vector of the row lives in the column space of the embedding.
            if let Some(w) = witness.as_mut() {
                let nrm = w.norm();
                *w /= C64::new(nrm, 0.0);
            }
            subtests.push(SubTest {
                name: "minimality",
                applicable: true,
                quasi_extreme: Some(rep.minimal),
                value: rep.rank as f64,
                tolerance: row.cols() as f64,
                witness,
            });
        } else {
            subtests.push(SubTest { name: "minimality", applicable: false, quasi_extreme: None, value: 0.0, tolerance: 0.0, witness: None });
        }
    } else {
        subtests.push(SubTest { name: "kernel", applicable: false, quasi_extreme: None, value: 0.0, tolerance: 0.0, witness: None });
        subtests.push(SubTest { name: "minimality", applicable: false, quasi_extreme: None, value: 0.0, tolerance: 0.0, witness: None });
    }
    let verdicts: Vec<bool> = subtests.iter().filter_map(|t| t.quasi_extreme).collect();
    let agreement = verdicts.windows(2).all(|w| w[0] == w[1]);
    let quasi_extreme = if agreement { verdicts.first().copied() } else { None };
    let witness = if quasi_extreme == Some(false) {
        subtests.iter().find_map(|t| t.witness.clone())
    } else {
        None
    };
    Ok(QeVerdict { quasi_extreme, agreement, subtests, witness })
}
