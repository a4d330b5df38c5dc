//! Finite kernel-span representations of `K(b)` and `L(b)`.
//!
//! The generators are the Taylor sections of the kernel at the origin: writing
//! `K_w h = sum_gamma conj(w)^gamma T_gamma h`, the representation spans
//! `{T_gamma e_i : |gamma| <= N}`. Their Gram matrix is known in closed form,
//! `<T_beta g, T_gamma h> = g^* C_{beta gamma} h` with `C` the Taylor coefficients of
//! the kernel, and the reproducing property reads `<T_beta e_i, F> = e_i^* F_beta`.
//!
//! Coordinates are orthonormal: with the unit-diagonal Gram `D G D = Q L Q^*`
//! truncated at `1e-10 * max(L)`, generator `a` has coordinates
//! `L^{1/2} Q^* e_a / D_aa`, so inner products become Euclidean.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

use crate::kernel::{dbr_kernel, herglotz_fn, herglotz_kernel, BallPoint};
use crate::linalg::hermitian_eigen;
use crate::poly::{indices_up_to, szego_coeff, MatPoly, MultiIndex};
use crate::series::herglotz_series;
use crate::{Error, Result, C64};

/// Relative eigenvalue cutoff for the normalised Gram matrix.
pub const GRAM_CUTOFF: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpanKernel {
    /// `(I - b(z) b(w)^*) / (1 - <z, w>)`, the kernel of `K(b)`.
    DeBrangesRovnyak,
    /// `(H(z) + H(w)^*) / (2 (1 - <z, w>))`, the kernel of `L(b)`.
    Herglotz,
}

/// Span of the Taylor sections `T_gamma e_i`, `|gamma| <= cap`, in orthonormal
/// coordinates.
#[derive(Clone, Debug)]
pub struct KernelSpanRep {
    pub kind: SpanKernel,
    pub d: usize,
    pub n: usize,
    pub cap: usize,
    pub b: MatPoly,
    pub indices: Vec<MultiIndex>,
    pos: BTreeMap<MultiIndex, usize>,
    sz: Vec<f64>,
    series: MatPoly,
    pub gram: DMatrix<C64>,
    /// `r x M` coordinates of the generators.
    pub phi: DMatrix<C64>,
    /// `M x r` generator coefficients of the orthonormal basis vectors.
    pub lift: DMatrix<C64>,
    pub min_normalized_eigenvalue: f64,
    pub smallest_kept: f64,
}

impl KernelSpanRep {
    /// Representation of `L(b)`; needs `I - b(0)` invertible and `b` square.
    pub fn herglotz(b: &MatPoly, cap: usize, psd_tol: f64) -> Result<Self> {
        if b.rows() != b.cols() {
            return Err(Error::DimensionMismatch("Herglotz space needs a square multiplier".into()));
        }
        herglotz_fn(b, &BallPoint::origin(b.nvars()))?;
        let series = herglotz_series(b, cap)?;
        Self::build(SpanKernel::Herglotz, b, series, cap, psd_tol)
    }

    /// Representation of `K(b)`.
    pub fn dbr(b: &MatPoly, cap: usize, psd_tol: f64) -> Result<Self> {
        Self::build(SpanKernel::DeBrangesRovnyak, b, b.clone(), cap, psd_tol)
    }

    fn build(kind: SpanKernel, b: &MatPoly, series: MatPoly, cap: usize, psd_tol: f64) -> Result<Self> {
        let d = b.nvars();
        let n = b.rows();
        let indices = indices_up_to(d, cap);
        let pos: BTreeMap<MultiIndex, usize> = indices.iter().cloned().enumerate().map(|(i, a)| (a, i)).collect();
        let sz: Vec<f64> = indices.iter().map(szego_coeff).collect();
        let mut rep = KernelSpanRep {
            kind,
            d,
            n,
            cap,
            b: b.clone(),
            indices,
            pos,
            sz,
            series,
            gram: DMatrix::zeros(0, 0),
            phi: DMatrix::zeros(0, 0),
            lift: DMatrix::zeros(0, 0),
            min_normalized_eigenvalue: 0.0,
            smallest_kept: 0.0,
        };
        rep.gram = rep.assemble_gram();
        rep.factor(psd_tol)?;
        Ok(rep)
    }

    /// Number of generators.
    pub fn size(&self) -> usize {
        self.indices.len() * self.n
    }

    /// Dimension of the represented subspace.
    pub fn rank(&self) -> usize {
        self.phi.nrows()
    }

    pub fn generator(&self, beta: &MultiIndex, i: usize) -> Option<usize> {
        self.pos.get(beta).map(|p| p * self.n + i)
    }

    fn sz_of(&self, a: &MultiIndex) -> f64 {
        match self.pos.get(a) {
            Some(&p) => self.sz[p],
            None => szego_coeff(a),
        }
    }

    /// Taylor coefficient `C_{beta gamma}` of the kernel.
    pub fn coefficient_block(&self, beta: &MultiIndex, gamma: &MultiIndex) -> DMatrix<C64> {
        let n = self.n;
        let mut out = DMatrix::<C64>::zeros(n, n);
        match self.kind {
            SpanKernel::Herglotz => {
                if let Some(t) = gamma.checked_sub(beta) {
                    out += self.series.coeff(&t).adjoint() * C64::new(0.5 * self.sz_of(beta), 0.0);
                }
                if let Some(s) = beta.checked_sub(gamma) {
                    out += self.series.coeff(&s) * C64::new(0.5 * self.sz_of(gamma), 0.0);
                }
            }
            SpanKernel::DeBrangesRovnyak => {
                if beta == gamma {
                    out += DMatrix::<C64>::identity(n, n) * C64::new(self.sz_of(beta), 0.0);
                }
                for (s, bs) in self.b.terms() {
                    let Some(alpha) = beta.checked_sub(s) else { continue };
                    let Some(t) = gamma.checked_sub(&alpha) else { continue };
                    let bt = self.b.coeff(&t);
                    out -= bs * bt.adjoint() * C64::new(self.sz_of(&alpha), 0.0);
                }
            }
        }
        out
    }

    fn assemble_gram(&self) -> DMatrix<C64> {
        let m = self.size();
        let n = self.n;
        let mut g = DMatrix::zeros(m, m);
        for (p, beta) in self.indices.iter().enumerate() {
            for (q, gamma) in self.indices.iter().enumerate().skip(p) {
                let blk = self.coefficient_block(beta, gamma);
                for i in 0..n {
                    for k in 0..n {
                        g[(p * n + i, q * n + k)] = blk[(i, k)];
                        g[(q * n + k, p * n + i)] = blk[(i, k)].conj();
                    }
                }
            }
        }
        g
    }

    fn factor(&mut self, psd_tol: f64) -> Result<()> {
        let m = self.size();
        let diag: Vec<f64> = (0..m).map(|a| self.gram[(a, a)].re).collect();
        let dmax = diag.iter().cloned().fold(0.0, f64::max);
        let scale: Vec<f64> = diag
            .iter()
            .map(|&x| if x > 1e-13 * dmax { 1.0 / x.sqrt() } else { 0.0 })
            .collect();
        let gn = DMatrix::from_fn(m, m, |i, j| self.gram[(i, j)] * (scale[i] * scale[j]));
        let (vals, vecs) = hermitian_eigen(&gn);
        let lmax = vals[m - 1];
        self.min_normalized_eigenvalue = vals[0] / lmax;
        if vals[0] < -psd_tol * lmax {
            return Err(Error::Precondition(format!(
                "kernel Gram is not positive semidefinite: min eigenvalue {:e}",
                vals[0] / lmax
            )));
        }
        let keep: Vec<usize> = (0..m).filter(|&k| vals[k] > GRAM_CUTOFF * lmax).collect();
        let r = keep.len();
        let mut phi = DMatrix::zeros(r, m);
        let mut lift = DMatrix::zeros(m, r);
        for (row, &k) in keep.iter().enumerate() {
            let s = vals[k].sqrt();
            for a in 0..m {
                let q = vecs[(a, k)];
                if scale[a] > 0.0 {
                    phi[(row, a)] = q.conj() * (s / scale[a]);
                    lift[(a, row)] = q * (scale[a] / s);
                }
            }
        }
        self.smallest_kept = keep.first().map(|&k| vals[k] / lmax).unwrap_or(0.0);
        self.phi = phi;
        self.lift = lift;
        Ok(())
    }

    /// Coordinates of `T_beta e_i`.
    pub fn section_coords(&self, beta: &MultiIndex, i: usize) -> DVector<C64> {
        match self.generator(beta, i) {
            Some(a) => self.phi.column(a).into_owned(),
            None => DVector::zeros(self.rank()),
        }
    }

    /// `r x n` coordinates of `K_0 e_1, ..., K_0 e_n`.
    pub fn origin_coords(&self) -> DMatrix<C64> {
        self.phi.columns(0, self.n).into_owned()
    }

    /// Taylor coefficients `F_beta`, `|beta| <= cap`, of the element with coordinates `y`.
    pub fn taylor_coeffs(&self, y: &DVector<C64>) -> MatPoly {
        let p = self.phi.adjoint() * y;
        let mut out = MatPoly::zero(self.d, self.n, 1);
        for (k, beta) in self.indices.iter().enumerate() {
            let c = DMatrix::from_fn(self.n, 1, |i, _| p[k * self.n + i]);
            out.add_term(beta.clone(), c);
        }
        out
    }

    /// Coordinates of the orthogonal projection onto the span of a function of the
    /// space, given its Taylor coefficients up to `cap`.
    pub fn coords_from_taylor(&self, f: &MatPoly) -> DVector<C64> {
        let mut p = DVector::zeros(self.size());
        for (k, beta) in self.indices.iter().enumerate() {
            let c = f.coeff(beta);
            for i in 0..self.n {
                p[k * self.n + i] = c[(i, 0)];
            }
        }
        self.lift.adjoint() * p
    }

    /// `T_gamma` evaluated at `z`: the coefficient of `conj(w)^gamma` in `K(z, w)`.
    pub fn section_value(&self, gamma: &MultiIndex, z: &BallPoint) -> Result<DMatrix<C64>> {
        let n = self.n;
        let zc = z.coords();
        let mut out = DMatrix::<C64>::zeros(n, n);
        match self.kind {
            SpanKernel::Herglotz => {
                let hz = herglotz_fn(&self.b, z)?;
                out += hz * (gamma.monomial(zc) * (0.5 * self.sz_of(gamma)));
                for (t, ht) in self.series.terms() {
                    if let Some(alpha) = gamma.checked_sub(t) {
                        out += ht.adjoint() * (alpha.monomial(zc) * (0.5 * self.sz_of(&alpha)));
                    }
                }
            }
            SpanKernel::DeBrangesRovnyak => {
                out += DMatrix::<C64>::identity(n, n) * (gamma.monomial(zc) * self.sz_of(gamma));
                let bz = self.b.eval(zc)?;
                for (t, bt) in self.b.terms() {
                    if let Some(alpha) = gamma.checked_sub(t) {
                        out -= &bz * bt.adjoint() * (alpha.monomial(zc) * self.sz_of(&alpha));
                    }
                }
            }
        }
        Ok(out)
    }

    /// Value at `z` of the element with coordinates `y`.
    pub fn eval(&self, y: &DVector<C64>, z: &BallPoint) -> Result<DVector<C64>> {
        let c = &self.lift * y;
        let mut out = DVector::zeros(self.n);
        for (k, gamma) in self.indices.iter().enumerate() {
            let v = self.section_value(gamma, z)?;
            for i in 0..self.n {
                let ca = c[k * self.n + i];
                if ca != C64::new(0.0, 0.0) {
                    out += v.column(i) * ca;
                }
            }
        }
        Ok(out)
    }

    /// Coordinates of the degree-`cap` Taylor section of `K_z h`.
    pub fn kernel_section_coords(&self, z: &BallPoint, h: &DVector<C64>) -> DVector<C64> {
        let mut out = DVector::zeros(self.rank());
        for (k, beta) in self.indices.iter().enumerate() {
            let c = beta.monomial(z.coords()).conj();
            for i in 0..self.n {
                if h[i] != C64::new(0.0, 0.0) {
                    out += self.phi.column(k * self.n + i) * (c * h[i]);
                }
            }
        }
        out
    }

    /// Exact kernel value `K(z, w)`.
    pub fn kernel(&self, z: &BallPoint, w: &BallPoint) -> Result<DMatrix<C64>> {
        match self.kind {
            SpanKernel::Herglotz => herglotz_kernel(&self.b, z, w, 1e-10),
            SpanKernel::DeBrangesRovnyak => dbr_kernel(&self.b, z, w),
        }
    }

    /// Upper bound for `||K_z h - (degree-cap section of K_z h)||`.
    ///
    /// The homogeneous pieces `sum_{|gamma| = k} conj(z)^gamma T_gamma h` have norm
    /// `|z|^k (h^* Re H(0) h)^{1/2}` in `L(b)` and at most `|z|^k ||h||` in `K(b)`.
    pub fn tail_bound(&self, z: &BallPoint, h: &DVector<C64>) -> Result<f64> {
        let r = z.norm();
        let level = match self.kind {
            SpanKernel::Herglotz => {
                let h0 = self.series.coeff(&MultiIndex::zero(self.d));
                let re_h0 = (&h0 + h0.adjoint()) * C64::new(0.5, 0.0);
                (h.adjoint() * re_h0 * h)[(0, 0)].re.max(0.0).sqrt()
            }
            SpanKernel::DeBrangesRovnyak => h.norm(),
        };
        Ok(level * r.powi(self.cap as i32 + 1) / (1.0 - r))
    }

    /// Taylor coefficients of the series used to build the kernel (`H` or `b`).
    pub fn series(&self) -> &MatPoly {
        &self.series
    }
}

/// Degree large enough that `radius^(N+1) / (1 - radius)` drops below `tol`.
pub fn degree_for_radius(radius: f64, tol: f64) -> usize {
    let mut n = 1;
    while radius.powi(n as i32 + 1) / (1.0 - radius) > tol && n < 200 {
        n += 1;
    }
    n
}
