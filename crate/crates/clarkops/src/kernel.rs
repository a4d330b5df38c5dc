//! Reproducing kernels on the unit ball: Szego, de Branges-Rovnyak and Herglotz.
//!
//! For a Schur multiplier `b` the de Branges-Rovnyak kernel is
//! `k^b(z, w) = (I - b(z) b(w)^*) / (1 - <z, w>)` and, when `I - b` is invertible,
//! the Herglotz kernel is `K^b(z, w) = (H(z) + H(w)^*) / (2 (1 - <z, w>))` with
//! `H = (I - b)^{-1} (I + b)`.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{hermitian_eigen, max_abs, op_norm, solve};
use crate::poly::MatPoly;
use crate::{Error, Result, C64};

/// Point of the open unit ball of `C^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct BallPoint(Vec<C64>);

impl BallPoint {
    pub fn new(coords: Vec<C64>) -> Result<Self> {
        let p = BallPoint(coords);
        if p.norm_sq() >= 1.0 {
            return Err(Error::Precondition(format!(
                "point with |z|^2 = {} is outside the open ball",
                p.norm_sq()
            )));
        }
        Ok(p)
    }

    pub fn origin(d: usize) -> Self {
        BallPoint(vec![C64::new(0.0, 0.0); d])
    }

    pub fn coords(&self) -> &[C64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm_sq(&self) -> f64 {
        self.0.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// `<z, w> = sum_j z_j conj(w_j)`.
    pub fn pairing(&self, w: &BallPoint) -> C64 {
        self.0.iter().zip(&w.0).map(|(a, b)| a * b.conj()).sum()
    }
}

/// Seeded sample of ball points of radius at most `radius`.
///
/// Directions are normalised complex Gaussians and radii are `radius * u^(1/2d)`,
/// which makes the sample uniform in the ball of that radius.
#[derive(Clone, Debug)]
pub struct SamplePlan {
    pub d: usize,
    pub radius: f64,
    pub seed: u64,
    pub points: Vec<BallPoint>,
}

impl SamplePlan {
    pub fn new(d: usize, count: usize, radius: f64, seed: u64) -> Result<Self> {
        if !(radius > 0.0 && radius < 1.0) {
            return Err(Error::Precondition(format!("radius {radius} must lie in (0, 1)")));
        }
        if d == 0 {
            return Err(Error::Precondition("dimension must be positive".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut points = Vec::with_capacity(count);
        for _ in 0..count {
            let v: Vec<C64> = (0..d)
                .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                .collect();
            let nrm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            let u: f64 = rng.gen();
            let r = radius * u.powf(1.0 / (2.0 * d as f64));
            points.push(BallPoint(v.into_iter().map(|c| c * (r / nrm)).collect()));
        }
        Ok(SamplePlan { d, radius, seed, points })
    }

    /// The plan with the origin prepended.
    pub fn with_origin(&self) -> Vec<BallPoint> {
        let mut out = vec![BallPoint::origin(self.d)];
        out.extend(self.points.iter().cloned());
        out
    }
}

/// Szego kernel `1 / (1 - <z, w>)`.
pub fn szego_kernel(z: &BallPoint, w: &BallPoint) -> Result<C64> {
    if z.dim() != w.dim() {
        return Err(Error::DimensionMismatch("points of different dimension".into()));
    }
    Ok(C64::new(1.0, 0.0) / (C64::new(1.0, 0.0) - z.pairing(w)))
}

fn check_vars(b: &MatPoly, z: &BallPoint) -> Result<()> {
    if b.nvars() != z.dim() {
        return Err(Error::DimensionMismatch(format!(
            "multiplier has {} variables, point has {}",
            b.nvars(),
            z.dim()
        )));
    }
    Ok(())
}

/// de Branges-Rovnyak kernel `(I - b(z) b(w)^*) / (1 - <z, w>)`.
pub fn dbr_kernel(b: &MatPoly, z: &BallPoint, w: &BallPoint) -> Result<DMatrix<C64>> {
    check_vars(b, z)?;
    check_vars(b, w)?;
    let bz = b.eval(z.coords())?;
    let bw = b.eval(w.coords())?;
    let n = b.rows();
    let num = DMatrix::identity(n, n) - bz * bw.adjoint();
    Ok(num * szego_kernel(z, w)?)
}

/// Herglotz function `H(z) = (I - b(z))^{-1} (I + b(z))` of a square multiplier.
pub fn herglotz_fn(b: &MatPoly, z: &BallPoint) -> Result<DMatrix<C64>> {
    check_vars(b, z)?;
    if b.rows() != b.cols() {
        return Err(Error::DimensionMismatch("Herglotz function needs a square multiplier".into()));
    }
    let n = b.rows();
    let bz = b.eval(z.coords())?;
    let norm = op_norm(&bz);
    if norm >= 1.0 {
        return Err(Error::NotPurelyContractive { norm });
    }
    let id = DMatrix::<C64>::identity(n, n);
    solve(&(&id - &bz), &(&id + &bz))
}

/// Herglotz kernel, evaluated through both the `H` form and the factorisation
/// `(I - b(z))^{-1} k^b(z, w) (I - b(w)^*)^{-1}`; the two must agree to `cross_tol`
/// relative to the size of the kernel.
pub fn herglotz_kernel(b: &MatPoly, z: &BallPoint, w: &BallPoint, cross_tol: f64) -> Result<DMatrix<C64>> {
    let hz = herglotz_fn(b, z)?;
    let hw = herglotz_fn(b, w)?;
    let s = szego_kernel(z, w)?;
    let direct = (&hz + hw.adjoint()) * (s * 0.5);
    let factored = factored_herglotz_kernel(b, z, w)?;
    let scale = max_abs(&direct).max(1.0);
    let diff = max_abs(&(&direct - &factored)) / scale;
    if diff > cross_tol {
        return Err(Error::CrossCheck { what: "Herglotz kernel factorisation".into(), value: diff, tol: cross_tol });
    }
    Ok(direct)
}

/// `(I - b(z))^{-1} k^b(z, w) (I - b(w)^*)^{-1}`.
pub fn factored_herglotz_kernel(b: &MatPoly, z: &BallPoint, w: &BallPoint) -> Result<DMatrix<C64>> {
    let n = b.rows();
    let id = DMatrix::<C64>::identity(n, n);
    let bz = b.eval(z.coords())?;
    let bw = b.eval(w.coords())?;
    let left = solve(&(&id - &bz), &dbr_kernel(b, z, w)?)?;
    let right_inv = (&id - bw.adjoint()).adjoint();
    // left * (I - b(w)^*)^{-1} = ((I - b(w)) ^{-1} left^*)^*
    let t = solve(&right_inv, &left.adjoint())?;
    Ok(t.adjoint())
}

/// Max-entry discrepancy between the two forms of the Herglotz kernel.
pub fn factorization_residual(b: &MatPoly, z: &BallPoint, w: &BallPoint) -> Result<f64> {
    let hz = herglotz_fn(b, z)?;
    let hw = herglotz_fn(b, w)?;
    let direct = (&hz + hw.adjoint()) * (szego_kernel(z, w)? * 0.5);
    let factored = factored_herglotz_kernel(b, z, w)?;
    Ok(max_abs(&(direct - factored)))
}

/// Max-entry discrepancy in `K(z, w) - K(z, 0) - K(0, w) + K(0, 0) = <z, w> K(z, w)`,
/// the identity that makes `w^* K_w h -> (K_w - K_0) h` isometric.
pub fn vdomain_residual(b: &MatPoly, z: &BallPoint, w: &BallPoint, cross_tol: f64) -> Result<f64> {
    let o = BallPoint::origin(z.dim());
    let kzw = herglotz_kernel(b, z, w, cross_tol)?;
    let lhs = &kzw - herglotz_kernel(b, z, &o, cross_tol)? - herglotz_kernel(b, &o, w, cross_tol)?
        + herglotz_kernel(b, &o, &o, cross_tol)?;
    Ok(max_abs(&(lhs - kzw * z.pairing(w))))
}

/// Which kernel a Gram matrix is built from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelKind {
    Szego,
    DeBrangesRovnyak,
    Herglotz,
}

/// Gram matrix of kernel sections `K_{z_i} h_i` together with its labels.
#[derive(Clone, Debug)]
pub struct GramMatrix {
    pub entries: DMatrix<C64>,
    pub labels: Vec<(usize, DVector<C64>)>,
}

impl GramMatrix {
    /// Smallest eigenvalue after scaling to unit diagonal. Generators of zero norm
    /// are left unscaled and a negative diagonal entry is reported as is.
    pub fn min_normalized_eigenvalue(&self) -> f64 {
        let n = self.entries.nrows();
        let diag: Vec<f64> = (0..n).map(|i| self.entries[(i, i)].re).collect();
        if let Some(neg) = diag.iter().cloned().filter(|&x| x < 0.0).reduce(f64::min) {
            return neg;
        }
        let scale: Vec<f64> = diag.iter().map(|&x| if x > 0.0 { 1.0 / x.sqrt() } else { 1.0 }).collect();
        let m = DMatrix::from_fn(n, n, |i, j| self.entries[(i, j)] * (scale[i] * scale[j]));
        let (v, _) = hermitian_eigen(&m);
        if v.is_empty() {
            0.0
        } else {
            v[0]
        }
    }
}

/// Gram matrix `G_{(i,h),(j,g)} = <K_{z_j} g, K_{z_i} h> = h^* K(z_i, z_j) g` over all
/// pairs of points and vectors; the label order is point-major.
pub fn gram(
    kind: KernelKind,
    b: &MatPoly,
    points: &[BallPoint],
    vectors: &[DVector<C64>],
    cross_tol: f64,
) -> Result<GramMatrix> {
    let labels: Vec<(usize, DVector<C64>)> = (0..points.len())
        .flat_map(|i| vectors.iter().map(move |h| (i, h.clone())))
        .collect();
    let np = points.len();
    let mut blocks = vec![vec![DMatrix::<C64>::zeros(0, 0); np]; np];
    for i in 0..np {
        for j in 0..np {
            blocks[i][j] = match kind {
                KernelKind::Szego => {
                    let n = vectors.first().map(|v| v.len()).unwrap_or(1);
                    DMatrix::identity(n, n) * szego_kernel(&points[i], &points[j])?
                }
                KernelKind::DeBrangesRovnyak => dbr_kernel(b, &points[i], &points[j])?,
                KernelKind::Herglotz => herglotz_kernel(b, &points[i], &points[j], cross_tol)?,
            };
        }
    }
    let m = labels.len();
    let mut entries = DMatrix::zeros(m, m);
    for (a, (i, h)) in labels.iter().enumerate() {
        for (c, (j, g)) in labels.iter().enumerate() {
            entries[(a, c)] = (h.adjoint() * &blocks[*i][*j] * g)[(0, 0)];
        }
    }
    Ok(GramMatrix { entries, labels })
}

/// Outcome of the sampled Schur-class test.
#[derive(Clone, Debug)]
pub struct SchurReport {
    pub psd: bool,
    pub min_eigenvalue: f64,
    pub purely_contractive: bool,
    pub max_norm_at_points: f64,
    /// The test only certifies positivity on the sampled points.
    pub certificate: &'static str,
}

/// Positivity of the de Branges-Rovnyak Gram over the plan (origin included),
/// after unit-diagonal normalisation, together with `||b(z)|| < 1` at every point.
pub fn schur_class_check(b: &MatPoly, plan: &SamplePlan, psd_tol: f64) -> Result<SchurReport> {
    let pts = plan.with_origin();
    let n = b.rows();
    let basis: Vec<DVector<C64>> = (0..n)
        .map(|k| DVector::from_fn(n, |i, _| if i == k { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) }))
        .collect();
    let g = gram(KernelKind::DeBrangesRovnyak, b, &pts, &basis, f64::INFINITY)?;
    let min_eig = g.min_normalized_eigenvalue();
    let mut max_norm: f64 = 0.0;
    for p in &pts {
        max_norm = max_norm.max(op_norm(&b.eval(p.coords())?));
    }
    Ok(SchurReport {
        psd: min_eig >= -psd_tol,
        min_eigenvalue: min_eig,
        purely_contractive: max_norm < 1.0,
        max_norm_at_points: max_norm,
        certificate: "sampled",
    })
}
