//! One-variable Clark theory for finite Blaschke products.
//!
//! For inner `b` with `b(0) = 0` the space `K(b) = H^2 ominus b H^2` has dimension
//! `deg b`, the Aleksandrov-Clark measures `mu_alpha` are atomic, and the Clark
//! perturbations `X^alpha f = S^* f + f(0) conj(alpha) S^* b` are unitary. Functions
//! are handled through their values on an equispaced circle grid, which integrates
//! the rational integrands involved to machine precision.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::linalg::{eigen, eigenvalues, op_norm, rank};
use crate::poly::{MatPoly, MultiIndex};
use crate::{Error, Result, C64};

/// Spectral atoms of `X^alpha` are the complex conjugates of the atoms of `mu_alpha`.
pub const ORIENTATION: Orientation = Orientation::Conjugate;

/// `b(z) = c prod_k (z - a_k) / (1 - conj(a_k) z)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteBlaschke {
    zeros: Vec<C64>,
    unimodular: C64,
}

/// Atomic measure on the unit circle.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteMeasure {
    pub atoms: Vec<C64>,
    pub weights: Vec<f64>,
}

impl DiscreteMeasure {
    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }
}

impl FiniteBlaschke {
    pub fn new(zeros: Vec<C64>, unimodular: C64) -> Result<Self> {
        if zeros.is_empty() {
            return Err(Error::Precondition("a Blaschke product needs at least one zero".into()));
        }
        if zeros.iter().any(|a| a.norm() >= 1.0) {
            return Err(Error::Precondition("Blaschke zeros must lie in the open disk".into()));
        }
        if (unimodular.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::Precondition("the constant factor must be unimodular".into()));
        }
        Ok(FiniteBlaschke { zeros, unimodular })
    }

    /// Reads `c z^m` with `|c| = 1` from a scalar one-variable polynomial; other
    /// polynomials are not inner.
    pub fn from_poly(p: &MatPoly) -> Result<Self> {
        if p.nvars() != 1 || p.rows() != 1 || p.cols() != 1 {
            return Err(Error::Precondition("inner required: expected a scalar polynomial in one variable".into()));
        }
        let terms: Vec<_> = p.terms().iter().collect();
        match terms.as_slice() {
            [(alpha, c)] if alpha.degree() > 0 && (c[(0, 0)].norm() - 1.0).abs() <= 1e-12 => {
                Self::new(vec![C64::new(0.0, 0.0); alpha.degree()], c[(0, 0)])
            }
            _ => Err(Error::Precondition("inner required: a polynomial is inner only when it is a unimodular monomial".into())),
        }
    }

    pub fn zeros(&self) -> &[C64] {
        &self.zeros
    }

    pub fn degree(&self) -> usize {
        self.zeros.len()
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.zeros.iter().fold(self.unimodular, |acc, a| acc * (z - a) / (C64::new(1.0, 0.0) - a.conj() * z))
    }

    /// `b'(z)` from the logarithmic derivative, valid away from the zeros.
    pub fn derivative(&self, z: C64) -> C64 {
        let one = C64::new(1.0, 0.0);
        let mut value = self.unimodular;
        let mut dvalue = C64::new(0.0, 0.0);
        for a in &self.zeros {
            let f = (z - a) / (one - a.conj() * z);
            let df = (one - a.norm_sqr()) / ((one - a.conj() * z) * (one - a.conj() * z));
            dvalue = dvalue * f + value * df;
            value *= f;
        }
        dvalue
    }

    /// Numerator `c prod (z - a_k)` and denominator `prod (1 - conj(a_k) z)` as
    /// ascending coefficient vectors.
    pub fn numerator_denominator(&self) -> (Vec<C64>, Vec<C64>) {
        let one = C64::new(1.0, 0.0);
        let mut p = vec![self.unimodular];
        let mut q = vec![one];
        for a in &self.zeros {
            p = poly_mul(&p, &[-a, one]);
            q = poly_mul(&q, &[one, -a.conj()]);
        }
        (p, q)
    }

    /// `max | |b(zeta)| - 1 |` over `samples` equispaced boundary points.
    pub fn boundary_defect(&self, samples: usize) -> f64 {
        circle(samples, 0.0).into_iter().map(|z| (self.eval(z).norm() - 1.0).abs()).fold(0.0, f64::max)
    }

    /// Number of circle points that integrate products of `K(b)` functions exactly
    /// to double precision.
    pub fn quadrature_size(&self) -> usize {
        let rho = self.zeros.iter().map(|a| a.norm()).fold(0.0, f64::max);
        let needed = if rho > 0.0 { (40.0 / -rho.ln()).ceil() as usize } else { 0 };
        (4 * self.degree() + 64).max(needed).next_power_of_two()
    }
}

fn poly_mul(p: &[C64], q: &[C64]) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); p.len() + q.len() - 1];
    for (i, a) in p.iter().enumerate() {
        for (j, b) in q.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}

fn poly_eval(p: &[C64], z: C64) -> C64 {
    p.iter().rev().fold(C64::new(0.0, 0.0), |acc, c| acc * z + c)
}

/// `n` equispaced points on the unit circle, rotated by `offset` radians.
fn circle(n: usize, offset: f64) -> Vec<C64> {
    (0..n).map(|k| C64::from_polar(1.0, offset + 2.0 * PI * k as f64 / n as f64)).collect()
}

/// Roots of a polynomial (ascending coefficients) from the companion matrix.
fn roots(p: &[C64]) -> Result<Vec<C64>> {
    let m = p.len() - 1;
    let lead = p[m];
    if lead.norm() == 0.0 {
        return Err(Error::Numerical("leading coefficient vanishes".into()));
    }
    let mut comp = DMatrix::<C64>::zeros(m, m);
    for i in 1..m {
        comp[(i, i - 1)] = C64::new(1.0, 0.0);
    }
    for i in 0..m {
        comp[(i, m - 1)] = -p[i] / lead;
    }
    Ok(eigenvalues(&comp))
}

/// Aleksandrov-Clark measure of `b conj(alpha)`: atoms at the solutions of
/// `b(zeta) = alpha`, weights `1 / |b'(zeta)|`. The weights are checked against the
/// Herglotz formula before they are returned.
pub fn ac_measure(b: &FiniteBlaschke, alpha: C64) -> Result<DiscreteMeasure> {
    if (alpha.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::Precondition("alpha must be unimodular".into()));
    }
    let (p, q) = b.numerator_denominator();
    let f: Vec<C64> = p.iter().zip(&q).map(|(a, c)| a - alpha * c).collect();
    let mut atoms = Vec::new();
    for mut z in roots(&f)? {
        for _ in 0..8 {
            let df: Vec<C64> = f.iter().enumerate().skip(1).map(|(k, c)| c * k as f64).collect();
            let step = poly_eval(&f, z) / poly_eval(&df, z);
            if !step.is_finite() {
                break;
            }
            z -= step;
        }
        if (z.norm() - 1.0).abs() > 1e-8 {
            return Err(Error::Numerical(format!("root {z} of b = alpha is off the circle")));
        }
        atoms.push(z / z.norm());
    }
    if atoms.len() != b.degree() {
        return Err(Error::Numerical("wrong number of boundary roots".into()));
    }
    for i in 0..atoms.len() {
        for j in 0..i {
            if (atoms[i] - atoms[j]).norm() < 1e-6 {
                return Err(Error::Numerical("boundary roots are not simple".into()));
            }
        }
    }
    atoms.sort_by(|x, y| x.arg().total_cmp(&y.arg()));
    let weights = atoms.iter().map(|z| 1.0 / b.derivative(*z).norm()).collect();
    let measure = DiscreteMeasure { atoms, weights };
    let residual = herglotz_verify(|z| b.eval(z), alpha, &measure, &herglotz_points(50, 0.9));
    if residual > 1e-10 {
        return Err(Error::CrossCheck { what: "Herglotz representation of the atomic measure".into(), value: residual, tol: 1e-10 });
    }
    Ok(measure)
}

/// Deterministic test points in the disk: a spiral of radii up to `radius`.
pub fn herglotz_points(count: usize, radius: f64) -> Vec<C64> {
    (0..count)
        .map(|k| {
            let t = (k as f64 + 0.5) / count as f64;
            C64::from_polar(radius * t.sqrt(), 2.399_963_229_728_653 * k as f64)
        })
        .collect()
}

/// `max |H(z) - i Im H(0) - sum_k w_k (1 + z conj(zeta_k)) / (1 - z conj(zeta_k))|`
/// with `H = (1 + b conj(alpha)) / (1 - b conj(alpha))`.
pub fn herglotz_verify(b: impl Fn(C64) -> C64, alpha: C64, measure: &DiscreteMeasure, points: &[C64]) -> f64 {
    let one = C64::new(1.0, 0.0);
    let h = |z: C64| {
        let t = b(z) * alpha.conj();
        (one + t) / (one - t)
    };
    let im0 = C64::new(0.0, h(C64::new(0.0, 0.0)).im);
    points
        .iter()
        .map(|&z| {
            let integral: C64 = measure
                .atoms
                .iter()
                .zip(&measure.weights)
                .map(|(zeta, w)| (one + z * zeta.conj()) / (one - z * zeta.conj()) * *w)
                .sum();
            (h(z) - im0 - integral).norm()
        })
        .fold(0.0, f64::max)
}

/// `Re H(0) = (1 - |b(0)|^2) / |1 - b(0) conj(alpha)|^2`, the total mass of `mu_alpha`.
pub fn expected_mass(b0: C64, alpha: C64) -> f64 {
    (1.0 - b0.norm_sqr()) / (C64::new(1.0, 0.0) - b0 * alpha.conj()).norm_sqr()
}

/// Trapezoid integral of the density `(1 - |b|^2) / |1 - b conj(alpha)|^2` over
/// `samples` boundary points, against normalized arc length.
pub fn density_mass(b: impl Fn(C64) -> C64, alpha: C64, samples: usize) -> f64 {
    let one = C64::new(1.0, 0.0);
    circle(samples, 0.0)
        .into_iter()
        .map(|z| {
            let v = b(z);
            (1.0 - v.norm_sqr()) / (one - v * alpha.conj()).norm_sqr()
        })
        .sum::<f64>()
        / samples as f64
}

/// Takenaka-Malmquist orthonormal basis of `K(b)`, sampled on a circle grid.
#[derive(Clone, Debug)]
pub struct ModelBasis {
    pub nodes: Vec<C64>,
    /// `values[(node, k)] = e_k(node)`.
    pub values: DMatrix<C64>,
    /// `e_k(0)`.
    pub at_origin: DVector<C64>,
}

impl ModelBasis {
    pub fn new(b: &FiniteBlaschke) -> Self {
        let nodes = circle(b.quadrature_size(), 0.0);
        let m = b.degree();
        let mut values = DMatrix::zeros(nodes.len(), m);
        for (i, z) in nodes.iter().enumerate() {
            for k in 0..m {
                values[(i, k)] = tm_function(b.zeros(), k, *z);
            }
        }
        let at_origin = DVector::from_fn(m, |k, _| tm_function(b.zeros(), k, C64::new(0.0, 0.0)));
        ModelBasis { nodes, values, at_origin }
    }

    pub fn dim(&self) -> usize {
        self.values.ncols()
    }

    /// `<f, g>_{H^2}` for sampled functions.
    pub fn inner(&self, f: &DVector<C64>, g: &DVector<C64>) -> C64 {
        g.dotc(f) / self.nodes.len() as f64
    }

    /// Coordinates `<f, e_k>` of a sampled function.
    pub fn coords(&self, f: &DVector<C64>) -> DVector<C64> {
        self.values.adjoint() * f / C64::new(self.nodes.len() as f64, 0.0)
    }

    /// `||G - I||` for the Gram matrix of the basis.
    pub fn orthonormality_defect(&self) -> f64 {
        let g = self.values.adjoint() * &self.values / C64::new(self.nodes.len() as f64, 0.0);
        op_norm(&(g - DMatrix::identity(self.dim(), self.dim())))
    }
}

/// `e_k(z) = sqrt(1 - |a_k|^2) / (1 - conj(a_k) z) prod_{j < k} (z - a_j) / (1 - conj(a_j) z)`.
fn tm_function(zeros: &[C64], k: usize, z: C64) -> C64 {
    let one = C64::new(1.0, 0.0);
    let a = zeros[k];
    let mut v = C64::new((1.0 - a.norm_sqr()).sqrt(), 0.0) / (one - a.conj() * z);
    for aj in &zeros[..k] {
        v *= (z - aj) / (one - aj.conj() * z);
    }
    v
}

/// Matrix of `X^alpha` in the Takenaka-Malmquist basis.
#[derive(Clone, Debug)]
pub struct ClarkOperator {
    pub alpha: C64,
    pub matrix: DMatrix<C64>,
    /// Coordinates of the constant function `1 = k_0`.
    pub one: DVector<C64>,
    pub basis_defect: f64,
}

pub fn clark_operator(b: &FiniteBlaschke, alpha: C64) -> Result<ClarkOperator> {
    if b.eval(C64::new(0.0, 0.0)).norm() > 1e-14 {
        return Err(Error::Precondition("clark_operator requires b(0) = 0".into()));
    }
    if (alpha.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::Precondition("alpha must be unimodular".into()));
    }
    let basis = ModelBasis::new(b);
    let m = basis.dim();
    let mut images = DMatrix::<C64>::zeros(basis.nodes.len(), m);
    for (i, z) in basis.nodes.iter().enumerate() {
        let sb = b.eval(*z) * z.conj();
        for k in 0..m {
            let f0 = basis.at_origin[k];
            images[(i, k)] = (basis.values[(i, k)] - f0) * z.conj() + f0 * alpha.conj() * sb;
        }
    }
    let matrix = basis.values.adjoint() * images / C64::new(basis.nodes.len() as f64, 0.0);
    let ones = DVector::from_element(basis.nodes.len(), C64::new(1.0, 0.0));
    Ok(ClarkOperator { alpha, matrix, one: basis.coords(&ones), basis_defect: basis.orthonormality_defect() })
}

impl ClarkOperator {
    /// `||X^* X - I||`.
    pub fn unitarity_defect(&self) -> f64 {
        let m = self.matrix.nrows();
        op_norm(&(self.matrix.adjoint() * &self.matrix - DMatrix::identity(m, m)))
    }

    /// Rank of the Krylov matrix `[1, X 1, ..., X^{m-1} 1]`.
    pub fn cyclic_rank(&self, rel_tol: f64) -> usize {
        let m = self.matrix.nrows();
        let mut cols = vec![self.one.clone()];
        for _ in 1..m {
            let next = &self.matrix * cols.last().expect("nonempty");
            cols.push(next);
        }
        rank(&DMatrix::from_columns(&cols), rel_tol)
    }
}

/// Which identification of spectral atoms with measure atoms holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    Direct,
    Conjugate,
    Both,
    Neither,
}

impl Orientation {
    pub fn includes(self, o: Orientation) -> bool {
        self == o || self == Orientation::Both
    }

    pub fn name(self) -> &'static str {
        match self {
            Orientation::Direct => "direct",
            Orientation::Conjugate => "conjugate",
            Orientation::Both => "both",
            Orientation::Neither => "neither",
        }
    }
}

/// Eigenvalues, spectral masses of `1`, and their match with `mu_alpha`.
#[derive(Clone, Debug)]
pub struct SpectralReport {
    pub eigenvalues: Vec<C64>,
    pub masses: Vec<f64>,
    /// Largest atom and weight mismatch with eigenvalues compared directly.
    pub direct_error: f64,
    /// Same with eigenvalues compared to conjugated atoms.
    pub conjugate_error: f64,
    pub orientation: Orientation,
}

pub fn spectral_realization(x: &ClarkOperator, measure: &DiscreteMeasure, tol: f64) -> Result<SpectralReport> {
    if x.unitarity_defect() > 1e-8 {
        return Err(Error::Precondition("X^alpha is not unitary".into()));
    }
    // Eigenvectors of a unitary matrix with simple spectrum are orthogonal.
    let (vals, q) = eigen(&x.matrix);
    let m = vals.len();
    let mut pairs: Vec<(C64, f64)> = (0..m).map(|k| (vals[k], q.column(k).dotc(&x.one).norm_sqr())).collect();
    pairs.sort_by(|a, b| a.0.arg().total_cmp(&b.0.arg()));
    let mismatch = |conjugate: bool| -> f64 {
        if measure.atoms.len() != m {
            return f64::INFINITY;
        }
        let mut used = vec![false; m];
        let mut worst = 0.0f64;
        for (lambda, mass) in &pairs {
            let target = if conjugate { lambda.conj() } else { *lambda };
            let best = (0..m)
                .filter(|&i| !used[i])
                .min_by(|&i, &j| (measure.atoms[i] - target).norm().total_cmp(&(measure.atoms[j] - target).norm()));
            let Some(i) = best else { return f64::INFINITY };
            used[i] = true;
            worst = worst.max((measure.atoms[i] - target).norm()).max((measure.weights[i] - mass).abs());
        }
        worst
    };
    let direct_error = mismatch(false);
    let conjugate_error = mismatch(true);
    let orientation = match (direct_error <= tol, conjugate_error <= tol) {
        (true, true) => Orientation::Both,
        (true, false) => Orientation::Direct,
        (false, true) => Orientation::Conjugate,
        (false, false) => Orientation::Neither,
    };
    if orientation == Orientation::Neither {
        return Err(Error::CrossCheck { what: "spectral measure of X^alpha".into(), value: direct_error.min(conjugate_error), tol });
    }
    Ok(SpectralReport {
        eigenvalues: pairs.iter().map(|p| p.0).collect(),
        masses: pairs.iter().map(|p| p.1).collect(),
        direct_error,
        conjugate_error,
        orientation,
    })
}

/// `(F f)(z) = (1 - b(z) conj(alpha)) sum_k w_k f(zeta_k) / (1 - z conj(zeta_k))` for a
/// polynomial `f` given by ascending coefficients.
pub fn weighted_cauchy(b: &FiniteBlaschke, alpha: C64, measure: &DiscreteMeasure, f: &[C64], z: C64) -> C64 {
    let one = C64::new(1.0, 0.0);
    let sum: C64 = measure
        .atoms
        .iter()
        .zip(&measure.weights)
        .map(|(zeta, w)| poly_eval(f, *zeta) * *w / (one - z * zeta.conj()))
        .sum();
    (one - b.eval(z) * alpha.conj()) * sum
}

/// Gram matrices of a polynomial family in `L^2(mu_alpha)` and of its image in `K(b)`.
#[derive(Clone, Debug)]
pub struct CauchyGram {
    pub measure_gram: DMatrix<C64>,
    pub image_gram: DMatrix<C64>,
    pub defect: f64,
}

pub fn cauchy_gram(b: &FiniteBlaschke, alpha: C64, measure: &DiscreteMeasure, family: &[Vec<C64>]) -> CauchyGram {
    let nodes = nodes_away_from(b.quadrature_size(), &measure.atoms);
    let k = family.len();
    let samples: Vec<DVector<C64>> = family
        .iter()
        .map(|f| DVector::from_iterator(nodes.len(), nodes.iter().map(|z| weighted_cauchy(b, alpha, measure, f, *z))))
        .collect();
    let measure_gram = DMatrix::from_fn(k, k, |i, j| {
        measure
            .atoms
            .iter()
            .zip(&measure.weights)
            .map(|(zeta, w)| poly_eval(&family[j], *zeta) * poly_eval(&family[i], *zeta).conj() * *w)
            .sum()
    });
    let image_gram = DMatrix::from_fn(k, k, |i, j| samples[i].dotc(&samples[j]) / nodes.len() as f64);
    let defect = op_norm(&(&image_gram - &measure_gram));
    CauchyGram { measure_gram, image_gram, defect }
}

/// Circle grid rotated by the fraction of a step that keeps it farthest from `avoid`,
/// where the Cauchy integrand has removable singularities.
fn nodes_away_from(n: usize, avoid: &[C64]) -> Vec<C64> {
    let step = 2.0 * PI / n as f64;
    let gap = |offset: f64| {
        avoid
            .iter()
            .map(|a| {
                let t = (a.arg() - offset).rem_euclid(step);
                t.min(step - t)
            })
            .fold(f64::INFINITY, f64::min)
    };
    let offset = (0..16).map(|k| k as f64 * step / 16.0).max_by(|x, y| gap(*x).total_cmp(&gap(*y))).unwrap_or(0.0);
    circle(n, offset)
}

/// Monomials `1, zeta, ..., zeta^{m-1}` made orthonormal in `L^2(mu)` by Gram-Schmidt.
pub fn orthonormal_family(measure: &DiscreteMeasure) -> Vec<Vec<C64>> {
    let m = measure.atoms.len();
    let inner = |f: &[C64], g: &[C64]| -> C64 {
        measure.atoms.iter().zip(&measure.weights).map(|(z, w)| poly_eval(f, *z) * poly_eval(g, *z).conj() * *w).sum()
    };
    let mut out: Vec<Vec<C64>> = Vec::new();
    for k in 0..m {
        let mut f = vec![C64::new(0.0, 0.0); m];
        f[k] = C64::new(1.0, 0.0);
        for g in &out {
            let c = inner(&f, g);
            for (fi, gi) in f.iter_mut().zip(g) {
                *fi -= c * gi;
            }
        }
        let n = inner(&f, &f).re.sqrt();
        out.push(f.into_iter().map(|c| c / n).collect());
    }
    out
}

/// `count` equispaced unimodular values, starting at 1.
pub fn alpha_grid(count: usize) -> Vec<C64> {
    circle(count, 0.0)
}

/// Scalar polynomial in one variable as a closure, for [`density_mass`].
pub fn poly_fn(p: &MatPoly) -> Result<impl Fn(C64) -> C64 + '_> {
    if p.nvars() != 1 || p.rows() != 1 || p.cols() != 1 {
        return Err(Error::Precondition("expected a scalar polynomial in one variable".into()));
    }
    Ok(move |z: C64| p.eval(&[z]).map(|m| m[(0, 0)]).unwrap_or(C64::new(f64::NAN, 0.0)))
}

/// `b(0)` of a scalar polynomial.
pub fn poly_at_origin(p: &MatPoly) -> C64 {
    p.coeff(&MultiIndex::zero(p.nvars()))[(0, 0)]
}
