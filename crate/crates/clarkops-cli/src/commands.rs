//! The commands: each one turns a resolved configuration into a report.

use clarkops::classical::{self, FiniteBlaschke, ORIENTATION};
use clarkops::clark::{self, QeOptions, QeVerdict};
use clarkops::examples;
use clarkops::gleason::{self, GleasonB};
use clarkops::kernel::{self, SamplePlan};
use clarkops::linalg::{eig_range, hermitian_eigen, max_abs};
use clarkops::model::{self, coefficient_distance, embed_inner_sequence, inner_check, minimality_check};
use clarkops::poly::MultiIndex;
use clarkops::span::KernelSpanRep;
use clarkops::{Error, C64};
use nalgebra::DVector;
use serde::Serialize;

use crate::config::{Complex, InputError, MultiplierSpec, RunConfig};
use crate::report::Report;

/// Default representation degree for the operator-level commands.
pub const DEFAULT_DEGREE: usize = 8;

fn vector_json(v: &DVector<C64>) -> Vec<Complex> {
    v.iter().map(|&c| c.into()).collect()
}

fn complexes(v: &[C64]) -> Vec<Complex> {
    v.iter().map(|&c| c.into()).collect()
}

/// Runs `body` and turns a library error into a failed report.
fn guarded(config: &RunConfig, body: impl FnOnce(&mut Report) -> Result<(), Error>) -> Report {
    let mut report = Report::new(config);
    if let Err(e) = body(&mut report) {
        report.fail_with(e);
    }
    report
}

pub fn kernel_check(config: &RunConfig) -> Result<Report, InputError> {
    let b = config.multiplier_poly()?;
    let seed = config.require_seed()?;
    let plan = SamplePlan::new(b.nvars(), 2 * config.points, config.radius, seed).map_err(|e| InputError(e.to_string()))?;
    Ok(guarded(config, |r| {
        let first = SamplePlan { points: plan.points[..config.points].to_vec(), ..plan.clone() };
        let schur = kernel::schur_class_check(&b, &first, config.tol("psd"))?;
        r.at_least("schur_min_eigenvalue", schur.min_eigenvalue, -config.tol("psd"), "kernel.schur-positivity");
        r.above("contractivity_margin", 1.0 - schur.max_norm_at_points, 0.0, "kernel.pure-contractivity");
        r.result("schur_certificate", schur.certificate);
        let mut fac = 0.0f64;
        let mut vdom = 0.0f64;
        let mut failure = None;
        for pair in plan.points.chunks(2) {
            let (z, w) = (&pair[0], &pair[1]);
            match kernel::factorization_residual(&b, z, w).and_then(|f| Ok((f, kernel::vdomain_residual(&b, z, w, config.tol("factorization"))?))) {
                Ok((f, v)) => {
                    fac = fac.max(f);
                    vdom = vdom.max(v);
                }
                Err(e) => {
                    failure = Some(e.to_string());
                    break;
                }
            }
        }
        match failure {
            None => {
                r.at_most("factorization_residual", fac, config.tol("factorization"), "kernel.herglotz-factorization");
                r.at_most("vdomain_residual", vdom, config.tol("vdomain"), "kernel.v-domain");
            }
            Some(msg) => {
                r.failed("factorization_residual", config.tol("factorization"), "kernel.herglotz-factorization");
                r.failed("vdomain_residual", config.tol("vdomain"), "kernel.v-domain");
                r.result("kernel_error", msg);
            }
        }
        r.result("pairs", config.points);
        Ok(())
    }))
}

fn qe_options(config: &RunConfig, seed: u64) -> QeOptions {
    QeOptions {
        cap: config.degree.unwrap_or(DEFAULT_DEGREE),
        coisometry_tol: config.tol("coisometry"),
        membership_tol: config.tol("membership"),
        op_tol: config.tol("op"),
        rank_tol: config.tol("rank"),
        psd_tol: config.tol("psd"),
        seed,
    }
}

#[derive(Serialize)]
struct SubTestJson {
    name: &'static str,
    applicable: bool,
    quasi_extreme: Option<bool>,
    value: f64,
    tolerance: f64,
}

fn record_verdict(r: &mut Report, v: &QeVerdict) {
    r.equals("subtests_agree", if v.agreement { 1.0 } else { 0.0 }, 1.0, "qe.equivalent-tests");
    record_verdict_results(r, v);
    for t in &v.subtests {
        if let Some(w) = &t.witness {
            r.witness(t.name, vector_json(w));
        }
    }
    if let Some(w) = &v.witness {
        r.witness("h", vector_json(w));
    }
}

pub fn quasi_extreme(config: &RunConfig) -> Result<Report, InputError> {
    let b = config.multiplier_poly()?;
    let seed = config.require_seed()?;
    Ok(guarded(config, |r| {
        let v = clark::qe_test(&b, &qe_options(config, seed))?;
        record_verdict(r, &v);
        Ok(())
    }))
}

fn poly_components(sol: &GleasonB) -> Vec<MultiplierSpec> {
    sol.components.iter().map(MultiplierSpec::from_poly).collect()
}

fn eigenvalues(m: &nalgebra::DMatrix<C64>) -> Vec<f64> {
    hermitian_eigen(m).0.iter().copied().collect()
}

pub fn gleason(config: &RunConfig) -> Result<Report, InputError> {
    let b = config.multiplier_poly()?;
    let seed = config.require_seed()?;
    let plan = SamplePlan::new(b.nvars(), config.points, config.radius, seed).map_err(|e| InputError(e.to_string()))?;
    let cap = config.degree.unwrap_or(DEFAULT_DEGREE).max(b.degree() + 1);
    Ok(guarded(config, |r| {
        let psd = config.tol("psd");
        let vrep = clark::build_vb(&b, cap, psd)?;
        let krep = KernelSpanRep::dbr(&b, cap, psd)?;
        let uinv = gleason::u_inverse(&krep, &vrep.rep)?;
        let sol = gleason::solution_from_extension(&vrep, &krep, &uinv, None)?;
        r.at_most("fit_residual", sol.fit_residual, config.tol("fit"), "gleason.polynomial-fit");
        r.at_most("identity_defect", gleason::identity_defect(&sol, cap)?, config.tol("identity"), "gleason.identity-b");
        let defect = sol.defect();
        let (bmin, _) = eig_range(&defect);
        r.at_least("b_defect_min_eigenvalue", bmin, -psd, "gleason.contractive-b");
        let x = gleason::solution_to_x(&sol, &krep)?;
        let xdef = gleason::x_defect(&x, &krep);
        let (xmin, _) = eig_range(&xdef);
        r.at_least("x_defect_min_eigenvalue", xmin, -psd, "gleason.contractive-x");
        r.at_most("x_identity_defect", gleason::x_identity_defect(&x, &krep)?, config.tol("x_identity"), "gleason.identity-x");
        let extremal = sol.is_extremal(psd);
        let transfer = if extremal { max_abs(&xdef) } else { 0.0 };
        r.at_most("extremality_transfer", transfer, psd, "gleason.extremality-transfer");
        let rec = gleason::recover_b_from_x(&x, &krep, config.tol("rank"), false)?;
        if rec.unique {
            let mut dist = rec.residual;
            for (p, q) in rec.solution.components.iter().zip(&sol.components) {
                dist = dist.max(coefficient_distance(p, q)?);
            }
            r.at_most("round_trip", dist, config.tol("roundtrip"), "gleason.round-trip");
        }
        r.result("support_condition", rec.unique);
        let inner = b.degree() == 0 || inner_check(&b, (2 * b.degree()).max(cap), config.tol("op"))?.inner;
        if inner {
            r.at_most("compressed_shift", gleason::compressed_shift_discrepancy(&sol, &krep)?, config.tol("shift"), "gleason.compressed-shift");
            let cs = gleason::compressed_shift(&krep);
            let other = gleason::recover_b_from_x(&cs, &krep, config.tol("rank"), false)?;
            let mut dist = 0.0f64;
            for (p, q) in other.solution.components.iter().zip(&sol.components) {
                dist = dist.max(coefficient_distance(p, q)?);
            }
            r.at_most("independent_pipelines", dist, config.tol("pipelines"), "gleason.unique-solution");
        }
        if b.nvars() >= 2 {
            let w = gleason::kernel_witness(&vrep, &krep, &uinv, &sol, &plan)?;
            r.at_most("kernel_witness_ratio", w.ratio, config.tol("kernel_witness"), "gleason.kernel-witness");
            r.result("kernel_witness_certificate", w.certificate);
            r.result("kernel_witness_pointwise", w.pointwise);
            r.witness("kernel_witness_f", MultiplierSpec::from_poly(&w.f));
        }
        r.result("degree", cap);
        r.result("inner", inner);
        r.result("extremal", extremal);
        r.result("components", poly_components(&sol));
        r.result("b_defect_eigenvalues", eigenvalues(&defect));
        r.result("gram_eigenvalues", eigenvalues(&sol.gram));
        Ok(())
    }))
}

/// One row of the spectrum CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumRow {
    pub alpha: C64,
    pub eigenvalues: Vec<C64>,
    pub masses: Vec<f64>,
}

/// Shortest representation that reads back to the same double.
fn num(x: f64) -> String {
    serde_json::to_string(&x).expect("finite")
}

pub fn spectrum_csv(rows: &[SpectrumRow]) -> String {
    let m = rows.first().map(|r| r.eigenvalues.len()).unwrap_or(0);
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["alpha_re".to_string(), "alpha_im".to_string()];
    for k in 1..=m {
        header.extend([format!("eig{k}_re"), format!("eig{k}_im"), format!("mass{k}")]);
    }
    w.write_record(&header).expect("in-memory write");
    for row in rows {
        let mut rec = vec![num(row.alpha.re), num(row.alpha.im)];
        for (e, mass) in row.eigenvalues.iter().zip(&row.masses) {
            rec.extend([num(e.re), num(e.im), num(*mass)]);
        }
        w.write_record(&rec).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flushed")).expect("utf8")
}

#[derive(Serialize)]
struct AlphaJson {
    alpha: Complex,
    atoms: Vec<Complex>,
    weights: Vec<f64>,
    eigenvalues: Vec<Complex>,
    masses: Vec<f64>,
    orientation: &'static str,
}

/// Report and CSV rows for the Clark sweep.
pub fn clark_spectrum(config: &RunConfig) -> Result<(Report, Vec<SpectrumRow>), InputError> {
    let b = match config.blaschke_spec() {
        Some(b) => Some(b?),
        None => {
            let p = config.multiplier_poly()?;
            FiniteBlaschke::from_poly(&p).ok()
        }
    };
    let mut rows = Vec::new();
    let Some(b) = b else {
        let mut r = Report::new(config);
        r.failed("inner_required", 0.0, "input.inner-required");
        r.error = Some("inner required".into());
        return Ok((r, rows));
    };
    let report = guarded(config, |r| {
        let m = b.degree();
        r.at_most("boundary_defect", b.boundary_defect(64), config.tol("boundary"), "clark.boundary");
        let mut worst = [0.0f64; 6];
        let mut rank_ok = true;
        let mut oriented = true;
        let mut per_alpha = Vec::new();
        let b0 = b.eval(C64::new(0.0, 0.0));
        for alpha in classical::alpha_grid(config.alpha_count) {
            let mu = classical::ac_measure(&b, alpha)?;
            let x = classical::clark_operator(&b, alpha)?;
            let s = classical::spectral_realization(&x, &mu, config.tol("spectral"))?;
            let h = classical::herglotz_verify(|z| b.eval(z), alpha, &mu, &classical::herglotz_points(50, 0.9));
            let g = classical::cauchy_gram(&b, alpha, &mu, &classical::orthonormal_family(&mu));
            worst[0] = worst[0].max((mu.total_mass() - classical::expected_mass(b0, alpha)).abs());
            worst[1] = worst[1].max(h);
            worst[2] = worst[2].max(x.unitarity_defect());
            worst[3] = worst[3].max(s.conjugate_error);
            worst[4] = worst[4].max(g.defect);
            worst[5] = worst[5].max(x.basis_defect);
            rank_ok &= x.cyclic_rank(1e-10) == m;
            oriented &= s.orientation.includes(ORIENTATION);
            rows.push(SpectrumRow { alpha, eigenvalues: s.eigenvalues.clone(), masses: s.masses.clone() });
            per_alpha.push(AlphaJson {
                alpha: alpha.into(),
                atoms: complexes(&mu.atoms),
                weights: mu.weights.clone(),
                eigenvalues: complexes(&s.eigenvalues),
                masses: s.masses,
                orientation: s.orientation.name(),
            });
        }
        r.at_most("mass_defect", worst[0], config.tol("mass"), "clark.total-mass");
        r.at_most("herglotz_residual", worst[1], config.tol("herglotz"), "clark.herglotz-representation");
        r.at_most("unitarity_defect", worst[2], config.tol("unitary"), "clark.unitary-perturbation");
        r.equals("cyclic_rank_full", if rank_ok { 1.0 } else { 0.0 }, 1.0, "clark.cyclic-vector");
        r.equals("orientation_consistent", if oriented { 1.0 } else { 0.0 }, 1.0, "clark.spectral-measure");
        r.at_most("spectral_mismatch", worst[3], config.tol("spectral"), "clark.spectral-measure");
        r.at_most("cauchy_gram_defect", worst[4], config.tol("cauchy"), "clark.cauchy-unitary");
        r.at_most("basis_defect", worst[5], config.tol("unitary"), "clark.model-basis");
        r.result("orientation", ORIENTATION.name());
        r.result("degree", m);
        r.result("zeros", complexes(b.zeros()));
        r.result("csv_columns", "alpha_re, alpha_im, then eigK_re, eigK_im, massK for each eigenvalue K in order of argument");
        r.result("sweep", per_alpha);
        Ok(())
    });
    Ok((report, rows))
}

/// Which inputs of the golden example to corrupt, for negative controls.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    Golden,
    DropSqrt2,
    ZeroB1,
}

impl Variant {
    pub fn parse(s: Option<&str>) -> Result<Self, InputError> {
        match s {
            None | Some("golden") => Ok(Variant::Golden),
            Some("drop-sqrt2") => Ok(Variant::DropSqrt2),
            Some("zero-b1") => Ok(Variant::ZeroB1),
            Some(other) => Err(InputError(format!("unknown variant {other}"))),
        }
    }
}

/// The square-inner example end to end.
pub fn example_5_1(config: &RunConfig) -> Result<Report, InputError> {
    let variant = Variant::parse(config.variant.as_deref())?;
    let mixed = if variant == Variant::DropSqrt2 { 1.0 } else { 2f64.sqrt() };
    let row = examples::theta_row_with(mixed);
    let cap = DEFAULT_DEGREE;
    Ok(guarded(config, |r| {
        let theta = embed_inner_sequence(&row)?;
        let plan = SamplePlan::new(2, 20, 0.6, 0)?;
        let minimal = minimality_check(&row, &plan, config.tol("rank"))?;
        r.equals("minimality_rank", minimal.rank as f64, 4.0, "inner.minimality");
        let inner = inner_check(&theta, cap, config.tol("inner"))?;
        r.at_most("inner_defect", inner.defect, config.tol("inner"), "inner.partial-isometry");
        let qe = clark::qe_test(&theta, &qe_options(config, 0))?;
        let unanimous = qe.agreement
            && qe.quasi_extreme == Some(true)
            && ["coisometry", "kernel", "minimality"].iter().all(|n| qe.subtests.iter().any(|t| t.name == *n && t.quasi_extreme == Some(true)));
        r.equals("quasi_extreme_unanimous", if unanimous { 1.0 } else { 0.0 }, 1.0, "qe.equivalent-tests");
        record_verdict_results(r, &qe);

        let (b1, b2) = examples::theta_gleason_pair_with(if variant == Variant::ZeroB1 { 0.0 } else { 1.0 })?;
        let lhs = b1.shift_by(&MultiIndex::unit(2, 0)).add(&b2.shift_by(&MultiIndex::unit(2, 1)))?;
        let id_defect = lhs.sub(&theta)?.max_abs();
        r.at_most("gleason_identity", id_defect, config.tol("identity"), "gleason.identity-b");
        let gram = gleason::gram_h2(&[b1.clone(), b2.clone()])?;
        let gram_defect = clarkops::linalg::op_norm(&(gram - nalgebra::DMatrix::identity(4, 4)));
        r.at_most("gram_identity", gram_defect, config.tol("gram"), "inner.isometric-gleason");

        let vrep = clark::build_vb(&theta, cap, config.tol("psd"))?;
        let krep = KernelSpanRep::dbr(&theta, cap, config.tol("psd"))?;
        let uinv = gleason::u_inverse(&krep, &vrep.rep)?;
        let sol = gleason::minimal_solution_b(&vrep, &krep, &uinv, config.tol("fit"))?;
        r.at_most("compressed_shift", gleason::compressed_shift_discrepancy(&sol, &krep)?, config.tol("shift"), "gleason.compressed-shift");
        let explicit_distance = coefficient_distance(&sol.components[0], &b1)?.max(coefficient_distance(&sol.components[1], &b2)?);
        r.result("minimal_vs_explicit", explicit_distance);

        let shifted = gleason::backward_shift_poly(&theta.column(1), 0);
        match model::range_component_norm(&theta, &shifted, cap, config.tol("inner")) {
            Ok(norm) => r.above("backward_shift_outside", norm, config.tol("range"), "inner.backward-shift-outside"),
            Err(e) => {
                r.failed("backward_shift_outside", config.tol("range"), "inner.backward-shift-outside");
                r.result("backward_shift_error", e.to_string());
            }
        }
        r.result("components", vec![MultiplierSpec::from_poly(&b1), MultiplierSpec::from_poly(&b2)]);
        r.result("shifted_column", MultiplierSpec::from_poly(&shifted));
        Ok(())
    }))
}

fn record_verdict_results(r: &mut Report, v: &QeVerdict) {
    r.result("quasi_extreme", v.quasi_extreme);
    let subs: Vec<SubTestJson> = v
        .subtests
        .iter()
        .map(|t| SubTestJson { name: t.name, applicable: t.applicable, quasi_extreme: t.quasi_extreme, value: t.value, tolerance: t.tolerance })
        .collect();
    r.result("subtests", subs);
}
