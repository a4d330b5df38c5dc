//! Machine-readable reports.

use serde::Serialize;
use serde_json::Value;

use crate::config::RunConfig;

/// Every anchor a report may carry, with the identity or property it refers to.
/// `docs/anchors.md` lists the same entries.
pub const ANCHORS: &[(&str, &str)] = &[
    ("kernel.schur-positivity", "positivity of the de Branges-Rovnyak kernel on sampled points"),
    ("kernel.pure-contractivity", "||b(z)|| < 1 at every sampled point"),
    ("kernel.herglotz-factorization", "(I - b(z)) K(z,w) (I - b(w))^* = k(z,w)"),
    ("kernel.v-domain", "<z,w> K(z,w) = K(z,w) - K(z,0) - K(0,w) + K(0,0)"),
    ("qe.equivalent-tests", "equivalent characterizations of quasi-extremity agree"),
    ("gleason.polynomial-fit", "the minimal solution is a polynomial of degree < deg b"),
    ("gleason.identity-b", "z . B(z) = b(z) - b(0)"),
    ("gleason.contractive-b", "B^* B <= I - b(0)^* b(0)"),
    ("gleason.contractive-x", "X X^* <= I - k_0 k_0^*"),
    ("gleason.identity-x", "sum_j z_j (X_j^* f)(z) = f(z) - f(0)"),
    ("gleason.extremality-transfer", "extremal B gives extremal X"),
    ("gleason.round-trip", "B -> X -> B is the identity when the values of b have no common kernel"),
    ("gleason.compressed-shift", "for inner b, X is the compressed shift"),
    ("gleason.unique-solution", "independent pipelines give the same solution under quasi-extremity"),
    ("gleason.kernel-witness", "ker V is nonzero for d >= 2"),
    ("inner.minimality", "entries of the inner row are linearly independent"),
    ("inner.partial-isometry", "M_Theta is a partial isometry"),
    ("inner.isometric-gleason", "B_1^* B_1 + B_2^* B_2 = I_4"),
    ("inner.backward-shift-outside", "(S_1^* Theta) e_2 has a component in ran M_Theta"),
    ("clark.boundary", "|b| = 1 on the circle"),
    ("clark.total-mass", "the Clark measure has mass Re H(0)"),
    ("clark.herglotz-representation", "the atomic measure represents the Herglotz function of b conj(alpha)"),
    ("clark.unitary-perturbation", "X^alpha is unitary"),
    ("clark.cyclic-vector", "the constant 1 is cyclic for X^alpha"),
    ("clark.spectral-measure", "<P_alpha(.) 1, 1> is the Clark measure, atoms conjugated"),
    ("clark.cauchy-unitary", "the weighted Cauchy transform is isometric from L^2(mu) onto K(b)"),
    ("clark.model-basis", "the Takenaka-Malmquist functions are orthonormal"),
    ("input.inner-required", "the command needs an inner multiplier"),
    ("run.completed", "the computation ran without a numerical error"),
];

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Check {
    pub name: String,
    /// `null` when the value could not be computed.
    pub value: Option<f64>,
    pub tolerance: f64,
    /// How `value` is compared to `tolerance`: `"<="`, `">="`, `">"` or `"=="`.
    pub relation: &'static str,
    pub pass: bool,
    pub anchor: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub config: RunConfig,
    pub checks: Vec<Check>,
    pub results: serde_json::Map<String, Value>,
    pub witnesses: serde_json::Map<String, Value>,
    pub error: Option<String>,
    pub pass: bool,
}

impl Report {
    pub fn new(config: &RunConfig) -> Self {
        Report {
            command: config.command.clone(),
            config: config.clone(),
            checks: Vec::new(),
            results: serde_json::Map::new(),
            witnesses: serde_json::Map::new(),
            error: None,
            pass: true,
        }
    }

    fn push(&mut self, name: &str, value: Option<f64>, tolerance: f64, relation: &'static str, pass: bool, anchor: &'static str) {
        debug_assert!(ANCHORS.iter().any(|(a, _)| *a == anchor), "unknown anchor {anchor}");
        let pass = pass && value.is_some_and(|v| !v.is_nan());
        self.pass &= pass;
        self.checks.push(Check { name: name.to_string(), value: value.filter(|v| v.is_finite()), tolerance, relation, pass, anchor });
    }

    /// Passes when `value <= tolerance`.
    pub fn at_most(&mut self, name: &str, value: f64, tolerance: f64, anchor: &'static str) {
        self.push(name, Some(value), tolerance, "<=", value <= tolerance, anchor);
    }

    /// Passes when `value >= tolerance`.
    pub fn at_least(&mut self, name: &str, value: f64, tolerance: f64, anchor: &'static str) {
        self.push(name, Some(value), tolerance, ">=", value >= tolerance, anchor);
    }

    /// Passes when `value > tolerance`.
    pub fn above(&mut self, name: &str, value: f64, tolerance: f64, anchor: &'static str) {
        self.push(name, Some(value), tolerance, ">", value > tolerance, anchor);
    }

    /// Passes when `value == target` (integer-valued quantities).
    pub fn equals(&mut self, name: &str, value: f64, target: f64, anchor: &'static str) {
        self.push(name, Some(value), target, "==", value == target, anchor);
    }

    /// A check that could not be evaluated.
    pub fn failed(&mut self, name: &str, tolerance: f64, anchor: &'static str) {
        self.push(name, None, tolerance, "<=", false, anchor);
    }

    pub fn result(&mut self, key: &str, value: impl Serialize) {
        self.results.insert(key.to_string(), serde_json::to_value(value).expect("serializable"));
    }

    pub fn witness(&mut self, key: &str, value: impl Serialize) {
        self.witnesses.insert(key.to_string(), serde_json::to_value(value).expect("serializable"));
    }

    /// Records a numerical error raised by the library; the run fails.
    pub fn fail_with(&mut self, err: impl std::fmt::Display) {
        self.error = Some(err.to_string());
        self.push("completed", Some(1.0), 0.0, "<=", false, "run.completed");
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }
}
