//! Run configuration: JSON config files, multiplier files and command-line overrides.

use std::collections::BTreeMap;
use std::path::Path;

use clarkops::classical::FiniteBlaschke;
use clarkops::examples;
use clarkops::poly::{MatPoly, MultiIndex};
use clarkops::C64;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

/// Input problems; the process exits with code 2.
#[derive(Debug)]
pub struct InputError(pub String);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "input error: {}", self.0)
    }
}

impl std::error::Error for InputError {}

fn input<T>(msg: impl Into<String>) -> Result<T, InputError> {
    Err(InputError(msg.into()))
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
pub struct Complex {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for Complex {
    fn from(c: C64) -> Self {
        Complex { re: c.re, im: c.im }
    }
}

impl From<Complex> for C64 {
    fn from(c: Complex) -> Self {
        C64::new(c.re, c.im)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Term {
    pub alpha: Vec<usize>,
    pub matrix: Vec<Vec<Complex>>,
}

/// `{d, rows, cols, terms: [{alpha, matrix}]}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct MultiplierSpec {
    pub d: usize,
    pub rows: usize,
    pub cols: usize,
    pub terms: Vec<Term>,
}

impl MultiplierSpec {
    pub fn to_poly(&self) -> Result<MatPoly, InputError> {
        if self.d == 0 || self.rows == 0 || self.cols == 0 {
            return input("d, rows and cols must be positive");
        }
        let mut terms = Vec::new();
        for t in &self.terms {
            if t.alpha.len() != self.d {
                return input(format!("multi-index {:?} does not have length {}", t.alpha, self.d));
            }
            if t.matrix.len() != self.rows || t.matrix.iter().any(|r| r.len() != self.cols) {
                return input(format!("coefficient of {:?} is not {} x {}", t.alpha, self.rows, self.cols));
            }
            if t.matrix.iter().flatten().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
                return input("coefficients must be finite");
            }
            let m = DMatrix::from_fn(self.rows, self.cols, |i, j| C64::from(t.matrix[i][j]));
            terms.push((MultiIndex(t.alpha.clone()), m));
        }
        MatPoly::from_terms(self.d, self.rows, self.cols, terms).map_err(|e| InputError(e.to_string()))
    }

    pub fn from_poly(p: &MatPoly) -> Self {
        MultiplierSpec {
            d: p.nvars(),
            rows: p.rows(),
            cols: p.cols(),
            terms: p
                .terms()
                .iter()
                .map(|(a, m)| Term {
                    alpha: a.0.clone(),
                    matrix: (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)].into()).collect()).collect(),
                })
                .collect(),
        }
    }
}

/// Inline multiplier or a path to a multiplier file.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum MultiplierSource {
    Inline(MultiplierSpec),
    File(String),
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct BlaschkeSpec {
    pub zeros: Vec<Complex>,
    #[serde(default = "unit")]
    pub unimodular: Complex,
}

fn unit() -> Complex {
    Complex { re: 1.0, im: 0.0 }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
pub struct PlanSpec {
    pub seed: Option<u64>,
    pub count: Option<usize>,
    pub radius: Option<f64>,
}

/// Contents of a `--config` file.
#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub command: Option<String>,
    pub multiplier: Option<MultiplierSource>,
    pub example: Option<String>,
    pub blaschke: Option<BlaschkeSpec>,
    pub degree: Option<usize>,
    #[serde(default)]
    pub plan: PlanSpec,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    pub alpha_count: Option<usize>,
    pub out: Option<String>,
    pub csv: Option<String>,
}

/// Default tolerances, by name.
pub const DEFAULT_TOLERANCES: &[(&str, f64)] = &[
    ("boundary", 1e-12),
    ("cauchy", 1e-10),
    ("coisometry", 1e-8),
    ("factorization", 1e-10),
    ("fit", 1e-9),
    ("gram", 1e-12),
    ("herglotz", 1e-12),
    ("identity", 1e-13),
    ("inner", 1e-12),
    ("kernel_witness", 1e-8),
    ("mass", 1e-12),
    ("membership", 1e-10),
    ("op", 1e-10),
    ("pipelines", 1e-8),
    ("psd", 1e-10),
    ("range", 0.1),
    ("rank", 1e-9),
    ("roundtrip", 1e-10),
    ("shift", 1e-10),
    ("spectral", 1e-10),
    ("unitary", 1e-12),
    ("vdomain", 1e-10),
    ("x_identity", 1e-10),
];

/// Resolved configuration, echoed into every report.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct RunConfig {
    pub command: String,
    pub multiplier: Option<MultiplierSpec>,
    pub example: Option<String>,
    pub blaschke: Option<BlaschkeSpec>,
    pub degree: Option<usize>,
    pub seed: Option<u64>,
    pub points: usize,
    pub radius: f64,
    pub alpha_count: usize,
    pub tolerances: BTreeMap<String, f64>,
    pub variant: Option<String>,
    #[serde(skip)]
    pub out: Option<String>,
    #[serde(skip)]
    pub csv: Option<String>,
}

/// Command-line values that override the config file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub radius: Option<f64>,
    pub points: Option<usize>,
    pub degree: Option<usize>,
    pub tolerances: Vec<String>,
    pub out: Option<String>,
    pub csv: Option<String>,
    pub example: Option<String>,
    pub variant: Option<String>,
}

pub fn read_config(path: &Path) -> Result<ConfigFile, InputError> {
    let text = std::fs::read_to_string(path).map_err(|e| InputError(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| InputError(format!("cannot parse {}: {e}", path.display())))
}

pub fn read_multiplier(path: &Path) -> Result<MultiplierSpec, InputError> {
    let text = std::fs::read_to_string(path).map_err(|e| InputError(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| InputError(format!("cannot parse {}: {e}", path.display())))
}

/// Built-in multipliers, by name.
pub fn example_multiplier(name: &str) -> Result<MatPoly, InputError> {
    Ok(match name {
        "zero1" => examples::zero(1),
        "zero2" => examples::zero(2),
        "z" => examples::z(),
        "z2" => examples::z_squared(),
        "half_z" => examples::half_z(),
        "half_sum" => examples::half_sum(),
        "theta" => examples::theta(),
        "zhat" => examples::zhat(),
        "two_z" => examples::monomial_1d(C64::new(2.0, 0.0), 1),
        _ => return input(format!("unknown example {name}")),
    })
}

/// Merges a config file with overrides; `base_dir` resolves relative multiplier paths.
pub fn resolve(command: &str, file: ConfigFile, ov: Overrides, base_dir: &Path) -> Result<RunConfig, InputError> {
    if let Some(c) = &file.command {
        if c != command {
            return input(format!("config is for command {c}, not {command}"));
        }
    }
    let multiplier = match file.multiplier {
        Some(MultiplierSource::Inline(spec)) => Some(spec),
        Some(MultiplierSource::File(p)) => Some(read_multiplier(&base_dir.join(p))?),
        None => None,
    };
    let example = ov.example.or(file.example);
    if multiplier.is_some() && example.is_some() {
        return input("give either a multiplier or an example, not both");
    }
    let mut tolerances: BTreeMap<String, f64> = DEFAULT_TOLERANCES.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    let mut set = |name: &str, value: f64| -> Result<(), InputError> {
        if !tolerances.contains_key(name) {
            return input(format!("unknown tolerance {name}"));
        }
        if !(value > 0.0 && value.is_finite()) {
            return input(format!("tolerance {name} must be positive"));
        }
        tolerances.insert(name.to_string(), value);
        Ok(())
    };
    for (k, v) in &file.tolerances {
        set(k, *v)?;
    }
    for item in &ov.tolerances {
        let Some((k, v)) = item.split_once('=') else {
            return input(format!("expected NAME=VALUE, got {item}"));
        };
        let v: f64 = v.trim().parse().map_err(|_| InputError(format!("bad tolerance value in {item}")))?;
        set(k.trim(), v)?;
    }
    let radius = ov.radius.or(file.plan.radius).unwrap_or(0.6);
    if !(radius > 0.0 && radius < 1.0) {
        return input("radius must lie in (0, 1)");
    }
    let points = ov.points.or(file.plan.count).unwrap_or(20);
    if points == 0 {
        return input("points must be positive");
    }
    let alpha_count = file.alpha_count.unwrap_or(16);
    if alpha_count == 0 {
        return input("alpha_count must be positive");
    }
    Ok(RunConfig {
        command: command.to_string(),
        multiplier,
        example,
        blaschke: file.blaschke,
        degree: ov.degree.or(file.degree),
        seed: ov.seed.or(file.plan.seed),
        points,
        radius,
        alpha_count,
        tolerances,
        variant: ov.variant,
        out: ov.out.or(file.out),
        csv: ov.csv.or(file.csv),
    })
}

impl RunConfig {
    pub fn tol(&self, name: &str) -> f64 {
        self.tolerances[name]
    }

    /// The multiplier `b`; a missing one is an input error.
    pub fn multiplier_poly(&self) -> Result<MatPoly, InputError> {
        match (&self.multiplier, &self.example) {
            (Some(spec), _) => spec.to_poly(),
            (None, Some(name)) => example_multiplier(name),
            (None, None) => input("no multiplier given (use a config with \"multiplier\" or --example)"),
        }
    }

    pub fn blaschke_spec(&self) -> Option<Result<FiniteBlaschke, InputError>> {
        self.blaschke.as_ref().map(|s| {
            FiniteBlaschke::new(s.zeros.iter().map(|&c| c.into()).collect(), s.unimodular.into())
                .map_err(|e| InputError(e.to_string()))
        })
    }

    /// The seed, mandatory for sampled computations.
    pub fn require_seed(&self) -> Result<u64, InputError> {
        self.seed.ok_or_else(|| InputError("a seed is required for sampled computations (--seed or plan.seed)".into()))
    }
}
