//! Command-line front end for `clarkops`.
//!
//! Each command reads a configuration, runs one pipeline and writes a JSON report
//! whose checks carry an anchor listed in `docs/anchors.md`. Exit codes: `0` when
//! every check passes, `1` when a check fails, `2` for input errors.

pub mod commands;
pub mod config;
pub mod report;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use config::{ConfigFile, InputError, Overrides};

#[derive(Debug, Parser)]
#[command(name = "clarkops", version, about = "Clark theory checks for Schur multipliers on the ball")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Schur-class positivity and the Herglotz kernel identities.
    KernelCheck(Flags),
    /// The equivalent quasi-extremity tests.
    QuasiExtreme(Flags),
    /// Minimal Gleason solution and its checks.
    Gleason(Flags),
    /// Clark measures and unitary perturbations over a grid of alpha.
    ClarkSpectrum(Flags),
    /// The square inner multiplier built from (z1^3, z1^2 z2, sqrt(2) z1 z2, z2^2).
    #[command(name = "example-5-1")]
    Example51(Flags),
}

#[derive(Debug, Args, Clone, Default)]
pub struct Flags {
    /// JSON configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Report destination; standard output when absent.
    #[arg(long)]
    pub out: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    /// Representation degree.
    #[arg(long)]
    pub degree: Option<usize>,
    /// Tolerance override `NAME=VALUE`; repeatable.
    #[arg(long = "tol-override")]
    pub tol_override: Vec<String>,
    /// Built-in multiplier: zero1, zero2, z, z2, half_z, half_sum, theta, zhat, two_z.
    #[arg(long)]
    pub example: Option<String>,
    /// Spectrum CSV destination for clark-spectrum.
    #[arg(long)]
    pub csv: Option<String>,
    /// Negative controls for example-5-1: golden, drop-sqrt2, zero-b1.
    #[arg(long)]
    pub variant: Option<String>,
}

impl Command {
    fn parts(&self) -> (&'static str, &Flags) {
        match self {
            Command::KernelCheck(f) => ("kernel-check", f),
            Command::QuasiExtreme(f) => ("quasi-extreme", f),
            Command::Gleason(f) => ("gleason", f),
            Command::ClarkSpectrum(f) => ("clark-spectrum", f),
            Command::Example51(f) => ("example-5-1", f),
        }
    }
}

/// Output of one run.
#[derive(Debug)]
pub struct Outcome {
    pub exit_code: i32,
    pub report: Option<String>,
    pub csv: Option<String>,
}

fn resolve(name: &str, flags: &Flags) -> Result<config::RunConfig, InputError> {
    let (file, base) = match &flags.config {
        Some(p) => (config::read_config(p)?, p.parent().map(Path::to_path_buf).unwrap_or_default()),
        None => (ConfigFile::default(), PathBuf::new()),
    };
    let ov = Overrides {
        seed: flags.seed,
        radius: flags.radius,
        points: flags.points,
        degree: flags.degree,
        tolerances: flags.tol_override.clone(),
        out: flags.out.clone(),
        csv: flags.csv.clone(),
        example: flags.example.clone(),
        variant: flags.variant.clone(),
    };
    config::resolve(name, file, ov, &base)
}

/// Runs a parsed command without touching the file system for output.
pub fn execute(cmd: &Command) -> Result<(config::RunConfig, Outcome), InputError> {
    let (name, flags) = cmd.parts();
    let cfg = resolve(name, flags)?;
    if name == "example-5-1" && (cfg.multiplier.is_some() || cfg.example.is_some()) {
        return Err(InputError("example-5-1 takes no multiplier".into()));
    }
    let (report, csv) = match cmd {
        Command::KernelCheck(_) => (commands::kernel_check(&cfg)?, None),
        Command::QuasiExtreme(_) => (commands::quasi_extreme(&cfg)?, None),
        Command::Gleason(_) => (commands::gleason(&cfg)?, None),
        Command::ClarkSpectrum(_) => {
            let (r, rows) = commands::clark_spectrum(&cfg)?;
            let csv = if rows.is_empty() { None } else { Some(commands::spectrum_csv(&rows)) };
            (r, csv)
        }
        Command::Example51(_) => (commands::example_5_1(&cfg)?, None),
    };
    let exit_code = if report.pass { 0 } else { 1 };
    Ok((cfg, Outcome { exit_code, report: Some(report.to_json()), csv }))
}

/// Parses arguments, runs the command and writes its outputs.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli.command) {
        Err(e) => {
            eprintln!("{e}");
            2
        }
        Ok((cfg, outcome)) => {
            let report = outcome.report.unwrap_or_default();
            let written = match &cfg.out {
                Some(path) => std::fs::write(path, &report).map_err(|e| format!("cannot write {path}: {e}")),
                None => {
                    print!("{report}");
                    Ok(())
                }
            };
            if let Err(msg) = written {
                eprintln!("{msg}");
                return 2;
            }
            if let Some(csv) = outcome.csv {
                let target = cfg.csv.clone().or_else(|| cfg.out.as_ref().map(|o| Path::new(o).with_extension("csv").display().to_string()));
                if let Some(path) = target {
                    if let Err(e) = std::fs::write(&path, csv) {
                        eprintln!("cannot write {path}: {e}");
                        return 2;
                    }
                }
            }
            outcome.exit_code
        }
    }
}
