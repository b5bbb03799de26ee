//! Command-line driver: build a unitary tuple from one of the generator
//! families (or from matrix files), run the invariant verification, and
//! write a deterministic report. Batch sweeps emit one CSV row per case.

mod matio;
mod report;
mod sweep;

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;
use thiserror::Error;

use qreps::groups::{
    build_surface_group, clock_shift_tuple, perturbed_commuting_tuple, twisted_genus_tuple,
    UnitaryTuple,
};
use qreps::ktheory::{verify_with, InvariantReport, KTheoryError, VerifyOptions};
use qreps::surface::{build_complex, edge_labels, EdgeLabeling, SurfaceComplex};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {detail}")]
    Parse { path: String, detail: String },
    #[error("{path}: {detail}")]
    Io { path: String, detail: String },
    #[error("family `from-file` needs {expected} matrix paths (u1 v1 ... per handle), got {got}")]
    MatrixCount { expected: usize, got: usize },
    #[error("{0}")]
    Grid(String),
    #[error(transparent)]
    KTheory(#[from] KTheoryError),
    #[error(transparent)]
    Group(#[from] qreps::groups::GroupError),
    #[error(transparent)]
    Surface(#[from] qreps::surface::SurfaceError),
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Parse { .. } => "parse",
            CliError::Io { .. } => "io",
            CliError::MatrixCount { .. } => "matrix-count",
            CliError::Grid(_) => "grid",
            CliError::KTheory(_) => "ktheory",
            CliError::Group(_) => "group",
            CliError::Surface(_) => "surface",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    ClockShift,
    Twisted,
    Perturbed,
    FromFile,
}

#[derive(Debug, Args, Clone)]
pub struct RunConfig {
    /// Genus of the surface group.
    #[arg(long, default_value_t = 1)]
    pub genus: usize,
    /// Generator family for the tuple.
    #[arg(long, value_enum)]
    pub family: Family,
    /// Matrix dimension n for the built-in families.
    #[arg(long, default_value_t = 5)]
    pub dim: usize,
    /// Phase numerator p for the clock/shift families.
    #[arg(long, default_value_t = 1)]
    pub p: i64,
    /// Perturbation magnitude for the perturbed family.
    #[arg(long, default_value_t = 0.05)]
    pub magnitude: f64,
    /// Random seed for the perturbed family.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Matrix files (u1 v1 u2 v2 ...) for family `from-file`.
    #[arg(long = "matrix")]
    pub matrices: Vec<PathBuf>,
    /// Tolerance on |S - W|.
    #[arg(long, default_value_t = 1e-8)]
    pub tol_sw: f64,
    /// Tolerance on |kappa - dim * W| at genus one.
    #[arg(long, default_value_t = 1e-6)]
    pub tol_kw: f64,
    /// Absolute quadrature tolerance for cross-checks.
    #[arg(long, default_value_t = 1e-10)]
    pub quad_tol: f64,
    /// Random samples for the bundle rank check (0 disables it).
    #[arg(long, default_value_t = 100)]
    pub bundle_samples: usize,
    /// Seed for the bundle sampling.
    #[arg(long, default_value_t = 0xB077)]
    pub bundle_seed: u64,
    /// Skip the per-simplex boundary-integral cross-check.
    #[arg(long, default_value_t = false)]
    pub no_boundary: bool,
}

impl RunConfig {
    pub fn family_name(&self) -> &'static str {
        match self.family {
            Family::ClockShift => "clock-shift",
            Family::Twisted => "twisted",
            Family::Perturbed => "perturbed",
            Family::FromFile => "from-file",
        }
    }

    fn verify_options(&self) -> VerifyOptions {
        VerifyOptions {
            tol_sw: self.tol_sw,
            tol_kw: self.tol_kw,
            quad_tol: self.quad_tol,
            bundle_samples: self.bundle_samples,
            bundle_seed: self.bundle_seed,
            check_boundary: !self.no_boundary,
            ..VerifyOptions::default()
        }
    }

    fn build_tuple(&self) -> Result<UnitaryTuple, CliError> {
        match self.family {
            Family::ClockShift => {
                if self.genus != 1 {
                    return Err(CliError::Grid(
                        "family clock-shift is genus 1; use --family twisted for higher genus"
                            .to_string(),
                    ));
                }
                Ok(clock_shift_tuple(self.dim, self.p)?)
            }
            Family::Twisted => Ok(twisted_genus_tuple(self.genus, self.dim, self.p)?),
            Family::Perturbed => Ok(perturbed_commuting_tuple(
                self.genus,
                self.dim,
                self.magnitude,
                self.seed,
            )?),
            Family::FromFile => {
                if self.matrices.len() != 2 * self.genus {
                    return Err(CliError::MatrixCount {
                        expected: 2 * self.genus,
                        got: self.matrices.len(),
                    });
                }
                let mut unitaries = Vec::with_capacity(self.matrices.len());
                for path in &self.matrices {
                    unitaries.push(matio::read_matrix(path)?);
                }
                Ok(UnitaryTuple::new(self.genus, unitaries)?)
            }
        }
    }
}

/// Complex and labeling for a genus, built once per process.
pub struct GenusCache {
    cache: std::collections::HashMap<usize, (SurfaceComplex, EdgeLabeling)>,
}

impl Default for GenusCache {
    fn default() -> Self {
        Self::new()
    }
}

impl GenusCache {
    pub fn new() -> Self {
        GenusCache {
            cache: std::collections::HashMap::new(),
        }
    }

    pub fn get(&mut self, genus: usize) -> Result<&(SurfaceComplex, EdgeLabeling), CliError> {
        use std::collections::hash_map::Entry;
        if let Entry::Vacant(slot) = self.cache.entry(genus) {
            let sg = build_surface_group(genus);
            let complex = build_complex(genus);
            let labels = edge_labels(&complex, &sg)?;
            slot.insert((complex, labels));
        }
        Ok(&self.cache[&genus])
    }

    pub fn peek(&self, genus: usize) -> Option<&(SurfaceComplex, EdgeLabeling)> {
        self.cache.get(&genus)
    }
}

pub fn run_once(config: &RunConfig, cache: &mut GenusCache) -> Result<InvariantReport, CliError> {
    let tuple = config.build_tuple()?;
    let options = config.verify_options();
    let (complex, labels) = cache.get(tuple.genus())?;
    Ok(verify_with(complex, labels, &tuple, config.family_name(), &options)?)
}

#[derive(Debug, Parser)]
#[command(
    name = "qreps",
    about = "Invariants of almost-commuting unitary tuples over surface groups",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Verify one tuple and write the invariant report.
    Run {
        #[command(flatten)]
        config: RunConfig,
        /// Report path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a parameter grid and emit one CSV row per case.
    Sweep(sweep::SweepArgs),
    /// Export the labeled triangulation as text for inspection.
    ExportComplex {
        #[arg(long, default_value_t = 1)]
        genus: usize,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the matrices of a generated tuple to files (u1 v1 u2 v2 ...),
    /// in the format accepted by `run --family from-file`.
    ExportTuple {
        #[command(flatten)]
        config: RunConfig,
        /// Directory for the matrix files.
        #[arg(long)]
        dir: PathBuf,
    },
}

fn write_or_print(out: Option<&PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io {
            path: path.display().to_string(),
            detail: e.to_string(),
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, out } => {
            let mut cache = GenusCache::new();
            match run_once(&config, &mut cache) {
                Ok(report) => {
                    let text = report::render_report(&config, &report);
                    if let Err(e) = write_or_print(out.as_ref(), &text) {
                        eprintln!("{}", report::render_error(e.kind(), &e.to_string()));
                        return ExitCode::from(1);
                    }
                    if report.verdicts.all_pass() {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(1)
                    }
                }
                Err(e) => {
                    eprintln!("{}", report::render_error(e.kind(), &e.to_string()));
                    ExitCode::from(1)
                }
            }
        }
        Command::Sweep(args) => match sweep::run_sweep(&args) {
            Ok(all_pass) => {
                if all_pass {
                    ExitCode::SUCCESS
                } else {
                    ExitCode::from(1)
                }
            }
            Err(e) => {
                eprintln!("{}", report::render_error(e.kind(), &e.to_string()));
                ExitCode::from(1)
            }
        },
        Command::ExportComplex { genus, out } => {
            let sg = build_surface_group(genus);
            let complex = build_complex(genus);
            match edge_labels(&complex, &sg) {
                Ok(labels) => {
                    let text = complex.export_text(Some(&labels));
                    match write_or_print(out.as_ref(), &text) {
                        Ok(()) => ExitCode::SUCCESS,
                        Err(e) => {
                            eprintln!("{}", report::render_error(e.kind(), &e.to_string()));
                            ExitCode::from(1)
                        }
                    }
                }
                Err(e) => {
                    eprintln!("{}", report::render_error("surface", &e.to_string()));
                    ExitCode::from(1)
                }
            }
        }
        Command::ExportTuple { config, dir } => match export_tuple(&config, &dir) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("{}", report::render_error(e.kind(), &e.to_string()));
                ExitCode::from(1)
            }
        },
    }
}

fn export_tuple(config: &RunConfig, dir: &PathBuf) -> Result<(), CliError> {
    let tuple = config.build_tuple()?;
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io {
        path: dir.display().to_string(),
        detail: e.to_string(),
    })?;
    for k in 1..=tuple.genus() {
        matio::write_matrix(&dir.join(format!("u{k}.json")), tuple.u(k))?;
        matio::write_matrix(&dir.join(format!("v{k}.json")), tuple.v(k))?;
    }
    Ok(())
}
