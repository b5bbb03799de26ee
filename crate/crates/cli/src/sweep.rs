//! Parameter sweeps: a finite grid of cases, one CSV row per case in grid
//! order, with a per-row error column so partial results survive individual
//! failures. Workers may run concurrently (QREPS_THREADS); rows are buffered
//! and emitted in order.

use clap::Args;
use std::path::PathBuf;

use crate::matio::format_f64;
use crate::{CliError, Family, GenusCache, RunConfig};

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, default_value_t = 1)]
    pub genus: usize,
    #[arg(long, value_enum)]
    pub family: Family,
    /// Dimensions, e.g. `8`, `3,5,8` or `3..12` (inclusive).
    #[arg(long, default_value = "")]
    pub dims: String,
    /// Phase numerators for the clock/shift families.
    #[arg(long, default_value = "1")]
    pub ps: String,
    /// Magnitudes for the perturbed family: comma list or `start:end:step`.
    #[arg(long, default_value = "0.05")]
    pub magnitudes: String,
    /// Seeds for the perturbed family, e.g. `0..49`.
    #[arg(long, default_value = "0")]
    pub seeds: String,
    #[arg(long, default_value_t = 1e-8)]
    pub tol_sw: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub tol_kw: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub quad_tol: f64,
    /// Bundle samples per case (sweeps skip the bundle pass by default).
    #[arg(long, default_value_t = 0)]
    pub bundle_samples: usize,
    /// Run the boundary-integral cross-check per case.
    #[arg(long, default_value_t = false)]
    pub boundary: bool,
    /// CSV output path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn parse_usize_list(spec: &str) -> Result<Vec<usize>, CliError> {
    parse_integers(spec).map(|v| v.into_iter().map(|x| x as usize).collect())
}

pub fn parse_i64_list(spec: &str) -> Result<Vec<i64>, CliError> {
    parse_integers(spec)
}

fn parse_integers(spec: &str) -> Result<Vec<i64>, CliError> {
    let spec = spec.trim();
    if spec.is_empty() {
        return Ok(Vec::new());
    }
    if let Some((a, b)) = spec.split_once("..") {
        let lo: i64 = a.trim().parse().map_err(|_| bad_grid(spec))?;
        let hi: i64 = b.trim().parse().map_err(|_| bad_grid(spec))?;
        if hi < lo {
            return Ok(Vec::new());
        }
        return Ok((lo..=hi).collect());
    }
    spec.split(',')
        .map(|s| s.trim().parse().map_err(|_| bad_grid(spec)))
        .collect()
}

pub fn parse_f64_list(spec: &str) -> Result<Vec<f64>, CliError> {
    let spec = spec.trim();
    if spec.is_empty() {
        return Ok(Vec::new());
    }
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() == 3 {
        let start: f64 = parts[0].trim().parse().map_err(|_| bad_grid(spec))?;
        let end: f64 = parts[1].trim().parse().map_err(|_| bad_grid(spec))?;
        let step: f64 = parts[2].trim().parse().map_err(|_| bad_grid(spec))?;
        if step <= 0.0 {
            return Err(bad_grid(spec));
        }
        let mut out = Vec::new();
        let mut k = 0usize;
        loop {
            let x = start + step * k as f64;
            if x > end + step * 1e-9 {
                break;
            }
            out.push(x.min(end));
            k += 1;
        }
        return Ok(out);
    }
    spec.split(',')
        .map(|s| s.trim().parse().map_err(|_| bad_grid(spec)))
        .collect()
}

fn bad_grid(spec: &str) -> CliError {
    CliError::Grid(format!("cannot parse grid specification `{spec}`"))
}

pub const CSV_HEADER: &str = "genus,family,dim,p,magnitude,seed,defect,winding,simplicial,kappa,kappa_int,sw_error,kw_error,quant_error,all_pass,error";

fn case_configs(args: &SweepArgs) -> Result<Vec<RunConfig>, CliError> {
    let dims = parse_usize_list(&args.dims)?;
    let base = RunConfig {
        genus: args.genus,
        family: args.family,
        dim: 0,
        p: 1,
        magnitude: 0.0,
        seed: 0,
        matrices: Vec::new(),
        tol_sw: args.tol_sw,
        tol_kw: args.tol_kw,
        quad_tol: args.quad_tol,
        bundle_samples: args.bundle_samples,
        bundle_seed: 0xB077,
        no_boundary: !args.boundary,
    };
    let mut cases = Vec::new();
    match args.family {
        Family::ClockShift | Family::Twisted => {
            let ps = parse_i64_list(&args.ps)?;
            for &dim in &dims {
                for &p in &ps {
                    cases.push(RunConfig {
                        dim,
                        p,
                        ..base.clone()
                    });
                }
            }
        }
        Family::Perturbed => {
            let magnitudes = parse_f64_list(&args.magnitudes)?;
            let seeds = parse_integers(&args.seeds)?;
            for &dim in &dims {
                for &magnitude in &magnitudes {
                    for &seed in &seeds {
                        cases.push(RunConfig {
                            dim,
                            magnitude,
                            seed: seed as u64,
                            ..base.clone()
                        });
                    }
                }
            }
        }
        Family::FromFile => {
            return Err(CliError::Grid(
                "family from-file cannot be swept".to_string(),
            ));
        }
    }
    Ok(cases)
}

fn csv_escape(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn render_row(config: &RunConfig, outcome: &Result<qreps::ktheory::InvariantReport, CliError>) -> (String, bool) {
    match outcome {
        Ok(r) => {
            let kappa = r
                .kappa
                .as_ref()
                .map(|k| format_f64(k.value))
                .unwrap_or_default();
            let kappa_int = r
                .kappa
                .as_ref()
                .map(|k| k.rounded.to_string())
                .unwrap_or_default();
            let kw = r
                .verdicts
                .kw_error
                .map(format_f64)
                .unwrap_or_default();
            let pass = r.verdicts.all_pass();
            (
                format!(
                    "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},",
                    config.genus,
                    config.family_name(),
                    config.dim,
                    config.p,
                    format_f64(config.magnitude),
                    config.seed,
                    format_f64(r.defect),
                    format_f64(r.winding),
                    format_f64(r.simplicial),
                    kappa,
                    kappa_int,
                    format_f64(r.verdicts.sw_error),
                    kw,
                    format_f64(r.verdicts.quant_error),
                    pass
                ),
                pass,
            )
        }
        Err(e) => (
            format!(
                "{},{},{},{},{},{},,,,,,,,,false,{}",
                config.genus,
                config.family_name(),
                config.dim,
                config.p,
                format_f64(config.magnitude),
                config.seed,
                csv_escape(&e.to_string())
            ),
            false,
        ),
    }
}

fn thread_count() -> usize {
    std::env::var("QREPS_THREADS")
        .ok()
        .and_then(|s| s.parse().ok())
        .filter(|&n| n >= 1)
        .unwrap_or(1)
}

/// Runs the grid; returns whether every case passed.
pub fn run_sweep(args: &SweepArgs) -> Result<bool, CliError> {
    let cases = case_configs(args)?;
    let mut lines = vec![CSV_HEADER.to_string()];
    let mut all_pass = true;

    if cases.is_empty() {
        emit(args, &lines)?;
        return Ok(true);
    }

    // the complex and labeling are shared read-only across workers
    let mut cache = GenusCache::new();
    cache.get(args.genus)?;
    let cache = cache;

    let workers = thread_count().min(cases.len());
    let mut rows: Vec<Option<(String, bool)>> = vec![None; cases.len()];
    if workers <= 1 {
        let mut local = GenusCache::new();
        for (i, config) in cases.iter().enumerate() {
            let outcome = crate::run_once(config, &mut local);
            rows[i] = Some(render_row(config, &outcome));
        }
    } else {
        let chunk = cases.len().div_ceil(workers);
        let results: Vec<Vec<(usize, (String, bool))>> = std::thread::scope(|scope| {
            let mut handles = Vec::new();
            for (w, case_chunk) in cases.chunks(chunk).enumerate() {
                let cache_ref = &cache;
                let start = w * chunk;
                handles.push(scope.spawn(move || {
                    let mut out = Vec::with_capacity(case_chunk.len());
                    for (off, config) in case_chunk.iter().enumerate() {
                        let outcome = run_case_with(config, cache_ref);
                        out.push((start + off, render_row(config, &outcome)));
                    }
                    out
                }));
            }
            handles.into_iter().map(|h| h.join().unwrap()).collect()
        });
        for part in results {
            for (i, row) in part {
                rows[i] = Some(row);
            }
        }
    }

    for row in rows.into_iter().flatten() {
        all_pass &= row.1;
        lines.push(row.0);
    }
    emit(args, &lines)?;
    Ok(all_pass)
}

fn run_case_with(
    config: &RunConfig,
    cache: &GenusCache,
) -> Result<qreps::ktheory::InvariantReport, CliError> {
    let tuple = config.build_tuple()?;
    let (complex, labels) = cache.peek(tuple.genus()).expect("genus prebuilt");
    let options = qreps::ktheory::VerifyOptions {
        tol_sw: config.tol_sw,
        tol_kw: config.tol_kw,
        quad_tol: config.quad_tol,
        bundle_samples: config.bundle_samples,
        bundle_seed: config.bundle_seed,
        check_boundary: !config.no_boundary,
        ..qreps::ktheory::VerifyOptions::default()
    };
    Ok(qreps::ktheory::verify_with(
        complex,
        labels,
        &tuple,
        config.family_name(),
        &options,
    )?)
}

fn emit(args: &SweepArgs, lines: &[String]) -> Result<(), CliError> {
    let text = lines.join("\n") + "\n";
    match &args.out {
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
