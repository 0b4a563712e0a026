//! Corpus runner producing one CSV row per instance file.

use std::path::{Path, PathBuf};
use std::time::Instant;

use jrp_core::solver::{certify, solve, SolverConfig};
use jrp_core::Rational;
use rayon::prelude::*;
use serde::Serialize;

use crate::format::parse_instance;

/// Frozen column order of the bench CSV.
pub const COLUMNS: [&str; 13] = [
    "file",
    "n",
    "lower_bound",
    "pow2_cost",
    "easy_cost",
    "best_cost",
    "best_method",
    "ratio_best",
    "ratio_pow2",
    "candidates_evaluated",
    "budget_exhausted",
    "wall_ms",
    "error",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub file: String,
    pub n: Option<usize>,
    pub lower_bound: Option<f64>,
    pub pow2_cost: Option<f64>,
    pub easy_cost: Option<f64>,
    pub best_cost: Option<f64>,
    pub best_method: Option<String>,
    pub ratio_best: Option<f64>,
    pub ratio_pow2: Option<f64>,
    pub candidates_evaluated: Option<u64>,
    pub budget_exhausted: Option<bool>,
    pub wall_ms: Option<f64>,
    pub error: Option<String>,
}

impl BenchRow {
    fn failed(file: String, error: String) -> Self {
        BenchRow {
            file,
            n: None,
            lower_bound: None,
            pow2_cost: None,
            easy_cost: None,
            best_cost: None,
            best_method: None,
            ratio_best: None,
            ratio_pow2: None,
            candidates_evaluated: None,
            budget_exhausted: None,
            wall_ms: None,
            error: Some(error),
        }
    }
}

/// `*.json` files directly inside `dir`, sorted by file name.
pub fn corpus_files(dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort_by(|a, b| a.file_name().cmp(&b.file_name()));
    Ok(files)
}

fn run_one(path: &Path, epsilon: &Rational, config: &SolverConfig) -> BenchRow {
    let file = path.file_name().map_or_else(String::new, |f| f.to_string_lossy().into_owned());
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return BenchRow::failed(file, e.to_string()),
    };
    let instance = match parse_instance(&text) {
        Ok(i) => i,
        Err(e) => return BenchRow::failed(file, e.to_string()),
    };
    let start = Instant::now();
    let result = match solve(&instance, epsilon, config) {
        Ok(r) => r,
        Err(e) => return BenchRow::failed(file, e.to_string()),
    };
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    BenchRow {
        file,
        n: Some(instance.len()),
        lower_bound: Some(result.lower_bound),
        pow2_cost: Some(result.pow2_cost),
        easy_cost: Some(result.easy_cost),
        best_cost: Some(result.best_cost),
        best_method: Some(result.best_method.as_str().to_string()),
        ratio_best: Some(certify(&result).ratio),
        ratio_pow2: Some(result.pow2_cost / result.lower_bound),
        candidates_evaluated: Some(result.candidates_evaluated),
        budget_exhausted: Some(result.budget_exhausted),
        wall_ms: Some(wall_ms),
        error: None,
    }
}

/// Solves every instance of the corpus on `threads` workers; rows keep
/// file-name order and failures become rows with only `file` and `error`.
pub fn run_bench(
    dir: &Path,
    epsilon: &Rational,
    config: &SolverConfig,
    threads: usize,
) -> anyhow::Result<Vec<BenchRow>> {
    let files = corpus_files(dir)?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build()?;
    Ok(pool.install(|| files.par_iter().map(|p| run_one(p, epsilon, config)).collect()))
}

pub fn write_csv<W: std::io::Write>(rows: &[BenchRow], out: W) -> anyhow::Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(COLUMNS)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}
