use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use super::{run_bo, ExperimentConfig, Method, RunOutput};
use crate::error::{Error, Result};

/// Outcome of one (method, seed) cell.
#[derive(Debug)]
pub struct CellResult {
    pub method: Method,
    pub seed: u64,
    pub outcome: std::result::Result<RunOutput, Error>,
}

/// All cells of a suite in a fixed order: methods as configured, then seeds.
#[derive(Debug)]
pub struct SuiteOutput {
    pub config: ExperimentConfig,
    pub cells: Vec<CellResult>,
}

impl SuiteOutput {
    pub fn failures(&self) -> impl Iterator<Item = &CellResult> {
        self.cells.iter().filter(|c| c.outcome.is_err())
    }

    pub fn all_ok(&self) -> bool {
        self.failures().next().is_none()
    }
}

pub(crate) fn thread_pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))
}

/// Runs every (method, seed) cell, `config.jobs` at a time. A failing cell
/// is kept as an error and does not stop the others.
pub fn run_suite(config: &ExperimentConfig) -> Result<SuiteOutput> {
    config.validate()?;
    let cells: Vec<(Method, u64)> = config
        .methods
        .iter()
        .flat_map(|&m| config.seeds.iter().map(move |&s| (m, s)))
        .collect();
    let results = thread_pool(config.jobs)?.install(|| {
        cells
            .par_iter()
            .map(|&(method, seed)| CellResult {
                method,
                seed,
                outcome: run_bo(config, method, seed),
            })
            .collect()
    });
    Ok(SuiteOutput {
        config: config.clone(),
        cells: results,
    })
}

/// Column names of the trajectory CSV.
pub fn trajectory_header(dim: usize, x_columns: bool) -> Vec<String> {
    let mut h: Vec<String> = ["seed", "method", "problem", "dim", "iteration"].map(String::from).to_vec();
    if x_columns {
        h.extend((1..=dim).map(|p| format!("x{p}")));
    }
    h.extend(["y", "y_best", "elapsed_ms", "cand_ms", "fit_ms"].map(String::from));
    h
}

/// Writes one row per record; failed cells get a single row whose
/// iteration field reads `failed`.
pub fn write_trajectories<W: Write>(out: W, suite: &SuiteOutput) -> Result<()> {
    let cfg = &suite.config;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(trajectory_header(cfg.dim, cfg.x_columns))?;
    let timing = |v: f64| if cfg.timing { format!("{v:.3}") } else { String::new() };
    for cell in &suite.cells {
        match &cell.outcome {
            Ok(run) => {
                for r in &run.records {
                    let mut row = vec![
                        r.seed.to_string(),
                        r.method.to_string(),
                        r.problem.clone(),
                        r.dim.to_string(),
                        r.iteration.to_string(),
                    ];
                    if cfg.x_columns {
                        row.extend(r.x.iter().map(|v| v.to_string()));
                    }
                    row.extend([
                        r.y.to_string(),
                        r.y_best.to_string(),
                        timing(r.elapsed_ms),
                        timing(r.cand_ms),
                        timing(r.fit_ms),
                    ]);
                    w.write_record(&row)?;
                }
            }
            Err(_) => {
                let mut row = vec![
                    cell.seed.to_string(),
                    cell.method.to_string(),
                    cfg.problem.clone(),
                    cfg.dim.to_string(),
                    "failed".to_string(),
                ];
                let rest = if cfg.x_columns { cfg.dim + 5 } else { 5 };
                row.extend(std::iter::repeat_n(String::new(), rest));
                w.write_record(&row)?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct CellMeta {
    method: Method,
    seed: u64,
    status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    shift: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fit_failures: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    final_lengthscales: Option<Vec<f64>>,
}

#[derive(Serialize)]
struct RunMeta<'a> {
    command: &'static str,
    version: &'static str,
    config: &'a ExperimentConfig,
    cells: Vec<CellMeta>,
}

/// Effective configuration, per-cell seeds and status as TOML.
pub fn metadata_toml(suite: &SuiteOutput) -> Result<String> {
    let cells = suite
        .cells
        .iter()
        .map(|c| match &c.outcome {
            Ok(run) => CellMeta {
                method: c.method,
                seed: c.seed,
                status: "ok",
                error: None,
                shift: run.shift.clone(),
                fit_failures: Some(run.fit_failures.clone()),
                final_lengthscales: Some(run.final_hyper.lengthscales.clone()),
            },
            Err(e) => CellMeta {
                method: c.method,
                seed: c.seed,
                status: "failed",
                error: Some(e.to_string()),
                shift: None,
                fit_failures: None,
                final_lengthscales: None,
            },
        })
        .collect();
    let meta = RunMeta {
        command: "run",
        version: env!("CARGO_PKG_VERSION"),
        config: &suite.config,
        cells,
    };
    toml::to_string(&meta).map_err(|e| Error::Config(format!("cannot serialize metadata: {e}")))
}

/// Writes the trajectory CSV to `path` and its metadata next to it.
pub fn write_suite(path: &Path, suite: &SuiteOutput) -> Result<()> {
    write_trajectories(std::fs::File::create(path)?, suite)?;
    std::fs::write(super::sidecar_path(path), metadata_toml(suite)?)?;
    Ok(())
}
