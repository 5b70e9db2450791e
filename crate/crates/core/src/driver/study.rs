use std::io::Write;
use std::path::{Path, PathBuf};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::suite::thread_pool;
use crate::error::{Error, Result};
use crate::metrics::Metric;
use crate::nn_index::NnIndex;
use crate::points::Points;
use crate::rng::{substream, tag};
use crate::vorcands::{raw_candidates_with_index, Strategy};

/// Settings for the boundary-prevalence study.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryStudyConfig {
    /// Design sizes.
    pub n: Vec<usize>,
    /// Dimensions.
    pub dim: Vec<usize>,
    pub strategy: Vec<Strategy>,
    pub metric: Vec<Metric>,
    pub reps: usize,
    pub seed: u64,
    /// Walks per cell.
    pub candidates: usize,
    pub jobs: usize,
    pub out: Option<PathBuf>,
}

impl Default for BoundaryStudyConfig {
    fn default() -> Self {
        Self {
            n: vec![10, 100, 1000],
            dim: vec![2, 10, 100],
            strategy: Strategy::ALL.to_vec(),
            metric: Metric::ALL.to_vec(),
            reps: 10,
            seed: 0,
            candidates: 1000,
            jobs: 0,
            out: None,
        }
    }
}

impl BoundaryStudyConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.into()));
        if self.n.iter().any(|&n| n == 0) || self.n.is_empty() {
            return bad("design sizes must be positive");
        }
        if self.dim.iter().any(|&d| d == 0) || self.dim.is_empty() {
            return bad("dimensions must be positive");
        }
        if self.strategy.is_empty() || self.metric.is_empty() {
            return bad("at least one strategy and one metric are required");
        }
        if self.reps == 0 || self.candidates == 0 {
            return bad("reps and candidates must be positive");
        }
        Ok(())
    }
}

/// Partial study settings (config file or flags).
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundarySettings {
    pub n: Option<Vec<usize>>,
    pub dim: Option<Vec<usize>>,
    pub strategy: Option<Vec<Strategy>>,
    pub metric: Option<Vec<Metric>>,
    pub reps: Option<usize>,
    pub seed: Option<u64>,
    pub candidates: Option<usize>,
    pub jobs: Option<usize>,
    pub out: Option<PathBuf>,
}

impl BoundarySettings {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn overlay(self, o: BoundarySettings) -> Self {
        Self {
            n: o.n.or(self.n),
            dim: o.dim.or(self.dim),
            strategy: o.strategy.or(self.strategy),
            metric: o.metric.or(self.metric),
            reps: o.reps.or(self.reps),
            seed: o.seed.or(self.seed),
            candidates: o.candidates.or(self.candidates),
            jobs: o.jobs.or(self.jobs),
            out: o.out.or(self.out),
        }
    }

    pub fn resolve(self) -> Result<BoundaryStudyConfig> {
        let d = BoundaryStudyConfig::default();
        let cfg = BoundaryStudyConfig {
            n: self.n.unwrap_or(d.n),
            dim: self.dim.unwrap_or(d.dim),
            strategy: self.strategy.unwrap_or(d.strategy),
            metric: self.metric.unwrap_or(d.metric),
            reps: self.reps.unwrap_or(d.reps),
            seed: self.seed.unwrap_or(d.seed),
            candidates: self.candidates.unwrap_or(d.candidates),
            jobs: self.jobs.unwrap_or(d.jobs),
            out: self.out,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Proportion of walks ending on the cube boundary in one study cell.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryRow {
    pub strategy: Strategy,
    pub metric: Metric,
    pub n: usize,
    pub p: usize,
    pub rep: usize,
    pub prop_boundary: f64,
}

/// `n` independent uniform points in `[0,1]^dim`.
fn uniform_design<R: Rng + ?Sized>(n: usize, dim: usize, rng: &mut R) -> Points {
    Points::from_flat(dim, (0..n * dim).map(|_| rng.random::<f64>()).collect()).expect("dim > 0")
}

fn strategy_key(s: Strategy) -> u64 {
    Strategy::ALL.iter().position(|&t| t == s).unwrap() as u64
}

/// Runs the study. Within a replicate, one uniform design is shared by all
/// strategies and metrics of an `(N, P)` pair, and one stream of walk
/// origins and directions is shared by all metrics of a strategy.
pub fn boundary_study(cfg: &BoundaryStudyConfig) -> Result<Vec<BoundaryRow>> {
    cfg.validate()?;
    let mut blocks = Vec::new();
    for rep in 0..cfg.reps {
        for &n in &cfg.n {
            for &p in &cfg.dim {
                blocks.push((rep, n, p));
            }
        }
    }
    let results: Vec<Result<Vec<BoundaryRow>>> = thread_pool(cfg.jobs)?.install(|| {
        blocks
            .par_iter()
            .map(|&(rep, n, p)| {
                let key = [n as u64, p as u64, rep as u64];
                let design = uniform_design(n, p, &mut substream(cfg.seed, &[tag::DESIGN, key[0], key[1], key[2]]));
                let indices: Vec<NnIndex> = cfg
                    .metric
                    .iter()
                    .map(|&m| NnIndex::build(&design, m))
                    .collect::<Result<_>>()?;
                let mut rows = Vec::new();
                for &strategy in &cfg.strategy {
                    for (index, &metric) in indices.iter().zip(&cfg.metric) {
                        let mut rng = substream(cfg.seed, &[tag::CANDIDATES, key[0], key[1], key[2], strategy_key(strategy)]);
                        let cands = raw_candidates_with_index(index, cfg.candidates, strategy, &mut rng)?;
                        rows.push(BoundaryRow {
                            strategy,
                            metric,
                            n,
                            p,
                            rep,
                            prop_boundary: cands.boundary_fraction(),
                        });
                    }
                }
                Ok(rows)
            })
            .collect()
    });
    let mut rows = Vec::new();
    for r in results {
        rows.extend(r?);
    }
    Ok(rows)
}

pub const BOUNDARY_HEADER: [&str; 6] = ["strategy", "metric", "N", "P", "rep", "prop_boundary"];

pub fn write_boundary_rows<W: Write>(out: W, rows: &[BoundaryRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(BOUNDARY_HEADER)?;
    for r in rows {
        w.write_record([
            r.strategy.to_string(),
            r.metric.to_string(),
            r.n.to_string(),
            r.p.to_string(),
            r.rep.to_string(),
            r.prop_boundary.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
