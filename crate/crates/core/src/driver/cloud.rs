use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::Metric;
use crate::points::Points;
use crate::rng::{substream, tag};
use crate::sampling::{lhs, sobol};
use crate::vorcands::{direct_sample, project_sample, scheme_final, Strategy};

/// Candidate generators available for point clouds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CloudScheme {
    Sobol,
    Lhs,
    Vor,
}

impl CloudScheme {
    pub fn name(self) -> &'static str {
        match self {
            CloudScheme::Sobol => "sobol",
            CloudScheme::Lhs => "lhs",
            CloudScheme::Vor => "vor",
        }
    }

    fn key(self) -> u64 {
        self as u64
    }
}

impl fmt::Display for CloudScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for CloudScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sobol" => Ok(CloudScheme::Sobol),
            "lhs" => Ok(CloudScheme::Lhs),
            "vor" => Ok(CloudScheme::Vor),
            other => Err(Error::Config(format!(
                "unknown scheme {other:?} (expected sobol, lhs or vor)"
            ))),
        }
    }
}

/// Settings for a candidate-cloud dump.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CloudConfig {
    /// Dimension of the generated design (a loaded design brings its own).
    pub dim: usize,
    /// Size of the generated design (ignored when `design` is given).
    pub n: usize,
    /// CSV file of design rows to use instead of a generated one.
    pub design: Option<PathBuf>,
    pub scheme: Vec<CloudScheme>,
    pub count: usize,
    pub seed: u64,
    /// Walk strategy for `vor`; unset uses the alternating final scheme.
    pub strategy: Option<Strategy>,
    /// Metric for `vor` with an explicit strategy.
    pub metric: Metric,
    /// Acquisition iteration for the final scheme (even: rect, odd: proj).
    pub iteration: usize,
    /// Design row the incumbent-biased walks start from.
    pub incumbent: usize,
    pub out: Option<PathBuf>,
}

/// Partial cloud settings (config file or flags).
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CloudSettings {
    pub dim: Option<usize>,
    pub n: Option<usize>,
    pub design: Option<PathBuf>,
    pub scheme: Option<Vec<CloudScheme>>,
    pub count: Option<usize>,
    pub seed: Option<u64>,
    pub strategy: Option<Strategy>,
    pub metric: Option<Metric>,
    pub iteration: Option<usize>,
    pub incumbent: Option<usize>,
    pub out: Option<PathBuf>,
}

impl CloudSettings {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn overlay(self, o: CloudSettings) -> Self {
        Self {
            dim: o.dim.or(self.dim),
            n: o.n.or(self.n),
            design: o.design.or(self.design),
            scheme: o.scheme.or(self.scheme),
            count: o.count.or(self.count),
            seed: o.seed.or(self.seed),
            strategy: o.strategy.or(self.strategy),
            metric: o.metric.or(self.metric),
            iteration: o.iteration.or(self.iteration),
            incumbent: o.incumbent.or(self.incumbent),
            out: o.out.or(self.out),
        }
    }

    /// Defaults: 2-D, 10 design points, 1000 `vor` candidates, seed 0.
    pub fn resolve(self) -> Result<CloudConfig> {
        let cfg = CloudConfig {
            dim: self.dim.unwrap_or(2),
            n: self.n.unwrap_or(10),
            design: self.design,
            scheme: self.scheme.unwrap_or_else(|| vec![CloudScheme::Vor]),
            count: self.count.unwrap_or(1000),
            seed: self.seed.unwrap_or(0),
            strategy: self.strategy,
            metric: self.metric.unwrap_or(Metric::LInf),
            iteration: self.iteration.unwrap_or(0),
            incumbent: self.incumbent.unwrap_or(0),
            out: self.out,
        };
        if cfg.dim == 0 || cfg.n == 0 || cfg.count == 0 || cfg.scheme.is_empty() {
            return Err(Error::Config("dim, n, count and scheme must be non-empty".into()));
        }
        Ok(cfg)
    }
}

/// Reads design rows from a headerless (or single-header) numeric CSV.
pub fn read_design(path: &Path) -> Result<Points> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(io),
            other => Error::Config(format!("{}: {other:?}", path.display())),
        })?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec?;
        let parsed: std::result::Result<Vec<f64>, _> = rec.iter().map(f64::from_str).collect();
        match parsed {
            Ok(r) => rows.push(r),
            Err(_) if i == 0 => continue,
            Err(e) => {
                return Err(Error::Config(format!("{} line {}: {e}", path.display(), i + 1)));
            }
        }
    }
    let design = Points::from_rows(&rows)?;
    if !design.in_unit_cube() {
        return Err(Error::Config(format!("{}: design rows must lie in [0,1]^P", path.display())));
    }
    Ok(design)
}

/// A design and the candidate sets built around it.
#[derive(Clone, Debug)]
pub struct Cloud {
    pub design: Points,
    pub candidates: Vec<(CloudScheme, Points)>,
}

pub fn candidate_cloud(cfg: &CloudConfig) -> Result<Cloud> {
    let design = match &cfg.design {
        Some(path) => read_design(path)?,
        None => lhs(cfg.n, cfg.dim, &mut substream(cfg.seed, &[tag::DESIGN])),
    };
    if cfg.incumbent >= design.len() {
        return Err(Error::Config(format!(
            "incumbent {} out of range for {} design rows",
            cfg.incumbent,
            design.len()
        )));
    }
    let mut candidates = Vec::new();
    for &scheme in &cfg.scheme {
        let mut rng = substream(cfg.seed, &[tag::CANDIDATES, scheme.key()]);
        let pts = match scheme {
            CloudScheme::Sobol => sobol(cfg.count, design.dim(), 1)?,
            CloudScheme::Lhs => lhs(cfg.count, design.dim(), &mut rng),
            CloudScheme::Vor => match cfg.strategy {
                None => scheme_final(&design, cfg.count, cfg.iteration, cfg.incumbent, &mut rng)?.points,
                Some(Strategy::Proj) => {
                    let pre = lhs(cfg.count, design.dim(), &mut rng);
                    project_sample(&design, &pre, cfg.metric, &mut rng)?.points
                }
                Some(s) => direct_sample(&design, cfg.count, s, cfg.metric, cfg.incumbent, &mut rng)?.points,
            },
        };
        candidates.push((scheme, pts));
    }
    Ok(Cloud { design, candidates })
}

/// Rows tagged `design`, then each scheme's candidates tagged by name.
pub fn write_cloud<W: Write>(out: W, cloud: &Cloud) -> Result<()> {
    let dim = cloud.design.dim();
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["kind".to_string()];
    header.extend((1..=dim).map(|p| format!("x{p}")));
    w.write_record(&header)?;
    let mut put = |kind: &str, pts: &Points| -> Result<()> {
        for r in pts.rows() {
            let mut row = vec![kind.to_string()];
            row.extend(r.iter().map(|v| v.to_string()));
            w.write_record(&row)?;
        }
        Ok(())
    };
    put("design", &cloud.design)?;
    for (scheme, pts) in &cloud.candidates {
        put(scheme.name(), pts)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vor_cloud_avoids_the_boundary() {
        let cfg = CloudSettings::default().resolve().unwrap();
        let cloud = candidate_cloud(&cfg).unwrap();
        assert_eq!(cloud.design.len(), 10);
        let (scheme, pts) = &cloud.candidates[0];
        assert_eq!((*scheme, pts.len()), (CloudScheme::Vor, 1000));
        assert!(pts.rows().all(|r| r.iter().all(|&v| v != 0.0 && v != 1.0)));
    }

    #[test]
    fn row_count_and_tags() {
        let cfg = CloudSettings {
            scheme: Some(vec![CloudScheme::Lhs, CloudScheme::Sobol]),
            count: Some(50),
            ..Default::default()
        }
        .resolve()
        .unwrap();
        let mut buf = Vec::new();
        write_cloud(&mut buf, &candidate_cloud(&cfg).unwrap()).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "kind,x1,x2");
        assert_eq!(lines.len(), 1 + 10 + 100);
        assert_eq!(lines.iter().filter(|l| l.starts_with("sobol,")).count(), 50);
    }

    #[test]
    fn design_from_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.csv");
        std::fs::write(&path, "a,b\n0.1,0.2\n0.7,0.9\n0.4,0.5\n").unwrap();
        let d = read_design(&path).unwrap();
        assert_eq!(d.len(), 3);
        assert!(matches!(read_design(&dir.path().join("missing.csv")), Err(Error::Io(_))));
        std::fs::write(&path, "0.1,0.2\n0.3,x\n").unwrap();
        assert!(read_design(&path).is_err());
    }
}
