use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Acquisition method for one trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Voronoi candidates, alternating `rect` and `proj` under `l∞`.
    Vor,
    /// A fresh Latin hypercube of candidates each iteration.
    Lhs,
    /// The next block of the Sobol sequence each iteration.
    Sobol,
    /// Multistart quasi-Newton ascent of EI.
    Opt,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Vor, Method::Lhs, Method::Sobol, Method::Opt];

    pub fn name(self) -> &'static str {
        match self {
            Method::Vor => "vor",
            Method::Lhs => "lhs",
            Method::Sobol => "sobol",
            Method::Opt => "opt",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "vor" => Ok(Method::Vor),
            "lhs" => Ok(Method::Lhs),
            "sobol" => Ok(Method::Sobol),
            "opt" => Ok(Method::Opt),
            other => Err(Error::Config(format!(
                "unknown method {other:?} (expected vor, lhs, sobol or opt)"
            ))),
        }
    }
}

/// Default candidate count: `min(5000, 100·P)`.
pub fn default_candidates(dim: usize) -> usize {
    (100 * dim).min(5000)
}

/// Fully resolved settings for a suite of BO runs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub problem: String,
    pub dim: usize,
    pub methods: Vec<Method>,
    /// Total evaluations per run, initial design included.
    pub budget: usize,
    /// One run per seed and method.
    pub seeds: Vec<u64>,
    pub candidates: usize,
    pub init_size: usize,
    /// Refit hyperparameters at every acquisition before this one ...
    pub refit_all_until: usize,
    /// ... and at every multiple of this afterwards.
    pub refit_every: usize,
    /// Starting points for the `opt` method.
    pub opt_starts: usize,
    /// Worker threads across cells; 0 uses all cores.
    pub jobs: usize,
    /// Write the evaluated coordinates into the CSV.
    pub x_columns: bool,
    /// Write timing columns (empty when off, which makes output reproducible byte for byte).
    pub timing: bool,
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Defaults for everything except the problem.
    pub fn new(problem: &str, dim: usize) -> Self {
        Self {
            problem: problem.to_string(),
            dim,
            methods: vec![Method::Vor],
            budget: 10 * dim.max(1),
            seeds: vec![0],
            candidates: default_candidates(dim),
            init_size: 3 * dim,
            refit_all_until: 200,
            refit_every: 25,
            opt_starts: 2 * dim + 1,
            jobs: 0,
            x_columns: true,
            timing: true,
            out: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if self.dim == 0 {
            return fail("dim must be at least 1".into());
        }
        if self.methods.is_empty() {
            return fail("at least one method is required".into());
        }
        if self.seeds.is_empty() {
            return fail("at least one seed (replicate) is required".into());
        }
        if self.init_size < 2 {
            return fail("the initial design needs at least two points".into());
        }
        if self.budget <= self.init_size {
            return fail(format!(
                "budget {} must exceed the initial design size {}",
                self.budget, self.init_size
            ));
        }
        if self.candidates == 0 {
            return fail("candidate count must be positive".into());
        }
        if self.refit_every == 0 {
            return fail("refit_every must be positive".into());
        }
        if self.opt_starts == 0 {
            return fail("opt_starts must be positive".into());
        }
        crate::bench::make_problem(&self.problem, self.dim, &mut crate::rng::substream(0, &[]))?;
        Ok(())
    }
}

/// Partial settings from a config file or command line. Later layers
/// override earlier ones key by key.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSettings {
    pub problem: Option<String>,
    pub dim: Option<usize>,
    pub method: Option<Vec<Method>>,
    pub budget: Option<usize>,
    pub reps: Option<usize>,
    pub seed: Option<u64>,
    pub seeds: Option<Vec<u64>>,
    pub candidates: Option<usize>,
    pub init_size: Option<usize>,
    pub refit_all_until: Option<usize>,
    pub refit_every: Option<usize>,
    pub opt_starts: Option<usize>,
    pub jobs: Option<usize>,
    pub x_columns: Option<bool>,
    pub timing: Option<bool>,
    pub out: Option<PathBuf>,
}

macro_rules! overlay {
    ($dst:ident, $src:ident; $($f:ident),*) => {
        $( if $src.$f.is_some() { $dst.$f = $src.$f; } )*
    };
}

impl RunSettings {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// `other`'s keys take precedence.
    pub fn overlay(mut self, other: RunSettings) -> Self {
        overlay!(self, other; problem, dim, method, budget, reps, seed, seeds, candidates,
            init_size, refit_all_until, refit_every, opt_starts, jobs, x_columns, timing, out);
        self
    }

    /// Fills defaults. Without an explicit seed list, replicate `r` uses
    /// seed `seed + r` (seed defaults to 0, reps to 1).
    pub fn resolve(self) -> Result<ExperimentConfig> {
        let problem = self.problem.ok_or_else(|| Error::Config("missing required setting: problem".into()))?;
        let dim = match (self.dim, problem.as_str()) {
            (Some(d), _) => d,
            (None, "sinesum2d") => 2,
            (None, _) => return Err(Error::Config("missing required setting: dim".into())),
        };
        let mut cfg = ExperimentConfig::new(&problem, dim);
        if let Some(m) = self.method {
            let mut seen = Vec::new();
            for x in m {
                if !seen.contains(&x) {
                    seen.push(x);
                }
            }
            cfg.methods = seen;
        }
        cfg.seeds = match self.seeds {
            Some(s) => s,
            None => {
                let base = self.seed.unwrap_or(0);
                (0..self.reps.unwrap_or(1) as u64).map(|r| base.wrapping_add(r)).collect()
            }
        };
        if let Some(r) = self.reps {
            if r != cfg.seeds.len() {
                return Err(Error::Config(format!(
                    "reps = {r} disagrees with the {} listed seeds",
                    cfg.seeds.len()
                )));
            }
        }
        macro_rules! set {
            ($($f:ident),*) => { $( if let Some(v) = self.$f { cfg.$f = v; } )* };
        }
        set!(budget, candidates, init_size, refit_all_until, refit_every, opt_starts, jobs, x_columns, timing);
        cfg.out = self.out;
        cfg.validate()?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_follow_the_dimension() {
        let c = RunSettings {
            problem: Some("ackley".into()),
            dim: Some(5),
            budget: Some(40),
            ..Default::default()
        }
        .resolve()
        .unwrap();
        assert_eq!(c.candidates, 500);
        assert_eq!(c.init_size, 15);
        assert_eq!(c.opt_starts, 11);
        assert_eq!((c.refit_all_until, c.refit_every), (200, 25));
        assert_eq!(default_candidates(100), 5000);
    }

    #[test]
    fn later_layers_win() {
        let file: RunSettings = toml::from_str("problem = \"levy\"\ndim = 3\nbudget = 20\nmethod = [\"lhs\"]\n").unwrap();
        let flags = RunSettings {
            budget: Some(30),
            reps: Some(3),
            seed: Some(10),
            ..Default::default()
        };
        let c = file.overlay(flags).resolve().unwrap();
        assert_eq!(c.budget, 30);
        assert_eq!(c.methods, vec![Method::Lhs]);
        assert_eq!(c.seeds, vec![10, 11, 12]);
    }

    #[test]
    fn rejects_bad_settings() {
        assert!(toml::from_str::<RunSettings>("bogus = 1").is_err());
        assert!(RunSettings::default().resolve().is_err());
        let base = RunSettings {
            problem: Some("ackley".into()),
            dim: Some(2),
            ..Default::default()
        };
        let tiny = RunSettings { budget: Some(6), ..base.clone() };
        assert!(tiny.resolve().is_err());
        let unknown = RunSettings {
            problem: Some("nope".into()),
            ..base.clone()
        };
        assert!(matches!(unknown.resolve(), Err(Error::Config(_))));
        assert!("grid".parse::<Method>().is_err());
    }
}
