//! Experiment orchestration: the optimization loop, replicated suites,
//! the boundary-prevalence study and candidate-cloud dumps, with their
//! CSV and metadata writers.
//!
//! Every random choice is drawn from a substream keyed by the run seed and
//! a purpose tag (see [`crate::rng`]), so results do not depend on thread
//! scheduling. The initial design and problem instance depend only on the
//! seed and are therefore shared by all methods.

mod cloud;
mod config;
mod run;
mod study;
mod suite;

use std::path::{Path, PathBuf};

pub use cloud::{candidate_cloud, read_design, write_cloud, Cloud, CloudConfig, CloudScheme, CloudSettings};
pub use config::{default_candidates, ExperimentConfig, Method, RunSettings};
pub use run::{initial_design, initial_hyper, problem_for_seed, run_bo, RunOutput, TrajectoryRecord};
pub use study::{boundary_study, write_boundary_rows, BoundaryRow, BoundarySettings, BoundaryStudyConfig, BOUNDARY_HEADER};
pub use suite::{metadata_toml, run_suite, trajectory_header, write_suite, write_trajectories, CellResult, SuiteOutput};

/// Metadata file written next to a CSV: `results.csv` → `results.csv.meta.toml`.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    let mut name = csv.as_os_str().to_owned();
    name.push(".meta.toml");
    PathBuf::from(name)
}
