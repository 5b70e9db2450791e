//! Candidate points on the boundary of the Voronoi tessellation of a design.
//!
//! Nothing here constructs the tessellation. A boundary point is addressed by
//! a cell (a design index) and a direction; [`vorwalk`] bisects along the ray
//! from the design point until the nearest-neighbor identity changes or the
//! ray leaves the unit cube. Samplers choose the cells and directions:
//!
//! * [`direct_sample`] draws them from simple distributions (`unif`: uniform
//!   directions on the sphere, `rect`: signed coordinate axes), biased so that
//!   at least `2P` walks start from the incumbent.
//! * [`project_sample`] takes space-filling precandidates, finds the cell each
//!   one falls in and walks from that cell's design point through it.
//! * [`scheme_final`] alternates `rect` and `proj` (both under `l∞`) between
//!   acquisition iterations.
//!
//! Walks that exit through a cube wall are pulled back halfway towards their
//! design point by [`halfway_rule`], so no candidate sits on `∂[0,1]^P`.

mod direct;
mod project;
mod scheme;
mod walk;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{contract, Error, Result};
use crate::points::Points;

pub use direct::{direct_sample, direct_walk_batch, sample_directions, sample_origins};
pub use project::{project_sample, project_walk_batch};
pub use scheme::{boundary_proportion, raw_candidates, raw_candidates_with_index, scheme_final};
pub use walk::{halfway_rule, vorwalk, vorwalk_with_index};

/// Bisection rounds used by the samplers: step resolution `2^-30`.
pub const DEFAULT_BISECTION_ITERS: usize = 30;

/// Length of a walk direction in `dim` dimensions. Strictly above `sqrt(dim)`,
/// the Euclidean diameter of the unit cube, so a full step always leaves it.
pub fn direction_scale(dim: usize) -> f64 {
    (dim as f64).sqrt() * (1.0 + 1e-9)
}

/// How walk origins and directions are chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// Uniform cell, uniform direction on the sphere.
    Unif,
    /// Uniform cell, uniform signed coordinate axis.
    Rect,
    /// Cell and direction implied by a Latin hypercube precandidate.
    Proj,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::Unif, Strategy::Rect, Strategy::Proj];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Unif => "unif",
            Strategy::Rect => "rect",
            Strategy::Proj => "proj",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "unif" => Ok(Strategy::Unif),
            "rect" => Ok(Strategy::Rect),
            "proj" => Ok(Strategy::Proj),
            other => Err(Error::Config(format!(
                "unknown strategy {other:?} (expected unif, rect or proj)"
            ))),
        }
    }
}

/// Origins and directions for one batched Voronoi walk.
#[derive(Clone, Debug)]
pub struct WalkBatch {
    origins: Vec<usize>,
    directions: Points,
    bisection_iters: usize,
}

impl WalkBatch {
    /// Checks that there is one finite direction per origin, each strictly
    /// longer than `sqrt(P)`, and that `bisection_iters >= 1`.
    pub fn new(origins: Vec<usize>, directions: Points, bisection_iters: usize) -> Result<Self> {
        if bisection_iters < 1 {
            return Err(contract("a Voronoi walk needs at least one bisection round"));
        }
        if origins.len() != directions.len() {
            return Err(contract(format!(
                "{} origins but {} directions",
                origins.len(),
                directions.len()
            )));
        }
        let min_norm = (directions.dim() as f64).sqrt();
        for (c, u) in directions.rows().enumerate() {
            if !u.iter().all(|v| v.is_finite()) {
                return Err(contract(format!("direction {c} is not finite")));
            }
            let norm = u.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm <= min_norm {
                return Err(contract(format!(
                    "direction {c} has norm {norm}, must exceed sqrt(P) = {min_norm}"
                )));
            }
        }
        Ok(Self {
            origins,
            directions,
            bisection_iters,
        })
    }

    pub fn origins(&self) -> &[usize] {
        &self.origins
    }

    pub fn directions(&self) -> &Points {
        &self.directions
    }

    pub fn bisection_iters(&self) -> usize {
        self.bisection_iters
    }

    pub fn len(&self) -> usize {
        self.origins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.origins.is_empty()
    }
}

/// Output of a Voronoi walk.
///
/// `lower[c]` and `upper[c]` are the final bisection bounds on the step size
/// along `directions[c]`; the probe at `lower` is inside both the cube and the
/// origin's cell and the probe at `upper` is outside at least one of them.
#[derive(Clone, Debug)]
pub struct CandidateSet {
    pub points: Points,
    /// The walk ended on a cube wall rather than a cell face.
    pub boundary_hit: Vec<bool>,
    pub origin: Vec<usize>,
    pub directions: Points,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl CandidateSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points.dim()
    }

    /// Final bisection interval widths, `2^-K` for every walk.
    pub fn bracket_widths(&self) -> Vec<f64> {
        self.upper.iter().zip(&self.lower).map(|(u, l)| u - l).collect()
    }

    /// Step size of the returned point (midpoint of the final bracket).
    pub fn step(&self, c: usize) -> f64 {
        0.5 * (self.lower[c] + self.upper[c])
    }

    /// Fraction of walks that ended on a cube wall.
    pub fn boundary_fraction(&self) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        self.boundary_hit.iter().filter(|&&b| b).count() as f64 / self.len() as f64
    }
}
