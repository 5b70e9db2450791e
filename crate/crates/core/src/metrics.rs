//! Dissimilarities that parameterize the Voronoi tessellation.
//!
//! All three are Minkowski norms of the coordinate difference, so they are
//! symmetric and sub-additive and every Voronoi cell they induce is
//! star-convex with respect to its design point.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{contract, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    /// Sum of absolute coordinate differences.
    L1,
    /// Euclidean distance.
    L2,
    /// Largest absolute coordinate difference.
    LInf,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::L1, Metric::L2, Metric::LInf];

    pub fn name(self) -> &'static str {
        match self {
            Metric::L1 => "l1",
            Metric::L2 => "l2",
            Metric::LInf => "linf",
        }
    }

    /// Distance between `a` and `b`. Panics in debug builds on a length mismatch;
    /// use [`distance`] for a checked version.
    #[inline]
    pub fn dist(self, a: &[f64], b: &[f64]) -> f64 {
        debug_assert_eq!(a.len(), b.len());
        match self {
            Metric::L2 => self.reduced(a, b).sqrt(),
            _ => self.reduced(a, b),
        }
    }

    /// Monotone surrogate of the distance used for comparisons: the squared
    /// distance for `L2`, the distance itself otherwise.
    #[inline]
    pub(crate) fn reduced(self, a: &[f64], b: &[f64]) -> f64 {
        self.reduced_within(a, b, f64::INFINITY).unwrap_or(f64::INFINITY)
    }

    /// Reduced distance, abandoning the accumulation once it exceeds `bound`.
    /// Returns `None` when the true reduced distance is strictly greater than
    /// `bound`; otherwise the exact value (bitwise identical to [`Self::reduced`]).
    #[inline]
    pub(crate) fn reduced_within(self, a: &[f64], b: &[f64], bound: f64) -> Option<f64> {
        match self {
            Metric::L1 => lanes(a, b, bound, |d| d.abs(), |s, t| s + t),
            Metric::L2 => lanes(a, b, bound, |d| d * d, |s, t| s + t),
            Metric::LInf => lanes(a, b, bound, |d| d.abs(), f64::max),
        }
    }

    /// Reduced contribution of a single coordinate offset.
    #[inline]
    pub(crate) fn reduced_offset(self, d: f64) -> f64 {
        match self {
            Metric::L2 => d * d,
            _ => d.abs(),
        }
    }
}

const LANES: usize = 4;
const BLOCK: usize = 16;

/// Coordinate `k` always accumulates into lane `k % LANES`, so the result
/// does not depend on where (or whether) the bound is checked. Terms are
/// non-negative, so a partial combination never exceeds the final one.
#[inline(always)]
fn lanes(a: &[f64], b: &[f64], bound: f64, term: impl Fn(f64) -> f64, op: impl Fn(f64, f64) -> f64) -> Option<f64> {
    let n = a.len().min(b.len());
    let mut acc = [0.0f64; LANES];
    let combine = |acc: &[f64; LANES]| op(op(acc[0], acc[1]), op(acc[2], acc[3]));
    let full = n - n % BLOCK;
    for (ca, cb) in a[..full].chunks_exact(BLOCK).zip(b[..full].chunks_exact(BLOCK)) {
        for k in 0..BLOCK {
            acc[k % LANES] = op(acc[k % LANES], term(ca[k] - cb[k]));
        }
        if combine(&acc) > bound {
            return None;
        }
    }
    for k in full..n {
        acc[k % LANES] = op(acc[k % LANES], term(a[k] - b[k]));
    }
    let v = combine(&acc);
    if v > bound {
        None
    } else {
        Some(v)
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "l1" => Ok(Metric::L1),
            "l2" => Ok(Metric::L2),
            "linf" => Ok(Metric::LInf),
            other => Err(Error::Config(format!(
                "unknown metric {other:?} (expected l1, l2 or linf)"
            ))),
        }
    }
}

/// Checked distance between two points of equal dimension.
pub fn distance(metric: Metric, a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(contract(format!(
            "distance between points of dimension {} and {}",
            a.len(),
            b.len()
        )));
    }
    Ok(metric.dist(a, b))
}

/// Diameter of `[0,1]^dim` under `metric`.
pub fn cube_diameter(metric: Metric, dim: usize) -> f64 {
    match metric {
        Metric::L1 => dim as f64,
        Metric::L2 => (dim as f64).sqrt(),
        Metric::LInf => 1.0,
    }
}
