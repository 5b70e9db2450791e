use rand::Rng;

use super::{direction_scale, halfway_rule, vorwalk, CandidateSet, Strategy, WalkBatch, DEFAULT_BISECTION_ITERS};
use crate::error::{contract, Result};
use crate::metrics::Metric;
use crate::points::Points;
use crate::sampling::sphere_direction;

/// Walk origins for `count` walks over a design of `n_design` points.
///
/// With an incumbent, the first `min(2·dim, count)` walks start from it and
/// the rest start from the other design points, chosen uniformly with
/// replacement. Without one, every origin is uniform over the whole design.
pub fn sample_origins<R: Rng + ?Sized>(
    n_design: usize,
    count: usize,
    incumbent: Option<usize>,
    dim: usize,
    rng: &mut R,
) -> Result<Vec<usize>> {
    if n_design == 0 {
        return Err(contract("cannot sample walk origins from an empty design"));
    }
    let Some(inc) = incumbent else {
        return Ok((0..count).map(|_| rng.random_range(0..n_design)).collect());
    };
    if inc >= n_design {
        return Err(contract(format!(
            "incumbent {inc} out of range for a design of {n_design} points"
        )));
    }
    let biased = (2 * dim).min(count);
    let mut out = vec![inc; biased];
    for _ in biased..count {
        if n_design == 1 {
            out.push(inc);
        } else {
            let k = rng.random_range(0..n_design - 1);
            out.push(if k >= inc { k + 1 } else { k });
        }
    }
    Ok(out)
}

/// Scaled walk directions: uniform on the sphere for `unif`, a uniformly
/// chosen signed coordinate axis for `rect`.
pub fn sample_directions<R: Rng + ?Sized>(
    strategy: Strategy,
    count: usize,
    dim: usize,
    rng: &mut R,
) -> Result<Points> {
    let scale = direction_scale(dim);
    let mut out = Points::zeros(count, dim);
    match strategy {
        Strategy::Unif => {
            for c in 0..count {
                let u = sphere_direction(dim, rng);
                for (o, v) in out.row_mut(c).iter_mut().zip(u) {
                    *o = v * scale;
                }
            }
        }
        Strategy::Rect => {
            for c in 0..count {
                let k = rng.random_range(0..dim);
                let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
                out.row_mut(c)[k] = sign * scale;
            }
        }
        Strategy::Proj => {
            return Err(contract(
                "proj directions depend on precandidates; use project_sample",
            ))
        }
    }
    Ok(out)
}

/// Origins and directions for a direct-sampling walk.
pub fn direct_walk_batch<R: Rng + ?Sized>(
    n_design: usize,
    dim: usize,
    count: usize,
    strategy: Strategy,
    incumbent: Option<usize>,
    rng: &mut R,
) -> Result<WalkBatch> {
    let origins = sample_origins(n_design, count, incumbent, dim, rng)?;
    let directions = sample_directions(strategy, count, dim, rng)?;
    WalkBatch::new(origins, directions, DEFAULT_BISECTION_ITERS)
}

/// `count` Voronoi candidates from incumbent-biased `unif` or `rect` walks,
/// with wall hits pulled halfway back.
pub fn direct_sample<R: Rng + ?Sized>(
    design: &Points,
    count: usize,
    strategy: Strategy,
    metric: Metric,
    incumbent: usize,
    rng: &mut R,
) -> Result<CandidateSet> {
    let batch = direct_walk_batch(design.len(), design.dim(), count, strategy, Some(incumbent), rng)?;
    halfway_rule(vorwalk(design, &batch, metric)?, design)
}
