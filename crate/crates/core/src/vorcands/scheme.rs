use rand::Rng;

use super::{direct_sample, direct_walk_batch, project_sample, project_walk_batch, vorwalk_with_index, CandidateSet, Strategy};
use crate::error::Result;
use crate::metrics::Metric;
use crate::nn_index::NnIndex;
use crate::points::Points;
use crate::sampling::lhs;

/// Candidates for acquisition iteration `iteration`: incumbent-biased `rect`
/// walks on even iterations, `proj` walks through a fresh Latin hypercube
/// on odd ones, both under `l∞`.
pub fn scheme_final<R: Rng + ?Sized>(
    design: &Points,
    count: usize,
    iteration: usize,
    incumbent: usize,
    rng: &mut R,
) -> Result<CandidateSet> {
    if iteration % 2 == 0 {
        direct_sample(design, count, Strategy::Rect, Metric::LInf, incumbent, rng)
    } else {
        let pre = lhs(count, design.dim(), rng);
        project_sample(design, &pre, Metric::LInf, rng)
    }
}

/// Raw walk output (no halfway rule) for `count` walks of `strategy`.
/// Direct strategies use origins uniform over the design.
pub fn raw_candidates<R: Rng + ?Sized>(
    design: &Points,
    count: usize,
    strategy: Strategy,
    metric: Metric,
    rng: &mut R,
) -> Result<CandidateSet> {
    raw_candidates_with_index(&NnIndex::build(design, metric)?, count, strategy, rng)
}

/// [`raw_candidates`] on a prebuilt index.
pub fn raw_candidates_with_index<R: Rng + ?Sized>(
    index: &NnIndex,
    count: usize,
    strategy: Strategy,
    rng: &mut R,
) -> Result<CandidateSet> {
    let batch = match strategy {
        Strategy::Proj => {
            let pre = lhs(count, index.dim(), rng);
            project_walk_batch(index, &pre, rng)?
        }
        _ => direct_walk_batch(index.len(), index.dim(), count, strategy, None, rng)?,
    };
    vorwalk_with_index(index, &batch)
}

/// Fraction of `count` raw walks of `strategy` that end on a cube wall.
pub fn boundary_proportion<R: Rng + ?Sized>(
    design: &Points,
    count: usize,
    strategy: Strategy,
    metric: Metric,
    rng: &mut R,
) -> Result<f64> {
    Ok(raw_candidates(design, count, strategy, metric, rng)?.boundary_fraction())
}
