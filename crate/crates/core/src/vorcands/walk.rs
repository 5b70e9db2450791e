use super::{CandidateSet, WalkBatch};
use crate::error::{contract, Result};
use crate::metrics::Metric;
use crate::nn_index::{Competitors, NnIndex};
use crate::points::{clamp_unit, outside_unit, Points};

/// Runs every walk in `batch` from the rows of `design`, building a fresh
/// nearest-neighbor index under `metric`.
pub fn vorwalk(design: &Points, batch: &WalkBatch, metric: Metric) -> Result<CandidateSet> {
    let index = NnIndex::build(design, metric)?;
    vorwalk_with_index(&index, batch)
}

/// Batched bisection on the step size `t ∈ [0, 1]`.
///
/// Each round probes `x_n + m·u` at the bracket midpoint `m` of every walk,
/// answering all in-cube probes with a single batched nearest-neighbor call.
/// A probe that is inside the cube and still closest to its origin raises the
/// lower bound; anything else lowers the upper bound. Because the cube is convex and every cell is star-convex
/// about its design point, the set of accepted steps is an interval `[0, t*)`,
/// so exactly `K` rounds pin `t*` to a bracket of width `2^-K`.
///
/// A walk is flagged as a wall hit when the probe that set its final upper
/// bound was outside the cube while its clamped image still belonged to the
/// origin; one more batched call after the last round settles those. A walk
/// whose upper bound never moved ends at `t = 1`, which lies outside the cube
/// by construction, and is also flagged.
pub fn vorwalk_with_index(index: &NnIndex, batch: &WalkBatch) -> Result<CandidateSet> {
    let design = index.points();
    let dim = design.dim();
    if batch.directions().dim() != dim {
        return Err(contract(format!(
            "walk directions have dimension {} but the design has {dim}",
            batch.directions().dim()
        )));
    }
    if let Some(&bad) = batch.origins().iter().find(|&&n| n >= design.len()) {
        return Err(contract(format!(
            "walk origin {bad} out of range for a design of {} points",
            design.len()
        )));
    }

    let count = batch.len();
    let origins = batch.origins();
    let dirs = batch.directions();
    let mut lower = vec![0.0; count];
    let mut upper = vec![1.0; count];
    let mut wall = vec![true; count];
    // Step of a final upper bound set outside the cube, awaiting its ownership check.
    let mut pending: Vec<Option<f64>> = vec![None; count];
    let table = index.anchor_table(origins)?;
    let zero = vec![0.0; dim];
    let speed: Vec<f64> = dirs.rows().map(|u| index.metric().dist(u, &zero)).collect();
    let mut lists: Vec<Competitors> = vec![None; count];

    let place = |out: &mut [f64], origin: &[f64], dir: &[f64], t: f64| {
        for ((o, x), u) in out.iter_mut().zip(origin).zip(dir) {
            *o = x + t * u;
        }
    };

    let mut probe = vec![0.0; dim];
    for _ in 0..batch.bisection_iters() {
        let mut inside = Vec::with_capacity(count);
        let mut probes = Points::with_capacity(dim, count);
        for c in 0..count {
            let m = 0.5 * (lower[c] + upper[c]);
            place(&mut probe, design.row(origins[c]), dirs.row(c), m);
            if outside_unit(&probe) {
                upper[c] = m;
                pending[c] = Some(m);
            } else {
                inside.push(c);
                probes.push(&probe)?;
            }
        }
        let owners: Vec<usize> = inside.iter().map(|&c| origins[c]).collect();
        // Later probes stay within half the current bracket of this one.
        let reach: Vec<f64> = inside.iter().map(|&c| 0.5 * (upper[c] - lower[c]) * speed[c]).collect();
        let mut live: Vec<Competitors> = inside.iter().map(|&c| lists[c].take()).collect();
        let owned = index.owned_batch_narrowing(&probes, &owners, &reach, &mut live, &table)?;
        for (&c, list) in inside.iter().zip(live) {
            lists[c] = list;
        }
        for (&c, own) in inside.iter().zip(owned) {
            let m = 0.5 * (lower[c] + upper[c]);
            if own {
                lower[c] = m;
            } else {
                upper[c] = m;
                wall[c] = false;
                pending[c] = None;
            }
        }
    }

    let resolve: Vec<usize> = (0..count).filter(|&c| pending[c].is_some()).collect();
    let mut probes = Points::with_capacity(dim, resolve.len());
    for &c in &resolve {
        place(&mut probe, design.row(origins[c]), dirs.row(c), pending[c].unwrap());
        clamp_unit(&mut probe);
        probes.push(&probe)?;
    }
    let owners: Vec<usize> = resolve.iter().map(|&c| origins[c]).collect();
    for (&c, own) in resolve.iter().zip(index.owned_batch(&probes, &owners, &table)?) {
        wall[c] = own;
    }

    let mut points = Points::zeros(count, dim);
    for c in 0..count {
        let m = 0.5 * (lower[c] + upper[c]);
        let p = points.row_mut(c);
        place(p, design.row(origins[c]), dirs.row(c), m);
        clamp_unit(p);
    }

    Ok(CandidateSet {
        points,
        boundary_hit: wall,
        origin: origins.to_vec(),
        directions: dirs.clone(),
        lower,
        upper,
    })
}

/// Replaces every wall-hit candidate by the midpoint between its origin
/// design point and the wall point it reached. Flags are left untouched.
pub fn halfway_rule(mut cands: CandidateSet, design: &Points) -> Result<CandidateSet> {
    if cands.dim() != design.dim() {
        return Err(contract("candidate and design dimensions differ"));
    }
    for c in 0..cands.len() {
        if !cands.boundary_hit[c] {
            continue;
        }
        let origin = design.row(cands.origin[c]);
        for (v, x) in cands.points.row_mut(c).iter_mut().zip(origin) {
            *v = 0.5 * (*v + x);
        }
    }
    Ok(cands)
}
