use rand::Rng;

use super::{direction_scale, halfway_rule, vorwalk_with_index, CandidateSet, WalkBatch, DEFAULT_BISECTION_ITERS};
use crate::error::{contract, Result};
use crate::metrics::Metric;
use crate::nn_index::NnIndex;
use crate::points::Points;
use crate::sampling::sphere_direction;

/// Origins and directions implied by `precandidates`: each one is assigned
/// to the cell it falls in and the walk runs from that cell's design point
/// through it. A precandidate that coincides with its design point gets a
/// random direction instead.
pub fn project_walk_batch<R: Rng + ?Sized>(
    index: &NnIndex,
    precandidates: &Points,
    rng: &mut R,
) -> Result<WalkBatch> {
    let dim = index.dim();
    if precandidates.dim() != dim {
        return Err(contract(format!(
            "precandidates have dimension {} but the design has {dim}",
            precandidates.dim()
        )));
    }
    if !precandidates.is_finite() {
        return Err(contract("precandidates must be finite"));
    }
    let origins = index.nearest_batch(precandidates)?;
    let design = index.points();
    let scale = direction_scale(dim);
    let mut directions = Points::zeros(precandidates.len(), dim);
    for (c, z) in precandidates.rows().enumerate() {
        let x = design.row(origins[c]);
        let u = directions.row_mut(c);
        for ((o, a), b) in u.iter_mut().zip(z).zip(x) {
            *o = a - b;
        }
        let norm = u.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm <= 1e-12 {
            u.copy_from_slice(&sphere_direction(dim, rng));
        } else {
            u.iter_mut().for_each(|v| *v /= norm);
        }
        u.iter_mut().for_each(|v| *v *= scale);
    }
    WalkBatch::new(origins, directions, DEFAULT_BISECTION_ITERS)
}

/// One Voronoi candidate per precandidate, with wall hits pulled halfway back.
pub fn project_sample<R: Rng + ?Sized>(
    design: &Points,
    precandidates: &Points,
    metric: Metric,
    rng: &mut R,
) -> Result<CandidateSet> {
    let index = NnIndex::build(design, metric)?;
    let batch = project_walk_batch(&index, precandidates, rng)?;
    halfway_rule(vorwalk_with_index(&index, &batch)?, design)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;
    use crate::sampling::lhs;

    #[test]
    fn walks_start_in_the_precandidate_cell() {
        let mut rng = substream(1, &[0]);
        let design = lhs(25, 3, &mut rng);
        let pre = lhs(200, 3, &mut rng);
        for metric in Metric::ALL {
            let index = NnIndex::build(&design, metric).unwrap();
            let batch = project_walk_batch(&index, &pre, &mut rng).unwrap();
            for (c, z) in pre.rows().enumerate() {
                let n = batch.origins()[c];
                assert_eq!(n, index.nearest(z).unwrap().0);
                // The precandidate lies on the walk ray.
                let x = design.row(n);
                let u = batch.directions().row(c);
                let d: Vec<f64> = z.iter().zip(x).map(|(a, b)| a - b).collect();
                let dn = d.iter().map(|v| v * v).sum::<f64>().sqrt();
                let un = u.iter().map(|v| v * v).sum::<f64>().sqrt();
                let cos = d.iter().zip(u).map(|(a, b)| a * b).sum::<f64>() / (dn * un);
                assert!((cos - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn precandidate_on_a_design_point() {
        let design = Points::from_rows(&[[0.25, 0.25], [0.75, 0.75]]).unwrap();
        let pre = Points::from_rows(&[[0.25, 0.25]]).unwrap();
        let cands = project_sample(&design, &pre, Metric::L2, &mut substream(2, &[0])).unwrap();
        assert_eq!(cands.origin, vec![0]);
        assert!(cands.points.in_unit_cube());
    }

    #[test]
    fn candidate_is_beyond_its_precandidate() {
        // The precandidate is inside the origin cell and the cube, so the
        // walk accepts its step and ends further out.
        let mut rng = substream(3, &[0]);
        let design = lhs(10, 2, &mut rng);
        let pre = lhs(100, 2, &mut rng);
        let index = NnIndex::build(&design, Metric::L1).unwrap();
        let batch = project_walk_batch(&index, &pre, &mut rng).unwrap();
        let raw = vorwalk_with_index(&index, &batch).unwrap();
        for (c, z) in pre.rows().enumerate() {
            let x = design.row(raw.origin[c]);
            let dz: f64 = z.iter().zip(x).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            let dc: f64 = raw.points.row(c).iter().zip(x).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            assert!(dc >= dz - 1e-8, "{dc} < {dz}");
        }
    }
}
