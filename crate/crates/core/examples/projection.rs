//! Projection walks: each precandidate picks its nearest design point as the
//! origin and the walk continues along the ray through the precandidate.

use vorcands::metrics::distance;
use vorcands::rng::substream;
use vorcands::sampling::lhs;
use vorcands::vorcands::project_sample;
use vorcands::{Metric, Result};

fn main() -> Result<()> {
    let mut rng = substream(3, &[0]);
    let design = lhs(8, 2, &mut rng);
    let pre = lhs(6, 2, &mut rng);
    let cands = project_sample(&design, &pre, Metric::L2, &mut rng)?;

    for c in 0..cands.len() {
        let origin = design.row(cands.origin[c]);
        let z = pre.row(c);
        let v = cands.points.row(c);
        println!(
            "pre ({:.3}, {:.3})  origin #{}  -> ({:.3}, {:.3})  |origin-pre| = {:.3}  |origin-cand| = {:.3}{}",
            z[0],
            z[1],
            cands.origin[c],
            v[0],
            v[1],
            distance(Metric::L2, origin, z)?,
            distance(Metric::L2, origin, v)?,
            if cands.boundary_hit[c] { "  (wall, halved)" } else { "" }
        );
    }
    Ok(())
}
