//! Walk from design points along hand-picked rays until the walk leaves the
//! point's nearest-neighbor cell or the unit square.
//!
//! ```bash
//! cargo run --example vorwalk_basics
//! ```

use vorcands::vorcands::{direction_scale, halfway_rule, vorwalk, WalkBatch, DEFAULT_BISECTION_ITERS};
use vorcands::{Metric, Points, Result};

fn main() -> Result<()> {
    let design = Points::from_rows(&[[0.2, 0.2], [0.8, 0.2], [0.5, 0.9]])?;

    // Directions must be longer than the cube diagonal so every ray exits.
    let s = direction_scale(2);
    let dirs = Points::from_rows(&[[s, 0.0], [-s, 0.0], [0.0, -s], [0.0, s]])?;
    let batch = WalkBatch::new(vec![0, 0, 1, 2], dirs, DEFAULT_BISECTION_ITERS)?;

    for metric in [Metric::L2, Metric::LInf] {
        let raw = vorwalk(&design, &batch, metric)?;
        println!("{metric}:");
        for c in 0..raw.len() {
            let p = raw.points.row(c);
            println!(
                "  from {} -> ({:.4}, {:.4})  wall={}  bracket={:.1e}",
                raw.origin[c],
                p[0],
                p[1],
                raw.boundary_hit[c],
                raw.upper[c] - raw.lower[c],
            );
        }
        let kept = halfway_rule(raw, &design)?;
        let pulled: Vec<String> = kept
            .points
            .rows()
            .zip(&kept.boundary_hit)
            .filter(|(_, &hit)| hit)
            .map(|(r, _)| format!("({:.3}, {:.3})", r[0], r[1]))
            .collect();
        println!("  wall hits pulled halfway back: {}", pulled.join(" "));
    }
    Ok(())
}
