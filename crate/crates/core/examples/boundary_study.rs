//! How often do raw walks end on the cube wall instead of a cell face?
//!
//! A reduced grid of the full study (`vorcands boundary-study` runs the
//! default grid); prints the replicate mean for each cell.

use std::collections::BTreeMap;

use vorcands::driver::{boundary_study, BoundaryStudyConfig};
use vorcands::Result;

fn main() -> Result<()> {
    let cfg = BoundaryStudyConfig {
        n: vec![10, 100],
        dim: vec![2, 10, 50],
        reps: 3,
        candidates: 500,
        ..Default::default()
    };
    let rows = boundary_study(&cfg)?;

    let mut cells: BTreeMap<(String, String, usize, usize), Vec<f64>> = BTreeMap::new();
    for r in rows {
        cells
            .entry((r.strategy.to_string(), r.metric.to_string(), r.n, r.p))
            .or_default()
            .push(r.prop_boundary);
    }
    println!("strategy metric     N    P  boundary");
    for ((s, m, n, p), v) in cells {
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        println!("{s:<8} {m:<6} {n:>5} {p:>4}  {mean:.3}");
    }
    Ok(())
}
