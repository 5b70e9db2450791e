//! Latin hypercube and Sobol designs.

use vorcands::rng::substream;
use vorcands::sampling::{lhs, sobol, stratum_bounds};
use vorcands::Result;

fn main() -> Result<()> {
    let n = 8;
    let design = lhs(n, 3, &mut substream(0, &[0]));
    for p in 0..3 {
        // Each column has exactly one point per interval [k/n, (k+1)/n).
        let mut strata: Vec<usize> = design.rows().map(|r| (r[p] * n as f64) as usize).collect();
        strata.sort_unstable();
        let (lo, hi) = stratum_bounds(0, n);
        println!("column {p}: strata {strata:?}  (first stratum [{lo}, {hi}))");
    }

    // Index 0 of the sequence is the origin; drivers start at 1.
    for r in sobol(8, 4, 0)?.rows() {
        println!("{r:?}");
    }
    Ok(())
}
