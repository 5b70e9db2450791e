//! Candidate sets from random walks for every strategy and metric.
//!
//! Prints how many walks stopped on the cube wall and how far the
//! candidates sit from the design, next to uniform random points.

use vorcands::rng::substream;
use vorcands::sampling::lhs;
use vorcands::vorcands::{direct_sample, Strategy};
use vorcands::{Metric, NnIndex, Points, Result};

fn mean_gap(design: &Points, pts: &Points) -> Result<f64> {
    let index = NnIndex::build(design, Metric::L2)?;
    let mut total = 0.0;
    for r in pts.rows() {
        total += index.nearest(r)?.1;
    }
    Ok(total / pts.len() as f64)
}

fn main() -> Result<()> {
    let (n, dim, count) = (40, 5, 2000);
    let design = lhs(n, dim, &mut substream(1, &[0]));
    let incumbent = 0;

    println!("{:<6}{:<6}{:>10}{:>12}", "strat", "metric", "wall", "mean gap");
    for strategy in [Strategy::Unif, Strategy::Rect] {
        for metric in Metric::ALL {
            let mut rng = substream(1, &[1]);
            let c = direct_sample(&design, count, strategy, metric, incumbent, &mut rng)?;
            println!(
                "{:<6}{:<6}{:>10.3}{:>12.4}",
                strategy.name(),
                metric.name(),
                c.boundary_fraction(),
                mean_gap(&design, &c.points)?
            );
        }
    }
    let random = lhs(count, dim, &mut substream(1, &[2]));
    println!("{:<12}{:>22.4}", "uniform", mean_gap(&design, &random)?);
    Ok(())
}
