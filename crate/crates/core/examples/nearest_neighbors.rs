use vorcands::rng::substream;
use vorcands::sampling::lhs;
use vorcands::{Metric, NnIndex, Result};

fn main() -> Result<()> {
    let mut rng = substream(2, &[0]);
    let design = lhs(1000, 6, &mut rng);
    let queries = lhs(5, 6, &mut rng);
    for metric in Metric::ALL {
        let index = NnIndex::build(&design, metric)?;
        let hits = index.nearest_batch(&queries)?;
        let brute: Vec<usize> = queries
            .rows()
            .map(|q| {
                (0..design.len())
                    .min_by(|&a, &b| metric.dist(q, design.row(a)).total_cmp(&metric.dist(q, design.row(b))))
                    .unwrap()
            })
            .collect();
        println!("{metric}: {hits:?} (brute force {brute:?})");
    }
    Ok(())
}
