//! A single optimization run on shifted Ackley.
//!
//! ```bash
//! cargo run --release --example bo_loop -- 3 60
//! ```

use vorcands::driver::{run_bo, ExperimentConfig, Method};
use vorcands::Result;

fn main() -> Result<()> {
    let mut args = std::env::args().skip(1);
    let dim: usize = args.next().map_or(2, |s| s.parse().expect("dim"));
    let budget: usize = args.next().map_or(40, |s| s.parse().expect("budget"));

    let mut cfg = ExperimentConfig::new("ackley", dim);
    cfg.budget = budget;
    let run = run_bo(&cfg, Method::Vor, 0)?;

    let initial = run.initial_y.iter().cloned().fold(f64::INFINITY, f64::min);
    println!("best of {} initial points: {initial:.4}", run.initial_y.len());
    for r in run.records.iter().filter(|r| r.iteration % 5 == 0) {
        println!("n={:>4}  y={:>9.4}  best={:>8.4}  {:>7.1} ms", r.iteration, r.y, r.y_best, r.elapsed_ms);
    }
    println!("final lengthscales {:?}", run.final_hyper.lengthscales);
    Ok(())
}
