//! Compare acquisition methods over replicated runs and write the
//! trajectories to `comparison.csv` (plus a `.meta.toml` sidecar).

use vorcands::driver::{run_suite, write_suite, ExperimentConfig, Method};
use vorcands::Result;

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

fn main() -> Result<()> {
    let mut cfg = ExperimentConfig::new("rosenbrock", 3);
    cfg.methods = Method::ALL.to_vec();
    cfg.seeds = (0..5).collect();
    cfg.budget = 30;
    let suite = run_suite(&cfg)?;

    println!("{:<7}{:>14}{:>14}", "method", "median best", "cand ms/run");
    for m in &cfg.methods {
        let runs: Vec<_> = suite
            .cells
            .iter()
            .filter(|c| c.method == *m)
            .filter_map(|c| c.outcome.as_ref().ok())
            .collect();
        let best = runs.iter().map(|r| r.records.last().unwrap().y_best).collect();
        let cand = runs.iter().map(|r| r.records.iter().map(|t| t.cand_ms).sum()).collect();
        println!("{:<7}{:>14.4}{:>14.1}", m, median(best), median(cand));
    }
    write_suite("comparison.csv".as_ref(), &suite)?;
    println!("wrote comparison.csv");
    Ok(())
}
