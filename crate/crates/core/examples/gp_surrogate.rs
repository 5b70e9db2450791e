//! Fit a squared-exponential GP by maximum likelihood and predict.

use vorcands::gp::{GpConfig, GpHyper, GpModel};
use vorcands::rng::substream;
use vorcands::sampling::lhs;
use vorcands::{Points, Result};

fn f(x: f64) -> f64 {
    (6.0 * x).sin() + 0.5 * x
}

fn main() -> Result<()> {
    let x = lhs(12, 1, &mut substream(5, &[0]));
    let y: Vec<f64> = x.rows().map(|r| f(r[0])).collect();

    let config = GpConfig::default();
    let model = GpModel::fit(&x, &y, &GpHyper::isotropic(1, 0.1), &config)?;
    let h = model.hyper();
    println!(
        "lengthscale {:.4}  signal scale {:.4}  nugget {:.0e}  log-likelihood {:.3}",
        h.lengthscales[0],
        h.signal_scale,
        h.nugget,
        model.log_likelihood()
    );

    let grid = Points::from_flat(1, (0..=10).map(|i| i as f64 / 10.0).collect())?;
    let (mean, sd) = model.predict(&grid)?;
    println!("   x    f(x)    mean      sd");
    for (i, r) in grid.rows().enumerate() {
        println!("{:.1} {:>7.3} {:>7.3} {:>7.4}", r[0], f(r[0]), mean[i], sd[i]);
    }
    Ok(())
}
