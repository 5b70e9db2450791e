//! Maximize expected improvement two ways on the same surrogate: a discrete
//! search over Voronoi candidates and multistart gradient ascent.

use std::time::Instant;

use vorcands::acquisition::{argmax_discrete, multistart_opt};
use vorcands::bench::make_problem;
use vorcands::gp::{GpConfig, GpHyper, GpModel};
use vorcands::rng::substream;
use vorcands::sampling::lhs;
use vorcands::vorcands::scheme_final;
use vorcands::Result;

fn main() -> Result<()> {
    let dim = 4;
    let mut rng = substream(11, &[0]);
    let problem = make_problem("levy", dim, &mut rng)?;
    let x = lhs(30, dim, &mut rng);
    let y = x.rows().map(|r| problem.evaluate(r)).collect::<Result<Vec<_>>>()?;

    let config = GpConfig::default();
    let model = GpModel::fit(&x, &y, &GpHyper::isotropic(dim, 0.4), &config)?;
    let inc = (0..y.len()).min_by(|&a, &b| y[a].total_cmp(&y[b])).unwrap();
    let y_min = y[inc];

    let t = Instant::now();
    let cands = scheme_final(&x, 100 * dim, 0, inc, &mut rng)?;
    let disc = argmax_discrete(&model, &cands.points, y_min)?;
    println!(
        "candidates: EI {:.5} from {} points in {:.1} ms",
        disc.acq_value,
        cands.len(),
        t.elapsed().as_secs_f64() * 1e3
    );

    let t = Instant::now();
    let opt = multistart_opt(&model, y_min, 2 * dim + 1, x.row(inc), &config.optimizer, &mut rng)?;
    println!(
        "multistart: EI {:.5} after {} evaluations in {:.1} ms",
        opt.acq_value,
        opt.evaluations,
        t.elapsed().as_secs_f64() * 1e3
    );
    Ok(())
}
