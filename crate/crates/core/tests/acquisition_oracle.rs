mod common;

use common::mc_ei;
use rand::Rng;
use vorcands::acquisition::{argmax_discrete, ei, expected_improvement, multistart_opt};
use vorcands::bench::make_problem;
use vorcands::gp::{GpConfig, GpHyper, GpModel};
use vorcands::rng::substream;
use vorcands::sampling::lhs;
use vorcands::Points;

#[test]
fn one_sd_above_the_incumbent() {
    let v = expected_improvement(1.0, 1.0, 0.0);
    assert!((v - 0.083315).abs() < 5e-7);
    let (m, se) = mc_ei(1.0, 1.0, 0.0, 1_000_000, &mut substream(20, &[0]));
    assert!((v - m).abs() <= 3.0 * se, "closed form {v}, MC {m} ± {se}");
}

fn fitted_sinesum(n: usize, seed: u64) -> (GpModel, Points, Vec<f64>) {
    let mut rng = substream(seed, &[0]);
    let problem = make_problem("sinesum2d", 2, &mut rng).unwrap();
    let x = lhs(n, 2, &mut rng);
    let y: Vec<f64> = x.rows().map(|r| problem.evaluate(r).unwrap()).collect();
    let model = GpModel::fit(&x, &y, &GpHyper::isotropic(2, 0.2), &GpConfig::default()).unwrap();
    (model, x, y)
}

#[test]
fn discrete_search_matches_a_scan() {
    let (model, x, y) = fitted_sinesum(12, 21);
    let y_min = y.iter().cloned().fold(f64::INFINITY, f64::min);
    let cands = lhs(100, 2, &mut substream(21, &[1]));
    let best = argmax_discrete(&model, &cands, y_min).unwrap();
    let values = ei(&model, &cands, y_min).unwrap();
    let mut scan = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[scan] {
            scan = i;
        }
    }
    assert_eq!(best.index, Some(scan));
    assert_eq!(best.point, cands.row(scan));

    // A training point against a far corner: interpolation leaves no EI at the former.
    let pair = Points::from_rows(&[x.row(0), &[1.0, 1.0][..]]).unwrap();
    let v = ei(&model, &pair, y_min).unwrap();
    assert!(v[0] < 1e-6 && v[1] > v[0]);
}

#[test]
fn multistart_beats_dense_random_probing() {
    for seed in [22, 23, 24] {
        let (model, x, y) = fitted_sinesum(10, seed);
        let inc = (0..y.len()).min_by(|&a, &b| y[a].total_cmp(&y[b])).unwrap();
        let y_min = y[inc];
        let mut rng = substream(seed, &[2]);
        let best = multistart_opt(&model, y_min, 5, x.row(inc), &GpConfig::default().optimizer, &mut rng).unwrap();
        let probes = Points::from_flat(2, (0..20_000).map(|_| rng.random::<f64>()).collect()).unwrap();
        let probe_best = ei(&model, &probes, y_min).unwrap().into_iter().fold(0.0, f64::max);
        assert!(best.acq_value >= probe_best, "seed {seed}: {} < {probe_best}", best.acq_value);
    }
}
