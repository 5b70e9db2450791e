mod common;

use common::{brute_nearest, outside, probe};
use proptest::prelude::*;
use rand::Rng;
use vorcands::rng::substream;
use vorcands::sampling::{lhs, sobol};
use vorcands::vorcands::{
    boundary_proportion, direct_sample, direct_walk_batch, project_sample, scheme_final, vorwalk, Strategy,
    DEFAULT_BISECTION_ITERS,
};
use vorcands::{Metric, NnIndex, Points};

fn uniform(n: usize, dim: usize, seed: u64) -> Points {
    common::uniform(n, dim, &mut substream(seed, &[99]))
}

fn metric_strategy() -> impl proptest::strategy::Strategy<Value = Metric> {
    prop_oneof![Just(Metric::L1), Just(Metric::L2), Just(Metric::LInf)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn walks_bracket_a_cell_face_or_wall(
        n in 2usize..40,
        dim in 1usize..7,
        seed in any::<u64>(),
        metric in metric_strategy(),
        rect in any::<bool>(),
    ) {
        let design = uniform(n, dim, seed);
        let strategy = if rect { Strategy::Rect } else { Strategy::Unif };
        let mut rng = substream(seed, &[1]);
        let batch = direct_walk_batch(n, dim, 40, strategy, None, &mut rng).unwrap();
        let c = vorwalk(&design, &batch, metric).unwrap();
        let width = 0.5f64.powi(DEFAULT_BISECTION_ITERS as i32);
        for k in 0..c.len() {
            let o = c.origin[k];
            let x = design.row(o);
            let u = c.directions.row(k);
            prop_assert_eq!(c.upper[k] - c.lower[k], width);

            let lo = probe(x, u, c.lower[k]);
            prop_assert!(!outside(&lo));
            let d_o = metric.dist(&lo, x);
            prop_assert!((0..n).all(|j| d_o <= metric.dist(&lo, design.row(j))));

            let hi = probe(x, u, c.upper[k]);
            prop_assert!(outside(&hi) || brute_nearest(&design, metric, &hi) != o);

            for i in 1..=20 {
                let p = probe(x, u, c.lower[k] * i as f64 / 21.0);
                let d = metric.dist(&p, x);
                prop_assert!((0..n).all(|j| d <= metric.dist(&p, design.row(j))));
            }

            if !c.boundary_hit[k] {
                let cand = c.points.row(k);
                let d_o = metric.dist(cand, x);
                let d_other = (0..n).filter(|&j| j != o).map(|j| metric.dist(cand, design.row(j))).fold(f64::INFINITY, f64::min);
                let bound = metric.dist(x, &probe(x, u, width));
                prop_assert!((d_o - d_other).abs() <= bound * (1.0 + 1e-6) + 1e-15,
                    "gap {} bound {}", (d_o - d_other).abs(), bound);
            }
        }
    }

    #[test]
    fn index_agrees_with_a_linear_scan(
        n in 1usize..200,
        dim in 1usize..12,
        seed in any::<u64>(),
        metric in metric_strategy(),
    ) {
        let design = uniform(n, dim, seed);
        let queries = uniform(50, dim, seed ^ 0x5555);
        let index = NnIndex::build(&design, metric).unwrap();
        let hits = index.nearest_batch(&queries).unwrap();
        for (q, &h) in queries.rows().zip(&hits) {
            prop_assert_eq!(h, brute_nearest(&design, metric, q));
        }
    }
}

#[test]
fn hinted_queries_match_a_scan() {
    let design = uniform(100, 10, 4);
    let queries = uniform(500, 10, 5);
    let mut rng = substream(6, &[0]);
    let hints: Vec<usize> = (0..500).map(|_| rng.random_range(0..100)).collect();
    for metric in Metric::ALL {
        let index = NnIndex::build(&design, metric).unwrap();
        let hits = index.nearest_batch_hinted(&queries, &hints).unwrap();
        for (q, &h) in queries.rows().zip(&hits) {
            assert_eq!(h, brute_nearest(&design, metric, q));
        }
    }
}

#[test]
fn projection_in_one_dimension() {
    let design = Points::from_rows(&[[0.0], [1.0]]).unwrap();
    let pre = Points::from_rows(&[[0.3], [0.7]]).unwrap();
    let c = project_sample(&design, &pre, Metric::L2, &mut substream(0, &[0])).unwrap();
    assert_eq!(c.origin, vec![0, 1]);
    assert!(c.directions.row(0)[0] > 0.0 && c.directions.row(1)[0] < 0.0);
    for v in c.points.rows() {
        assert!((v[0] - 0.5).abs() < 1e-8);
    }
}

#[test]
fn rect_walk_between_two_points() {
    let design = Points::from_rows(&[[0.0], [1.0]]).unwrap();
    let c = direct_sample(&design, 1, Strategy::Rect, Metric::LInf, 0, &mut substream(0, &[0])).unwrap();
    assert!((c.points.row(0)[0] - 0.5).abs() < 1e-8);
}

#[test]
fn incumbent_starts_at_least_two_p_walks() {
    let design = lhs(30, 10, &mut substream(1, &[0]));
    let c = direct_sample(&design, 40, Strategy::Unif, Metric::LInf, 7, &mut substream(1, &[1])).unwrap();
    assert!(c.origin.iter().filter(|&&o| o == 7).count() >= 20);
}

#[test]
fn final_scheme_returns_the_requested_count() {
    let design = lhs(15, 3, &mut substream(2, &[0]));
    let count = 300.min(5000);
    for it in 0..4 {
        let c = scheme_final(&design, count, it, 0, &mut substream(2, &[1, it as u64])).unwrap();
        assert_eq!(c.len(), count);
        assert!(c.points.rows().all(|r| r.iter().all(|&v| v > 0.0 && v < 1.0)));
    }
}

#[test]
fn boundary_proportion_extremes() {
    let single = Points::from_rows(&[[0.5]]).unwrap();
    for s in Strategy::ALL {
        let p = boundary_proportion(&single, 50, s, Metric::L2, &mut substream(3, &[0])).unwrap();
        assert_eq!(p, 1.0);
    }
    let design = uniform(10, 100, 3);
    let p = boundary_proportion(&design, 500, Strategy::Unif, Metric::L1, &mut substream(3, &[1])).unwrap();
    assert!(p >= 0.95, "unif/l1 at N=10, P=100: {p}");
}

#[test]
fn larger_designs_hit_fewer_walls() {
    for (s, m) in [(Strategy::Unif, Metric::L2), (Strategy::Rect, Metric::LInf), (Strategy::Proj, Metric::L1)] {
        let small = boundary_proportion(&uniform(10, 10, 8), 1000, s, m, &mut substream(8, &[0])).unwrap();
        let large = boundary_proportion(&uniform(1000, 10, 8), 1000, s, m, &mut substream(8, &[0])).unwrap();
        assert!(large <= small, "{s}/{m}: N=1000 {large} vs N=10 {small}");
    }
}

/// Star discrepancy of a 2-D point set over anchored boxes whose corners are
/// taken from the point coordinates (and 1).
fn star_discrepancy(pts: &Points) -> f64 {
    let n = pts.len() as f64;
    let mut xs: Vec<f64> = pts.rows().map(|r| r[0]).chain([1.0]).collect();
    let mut ys: Vec<f64> = pts.rows().map(|r| r[1]).chain([1.0]).collect();
    xs.sort_by(f64::total_cmp);
    ys.sort_by(f64::total_cmp);
    let mut worst: f64 = 0.0;
    for &a in &xs {
        for &b in &ys {
            let open = pts.rows().filter(|r| r[0] < a && r[1] < b).count() as f64;
            let closed = pts.rows().filter(|r| r[0] <= a && r[1] <= b).count() as f64;
            worst = worst.max(a * b - open / n).max(closed / n - a * b);
        }
    }
    worst
}

#[test]
fn sobol_is_more_uniform_than_random_points() {
    let s = star_discrepancy(&sobol(16, 2, 1).unwrap());
    let mut worse = 0;
    for seed in 0..20 {
        if star_discrepancy(&uniform(16, 2, seed)) > s {
            worse += 1;
        }
    }
    assert!(worse >= 18, "sobol {s}, random sets beaten {worse}/20");
}
