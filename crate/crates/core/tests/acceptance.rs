//! Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Run with `cargo test --test acceptance`.

mod common;

use std::collections::HashMap;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use common::{
    brute_nearest, close, condition, dense_moments, jittered, mc_ei, outside, probe, reference_sobol, uniform,
};
use rand::Rng;
use vorcands::acquisition::expected_improvement;
use vorcands::driver::{boundary_study, run_suite, BoundaryRow, BoundarySettings, ExperimentConfig, Method};
use vorcands::gp::{log_likelihood, GpConfig, GpModel};
use vorcands::rng::substream;
use vorcands::sampling::{lhs, sobol};
use vorcands::vorcands::{direct_walk_batch, scheme_final, vorwalk, Strategy, DEFAULT_BISECTION_ITERS};
use vorcands::Metric;

struct Report {
    failed: usize,
}

impl Report {
    fn check(&mut self, id: &str, what: &str, elapsed: Duration, limit: Option<Duration>, ok: bool, detail: String) {
        let in_time = limit.is_none_or(|l| elapsed < l);
        let pass = ok && in_time;
        if !pass {
            self.failed += 1;
        }
        let budget = limit.map_or(String::new(), |l| format!(" / {:.0}s", l.as_secs_f64()));
        println!(
            "{} {id:<3} {what} [{:.2}s{budget}] {detail}",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
    }
}

fn secs(s: u64) -> Option<Duration> {
    Some(Duration::from_secs(s))
}

fn equidistance(report: &mut Report) {
    let t = Instant::now();
    let (n, dim, walks) = (50, 10, 200);
    let mut rng = substream(101, &[0]);
    let design = uniform(n, dim, &mut rng);
    let mut bracket_violations = 0;
    let mut worst_gap: f64 = 0.0;
    let mut faces = 0;
    for metric in Metric::ALL {
        let batch = direct_walk_batch(n, dim, walks, Strategy::Unif, None, &mut rng).unwrap();
        let c = vorwalk(&design, &batch, metric).unwrap();
        for k in 0..c.len() {
            if c.boundary_hit[k] {
                continue;
            }
            faces += 1;
            let o = c.origin[k];
            let x = design.row(o);
            let u = c.directions.row(k);
            let lo = probe(x, u, c.lower[k]);
            let hi = probe(x, u, c.upper[k]);
            let width_ok = c.upper[k] - c.lower[k] == 0.5f64.powi(DEFAULT_BISECTION_ITERS as i32);
            let lo_ok = !outside(&lo) && brute_nearest(&design, metric, &lo) == o;
            let hi_ok = outside(&hi) || brute_nearest(&design, metric, &hi) != o;
            if !(width_ok && lo_ok && hi_ok) {
                bracket_violations += 1;
            }
            let cand = c.points.row(k);
            let d_o = metric.dist(cand, x);
            let d_next = (0..n)
                .filter(|&j| j != o)
                .map(|j| metric.dist(cand, design.row(j)))
                .fold(f64::INFINITY, f64::min);
            worst_gap = worst_gap.max((d_o - d_next).abs());
        }
    }
    report.check(
        "1",
        "equidistance of cell-face candidates",
        t.elapsed(),
        secs(5),
        bracket_violations == 0 && worst_gap <= 1e-6 && faces > 0,
        format!("{faces} face candidates, {bracket_violations} bracket violations, max gap {worst_gap:.2e}"),
    );
}

fn boundary_study_checks(report: &mut Report) {
    let t = Instant::now();
    let cfg = BoundarySettings::default().resolve().unwrap();
    let rows = boundary_study(&cfg).unwrap();
    let elapsed = t.elapsed();
    let limit = secs(600);

    let prop: HashMap<(usize, Strategy, Metric, usize, usize), f64> = rows
        .iter()
        .map(|r: &BoundaryRow| ((r.rep, r.strategy, r.metric, r.n, r.p), r.prop_boundary))
        .collect();
    let get = |rep, s, m, n, p| prop[&(rep, s, m, n, p)];

    let (mut a_bad, mut a_total, mut a_worst) = (0, 0, 0.0f64);
    let (mut b_bad, mut b_total) = (0, 0);
    let (mut c_bad, mut c_total) = (0, 0);
    let (mut d_bad, mut d_total) = (0, 0);
    for rep in 0..cfg.reps {
        for &m in &cfg.metric {
            for &n in &cfg.n {
                let v = get(rep, Strategy::Proj, m, n, 100);
                a_total += 1;
                a_worst = a_worst.max(v);
                if v > 0.05 {
                    a_bad += 1;
                }
                for &p in &cfg.dim {
                    b_total += 1;
                    if get(rep, Strategy::Rect, Metric::LInf, n, p) > get(rep, Strategy::Unif, m, n, p) {
                        b_bad += 1;
                    }
                }
            }
            for &s in &cfg.strategy {
                for &p in &cfg.dim {
                    c_total += 1;
                    if get(rep, s, m, 1000, p) > get(rep, s, m, 10, p) {
                        c_bad += 1;
                    }
                }
            }
        }
        for &n in &cfg.n {
            for p in [10, 100] {
                let l1 = get(rep, Strategy::Unif, Metric::L1, n, p);
                let l2 = get(rep, Strategy::Unif, Metric::L2, n, p);
                let li = get(rep, Strategy::Unif, Metric::LInf, n, p);
                d_total += 1;
                if !(l1 >= l2 && l2 >= li) {
                    d_bad += 1;
                }
            }
        }
    }
    let mean = |s, m, n, p| (0..cfg.reps).map(|r| get(r, s, m, n, p)).sum::<f64>() / cfg.reps as f64;
    report.check(
        "2a",
        "proj at P=100 hits the wall in at most 5% of walks",
        elapsed,
        limit,
        a_bad == 0,
        format!(
            "{a_bad}/{a_total} cells above 0.05, max {a_worst:.3}, mean linf N=100 {:.3}",
            mean(Strategy::Proj, Metric::LInf, 100, 100)
        ),
    );
    report.check(
        "2b",
        "rect+linf at or below unif under every metric",
        elapsed,
        limit,
        b_bad == 0,
        format!("{b_bad}/{b_total} cells violate"),
    );
    report.check(
        "2c",
        "N=1000 at or below N=10",
        elapsed,
        limit,
        c_bad == 0,
        format!("{c_bad}/{c_total} cells violate"),
    );
    report.check(
        "2d",
        "unif ordering l1 >= l2 >= linf at P in {10, 100}",
        elapsed,
        limit,
        d_bad == 0,
        format!(
            "{d_bad}/{d_total} cells violate; means N=10 P=10: l1 {:.3} l2 {:.3} linf {:.3}",
            mean(Strategy::Unif, Metric::L1, 10, 10),
            mean(Strategy::Unif, Metric::L2, 10, 10),
            mean(Strategy::Unif, Metric::LInf, 10, 10)
        ),
    );
}

fn gp_oracle(report: &mut Report) {
    let t = Instant::now();
    let config = GpConfig::default();
    let mut rng = substream(103, &[0]);
    let (mut cases, mut worst) = (0, 0.0f64);
    let mut moments_ok = true;
    while cases < 30 {
        let n = rng.random_range(3..=20);
        let dim = rng.random_range(1..=4);
        let x = uniform(n, dim, &mut rng);
        let y: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
        let ls: Vec<f64> = (0..dim).map(|_| rng.random_range(0.02..0.5)).collect();
        if condition(&jittered(&x, &ls, config.nugget)) > 1e4 {
            continue;
        }
        cases += 1;
        let model = GpModel::condition(&x, &y, &ls, &config).unwrap();
        let q = uniform(20, dim, &mut rng);
        let (mean, sd) = model.predict(&q).unwrap();
        for (i, r) in q.rows().enumerate() {
            let (m, v) = dense_moments(&x, &y, &ls, model.hyper().nugget, r);
            let var = sd[i] * sd[i];
            worst = worst.max((mean[i] - m).abs() / m.abs().max(1.0)).max((var - v).abs() / v.abs().max(1.0));
            moments_ok &= close(mean[i], m, 1e-10) && close(var, v, 1e-10);
        }
    }

    let x = uniform(30, 3, &mut rng);
    let y: Vec<f64> = x.rows().map(|r| (4.0 * r[0]).cos() + r[1] - r[2] * r[2]).collect();
    let h = 1e-5;
    let mut worst_rel = 0.0f64;
    for _ in 0..20 {
        let ln: Vec<f64> = (0..3).map(|_| rng.random_range((0.01f64).ln()..(3.0f64).ln())).collect();
        let ll = |l: &[f64]| log_likelihood(&x, &y, &l.iter().map(|v| v.exp()).collect::<Vec<_>>(), &config).unwrap();
        let (_, grad, _) = ll(&ln);
        for p in 0..3 {
            let mut up = ln.clone();
            let mut dn = ln.clone();
            up[p] += h;
            dn[p] -= h;
            let fd = (ll(&up).0 - ll(&dn).0) / (2.0 * h);
            worst_rel = worst_rel.max((grad[p] - fd).abs() / fd.abs().max(1e-8));
        }
    }
    report.check(
        "3",
        "GP moments vs dense inverse, likelihood gradient vs differences",
        t.elapsed(),
        secs(10),
        moments_ok && worst_rel <= 1e-4,
        format!("{cases} designs, max moment error {worst:.1e}, max gradient rel error {worst_rel:.1e}"),
    );
}

fn ei_oracle(report: &mut Report) {
    let t = Instant::now();
    let mut rng = substream(104, &[0]);
    let mut outside_3se = 0;
    let mut worst_z = 0.0f64;
    for _ in 0..50 {
        let mean = rng.random_range(-5.0..5.0);
        let sd = rng.random_range(0.1..3.0);
        let y_min = mean + sd * rng.random_range(-3.0..3.0);
        let v = expected_improvement(mean, sd, y_min);
        let (m, se) = mc_ei(mean, sd, y_min, 1_000_000, &mut rng);
        let z = (v - m).abs() / se;
        worst_z = worst_z.max(z);
        if z > 3.0 {
            outside_3se += 1;
        }
    }
    report.check(
        "4",
        "closed-form EI vs Monte Carlo",
        t.elapsed(),
        secs(30),
        outside_3se == 0,
        format!("{outside_3se}/50 outside 3 SE, max |z| {worst_z:.2}"),
    );
}

fn scaling(report: &mut Report) {
    let design = lhs(2000, 100, &mut substream(105, &[0]));
    let count = 5000.min(100 * 100);
    for iteration in [0, 1] {
        let t = Instant::now();
        let c = scheme_final(&design, count, iteration, 0, &mut substream(105, &[1, iteration as u64])).unwrap();
        report.check(
            if iteration == 0 { "5a" } else { "5b" },
            &format!("{count} candidates on N=2000, P=100 ({})", if iteration == 0 { "rect" } else { "proj" }),
            t.elapsed(),
            secs(30),
            c.len() == count,
            format!("{} candidates", c.len()),
        );
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

fn bo_comparison(report: &mut Report) {
    let t = Instant::now();
    let mut cfg = ExperimentConfig::new("ackley", 5);
    cfg.budget = 100;
    cfg.seeds = (0..20).collect();
    cfg.methods = vec![Method::Vor, Method::Lhs, Method::Opt];
    let suite = run_suite(&cfg).unwrap();
    let elapsed = t.elapsed();
    let per_method = |m: Method| -> (Vec<f64>, f64) {
        let runs: Vec<_> = suite
            .cells
            .iter()
            .filter(|c| c.method == m)
            .map(|c| c.outcome.as_ref().expect("cell succeeded"))
            .collect();
        (
            runs.iter().map(|r| r.records.last().unwrap().y_best).collect(),
            runs.iter().flat_map(|r| r.records.iter().map(|t| t.cand_ms)).sum(),
        )
    };
    let (vor_best, vor_ms) = per_method(Method::Vor);
    let (lhs_best, _) = per_method(Method::Lhs);
    let (opt_best, opt_ms) = per_method(Method::Opt);
    let (mv, ml, mo) = (median(vor_best), median(lhs_best), median(opt_best));
    report.check(
        "6a",
        "Ackley P=5: median final best, vor at or below lhs",
        elapsed,
        secs(1800),
        mv <= ml,
        format!("vor {mv:.4}, lhs {ml:.4}, opt {mo:.4}"),
    );
    report.check(
        "6b",
        "vor candidate time at most half of opt inner-search time",
        elapsed,
        secs(1800),
        vor_ms <= 0.5 * opt_ms,
        format!("vor {:.0} ms, opt {:.0} ms", vor_ms, opt_ms),
    );
}

fn determinism(report: &mut Report) {
    let t = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let runs: [(&str, &[&str]); 5] = [
        (
            "run",
            &["run", "--problem", "ackley", "--dim", "3", "--method", "vor,lhs,sobol,opt", "--budget", "16", "--reps", "2", "--seed", "5", "--timing", "off"],
        ),
        ("boundary-study", &["boundary-study", "--n", "10,100", "--dim", "2,10", "--reps", "2", "--candidates", "200", "--seed", "5"]),
        ("candidates", &["candidates", "--dim", "3", "--n", "12", "--scheme", "vor,sobol,lhs", "--count", "300", "--seed", "5"]),
        ("candidates-proj", &["candidates", "--dim", "3", "--n", "12", "--strategy", "proj", "--metric", "l1", "--count", "300"]),
        ("problems", &["problems"]),
    ];
    let mut differing = Vec::new();
    for (name, args) in runs {
        let mut outputs = Vec::new();
        for k in 0..2 {
            let out = dir.path().join(format!("{name}-{k}.csv"));
            let mut full: Vec<&str> = args.to_vec();
            let out_str = out.to_str().unwrap().to_string();
            if name != "problems" {
                full.extend(["--out", &out_str]);
            }
            let o = Command::new(env!("CARGO_BIN_EXE_vorcands"))
                .args(&full)
                .env_remove("VORCANDS_OUT_DIR")
                .output()
                .unwrap();
            assert!(o.status.success(), "{name}: {}", String::from_utf8_lossy(&o.stderr));
            outputs.push(if name == "problems" { o.stdout } else { std::fs::read(Path::new(&out)).unwrap() });
        }
        if outputs[0] != outputs[1] || outputs[0].is_empty() {
            differing.push(name);
        }
    }
    report.check(
        "7",
        "byte-identical output for every subcommand",
        t.elapsed(),
        None,
        differing.is_empty(),
        if differing.is_empty() { "5 invocations".into() } else { format!("differs: {differing:?}") },
    );
}

fn space_filling(report: &mut Report) {
    let t = Instant::now();
    let mut rng = substream(108, &[0]);
    let mut unstratified = 0;
    for _ in 0..100 {
        let n = rng.random_range(1..=300);
        let dim = rng.random_range(1..=20);
        let d = lhs(n, dim, &mut rng);
        for p in 0..dim {
            let mut seen = vec![false; n];
            for r in d.rows() {
                let k = (r[p] * n as f64).floor() as usize;
                if k < n && r[p] >= k as f64 / n as f64 {
                    seen[k] = true;
                }
            }
            if !seen.iter().all(|&s| s) {
                unstratified += 1;
            }
        }
    }

    let frozen: [[f64; 4]; 8] = [
        [0.0, 0.0, 0.0, 0.0],
        [0.5, 0.5, 0.5, 0.5],
        [0.75, 0.25, 0.25, 0.25],
        [0.25, 0.75, 0.75, 0.75],
        [0.375, 0.375, 0.625, 0.875],
        [0.875, 0.875, 0.125, 0.375],
        [0.625, 0.125, 0.875, 0.625],
        [0.125, 0.625, 0.375, 0.125],
    ];
    let mut sobol_mismatch = 0;
    for dim in 1..=4 {
        let got = sobol(8, dim, 0).unwrap();
        let want = reference_sobol(8, dim);
        for i in 0..8 {
            if got.row(i) != want[i].as_slice() || got.row(i) != &frozen[i][..dim] {
                sobol_mismatch += 1;
            }
        }
    }
    report.check(
        "8",
        "LHS stratification and first Sobol points",
        t.elapsed(),
        None,
        unstratified == 0 && sobol_mismatch == 0,
        format!("{unstratified} unstratified columns, {sobol_mismatch} Sobol rows differ"),
    );
}

fn main() {
    let mut report = Report { failed: 0 };
    let only: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let want = |id: &str| only.is_empty() || only.iter().any(|o| o == id);
    let suite: [(&str, fn(&mut Report)); 8] = [
        ("1", equidistance),
        ("2", boundary_study_checks),
        ("3", gp_oracle),
        ("4", ei_oracle),
        ("5", scaling),
        ("6", bo_comparison),
        ("7", determinism),
        ("8", space_filling),
    ];
    for (id, f) in suite {
        if want(id) {
            f(&mut report);
        }
    }
    if report.failed > 0 {
        println!("{} acceptance check(s) failed", report.failed);
        std::process::exit(1);
    }
}
