use std::time::Instant;

use rand::Rng;

use super::{ExperimentConfig, Method};
use crate::acquisition::{argmax_discrete, multistart_opt, AcqResult};
use crate::bench::{make_problem, TestProblem};
use crate::error::{Error, Result};
use crate::gp::{GpConfig, GpHyper, GpModel};
use crate::points::{clamp_unit, Points};
use crate::rng::{substream, tag};
use crate::sampling::{lhs, sobol, sphere_direction};
use crate::vorcands::scheme_final;

/// One acquisition step of a run.
#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryRecord {
    pub seed: u64,
    pub method: Method,
    pub problem: String,
    pub dim: usize,
    /// Design size after this acquisition.
    pub iteration: usize,
    pub x: Vec<f64>,
    pub y: f64,
    /// Running minimum of all evaluated outputs.
    pub y_best: f64,
    /// Wall time since the start of the run.
    pub elapsed_ms: f64,
    /// Time spent generating and scoring candidates (or in the inner search).
    pub cand_ms: f64,
    pub fit_ms: f64,
}

/// Everything a finished run produced.
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub records: Vec<TrajectoryRecord>,
    pub initial_design: Points,
    pub initial_y: Vec<f64>,
    /// Ackley translation drawn for this seed, if any.
    pub shift: Option<Vec<f64>>,
    /// Acquisition iterations whose hyperparameter fit failed and fell back
    /// to the previous hyperparameters.
    pub fit_failures: Vec<usize>,
    pub final_hyper: GpHyper,
}

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

/// The problem instance for `seed` (the same for every method).
pub fn problem_for_seed(config: &ExperimentConfig, seed: u64) -> Result<TestProblem> {
    make_problem(&config.problem, config.dim, &mut substream(seed, &[tag::PROBLEM]))
}

/// The initial Latin hypercube for `seed` (the same for every method).
pub fn initial_design(config: &ExperimentConfig, seed: u64) -> Points {
    lhs(config.init_size, config.dim, &mut substream(seed, &[tag::INIT_DESIGN]))
}

fn evaluate(problem: &TestProblem, x: &[f64], iteration: usize) -> Result<f64> {
    let y = problem.evaluate(x)?;
    if y.is_finite() {
        Ok(y)
    } else {
        Err(Error::NonFiniteObjective { iteration })
    }
}

fn argmin(y: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in y.iter().enumerate() {
        if v < y[best] {
            best = i;
        }
    }
    best
}

fn is_duplicate(design: &Points, x: &[f64]) -> bool {
    design
        .rows()
        .any(|r| r.iter().zip(x).all(|(a, b)| (a - b).abs() <= 1e-12))
}

/// Moves `x` by a uniform draw from the radius-1e-6 ball until it no longer
/// coincides with a design row.
fn separate<R: Rng + ?Sized>(design: &Points, x: &mut Vec<f64>, rng: &mut R) {
    let dim = x.len();
    let origin = x.clone();
    for _ in 0..100 {
        if !is_duplicate(design, x) {
            return;
        }
        let u = sphere_direction(dim, rng);
        let r = 1e-6 * rng.random::<f64>().powf(1.0 / dim as f64);
        for ((v, o), d) in x.iter_mut().zip(&origin).zip(&u) {
            *v = o + r * d;
        }
        clamp_unit(x);
    }
}

/// Starting lengthscale for the first fit: `P/10`, kept inside the box.
pub fn initial_hyper(dim: usize, gp: &GpConfig) -> GpHyper {
    let l = (dim as f64 / 10.0).clamp(gp.lengthscale_min, gp.lengthscale_max);
    GpHyper::isotropic(dim, l)
}

/// One Bayesian-optimization trajectory of `method` on the problem for `seed`.
pub fn run_bo(config: &ExperimentConfig, method: Method, seed: u64) -> Result<RunOutput> {
    config.validate()?;
    let start = Instant::now();
    let gp = GpConfig::default();
    let dim = config.dim;
    let problem = problem_for_seed(config, seed)?;
    let mut x = initial_design(config, seed);
    let mut y = Vec::with_capacity(config.budget);
    for (i, row) in x.rows().enumerate() {
        y.push(evaluate(&problem, row, i)?);
    }
    let initial_design = x.clone();
    let initial_y = y.clone();

    let mut hyper = initial_hyper(dim, &gp);
    let mut records = Vec::with_capacity(config.budget - config.init_size);
    let mut fit_failures = Vec::new();

    for a in 0..config.budget - config.init_size {
        let mut rng = substream(seed, &[tag::ACQUISITION, a as u64]);

        let t_fit = Instant::now();
        let refit = a < config.refit_all_until || a % config.refit_every == 0;
        let fitted = if refit {
            GpModel::fit(&x, &y, &hyper, &gp)
        } else {
            GpModel::condition(&x, &y, &hyper.lengthscales, &gp)
        };
        let model = match fitted {
            Ok(m) => m,
            Err(Error::SurrogateFit(_)) if refit => {
                fit_failures.push(a);
                GpModel::condition(&x, &y, &hyper.lengthscales, &gp)?
            }
            Err(e) => return Err(e),
        };
        hyper = model.hyper().clone();
        let fit_ms = ms(t_fit);

        let t_cand = Instant::now();
        let inc = argmin(&y);
        let y_min = y[inc];
        let choice: AcqResult = match method {
            Method::Vor => {
                let cands = scheme_final(&x, config.candidates, a, inc, &mut rng)?;
                argmax_discrete(&model, &cands.points, y_min)?
            }
            Method::Lhs => argmax_discrete(&model, &lhs(config.candidates, dim, &mut rng), y_min)?,
            Method::Sobol => {
                let first = 1 + (a as u64) * config.candidates as u64;
                argmax_discrete(&model, &sobol(config.candidates, dim, first)?, y_min)?
            }
            Method::Opt => multistart_opt(&model, y_min, config.opt_starts, x.row(inc), &gp.optimizer, &mut rng)?,
        };
        let cand_ms = ms(t_cand);

        let mut x_new = choice.point;
        clamp_unit(&mut x_new);
        separate(&x, &mut x_new, &mut substream(seed, &[tag::DUPLICATE, a as u64]));
        let iteration = x.len() + 1;
        let y_new = evaluate(&problem, &x_new, iteration)?;
        x.push(&x_new)?;
        y.push(y_new);

        let y_best = records
            .last()
            .map(|r: &TrajectoryRecord| r.y_best)
            .unwrap_or(y_min)
            .min(y_new);
        records.push(TrajectoryRecord {
            seed,
            method,
            problem: config.problem.clone(),
            dim,
            iteration,
            x: x_new,
            y: y_new,
            y_best,
            elapsed_ms: ms(start),
            cand_ms,
            fit_ms,
        });
    }

    Ok(RunOutput {
        records,
        initial_design,
        initial_y,
        shift: problem.shift().map(|s| s.to_vec()),
        fit_failures,
        final_hyper: hyper,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(problem: &str, dim: usize, budget: usize) -> ExperimentConfig {
        let mut c = ExperimentConfig::new(problem, dim);
        c.budget = budget;
        c.candidates = 200;
        c
    }

    #[test]
    fn one_acquisition() {
        let c = small("levy", 2, 7);
        for m in Method::ALL {
            let out = run_bo(&c, m, 1).unwrap();
            assert_eq!(out.records.len(), 1);
            assert_eq!(out.records[0].iteration, 7);
        }
    }

    #[test]
    fn running_minimum_and_no_duplicates() {
        let c = small("ackley", 2, 20);
        for m in Method::ALL {
            let out = run_bo(&c, m, 3).unwrap();
            assert_eq!(out.records.len(), 14);
            let mut best = out.initial_y.iter().cloned().fold(f64::INFINITY, f64::min);
            let mut design = out.initial_design.clone();
            for r in &out.records {
                best = best.min(r.y);
                assert_eq!(r.y_best, best);
                assert!(!is_duplicate(&design, &r.x));
                assert!(r.x.iter().all(|v| (0.0..=1.0).contains(v)));
                design.push(&r.x).unwrap();
            }
        }
    }

    #[test]
    fn shared_initial_design_and_problem() {
        let c = small("ackley", 3, 10);
        let a = run_bo(&c, Method::Vor, 5).unwrap();
        let b = run_bo(&c, Method::Lhs, 5).unwrap();
        assert_eq!(a.initial_design, b.initial_design);
        assert_eq!(a.shift, b.shift);
    }

    #[test]
    fn same_seed_same_trajectory() {
        let c = small("rosenbrock", 2, 12);
        for m in Method::ALL {
            let a = run_bo(&c, m, 9).unwrap();
            let b = run_bo(&c, m, 9).unwrap();
            let strip = |o: &RunOutput| o.records.iter().map(|r| (r.x.clone(), r.y, r.y_best)).collect::<Vec<_>>();
            assert_eq!(strip(&a), strip(&b));
        }
    }

    #[test]
    fn duplicates_are_moved() {
        let design = Points::from_rows(&[[0.5, 0.5], [1.0, 1.0]]).unwrap();
        let mut rng = substream(1, &[0]);
        for start in [[0.5, 0.5], [1.0, 1.0]] {
            let mut x = start.to_vec();
            separate(&design, &mut x, &mut rng);
            assert!(!is_duplicate(&design, &x));
            let moved: f64 = x.iter().zip(&start).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            assert!(moved <= 1e-6 + 1e-15);
        }
    }
}
