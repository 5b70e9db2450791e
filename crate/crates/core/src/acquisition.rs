//! Expected improvement and its maximization.
//!
//! Objectives are minimized, so improvement is measured below the best
//! observed value `y_min`.

use rand::Rng;
use rayon::prelude::*;
use statrs::function::erf::erfc;

use crate::error::{contract, Result};
use crate::gp::GpModel;
use crate::optim::{minimize_box, BoxOptions};
use crate::points::Points;
use crate::sampling::lhs;

/// Predictive standard deviations at or below this use the zero-variance form.
pub const SD_FLOOR: f64 = 1e-10;

const FD_STEP: f64 = 1e-6;

fn norm_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

fn norm_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// `E[max(y_min - Y, 0)]` for `Y ~ N(mean, sd²)`.
pub fn expected_improvement(mean: f64, sd: f64, y_min: f64) -> f64 {
    let gap = y_min - mean;
    if sd <= SD_FLOOR {
        return gap.max(0.0);
    }
    let z = gap / sd;
    (gap * norm_cdf(z) + sd * norm_pdf(z)).max(0.0)
}

/// Expected improvement at every row of `queries`.
pub fn ei(model: &GpModel, queries: &Points, y_min: f64) -> Result<Vec<f64>> {
    let (means, sds) = model.predict(queries)?;
    Ok(means.iter().zip(&sds).map(|(&m, &s)| expected_improvement(m, s, y_min)).collect())
}

/// Expected improvement at `x` and its gradient, by the chain rule through
/// the predictive mean and standard deviation.
pub fn ei_with_grad(model: &GpModel, x: &[f64], y_min: f64) -> Result<(f64, Vec<f64>)> {
    let m = model.predict_with_grad(x)?;
    let gap = y_min - m.mean;
    if m.sd <= SD_FLOOR {
        let grad = if gap > 0.0 {
            m.d_mean.iter().map(|d| -d).collect()
        } else {
            vec![0.0; x.len()]
        };
        return Ok((gap.max(0.0), grad));
    }
    let z = gap / m.sd;
    let (cdf, pdf) = (norm_cdf(z), norm_pdf(z));
    let value = (gap * cdf + m.sd * pdf).max(0.0);
    let grad = m.d_mean.iter().zip(&m.d_sd).map(|(dm, ds)| -cdf * dm + pdf * ds).collect();
    Ok((value, grad))
}

/// Index of the largest value, earliest on ties; NaNs are skipped.
pub fn argmax_index(values: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &v) in values.iter().enumerate() {
        if v.is_nan() {
            continue;
        }
        if best.is_none_or(|b| v > values[b]) {
            best = Some(i);
        }
    }
    best
}

/// Outcome of an acquisition search.
#[derive(Clone, Debug)]
pub struct AcqResult {
    pub point: Vec<f64>,
    pub acq_value: f64,
    /// Number of EI (or EI-and-gradient) evaluations performed.
    pub evaluations: usize,
    /// Position of the winner in the candidate list, for discrete searches.
    pub index: Option<usize>,
}

/// The candidate with the largest expected improvement.
pub fn argmax_discrete(model: &GpModel, candidates: &Points, y_min: f64) -> Result<AcqResult> {
    if candidates.is_empty() {
        return Err(contract("cannot maximize over an empty candidate set"));
    }
    let values = ei(model, candidates, y_min)?;
    let best = argmax_index(&values).unwrap_or(0);
    Ok(AcqResult {
        point: candidates.row(best).to_vec(),
        acq_value: values[best],
        evaluations: candidates.len(),
        index: Some(best),
    })
}

fn ei_value_and_grad(model: &GpModel, x: &[f64], y_min: f64, evals: &mut usize) -> Option<(f64, Vec<f64>)> {
    *evals += 1;
    let (v, g) = ei_with_grad(model, x, y_min).ok()?;
    if g.iter().all(|d| d.is_finite()) {
        return Some((v, g));
    }
    let mut grad = vec![0.0; x.len()];
    let mut z = x.to_vec();
    for p in 0..x.len() {
        z[p] = x[p] + FD_STEP;
        let up = ei_with_grad(model, &z, y_min).ok()?.0;
        z[p] = x[p] - FD_STEP;
        let down = ei_with_grad(model, &z, y_min).ok()?.0;
        z[p] = x[p];
        *evals += 2;
        grad[p] = (up - down) / (2.0 * FD_STEP);
    }
    Some((v, grad))
}

/// Local ascent of expected improvement in `[0,1]^P` from `n_starts - 1`
/// Latin hypercube starts plus the incumbent; returns the best end point.
pub fn multistart_opt<R: Rng + ?Sized>(
    model: &GpModel,
    y_min: f64,
    n_starts: usize,
    incumbent: &[f64],
    options: &BoxOptions,
    rng: &mut R,
) -> Result<AcqResult> {
    let dim = model.dim();
    if incumbent.len() != dim {
        return Err(contract("incumbent dimension does not match the model"));
    }
    let mut starts = lhs(n_starts.saturating_sub(1), dim, rng);
    starts.push(incumbent)?;
    let lower = vec![0.0; dim];
    let upper = vec![1.0; dim];

    let runs: Vec<(Vec<f64>, f64, usize)> = starts
        .rows()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|x0| {
            let mut evals = 0;
            let r = minimize_box(
                |x: &[f64]| ei_value_and_grad(model, x, y_min, &mut evals).map(|(v, g)| (-v, g.into_iter().map(|d| -d).collect())),
                x0,
                &lower,
                &upper,
                options,
            );
            (r.x, -r.value, evals)
        })
        .collect();

    let evaluations = runs.iter().map(|r| r.2).sum();
    let values: Vec<f64> = runs.iter().map(|r| if r.1.is_finite() { r.1 } else { f64::NAN }).collect();
    let Some(best) = argmax_index(&values) else {
        return Err(crate::error::Error::SurrogateFit("expected improvement could not be evaluated".into()));
    };
    Ok(AcqResult {
        point: runs[best].0.clone(),
        acq_value: values[best],
        evaluations,
        index: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gp::{GpConfig, GpHyper};
    use crate::rng::substream;

    #[test]
    fn closed_forms() {
        assert!((expected_improvement(0.8, 0.0, 1.0) - 0.2).abs() < 1e-15);
        assert_eq!(expected_improvement(1.3, 0.0, 1.0), 0.0);
        assert!((expected_improvement(1.0, 1.0, 1.0) - 0.398942).abs() < 1e-6);
        assert!((expected_improvement(2.0, 1.0, 1.0) - 0.083315).abs() < 1e-6);
    }

    #[test]
    fn monotone_in_mean_and_sd() {
        let grid: Vec<f64> = (0..41).map(|i| -2.0 + 0.1 * i as f64).collect();
        let sds: Vec<f64> = (0..30).map(|i| 1e-12 + 0.1 * i as f64).collect();
        for &s in &sds {
            for w in grid.windows(2) {
                assert!(expected_improvement(w[1], s, 0.0) <= expected_improvement(w[0], s, 0.0));
            }
        }
        for &m in &grid {
            for w in sds.windows(2) {
                let (a, b) = (expected_improvement(m, w[0], 0.0), expected_improvement(m, w[1], 0.0));
                assert!(a >= 0.0 && b >= a - 1e-15);
            }
        }
    }

    #[test]
    fn argmax_ties_and_nans() {
        assert_eq!(argmax_index(&[1.0, 3.0, 3.0, 2.0]), Some(1));
        assert_eq!(argmax_index(&[f64::NAN, 0.0]), Some(1));
        assert_eq!(argmax_index(&[]), None);
    }

    fn model_1d() -> GpModel {
        let x = Points::from_rows(&[[0.0], [1.0]]).unwrap();
        GpModel::condition(&x, &[1.0, 1.0], &[0.2], &GpConfig::default()).unwrap()
    }

    #[test]
    fn discrete_search() {
        let m = model_1d();
        let single = Points::from_rows(&[[0.3]]).unwrap();
        assert_eq!(argmax_discrete(&m, &single, 1.0).unwrap().index, Some(0));
        let mixed = Points::from_rows(&[[0.0], [0.5]]).unwrap();
        assert_eq!(argmax_discrete(&m, &mixed, 1.0).unwrap().index, Some(1));
        assert!(argmax_discrete(&m, &Points::new(1), 1.0).is_err());
    }

    #[test]
    fn symmetric_surface_peaks_in_the_middle() {
        let m = model_1d();
        let mut rng = substream(1, &[0]);
        let r = multistart_opt(&m, 1.0, 3, &[0.0], &BoxOptions::default(), &mut rng).unwrap();
        assert!((r.point[0] - 0.5).abs() < 1e-2, "{:?}", r.point);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = substream(2, &[0]);
        let x = lhs(12, 3, &mut rng);
        let y: Vec<f64> = x.rows().map(|r| r.iter().map(|v| (5.0 * v).cos()).sum()).collect();
        let m = GpModel::fit(&x, &y, &GpHyper::isotropic(3, 0.3), &GpConfig::default()).unwrap();
        let y_min = y.iter().cloned().fold(f64::INFINITY, f64::min);
        let mut checked = 0;
        while checked < 50 {
            let q: Vec<f64> = (0..3).map(|_| rng.random::<f64>()).collect();
            let (v, g) = ei_with_grad(&m, &q, y_min).unwrap();
            if v < 1e-8 {
                continue;
            }
            for p in 0..3 {
                let at = |d: f64| {
                    let mut z = q.clone();
                    z[p] += d;
                    ei_with_grad(&m, &z, y_min).unwrap().0
                };
                let fd = (at(1e-6) - at(-1e-6)) / 2e-6;
                assert!((fd - g[p]).abs() <= 1e-4 * fd.abs().max(1e-4), "{fd} vs {}", g[p]);
            }
            checked += 1;
        }
    }

    #[test]
    fn never_worse_than_the_incumbent() {
        let mut rng = substream(3, &[0]);
        let x = lhs(10, 2, &mut rng);
        let y: Vec<f64> = x.rows().map(|r| r[0] * r[1]).collect();
        let m = GpModel::fit(&x, &y, &GpHyper::isotropic(2, 0.3), &GpConfig::default()).unwrap();
        let y_min = y.iter().cloned().fold(f64::INFINITY, f64::min);
        let inc = x.row(argmax_index(&y.iter().map(|v| -v).collect::<Vec<_>>()).unwrap()).to_vec();
        let at_inc = ei(&m, &Points::from_rows(&[inc.clone()]).unwrap(), y_min).unwrap()[0];
        let r = multistart_opt(&m, y_min, 5, &inc, &BoxOptions::default(), &mut rng).unwrap();
        assert!(r.acq_value >= at_inc);
        assert!(r.point.iter().all(|v| (0.0..=1.0).contains(v)));
    }
}
