//! Box-constrained limited-memory quasi-Newton minimization.
//!
//! Variables sitting on a bound with the gradient pushing outward are frozen
//! for the iteration; the remaining ones take an L-BFGS step, and the trial
//! point is projected back into the box before a backtracking Armijo test.

use std::collections::VecDeque;

/// Stopping rules and memory size.
#[derive(Clone, Debug)]
pub struct BoxOptions {
    pub max_iters: usize,
    /// Stop once the projected gradient's largest entry is at most this.
    pub grad_tol: f64,
    /// Number of curvature pairs kept.
    pub memory: usize,
}

impl Default for BoxOptions {
    fn default() -> Self {
        Self {
            max_iters: 200,
            grad_tol: 1e-8,
            memory: 10,
        }
    }
}

#[derive(Clone, Debug)]
pub struct BoxResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
    /// The projected-gradient tolerance was met.
    pub converged: bool,
}

fn project(x: &mut [f64], lower: &[f64], upper: &[f64]) {
    for ((v, &lo), &hi) in x.iter_mut().zip(lower).zip(upper) {
        *v = v.clamp(lo, hi);
    }
}

fn blocked(x: f64, g: f64, lo: f64, hi: f64) -> bool {
    (x <= lo && g > 0.0) || (x >= hi && g < 0.0)
}

fn dot_masked(a: &[f64], b: &[f64], free: &[bool]) -> f64 {
    a.iter()
        .zip(b)
        .zip(free)
        .filter(|(_, &f)| f)
        .map(|((x, y), _)| x * y)
        .sum()
}

/// Minimizes `f` over the box `[lower, upper]` starting from `x0` (projected
/// into the box first).
///
/// `f` returns the value and gradient, or `None` where it cannot be
/// evaluated; such points are rejected by the line search. The result is
/// never worse than the starting point.
pub fn minimize_box<F>(mut f: F, x0: &[f64], lower: &[f64], upper: &[f64], opts: &BoxOptions) -> BoxResult
where
    F: FnMut(&[f64]) -> Option<(f64, Vec<f64>)>,
{
    let n = x0.len();
    assert!(lower.len() == n && upper.len() == n, "bound length mismatch");
    let mut x = x0.to_vec();
    project(&mut x, lower, upper);
    let mut evaluations = 1;
    let Some((mut fx, mut g)) = f(&x).filter(|(v, g)| v.is_finite() && g.iter().all(|d| d.is_finite())) else {
        return BoxResult {
            x,
            value: f64::INFINITY,
            iterations: 0,
            evaluations,
            converged: false,
        };
    };

    let mut pairs: VecDeque<(Vec<f64>, Vec<f64>)> = VecDeque::new();
    let mut iterations = 0;
    let mut converged = false;
    let mut d = vec![0.0; n];

    while iterations < opts.max_iters {
        let free: Vec<bool> = (0..n).map(|i| !blocked(x[i], g[i], lower[i], upper[i])).collect();
        let pg_max = (0..n).filter(|&i| free[i]).map(|i| g[i].abs()).fold(0.0, f64::max);
        if pg_max <= opts.grad_tol {
            converged = true;
            break;
        }
        iterations += 1;

        // Two-loop recursion restricted to the free variables.
        let mut q: Vec<f64> = (0..n).map(|i| if free[i] { g[i] } else { 0.0 }).collect();
        let mut alphas = Vec::with_capacity(pairs.len());
        for (s, y) in pairs.iter().rev() {
            let sy = dot_masked(s, y, &free);
            if sy <= 0.0 {
                alphas.push(0.0);
                continue;
            }
            let a = dot_masked(s, &q, &free) / sy;
            for i in 0..n {
                if free[i] {
                    q[i] -= a * y[i];
                }
            }
            alphas.push(a);
        }
        let mut first_step = pairs.is_empty();
        if let Some((s, y)) = pairs.back() {
            let sy = dot_masked(s, y, &free);
            let yy = dot_masked(y, y, &free);
            if sy > 0.0 && yy > 0.0 {
                q.iter_mut().for_each(|v| *v *= sy / yy);
            } else {
                first_step = true;
            }
        }
        for ((s, y), a) in pairs.iter().zip(alphas.iter().rev()) {
            let sy = dot_masked(s, y, &free);
            if sy <= 0.0 {
                continue;
            }
            let b = dot_masked(y, &q, &free) / sy;
            for i in 0..n {
                if free[i] {
                    q[i] += (a - b) * s[i];
                }
            }
        }
        for i in 0..n {
            d[i] = if free[i] { -q[i] } else { 0.0 };
        }
        if dot_masked(&d, &g, &free) >= 0.0 {
            pairs.clear();
            first_step = true;
            for i in 0..n {
                d[i] = if free[i] { -g[i] } else { 0.0 };
            }
        }

        let mut t = if first_step { (1.0 / pg_max).min(1.0) } else { 1.0 };
        let mut accepted = None;
        for _ in 0..60 {
            let mut trial: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + t * b).collect();
            project(&mut trial, lower, upper);
            if trial == x {
                break;
            }
            let decrease: f64 = g.iter().zip(&trial).zip(&x).map(|((gi, a), b)| gi * (a - b)).sum();
            evaluations += 1;
            if let Some((ft, gt)) = f(&trial) {
                if ft.is_finite() && gt.iter().all(|v| v.is_finite()) && ft <= fx + 1e-4 * decrease {
                    accepted = Some((trial, ft, gt));
                    break;
                }
            }
            t *= 0.5;
        }

        let Some((xn, fnew, gn)) = accepted else {
            if pairs.is_empty() {
                break;
            }
            pairs.clear();
            continue;
        };
        let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gn.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy: f64 = s.iter().zip(&y).map(|(a, b)| a * b).sum();
        if sy > 1e-12 * s.iter().map(|v| v * v).sum::<f64>().sqrt() * y.iter().map(|v| v * v).sum::<f64>().sqrt() {
            if pairs.len() == opts.memory {
                pairs.pop_front();
            }
            pairs.push_back((s, y));
        }
        let stalled = fx - fnew <= 1e-15 * fx.abs().max(1.0);
        x = xn;
        fx = fnew;
        g = gn;
        if stalled {
            break;
        }
    }

    BoxResult {
        x,
        value: fx,
        iterations,
        evaluations,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rosenbrock(x: &[f64]) -> Option<(f64, Vec<f64>)> {
        let (a, b) = (x[0], x[1]);
        let f = (1.0 - a).powi(2) + 100.0 * (b - a * a).powi(2);
        let g = vec![-2.0 * (1.0 - a) - 400.0 * a * (b - a * a), 200.0 * (b - a * a)];
        Some((f, g))
    }

    #[test]
    fn unconstrained_minimum_inside_the_box() {
        let r = minimize_box(rosenbrock, &[-1.2, 1.0], &[-5.0, -5.0], &[5.0, 5.0], &BoxOptions {
            max_iters: 500,
            ..Default::default()
        });
        assert!((r.x[0] - 1.0).abs() < 1e-5 && (r.x[1] - 1.0).abs() < 1e-5, "{:?}", r.x);
    }

    #[test]
    fn active_bound() {
        // Minimum of (x-2)^2 + (y+1)^2 on [0,1]^2 is (1, 0).
        let f = |x: &[f64]| Some(((x[0] - 2.0).powi(2) + (x[1] + 1.0).powi(2), vec![2.0 * (x[0] - 2.0), 2.0 * (x[1] + 1.0)]));
        let r = minimize_box(f, &[0.3, 0.6], &[0.0, 0.0], &[1.0, 1.0], &BoxOptions::default());
        assert_eq!(r.x, vec![1.0, 0.0]);
        assert!(r.converged);
    }

    #[test]
    fn quadratic_converges_to_tolerance() {
        let scales = [1.0, 10.0, 0.1, 3.0];
        let f = |x: &[f64]| {
            let v = x.iter().zip(&scales).map(|(a, s)| s * (a - 0.3).powi(2)).sum();
            let g = x.iter().zip(&scales).map(|(a, s)| 2.0 * s * (a - 0.3)).collect();
            Some((v, g))
        };
        let r = minimize_box(f, &[0.9; 4], &[0.0; 4], &[1.0; 4], &BoxOptions::default());
        assert!(r.x.iter().all(|v| (v - 0.3).abs() < 1e-8));
    }

    #[test]
    fn never_worse_than_the_start() {
        // Undefined away from a thin interval: the search must stay put.
        let f = |x: &[f64]| if (x[0] - 0.5).abs() < 1e-3 { Some((x[0], vec![1.0])) } else { None };
        let r = minimize_box(f, &[0.5], &[0.0], &[1.0], &BoxOptions::default());
        assert!(r.value <= 0.5);
        assert!(r.x[0] >= 0.499);
    }

    #[test]
    fn failing_start_is_returned() {
        let r = minimize_box(|_: &[f64]| None, &[2.0], &[0.0], &[1.0], &BoxOptions::default());
        assert_eq!(r.x, vec![1.0]);
        assert!(r.value.is_infinite());
    }
}
