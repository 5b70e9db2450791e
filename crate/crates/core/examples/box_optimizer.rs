//! The bound-constrained quasi-Newton minimizer used for likelihood and
//! acquisition optimization, on a Rosenbrock valley clipped by a box.

use vorcands::optim::{minimize_box, BoxOptions};

fn main() {
    let f = |x: &[f64]| {
        let (a, b) = (x[0], x[1]);
        let v = (1.0 - a).powi(2) + 100.0 * (b - a * a).powi(2);
        let g = vec![-2.0 * (1.0 - a) - 400.0 * a * (b - a * a), 200.0 * (b - a * a)];
        Some((v, g))
    };
    for upper in [[2.0, 2.0], [0.5, 2.0]] {
        let r = minimize_box(f, &[-1.2, 1.0], &[-2.0, -2.0], &upper, &BoxOptions::default());
        println!(
            "upper {upper:?}: x = [{:.6}, {:.6}]  f = {:.3e}  iters {}  converged {}",
            r.x[0], r.x[1], r.value, r.iterations, r.converged
        );
    }
}
