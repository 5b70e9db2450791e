//! Synthetic test problems on the unit cube.
//!
//! Each function is evaluated at the affine image of `x ∈ [0,1]^P` in its
//! usual domain. Ackley is additionally translated on the torus by a random
//! shift `s`, so that its optimum sits at `x = s`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{contract, Error, Result};

/// Names accepted by [`make_problem`].
pub const PROBLEM_NAMES: [&str; 4] = ["ackley", "levy", "rosenbrock", "sinesum2d"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProblemKind {
    Ackley,
    Levy,
    Rosenbrock,
    SineSum2d,
}

impl ProblemKind {
    pub fn name(self) -> &'static str {
        match self {
            ProblemKind::Ackley => "ackley",
            ProblemKind::Levy => "levy",
            ProblemKind::Rosenbrock => "rosenbrock",
            ProblemKind::SineSum2d => "sinesum2d",
        }
    }

    /// Native domain `[lo, hi]`, the same in every coordinate.
    pub fn domain(self) -> (f64, f64) {
        match self {
            ProblemKind::Ackley => (-32.768, 32.768),
            ProblemKind::Levy => (-10.0, 10.0),
            ProblemKind::Rosenbrock => (-5.0, 10.0),
            ProblemKind::SineSum2d => (0.0, 1.0),
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ackley" => Ok(ProblemKind::Ackley),
            "levy" => Ok(ProblemKind::Levy),
            "rosenbrock" => Ok(ProblemKind::Rosenbrock),
            "sinesum2d" => Ok(ProblemKind::SineSum2d),
            other => Err(Error::Config(format!(
                "unknown problem {other:?} (expected one of {})",
                PROBLEM_NAMES.join(", ")
            ))),
        }
    }
}

/// A deterministic objective on `[0,1]^P`.
#[derive(Clone, Debug)]
pub struct TestProblem {
    kind: ProblemKind,
    dim: usize,
    shift: Option<Vec<f64>>,
}

impl TestProblem {
    pub fn kind(&self) -> ProblemKind {
        self.kind
    }

    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Torus translation applied before mapping (Ackley only).
    pub fn shift(&self) -> Option<&[f64]> {
        self.shift.as_deref()
    }

    /// Global minimum value.
    pub fn known_best(&self) -> Option<f64> {
        Some(0.0)
    }

    /// Native coordinates of a unit-cube point.
    pub fn to_native(&self, x: &[f64]) -> Vec<f64> {
        let (lo, hi) = self.kind.domain();
        match &self.shift {
            Some(s) => x
                .iter()
                .zip(s)
                .map(|(v, sv)| lo + (hi - lo) * (v - sv + 0.5).rem_euclid(1.0))
                .collect(),
            None => x.iter().map(|v| lo + (hi - lo) * v).collect(),
        }
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(contract(format!(
                "{} expects {} coordinates, got {}",
                self.name(),
                self.dim,
                x.len()
            )));
        }
        let z = self.to_native(x);
        Ok(match self.kind {
            ProblemKind::Ackley => ackley(&z),
            ProblemKind::Levy => levy(&z),
            ProblemKind::Rosenbrock => rosenbrock(&z),
            ProblemKind::SineSum2d => z.iter().map(|v| (4.0 * std::f64::consts::PI * (v - 0.5).powi(2)).sin()).sum(),
        })
    }
}

/// Builds the named problem in `dim` dimensions; Ackley draws its shift from `rng`.
pub fn make_problem<R: Rng + ?Sized>(name: &str, dim: usize, rng: &mut R) -> Result<TestProblem> {
    let kind: ProblemKind = name.parse()?;
    if dim == 0 {
        return Err(Error::Config("problem dimension must be at least 1".into()));
    }
    if kind == ProblemKind::SineSum2d && dim != 2 {
        return Err(Error::Config(format!("sinesum2d is two-dimensional, got dim {dim}")));
    }
    let shift = (kind == ProblemKind::Ackley).then(|| (0..dim).map(|_| rng.random::<f64>()).collect());
    Ok(TestProblem { kind, dim, shift })
}

fn ackley(z: &[f64]) -> f64 {
    let (a, b, c) = (20.0, 0.2, 2.0 * std::f64::consts::PI);
    let d = z.len() as f64;
    let sq = z.iter().map(|v| v * v).sum::<f64>() / d;
    let cs = z.iter().map(|v| (c * v).cos()).sum::<f64>() / d;
    -a * (-b * sq.sqrt()).exp() - cs.exp() + a + std::f64::consts::E
}

fn levy(z: &[f64]) -> f64 {
    use std::f64::consts::PI;
    let w: Vec<f64> = z.iter().map(|v| 1.0 + (v - 1.0) / 4.0).collect();
    let last = w[w.len() - 1];
    let mut s = (PI * w[0]).sin().powi(2);
    for &wi in &w[..w.len() - 1] {
        s += (wi - 1.0).powi(2) * (1.0 + 10.0 * (PI * wi + 1.0).sin().powi(2));
    }
    s + (last - 1.0).powi(2) * (1.0 + (2.0 * PI * last).sin().powi(2))
}

fn rosenbrock(z: &[f64]) -> f64 {
    z.windows(2)
        .map(|p| 100.0 * (p[1] - p[0] * p[0]).powi(2) + (p[0] - 1.0).powi(2))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;

    // Reference formulas written as the textbook sums, term by term.
    fn ackley_ref(x: &[f64]) -> f64 {
        let n = x.len() as f64;
        let mut s1 = 0.0;
        let mut s2 = 0.0;
        for &v in x {
            s1 += v * v;
            s2 += (2.0 * std::f64::consts::PI * v).cos();
        }
        20.0 + std::f64::consts::E - 20.0 * (-0.2 * (s1 / n).sqrt()).exp() - (s2 / n).exp()
    }

    fn levy_ref(x: &[f64]) -> f64 {
        let pi = std::f64::consts::PI;
        let d = x.len();
        let w = |i: usize| 1.0 + (x[i] - 1.0) / 4.0;
        let mut total = (pi * w(0)).sin() * (pi * w(0)).sin();
        for i in 0..d - 1 {
            let t = (pi * w(i) + 1.0).sin();
            total += (w(i) - 1.0) * (w(i) - 1.0) * (1.0 + 10.0 * t * t);
        }
        let t = (2.0 * pi * w(d - 1)).sin();
        total + (w(d - 1) - 1.0) * (w(d - 1) - 1.0) * (1.0 + t * t)
    }

    fn rosenbrock_ref(x: &[f64]) -> f64 {
        let mut total = 0.0;
        for i in 0..x.len() - 1 {
            total += 100.0 * (x[i + 1] - x[i] * x[i]) * (x[i + 1] - x[i] * x[i]) + (1.0 - x[i]) * (1.0 - x[i]);
        }
        total
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-10 * b.abs().max(1.0)
    }

    #[test]
    fn matches_reference_formulas() {
        let mut rng = substream(1, &[0]);
        for dim in [1usize, 2, 5, 10] {
            let ack = make_problem("ackley", dim, &mut rng).unwrap();
            let lev = make_problem("levy", dim, &mut rng).unwrap();
            let ros = make_problem("rosenbrock", dim, &mut rng).unwrap();
            let s = ack.shift().unwrap().to_vec();
            for _ in 0..100 {
                let x: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();
                let za: Vec<f64> = x
                    .iter()
                    .zip(&s)
                    .map(|(v, sv)| {
                        let mut w = v - sv + 0.5;
                        while w < 0.0 {
                            w += 1.0;
                        }
                        while w >= 1.0 {
                            w -= 1.0;
                        }
                        -32.768 + 65.536 * w
                    })
                    .collect();
                assert!(close(ack.evaluate(&x).unwrap(), ackley_ref(&za)));
                let zl: Vec<f64> = x.iter().map(|v| -10.0 + 20.0 * v).collect();
                assert!(close(lev.evaluate(&x).unwrap(), levy_ref(&zl)));
                let zr: Vec<f64> = x.iter().map(|v| -5.0 + 15.0 * v).collect();
                assert!(close(ros.evaluate(&x).unwrap(), rosenbrock_ref(&zr)));
            }
        }
    }

    #[test]
    fn known_optima() {
        let mut rng = substream(2, &[0]);
        for dim in [1usize, 3, 8] {
            let ack = make_problem("ackley", dim, &mut rng).unwrap();
            let s = ack.shift().unwrap().to_vec();
            assert!(ack.evaluate(&s).unwrap().abs() < 1e-12);
            for _ in 0..1000 {
                let x: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();
                assert!(ack.evaluate(&x).unwrap() > 0.0);
            }
            // Native optimum x* = 1 for Levy (unit 0.55) and Rosenbrock (unit 0.4).
            let lev = make_problem("levy", dim, &mut rng).unwrap();
            assert!(lev.evaluate(&vec![0.55; dim]).unwrap().abs() < 1e-12);
            let ros = make_problem("rosenbrock", dim, &mut rng).unwrap();
            assert!(ros.evaluate(&vec![0.4; dim]).unwrap().abs() < 1e-12);
        }
        let sine = make_problem("sinesum2d", 2, &mut rng).unwrap();
        assert_eq!(sine.evaluate(&[0.5, 0.5]).unwrap(), 0.0);
    }

    #[test]
    fn known_best_is_a_lower_bound() {
        let mut rng = substream(3, &[0]);
        for name in PROBLEM_NAMES {
            let dim = if name == "sinesum2d" { 2 } else { 4 };
            let p = make_problem(name, dim, &mut rng).unwrap();
            let best = p.known_best().unwrap();
            for _ in 0..1000 {
                let x: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();
                let v = p.evaluate(&x).unwrap();
                assert!(v >= best - 1e-9);
                assert_eq!(v, p.evaluate(&x).unwrap());
            }
        }
    }

    #[test]
    fn bad_requests() {
        let mut rng = substream(4, &[0]);
        assert!(matches!(make_problem("branin", 2, &mut rng), Err(Error::Config(_))));
        assert!(matches!(make_problem("sinesum2d", 3, &mut rng), Err(Error::Config(_))));
        assert!(make_problem("levy", 0, &mut rng).is_err());
        let p = make_problem("levy", 2, &mut rng).unwrap();
        assert!(p.evaluate(&[0.1]).is_err());
    }
}
