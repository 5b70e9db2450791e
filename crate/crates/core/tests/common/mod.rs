//! Independent reference computations shared by the test targets.
#![allow(dead_code)]

use rand::Rng;
use rand_distr::StandardNormal;
use vorcands::gp::SIGNAL_SCALE_FLOOR;
use vorcands::{Metric, Points};

pub fn uniform<R: Rng + ?Sized>(n: usize, dim: usize, rng: &mut R) -> Points {
    Points::from_flat(dim, (0..n * dim).map(|_| rng.random::<f64>()).collect()).unwrap()
}

/// Linear scan; ties go to the smaller index.
pub fn brute_nearest(design: &Points, metric: Metric, q: &[f64]) -> usize {
    let mut best = 0;
    for j in 1..design.len() {
        if metric.dist(q, design.row(j)) < metric.dist(q, design.row(best)) {
            best = j;
        }
    }
    best
}

pub fn probe(x: &[f64], u: &[f64], t: f64) -> Vec<f64> {
    x.iter().zip(u).map(|(a, b)| a + t * b).collect()
}

pub fn outside(p: &[f64]) -> bool {
    p.iter().any(|&v| !(0.0..=1.0).contains(&v))
}

pub fn corr(ls: &[f64], a: &[f64], b: &[f64]) -> f64 {
    (-a.iter().zip(b).zip(ls).map(|((x, y), l)| (x - y).powi(2) / l).sum::<f64>()).exp()
}

/// Gauss-Jordan inverse with partial pivoting.
pub fn inverse(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs())).unwrap();
        m.swap(col, piv);
        let d = m[col][col];
        m[col].iter_mut().for_each(|v| *v /= d);
        for r in 0..n {
            if r != col {
                let f = m[r][col];
                if f != 0.0 {
                    for c in 0..2 * n {
                        m[r][c] -= f * m[col][c];
                    }
                }
            }
        }
    }
    m.into_iter().map(|r| r[n..].to_vec()).collect()
}

pub fn jittered(x: &Points, ls: &[f64], g: f64) -> Vec<Vec<f64>> {
    let n = x.len();
    (0..n)
        .map(|i| (0..n).map(|j| corr(ls, x.row(i), x.row(j)) + if i == j { g } else { 0.0 }).collect())
        .collect()
}

/// 1-norm condition number.
pub fn condition(a: &[Vec<f64>]) -> f64 {
    let norm1 = |m: &[Vec<f64>]| (0..m.len()).map(|j| m.iter().map(|r| r[j].abs()).sum::<f64>()).fold(0.0, f64::max);
    norm1(a) * norm1(&inverse(a))
}

/// Predictive mean and variance from the explicit inverse of `R + g I`.
pub fn dense_moments(x: &Points, y: &[f64], ls: &[f64], g: f64, q: &[f64]) -> (f64, f64) {
    let n = x.len();
    let ai = inverse(&jittered(x, ls, g));
    let ybar = y.iter().sum::<f64>() / n as f64;
    let yc: Vec<f64> = y.iter().map(|v| v - ybar).collect();
    let quad = |u: &[f64], v: &[f64]| -> f64 {
        (0..n).map(|i| (0..n).map(|j| u[i] * ai[i][j] * v[j]).sum::<f64>()).sum()
    };
    let tau2 = (quad(&yc, &yc) / n as f64).max(SIGNAL_SCALE_FLOOR);
    let k: Vec<f64> = x.rows().map(|r| corr(ls, q, r)).collect();
    (ybar + quad(&k, &yc), (tau2 * (1.0 - quad(&k, &k))).max(0.0))
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

/// Monte Carlo estimate of E[max(y_min - Y, 0)], Y ~ N(mean, sd²), and its standard error.
pub fn mc_ei<R: Rng + ?Sized>(mean: f64, sd: f64, y_min: f64, draws: usize, rng: &mut R) -> (f64, f64) {
    let (mut s, mut s2) = (0.0, 0.0);
    for _ in 0..draws {
        let z: f64 = rng.sample(StandardNormal);
        let v = (y_min - (mean + sd * z)).max(0.0);
        s += v;
        s2 += v * v;
    }
    let m = s / draws as f64;
    let var = (s2 / draws as f64 - m * m).max(0.0);
    (m, (var / draws as f64).sqrt())
}

/// First `n` Sobol points in up to four dimensions, built from the
/// primitive polynomials and initial direction numbers directly.
pub fn reference_sobol(n: usize, dim: usize) -> Vec<Vec<f64>> {
    const BITS: usize = 32;
    // (degree s, coefficient a, initial m) per dimension after the first.
    let params: [(usize, u32, &[u32]); 3] = [(1, 0, &[1]), (2, 1, &[1, 3]), (3, 1, &[1, 3, 1])];
    let mut v = vec![[0u64; BITS]; dim];
    for k in 0..BITS {
        v[0][k] = 1 << (BITS - 1 - k);
    }
    for d in 1..dim {
        let (s, a, m) = params[d - 1];
        let mut mm: Vec<u64> = m.iter().map(|&x| x as u64).collect();
        for k in s..BITS {
            let mut next = mm[k - s] ^ (mm[k - s] << s);
            for j in 1..s {
                if (a >> (s - 1 - j)) & 1 == 1 {
                    next ^= mm[k - j] << j;
                }
            }
            mm.push(next);
        }
        for k in 0..BITS {
            v[d][k] = mm[k] << (BITS - 1 - k);
        }
    }
    // Points are generated in Gray-code order.
    (0..n)
        .map(|i| i ^ (i >> 1))
        .map(|i| {
            (0..dim)
                .map(|d| {
                    let mut x = 0u64;
                    for (k, vk) in v[d].iter().enumerate() {
                        if (i >> k) & 1 == 1 {
                            x ^= vk;
                        }
                    }
                    x as f64 / (1u64 << BITS) as f64
                })
                .collect()
        })
        .collect()
}
