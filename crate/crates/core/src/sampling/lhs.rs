use rand::seq::SliceRandom;
use rand::Rng;

use crate::points::Points;

/// Half-open interval `[lo, hi)` of stratum `k` out of `n`.
pub fn stratum_bounds(k: usize, n: usize) -> (f64, f64) {
    (k as f64 / n as f64, (k + 1) as f64 / n as f64)
}

/// Random Latin hypercube sample of `n` points in `[0,1)^dim`.
///
/// Each column is an independent random permutation of the `n` strata with
/// one uniform draw inside each stratum, so every stratum of every column
/// holds exactly one point.
pub fn lhs<R: Rng + ?Sized>(n: usize, dim: usize, rng: &mut R) -> Points {
    let mut out = Points::zeros(n, dim);
    let mut perm: Vec<usize> = (0..n).collect();
    for p in 0..dim {
        perm.shuffle(rng);
        for (i, &k) in perm.iter().enumerate() {
            let (lo, hi) = stratum_bounds(k, n);
            let mut v = lo + rng.random::<f64>() * (hi - lo);
            // Rounding can land exactly on the upper edge.
            if v >= hi {
                v = f64::from_bits(hi.to_bits() - 1);
            }
            out.row_mut(i)[p] = v.max(lo);
        }
    }
    out
}
