//! Unscrambled Sobol points from the Joe-Kuo direction numbers, generated in
//! Gray-code order (the order used by most reference implementations).

use super::sobol_table::JOE_KUO;
use crate::error::{Error, Result};
use crate::points::Points;

const BITS: usize = 32;

/// Largest dimension with tabulated direction numbers.
pub const SOBOL_MAX_DIM: usize = JOE_KUO.len() + 1;

/// Direction numbers for the first `dim` coordinates, scaled to 32 bits.
fn direction_numbers(dim: usize) -> Vec<[u32; BITS]> {
    let mut out = Vec::with_capacity(dim);
    let mut first = [0u32; BITS];
    for (k, v) in first.iter_mut().enumerate() {
        *v = 1 << (BITS - 1 - k);
    }
    out.push(first);

    for &(s, a, m) in JOE_KUO.iter().take(dim.saturating_sub(1)) {
        let s = s as usize;
        let mut v = [0u32; BITS];
        for k in 0..s.min(BITS) {
            v[k] = m[k] << (BITS - 1 - k);
        }
        for k in s..BITS {
            let mut x = v[k - s] ^ (v[k - s] >> s);
            for j in 1..s {
                if (a >> (s - 1 - j)) & 1 == 1 {
                    x ^= v[k - j];
                }
            }
            v[k] = x;
        }
        out.push(v);
    }
    out
}

/// Incremental generator over the Sobol sequence in a fixed dimension.
#[derive(Clone, Debug)]
pub struct SobolSequence {
    directions: Vec<[u32; BITS]>,
    state: Vec<u32>,
    index: u64,
}

impl SobolSequence {
    /// Positions the generator at point `start_index` (0 is the origin).
    pub fn new(dim: usize, start_index: u64) -> Result<Self> {
        if dim == 0 || dim > SOBOL_MAX_DIM {
            return Err(Error::Config(format!(
                "Sobol points are available for dimensions 1..={SOBOL_MAX_DIM}, got {dim}"
            )));
        }
        if start_index >= 1 << BITS {
            return Err(Error::Config(format!(
                "Sobol start index {start_index} exceeds the 32-bit sequence length"
            )));
        }
        let directions = direction_numbers(dim);
        // Gray-code point g(i) = i ^ (i >> 1) is the XOR of the directions
        // for its set bits.
        let gray = start_index ^ (start_index >> 1);
        let state = directions
            .iter()
            .map(|v| {
                (0..BITS)
                    .filter(|&k| (gray >> k) & 1 == 1)
                    .fold(0u32, |acc, k| acc ^ v[k])
            })
            .collect();
        Ok(Self {
            directions,
            state,
            index: start_index,
        })
    }

    pub fn dim(&self) -> usize {
        self.directions.len()
    }

    /// Writes the current point into `out` and advances.
    pub fn next_into(&mut self, out: &mut [f64]) -> Result<()> {
        if self.index >= 1 << BITS {
            return Err(Error::Config("Sobol sequence exhausted".into()));
        }
        const SCALE: f64 = 1.0 / (1u64 << BITS) as f64;
        for (o, &s) in out.iter_mut().zip(&self.state) {
            *o = s as f64 * SCALE;
        }
        // Moving from point i to i+1 flips the bit at the lowest zero of i.
        let bit = (!self.index).trailing_zeros() as usize;
        if bit < BITS {
            for (s, v) in self.state.iter_mut().zip(&self.directions) {
                *s ^= v[bit];
            }
        }
        self.index += 1;
        Ok(())
    }
}

/// `n` consecutive Sobol points in dimension `dim`, starting at `start_index`.
pub fn sobol(n: usize, dim: usize, start_index: u64) -> Result<Points> {
    let mut seq = SobolSequence::new(dim, start_index)?;
    let mut out = Points::zeros(n, dim);
    for i in 0..n {
        seq.next_into(out.row_mut(i))?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_points_in_one_dimension() {
        let p = sobol(3, 1, 1).unwrap();
        assert_eq!(p.as_flat(), &[0.5, 0.75, 0.25]);
    }

    #[test]
    fn index_zero_is_the_origin() {
        let p = sobol(1, 6, 0).unwrap();
        assert!(p.row(0).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn starting_midway_matches_skipping() {
        let all = sobol(40, 5, 0).unwrap();
        let tail = sobol(15, 5, 25).unwrap();
        for i in 0..15 {
            assert_eq!(tail.row(i), all.row(25 + i));
        }
    }

    #[test]
    fn unsupported_dimension_is_a_config_error() {
        assert!(matches!(sobol(1, SOBOL_MAX_DIM + 1, 1), Err(Error::Config(_))));
        assert!(sobol(1, SOBOL_MAX_DIM, 1).is_ok());
        assert!(matches!(sobol(1, 0, 1), Err(Error::Config(_))));
    }

    #[test]
    fn columns_are_stratified_at_powers_of_two() {
        // Every 1D projection of the first 2^k points (including the origin)
        // has one point per dyadic interval of width 2^-k.
        let p = sobol(256, 40, 0).unwrap();
        for d in 0..40 {
            let mut seen = [false; 256];
            for row in p.rows() {
                let k = (row[d] * 256.0) as usize;
                assert!(!seen[k]);
                seen[k] = true;
            }
        }
    }
}
