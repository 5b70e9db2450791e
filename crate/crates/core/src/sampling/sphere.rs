use rand::Rng;
use rand_distr::StandardNormal;

/// Uniform direction on the unit sphere in `dim` dimensions: a standard
/// normal vector divided by its Euclidean norm.
pub fn sphere_direction<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 && norm.is_finite() {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;

    #[test]
    fn unit_norm() {
        let mut rng = substream(4, &[0]);
        for dim in [1, 2, 3, 10, 100] {
            for _ in 0..100 {
                let u = sphere_direction(dim, &mut rng);
                let n = u.iter().map(|x| x * x).sum::<f64>().sqrt();
                assert!((n - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn one_dimension_is_a_sign() {
        let mut rng = substream(5, &[0]);
        let draws: Vec<f64> = (0..200).map(|_| sphere_direction(1, &mut rng)[0]).collect();
        assert!(draws.iter().all(|&v| v == 1.0 || v == -1.0));
        assert!(draws.contains(&1.0) && draws.contains(&-1.0));
    }

    #[test]
    fn coordinates_are_centered() {
        // Each coordinate has variance 1/3 in three dimensions.
        let mut rng = substream(6, &[0]);
        let n = 100_000;
        let mut sums = [0.0; 3];
        for _ in 0..n {
            let u = sphere_direction(3, &mut rng);
            for k in 0..3 {
                sums[k] += u[k];
            }
        }
        let se = (1.0f64 / 3.0 / n as f64).sqrt();
        for s in sums {
            assert!((s / n as f64).abs() < 4.0 * se);
        }
    }
}
