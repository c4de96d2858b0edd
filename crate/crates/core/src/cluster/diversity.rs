use super::points::dist;
use crate::error::{Error, Result};

/// Mean Euclidean distance over all unordered pairs of `vectors`.
pub fn mean_pairwise_distance<V: AsRef<[f64]>>(vectors: &[V]) -> Result<f64> {
    let n = vectors.len();
    if n < 2 {
        return Err(Error::Argument(format!("diversity needs at least 2 vectors, got {n}")));
    }
    let dim = vectors[0].as_ref().len();
    if vectors.iter().any(|v| v.as_ref().len() != dim) {
        return Err(Error::Argument("vectors differ in dimension".into()));
    }
    let mut total = 0.0;
    for i in 0..n {
        let a = vectors[i].as_ref();
        for b in &vectors[i + 1..] {
            total += dist(a, b.as_ref());
        }
    }
    Ok(total / (n * (n - 1) / 2) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::rng_from;
    use proptest::prelude::*;
    use rand::Rng;

    #[test]
    fn small_cases() {
        assert_eq!(mean_pairwise_distance(&[[0.0, 0.0], [3.0, 4.0]]).unwrap(), 5.0);
        assert_eq!(mean_pairwise_distance(&[[1.5, 2.0]; 7]).unwrap(), 0.0);
        assert!(mean_pairwise_distance(&[[1.0]]).is_err());
        assert!(mean_pairwise_distance(&[vec![1.0], vec![1.0, 2.0]]).is_err());
    }

    #[test]
    fn matches_ordered_double_loop() {
        let mut rng = rng_from(3);
        let v: Vec<Vec<f64>> = (0..50).map(|_| (0..6).map(|_| rng.random::<f64>() * 4.0).collect()).collect();
        let mut sum = 0.0;
        for a in &v {
            for b in &v {
                sum += a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
            }
        }
        let oracle = sum / (50.0 * 49.0);
        assert!((mean_pairwise_distance(&v).unwrap() - oracle).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn rigid_motion_and_scaling(seed in 0u64..10_000, angle in 0.0f64..6.3, scale in 0.1f64..10.0) {
            let mut rng = rng_from(seed);
            let v: Vec<[f64; 2]> = (0..12).map(|_| [rng.random(), rng.random()]).collect();
            let base = mean_pairwise_distance(&v).unwrap();
            let (s, c) = angle.sin_cos();
            let moved: Vec<[f64; 2]> = v.iter().map(|p| [c * p[0] - s * p[1] + 7.0, s * p[0] + c * p[1] - 3.0]).collect();
            prop_assert!((mean_pairwise_distance(&moved).unwrap() - base).abs() < 1e-9);
            let scaled: Vec<[f64; 2]> = v.iter().map(|p| [p[0] * scale, p[1] * scale]).collect();
            prop_assert!((mean_pairwise_distance(&scaled).unwrap() - scale * base).abs() < 1e-9 * scale.max(1.0));
        }
    }
}
