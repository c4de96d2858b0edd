//! Hopkins statistic of clustering tendency.
//!
//! H = Σt / (Σs + Σt), where `s` are nearest-neighbour distances from sampled
//! data points to the rest of the data and `t` are nearest-neighbour distances
//! from uniform points drawn in the data's bounding box. Values near 0.5
//! indicate spatial randomness, values near 1 a clustered set.

use rand::seq::index;
use rand::Rng;

use super::points::{sq_dist, PointSet};
use crate::error::{Error, Result};
use crate::seed::rng_from;

/// Hopkins statistic with `m` probe points sampled without replacement.
pub fn hopkins(points: &PointSet, m: usize, seed: u64) -> Result<f64> {
    check_sizes(points.len(), m)?;
    let mut rng = rng_from(seed);
    let probes = index::sample(&mut rng, points.len(), m).into_vec();
    hopkins_inner(points, &probes, &mut rng)
}

/// Hopkins statistic using the given data points as the real-sample probes.
/// `seed` drives the uniform reference set.
pub fn hopkins_with_probes(points: &PointSet, probes: &[usize], seed: u64) -> Result<f64> {
    check_sizes(points.len(), probes.len())?;
    let mut sorted = probes.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Argument("probe indices must be distinct".into()));
    }
    if sorted.last().is_some_and(|&i| i >= points.len()) {
        return Err(Error::Argument("probe index out of range".into()));
    }
    hopkins_inner(points, probes, &mut rng_from(seed))
}

fn check_sizes(n: usize, m: usize) -> Result<()> {
    if n < 4 {
        return Err(Error::Argument(format!("Hopkins needs at least 4 points, got {n}")));
    }
    if m < 2 || 2 * m > n {
        return Err(Error::Argument(format!(
            "Hopkins sample size must satisfy 2 <= m <= N/2, got m={m} N={n}"
        )));
    }
    Ok(())
}

fn hopkins_inner(points: &PointSet, probes: &[usize], rng: &mut impl Rng) -> Result<f64> {
    let dim = points.dim();
    let mut lo = vec![f64::INFINITY; dim];
    let mut hi = vec![f64::NEG_INFINITY; dim];
    for p in points.iter() {
        for d in 0..dim {
            lo[d] = lo[d].min(p[d]);
            hi[d] = hi[d].max(p[d]);
        }
    }

    let mut sum_s = 0.0;
    for &i in probes {
        let x = points.point(i);
        let nn = points
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, p)| sq_dist(x, p))
            .fold(f64::INFINITY, f64::min);
        sum_s += nn.sqrt();
    }

    let mut sum_t = 0.0;
    let mut y = vec![0.0; dim];
    for _ in 0..probes.len() {
        for d in 0..dim {
            y[d] = if hi[d] > lo[d] { rng.random_range(lo[d]..hi[d]) } else { lo[d] };
        }
        let nn = points.iter().map(|p| sq_dist(&y, p)).fold(f64::INFINITY, f64::min);
        sum_t += nn.sqrt();
    }

    let denom = sum_s + sum_t;
    if denom <= 0.0 {
        return Err(Error::DegenerateGeometry(
            "all Hopkins distances are zero (points coincide)".into(),
        ));
    }
    Ok(sum_t / denom)
}
