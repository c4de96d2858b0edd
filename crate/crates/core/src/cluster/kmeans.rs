//! Lloyd's k-means with k-means++ seeding.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::points::{sq_dist, PointSet};
use crate::error::{Error, Result};
use crate::seed::rng_from;

/// Assignment of N points to K non-empty clusters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    pub k: usize,
    pub labels: Vec<usize>,
    pub centroids: Vec<Vec<f64>>,
    pub sizes: Vec<usize>,
}

impl Partition {
    /// Builds a partition from labels in `[0, k)`, every cluster non-empty.
    pub fn from_labels(points: &PointSet, labels: Vec<usize>, k: usize) -> Result<Self> {
        if labels.len() != points.len() {
            return Err(Error::Alignment(format!(
                "{} labels for {} points",
                labels.len(),
                points.len()
            )));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= k) {
            return Err(Error::Argument(format!("label {bad} outside [0, {k})")));
        }
        let (centroids, sizes) = centroids_of(points, &labels, k);
        if let Some(empty) = sizes.iter().position(|&s| s == 0) {
            return Err(Error::Argument(format!("cluster {empty} is empty")));
        }
        Ok(Self {
            k,
            labels,
            centroids,
            sizes,
        })
    }

    /// Total within-cluster sum of squared distances.
    pub fn within_ss(&self, points: &PointSet) -> f64 {
        points
            .iter()
            .zip(&self.labels)
            .map(|(p, &l)| sq_dist(p, &self.centroids[l]))
            .sum()
    }
}

pub(crate) fn centroids_of(points: &PointSet, labels: &[usize], k: usize) -> (Vec<Vec<f64>>, Vec<usize>) {
    let mut sums = vec![vec![0.0; points.dim()]; k];
    let mut sizes = vec![0usize; k];
    for (p, &l) in points.iter().zip(labels) {
        sizes[l] += 1;
        for (s, x) in sums[l].iter_mut().zip(p) {
            *s += x;
        }
    }
    for (s, &n) in sums.iter_mut().zip(&sizes) {
        if n > 0 {
            let n = n as f64;
            s.iter_mut().for_each(|v| *v /= n);
        }
    }
    (sums, sizes)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KMeansParams {
    pub max_iter: usize,
    /// Stop once no centroid moves farther than this.
    pub tol: f64,
}

impl Default for KMeansParams {
    fn default() -> Self {
        Self {
            max_iter: 300,
            tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone)]
pub struct KMeansRun {
    pub partition: Partition,
    pub iterations: usize,
    pub converged: bool,
    /// Within-cluster SS after each centroid update.
    pub sse_history: Vec<f64>,
}

pub fn kmeans(points: &PointSet, k: usize, seed: u64) -> Result<Partition> {
    Ok(kmeans_with(points, k, seed, &KMeansParams::default())?.partition)
}

pub fn kmeans_with(points: &PointSet, k: usize, seed: u64, params: &KMeansParams) -> Result<KMeansRun> {
    let n = points.len();
    if k == 0 {
        return Err(Error::Argument("k must be at least 1".into()));
    }
    if k > n {
        return Err(Error::Argument(format!("k = {k} exceeds the {n} points")));
    }
    let mut rng = rng_from(seed);
    let mut centroids = plus_plus_seeds(points, k, &mut rng);
    let mut labels = vec![0usize; n];
    let mut sse_history = Vec::new();
    let mut iterations = 0;
    let mut converged = false;

    while iterations < params.max_iter {
        iterations += 1;
        let mut sizes = vec![0usize; k];
        for (i, p) in points.iter().enumerate() {
            labels[i] = nearest(p, &centroids).0;
            sizes[labels[i]] += 1;
        }
        repair_empty(points, &mut labels, &mut sizes, &centroids);

        let (next, _) = centroids_of(points, &labels, k);
        let shift = centroids
            .iter()
            .zip(&next)
            .map(|(a, b)| sq_dist(a, b))
            .fold(0.0, f64::max)
            .sqrt();
        centroids = next;
        sse_history.push(
            points
                .iter()
                .zip(&labels)
                .map(|(p, &l)| sq_dist(p, &centroids[l]))
                .sum(),
        );
        if shift < params.tol {
            converged = true;
            break;
        }
    }

    let partition = Partition::from_labels(points, labels, k)?;
    Ok(KMeansRun {
        partition,
        iterations,
        converged,
        sse_history,
    })
}

/// Nearest centroid, lowest index on ties.
fn nearest(p: &[f64], centroids: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, centroid) in centroids.iter().enumerate() {
        let d = sq_dist(p, centroid);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

fn plus_plus_seeds(points: &PointSet, k: usize, rng: &mut impl Rng) -> Vec<Vec<f64>> {
    let n = points.len();
    let mut chosen = vec![false; n];
    let first = rng.random_range(0..n);
    chosen[first] = true;
    let mut centroids = vec![points.point(first).to_vec()];
    let mut weight: Vec<f64> = points.iter().map(|p| sq_dist(p, &centroids[0])).collect();

    while centroids.len() < k {
        let total: f64 = weight.iter().sum();
        let pick = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut pick = None;
            for (i, &w) in weight.iter().enumerate() {
                if w > 0.0 {
                    pick = Some(i);
                    if target < w {
                        break;
                    }
                    target -= w;
                }
            }
            pick.expect("positive total weight")
        } else {
            // every remaining point coincides with a centroid
            let free: Vec<usize> = (0..n).filter(|&i| !chosen[i]).collect();
            free[rng.random_range(0..free.len())]
        };
        chosen[pick] = true;
        let c = points.point(pick).to_vec();
        for (w, p) in weight.iter_mut().zip(points.iter()) {
            *w = w.min(sq_dist(p, &c));
        }
        centroids.push(c);
    }
    centroids
}

/// Gives each empty cluster the point farthest from its current centroid.
fn repair_empty(points: &PointSet, labels: &mut [usize], sizes: &mut [usize], centroids: &[Vec<f64>]) {
    while let Some(empty) = sizes.iter().position(|&s| s == 0) {
        let mut far = None;
        let mut far_d = f64::NEG_INFINITY;
        for (i, p) in points.iter().enumerate() {
            if sizes[labels[i]] < 2 {
                continue;
            }
            let d = sq_dist(p, &centroids[labels[i]]);
            if d > far_d {
                far_d = d;
                far = Some(i);
            }
        }
        let Some(i) = far else { return };
        sizes[labels[i]] -= 1;
        labels[i] = empty;
        sizes[empty] += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand_distr::{Distribution, Normal};

    fn blobs(centers: &[[f64; 2]], per: usize, sigma: f64, seed: u64) -> (PointSet, Vec<usize>) {
        let mut rng = rng_from(seed);
        let noise = Normal::new(0.0, sigma).unwrap();
        let mut rows = Vec::new();
        let mut truth = Vec::new();
        for (c, center) in centers.iter().enumerate() {
            for _ in 0..per {
                rows.push([center[0] + noise.sample(&mut rng), center[1] + noise.sample(&mut rng)]);
                truth.push(c);
            }
        }
        (PointSet::from_rows(&rows).unwrap(), truth)
    }

    #[test]
    fn single_cluster_is_the_mean() {
        let (p, _) = blobs(&[[1.0, 2.0], [5.0, -1.0]], 30, 1.0, 1);
        let part = kmeans(&p, 1, 0).unwrap();
        assert_eq!(part.sizes, vec![60]);
        let mean = p.mean();
        for (c, m) in part.centroids[0].iter().zip(mean.iter()) {
            assert!((c - m).abs() < 1e-12);
        }
    }

    #[test]
    fn one_cluster_per_point() {
        let (p, _) = blobs(&[[0.0, 0.0]], 25, 3.0, 2);
        let part = kmeans(&p, 25, 9).unwrap();
        assert!(part.sizes.iter().all(|&s| s == 1));
        assert_eq!(part.within_ss(&p), 0.0);
    }

    #[test]
    fn invalid_k() {
        let (p, _) = blobs(&[[0.0, 0.0]], 5, 1.0, 2);
        assert!(matches!(kmeans(&p, 0, 0), Err(Error::Argument(_))));
        assert!(matches!(kmeans(&p, 6, 0), Err(Error::Argument(_))));
    }

    #[test]
    fn duplicate_points_still_fill_every_cluster() {
        let p = PointSet::from_rows(&[[1.0], [1.0], [1.0], [2.0]]).unwrap();
        let part = kmeans(&p, 3, 4).unwrap();
        assert!(part.sizes.iter().all(|&s| s >= 1));
        assert_eq!(part.sizes.iter().sum::<usize>(), 4);
    }

    #[test]
    fn two_blobs_recovered() {
        let mut exact = 0;
        for seed in 0..50u64 {
            let (p, truth) = blobs(&[[0.0, 0.0], [10.0, 10.0]], 100, 0.5, 1000 + seed);
            let part = kmeans(&p, 2, seed).unwrap();
            let same = part.labels.iter().zip(&truth).all(|(&a, &b)| a == b);
            let flipped = part.labels.iter().zip(&truth).all(|(&a, &b)| a != b);
            exact += usize::from(same || flipped);
        }
        assert!(exact >= 49, "{exact}/50");
    }

    #[test]
    fn deterministic_per_seed() {
        let (p, _) = blobs(&[[0.0, 0.0], [3.0, 3.0], [6.0, 0.0]], 40, 1.5, 7);
        assert_eq!(kmeans(&p, 4, 11).unwrap(), kmeans(&p, 4, 11).unwrap());
    }

    proptest! {
        #[test]
        fn lloyd_descent_is_monotone(seed in 0u64..500, k in 1usize..8) {
            let (p, _) = blobs(&[[0.0, 0.0], [4.0, 1.0], [2.0, 5.0]], 20, 1.2, seed);
            let run = kmeans_with(&p, k, seed, &KMeansParams::default()).unwrap();
            for w in run.sse_history.windows(2) {
                prop_assert!(w[1] <= w[0] * (1.0 + 1e-12) + 1e-12, "{:?}", run.sse_history);
            }
            let part = &run.partition;
            prop_assert_eq!(part.sizes.iter().sum::<usize>(), p.len());
            prop_assert!(part.sizes.iter().all(|&s| s >= 1));
            let (means, _) = centroids_of(&p, &part.labels, k);
            for (a, b) in means.iter().zip(&part.centroids) {
                for (x, y) in a.iter().zip(b) {
                    prop_assert!((x - y).abs() <= 1e-9 * x.abs().max(1.0));
                }
            }
        }
    }
}
