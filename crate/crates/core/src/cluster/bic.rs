//! Bayesian information criterion for partitions, and cluster-count selection.
//!
//! Two scores are available, both "higher is better":
//!
//! * `Literal` evaluates, with pooled variance Σ = SSE / (N − K),
//!
//!   ```text
//!   Σ_i n_i·( ln(n_i/N) − n_i·D·ln(2πΣ)/2 − D·(n_i − 1)/2 ) − K·(D + 1)·ln(N)/2
//!   ```
//!
//!   term for term. `LiteralUnsquared` is the same expression with Σ built from
//!   unsquared distances.
//! * `XMeans` is the spherical-Gaussian log-likelihood of the partition with
//!   per-dimension variance σ² = SSE / (D·(N − K)), penalised by the
//!   K·(D + 1) free parameters.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::kmeans::{kmeans, Partition};
use super::points::{dist, sq_dist, PointSet};
use crate::error::{Error, Result};
use crate::seed::derive_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum BicVariant {
    /// Config value `paper`.
    #[serde(rename = "paper", alias = "literal")]
    Literal,
    /// Config value `paper_unsquared`.
    #[serde(rename = "paper_unsquared", alias = "literal_unsquared")]
    LiteralUnsquared,
    /// Config value `xmeans`.
    #[default]
    #[serde(rename = "xmeans", alias = "x_means")]
    XMeans,
}

/// The `K·(D + 1)·ln(N)/2` complexity penalty shared by all variants.
pub fn bic_penalty(k: usize, dim: usize, n: usize) -> f64 {
    (k * (dim + 1)) as f64 * (n as f64).ln() / 2.0
}

pub fn bic(points: &PointSet, partition: &Partition, variant: BicVariant) -> Result<f64> {
    let n = points.len();
    let k = partition.k;
    let d = points.dim();
    if partition.labels.len() != n {
        return Err(Error::Alignment(format!(
            "partition has {} labels for {n} points",
            partition.labels.len()
        )));
    }
    if n <= k {
        return Err(Error::Argument(format!("BIC needs N > K, got N={n} K={k}")));
    }
    let residual = |p: &[f64], l: usize| match variant {
        BicVariant::LiteralUnsquared => dist(p, &partition.centroids[l]),
        _ => sq_dist(p, &partition.centroids[l]),
    };
    let sse: f64 = points
        .iter()
        .zip(&partition.labels)
        .map(|(p, &l)| residual(p, l))
        .sum();
    let (nf, kf, df) = (n as f64, k as f64, d as f64);
    let penalty = bic_penalty(k, d, n);

    match variant {
        BicVariant::Literal | BicVariant::LiteralUnsquared => {
            let sigma = sse / (nf - kf);
            if sigma <= 0.0 {
                return Err(Error::DegenerateGeometry("pooled variance is zero".into()));
            }
            let log_term = (2.0 * std::f64::consts::PI * sigma).ln();
            let fit: f64 = partition
                .sizes
                .iter()
                .map(|&ni| {
                    let ni = ni as f64;
                    ni * ((ni / nf).ln() - ni * df * log_term / 2.0 - df * (ni - 1.0) / 2.0)
                })
                .sum();
            Ok(fit - penalty)
        }
        BicVariant::XMeans => {
            let var = sse / (df * (nf - kf));
            if var <= 0.0 {
                return Err(Error::DegenerateGeometry("pooled variance is zero".into()));
            }
            let mixing: f64 = partition
                .sizes
                .iter()
                .map(|&ni| ni as f64 * (ni as f64 / nf).ln())
                .sum();
            let ll = mixing - nf * df / 2.0 * (2.0 * std::f64::consts::PI * var).ln() - sse / (2.0 * var);
            Ok(ll - penalty)
        }
    }
}

/// How the optimum is read off an averaged BIC curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KSelection {
    #[default]
    GlobalMax,
    /// First local maximum that beats both neighbours by 1% of the curve range.
    FirstDecisiveLocalMax,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KSelectionResult {
    pub k_star: usize,
    /// `(k, mean BIC)` in increasing k.
    pub curve: Vec<(usize, f64)>,
}

/// BIC of a fresh k-means fit for every k in `ks`.
pub fn bic_curve(points: &PointSet, ks: &[usize], seed: u64, variant: BicVariant) -> Result<Vec<f64>> {
    ks.iter()
        .map(|&k| {
            let part = kmeans(points, k, derive_seed(seed, "kmeans", k as u64))?;
            bic(points, &part, variant)
        })
        .collect()
}

/// Averages `reps` BIC curves over `k_range` and picks k*.
pub fn select_k(
    points: &PointSet,
    k_range: std::ops::RangeInclusive<usize>,
    reps: usize,
    seed: u64,
    variant: BicVariant,
    strategy: KSelection,
) -> Result<KSelectionResult> {
    let ks: Vec<usize> = k_range.collect();
    if ks.is_empty() {
        return Err(Error::Argument("empty k range".into()));
    }
    if reps == 0 {
        return Err(Error::Argument("select_k needs at least one repetition".into()));
    }
    if let Some(&k) = ks.iter().find(|&&k| k == 0 || k >= points.len()) {
        return Err(Error::Argument(format!("k = {k} outside [1, N)")));
    }
    let curves = (0..reps)
        .into_par_iter()
        .map(|r| bic_curve(points, &ks, derive_seed(seed, "select_k", r as u64), variant))
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize_curves(&ks, &curves, strategy))
}

/// Mean of per-repetition curves and the chosen k.
pub fn summarize_curves(ks: &[usize], curves: &[Vec<f64>], strategy: KSelection) -> KSelectionResult {
    let reps = curves.len() as f64;
    let mean: Vec<f64> = (0..ks.len())
        .map(|i| curves.iter().map(|c| c[i]).sum::<f64>() / reps)
        .collect();
    let idx = pick_peak(&mean, strategy);
    KSelectionResult {
        k_star: ks[idx],
        curve: ks.iter().copied().zip(mean).collect(),
    }
}

/// Index of the chosen optimum of `curve`. Ties go to the smaller index.
pub fn pick_peak(curve: &[f64], strategy: KSelection) -> usize {
    let global = curve
        .iter()
        .enumerate()
        .fold(0, |best, (i, &v)| if v > curve[best] { i } else { best });
    match strategy {
        KSelection::GlobalMax => global,
        KSelection::FirstDecisiveLocalMax => {
            let lo = curve.iter().copied().fold(f64::INFINITY, f64::min);
            let margin = 0.01 * (curve[global] - lo);
            (0..curve.len())
                .find(|&i| {
                    let left = i == 0 || curve[i] - curve[i - 1] > margin;
                    let right = i + 1 == curve.len() || curve[i] - curve[i + 1] > margin;
                    left && right && (i > 0 || i + 1 < curve.len())
                })
                .unwrap_or(global)
        }
    }
}
