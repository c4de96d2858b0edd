//! Internal (Calinski-Harabasz) and external (adjusted Rand) validity indexes.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::kmeans::centroids_of;
use super::points::{sq_dist, PointSet};
use crate::error::{Error, Result};

/// How between-cluster scatter weights each centroid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChWeighting {
    /// SSB = Σ_i ||c_i − X̄||²
    #[default]
    Unweighted,
    /// SSB = Σ_i n_i·||c_i − X̄||², the textbook form.
    SizeWeighted,
}

pub fn calinski_harabasz(points: &PointSet, labels: &[usize]) -> Result<f64> {
    calinski_harabasz_with(points, labels, ChWeighting::Unweighted)
}

/// CH = (SSB / SSW) · (N − K) / (K − 1). Centroids are recomputed from
/// `labels`, so a partition found on one embedding can be scored on another.
pub fn calinski_harabasz_with(points: &PointSet, labels: &[usize], weighting: ChWeighting) -> Result<f64> {
    let n = points.len();
    if labels.len() != n {
        return Err(Error::Alignment(format!("{} labels for {n} points", labels.len())));
    }
    let k_slots = labels.iter().max().map_or(0, |&m| m + 1);
    let (centroids, sizes) = centroids_of(points, labels, k_slots);
    let k = sizes.iter().filter(|&&s| s > 0).count();
    if k < 2 {
        return Err(Error::Argument(format!("CH needs at least 2 non-empty clusters, got {k}")));
    }
    if n <= k {
        return Err(Error::Argument(format!("CH needs N > K, got N={n} K={k}")));
    }
    let mean = points.mean();
    let ssb: f64 = centroids
        .iter()
        .zip(&sizes)
        .filter(|(_, &s)| s > 0)
        .map(|(c, &s)| {
            let w = match weighting {
                ChWeighting::Unweighted => 1.0,
                ChWeighting::SizeWeighted => s as f64,
            };
            w * sq_dist(c, &mean)
        })
        .sum();
    let ssw: f64 = points
        .iter()
        .zip(labels)
        .map(|(p, &l)| sq_dist(p, &centroids[l]))
        .sum();
    if ssw <= 0.0 {
        return Err(Error::DegenerateGeometry("within-cluster scatter is zero".into()));
    }
    Ok(ssb / ssw * (n - k) as f64 / (k - 1) as f64)
}

/// Overlap counts between two labelings of the same N items.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContingencyTable {
    /// `counts[i][j]` = |P_i ∩ Q_j|
    pub counts: Vec<Vec<u64>>,
    pub row_sums: Vec<u64>,
    pub col_sums: Vec<u64>,
    pub total: u64,
}

impl ContingencyTable {
    pub fn rows(&self) -> usize {
        self.row_sums.len()
    }

    pub fn cols(&self) -> usize {
        self.col_sums.len()
    }
}

/// Builds the table for two label vectors that are already aligned item by
/// item. Row/column counts are `max label + 1`.
pub fn contingency_table(p: &[usize], q: &[usize]) -> Result<ContingencyTable> {
    if p.len() != q.len() {
        return Err(Error::Alignment(format!(
            "partitions cover {} and {} items",
            p.len(),
            q.len()
        )));
    }
    let k1 = p.iter().max().map_or(0, |&m| m + 1);
    let k2 = q.iter().max().map_or(0, |&m| m + 1);
    let mut counts = vec![vec![0u64; k2]; k1];
    let mut row_sums = vec![0u64; k1];
    let mut col_sums = vec![0u64; k2];
    for (&a, &b) in p.iter().zip(q) {
        counts[a][b] += 1;
        row_sums[a] += 1;
        col_sums[b] += 1;
    }
    Ok(ContingencyTable {
        counts,
        row_sums,
        col_sums,
        total: p.len() as u64,
    })
}

/// Reorders `q_labels` so that position i refers to the item `p_ids[i]`.
/// Both id lists must name the same set of items.
pub fn align_by_id(p_ids: &[String], q_ids: &[String], q_labels: &[usize]) -> Result<Vec<usize>> {
    if q_ids.len() != q_labels.len() {
        return Err(Error::Alignment(format!(
            "{} ids but {} labels",
            q_ids.len(),
            q_labels.len()
        )));
    }
    if p_ids.len() != q_ids.len() {
        return Err(Error::Alignment(format!(
            "partitions cover {} and {} items",
            p_ids.len(),
            q_ids.len()
        )));
    }
    let lookup: HashMap<&str, usize> = q_ids.iter().zip(q_labels).map(|(id, &l)| (id.as_str(), l)).collect();
    p_ids
        .iter()
        .map(|id| {
            lookup
                .get(id.as_str())
                .copied()
                .ok_or_else(|| Error::Alignment(format!("id `{id}` missing from the second partition")))
        })
        .collect()
}

fn pairs(n: u64) -> f64 {
    (n * n.saturating_sub(1) / 2) as f64
}

/// Adjusted Rand index of two aligned labelings.
pub fn adjusted_rand_index(p: &[usize], q: &[usize]) -> Result<f64> {
    let table = contingency_table(p, q)?;
    if table.total < 2 {
        return Err(Error::Argument("ARI needs at least 2 items".into()));
    }
    ari_from_table(&table)
}

pub fn ari_from_table(table: &ContingencyTable) -> Result<f64> {
    let index: f64 = table.counts.iter().flatten().map(|&c| pairs(c)).sum();
    let a: f64 = table.row_sums.iter().map(|&c| pairs(c)).sum();
    let b: f64 = table.col_sums.iter().map(|&c| pairs(c)).sum();
    let expected = a * b / pairs(table.total);
    let max = (a + b) / 2.0;
    let denom = max - expected;
    if denom == 0.0 {
        // only reachable when both sides are all singletons or both one cluster
        if index == a && index == b {
            return Ok(1.0);
        }
        return Err(Error::DegenerateGeometry("ARI denominator is zero".into()));
    }
    Ok((index - expected) / denom)
}
