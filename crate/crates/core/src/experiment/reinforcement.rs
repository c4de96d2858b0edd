//! Cluster-count selection and the two reinforcement measurements: the drop
//! in Calinski-Harabasz score under fixed first-block labels, and the ARI
//! between first- and last-block partitions.

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sampling::{draw_repetition, SampleSizes, SamplingPlan};
use super::stats::mean;
use super::{check_group_sizes, BlockPair, Cohorts, Comparison};
use crate::cluster::{
    adjusted_rand_index, align_by_id, calinski_harabasz_with, kmeans, select_k, BicVariant, ChWeighting, KSelection,
    KSelectionResult,
};
use crate::error::{Error, Result};
use crate::logmodel::InteractionKind;
use crate::seed::derive_seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionSection {
    pub kind: InteractionKind,
    pub variant: BicVariant,
    pub strategy: KSelection,
    pub k_min: usize,
    pub k_max: usize,
    pub following: KSelectionResult,
    pub ignoring: KSelectionResult,
}

/// Picks K* per cohort from the averaged BIC curve of first-block embeddings.
/// `k_max` is clipped to N − 1 of the smaller cohort.
#[allow(clippy::too_many_arguments)]
pub fn run_selection(
    kind: InteractionKind,
    data: &Cohorts<BlockPair>,
    k_min: usize,
    k_max: usize,
    reps: usize,
    seed: u64,
    variant: BicVariant,
    strategy: KSelection,
) -> Result<SelectionSection> {
    let n = data.following.len().min(data.ignoring.len());
    let k_min = k_min.max(2);
    let k_max = k_max.min(n.saturating_sub(1));
    if k_min > k_max {
        return Err(Error::Argument(format!(
            "no admissible cluster count: k range [{k_min}, {k_max}] with {n} users"
        )));
    }
    // both cohorts share the k-means seeds, as the sampling draws do
    let selected = data.try_map(|_, pair| {
        select_k(
            &pair.first,
            k_min..=k_max,
            reps,
            derive_seed(seed, &format!("select_k/{kind}"), 0),
            variant,
            strategy,
        )
    })?;
    Ok(SelectionSection {
        kind,
        variant,
        strategy,
        k_min,
        k_max,
        following: selected.following,
        ignoring: selected.ignoring,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OffsetRow {
    pub k_offset: i64,
    pub k_following: usize,
    pub k_ignoring: usize,
    #[serde(flatten)]
    pub comparison: Comparison,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricTable {
    pub rows: Vec<OffsetRow>,
    /// Per repetition, the mean over all offsets; compared like a row.
    pub ave: Comparison,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReinforcementSection {
    pub kind: InteractionKind,
    pub k_star: Cohorts<usize>,
    pub k_window: usize,
    /// Offsets dropped because a cohort's k fell outside [2, n − 1].
    pub clipped_offsets: Vec<i64>,
    pub sizes: Cohorts<SampleSizes>,
    pub ch_drop: MetricTable,
    pub ari: MetricTable,
}

struct RepValues {
    // [offset][following, ignoring]
    ch_drop: Vec<[f64; 2]>,
    ari: Vec<[f64; 2]>,
    sizes: [SampleSizes; 2],
}

/// For each offset in [−window, window] around each cohort's K*, and each
/// repetition: k-means on the sampled first blocks, CH(first) − CH(last)
/// under those labels, and ARI between k-means partitions of first and last
/// blocks.
pub fn run_reinforcement(
    kind: InteractionKind,
    data: &Cohorts<BlockPair>,
    k_star: Cohorts<usize>,
    k_window: usize,
    weighting: ChWeighting,
    plan: &SamplingPlan,
) -> Result<ReinforcementSection> {
    plan.validate()?;
    let (nf, ni) = (data.following.len(), data.ignoring.len());
    check_group_sizes(nf, ni, 4, "reinforcement")?;
    let sample_n = super::p_size(nf.min(ni), plan.p_fraction_default);
    let k_hi = sample_n.saturating_sub(1);

    let mut offsets = Vec::new();
    let mut clipped_offsets = Vec::new();
    let w = k_window as i64;
    for off in -w..=w {
        let kf = k_star.following as i64 + off;
        let ki = k_star.ignoring as i64 + off;
        if [kf, ki].iter().all(|&k| k >= 2 && k <= k_hi as i64) {
            offsets.push((off, kf as usize, ki as usize));
        } else {
            clipped_offsets.push(off);
        }
    }
    if !clipped_offsets.is_empty() {
        warn!("{kind}: k window clipped to [2, {k_hi}], dropping offsets {clipped_offsets:?}");
    }
    if offsets.is_empty() {
        return Err(Error::Argument(format!(
            "{kind}: no k in the window around K* = {}/{} lies in [2, {k_hi}]",
            k_star.following, k_star.ignoring
        )));
    }

    let master = plan.master_seed;
    let reps = (0..plan.repetitions)
        .into_par_iter()
        .map(|r| -> Result<RepValues> {
            let ch_draw = draw_repetition(nf, ni, plan.p_fraction_default, master, &format!("ch_drop/{kind}"), r)?;
            let ari_draw = draw_repetition(nf, ni, plan.p_fraction_default, master, &format!("ari/{kind}"), r)?;
            let ch_samples = [
                (data.following.first.subset(&ch_draw.following), data.following.last.subset(&ch_draw.following)),
                (data.ignoring.first.subset(&ch_draw.ignoring), data.ignoring.last.subset(&ch_draw.ignoring)),
            ];
            let ari_samples = [
                (data.following.first.subset(&ari_draw.following), data.following.last.subset(&ari_draw.following)),
                (data.ignoring.first.subset(&ari_draw.ignoring), data.ignoring.last.subset(&ari_draw.ignoring)),
            ];
            let mut ch_drop = Vec::with_capacity(offsets.len());
            let mut ari = Vec::with_capacity(offsets.len());
            for &(_, kf, ki) in &offsets {
                let mut ch_row = [0.0; 2];
                let mut ari_row = [0.0; 2];
                for (g, k) in [kf, ki].into_iter().enumerate() {
                    let ch_seed = derive_seed(derive_seed(master, &format!("ch_drop/{kind}/kmeans"), r as u64), "k", k as u64);
                    let (first, last) = &ch_samples[g];
                    let labels = kmeans(first, k, ch_seed)?.labels;
                    ch_row[g] = calinski_harabasz_with(first, &labels, weighting)?
                        - calinski_harabasz_with(last, &labels, weighting)?;

                    // same seed for both blocks: unchanged embeddings give ARI 1
                    let ari_seed = derive_seed(derive_seed(master, &format!("ari/{kind}/kmeans"), r as u64), "k", k as u64);
                    let (first, last) = &ari_samples[g];
                    let p = kmeans(first, k, ari_seed)?.labels;
                    let q = align_by_id(first.ids(), last.ids(), &kmeans(last, k, ari_seed)?.labels)?;
                    ari_row[g] = adjusted_rand_index(&p, &q)?;
                }
                ch_drop.push(ch_row);
                ari.push(ari_row);
            }
            Ok(RepValues {
                ch_drop,
                ari,
                sizes: ch_draw.sizes(nf, ni),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let table = |pick: fn(&RepValues) -> &Vec<[f64; 2]>| -> Result<MetricTable> {
        let mut rows = Vec::with_capacity(offsets.len());
        for (o, &(k_offset, k_following, k_ignoring)) in offsets.iter().enumerate() {
            let f = reps.iter().map(|v| pick(v)[o][0]).collect();
            let i = reps.iter().map(|v| pick(v)[o][1]).collect();
            rows.push(OffsetRow {
                k_offset,
                k_following,
                k_ignoring,
                comparison: Comparison::new(f, i)?,
            });
        }
        let across = |g: usize| -> Vec<f64> {
            reps.iter()
                .map(|v| mean(&pick(v).iter().map(|row| row[g]).collect::<Vec<_>>()))
                .collect()
        };
        Ok(MetricTable {
            rows,
            ave: Comparison::new(across(0), across(1))?,
        })
    };
    Ok(ReinforcementSection {
        kind,
        k_star,
        k_window,
        clipped_offsets,
        sizes: Cohorts {
            following: reps[0].sizes[0],
            ignoring: reps[0].sizes[1],
        },
        ch_drop: table(|v| &v.ch_drop)?,
        ari: table(|v| &v.ari)?,
    })
}
