//! Clustering tendency (Hopkins) of first- and last-block embeddings.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sampling::{draw_repetition, p_sample, SampleSizes, SamplingPlan};
use super::stats::{mean, welch_t_test};
use super::{check_group_sizes, positions_in, BlockPair, Cohorts};
use crate::cluster::{hopkins_with_probes, PointSet};
use crate::error::Result;
use crate::logmodel::InteractionKind;
use crate::seed::derive_seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TendencyRow {
    /// `following`, `ignoring` or `all`.
    pub group: String,
    pub first: f64,
    pub last: f64,
    /// First vs last block, within the group.
    pub p_value: f64,
    /// Number of probe points per repetition.
    pub amount: usize,
    pub first_values: Vec<f64>,
    pub last_values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TendencySection {
    pub kind: InteractionKind,
    pub probe_fraction: f64,
    pub sizes: Cohorts<SampleSizes>,
    pub rows: Vec<TendencyRow>,
    /// Following vs ignoring on first blocks.
    pub between_first_p: f64,
    /// Following vs ignoring on last blocks.
    pub between_last_p: f64,
}

struct RepValues {
    // following, ignoring, all; each (first, last)
    values: [(f64, f64); 3],
    amounts: [usize; 3],
    sizes: [SampleSizes; 2],
}

/// Hopkins statistic per cohort and for the pooled population. In every
/// repetition the resized cohort is the data set and its p-sample (at the
/// Hopkins fraction) supplies the probe points.
pub fn run_tendency(kind: InteractionKind, data: &Cohorts<BlockPair>, plan: &SamplingPlan) -> Result<TendencySection> {
    plan.validate()?;
    let (nf, ni) = (data.following.len(), data.ignoring.len());
    check_group_sizes(nf, ni, 4, "Hopkins")?;
    let metric = format!("hopkins/{kind}");
    let f = plan.p_fraction_hopkins;

    let reps = (0..plan.repetitions)
        .into_par_iter()
        .map(|r| -> Result<RepValues> {
            let draw = draw_repetition(nf, ni, f, plan.master_seed, &metric, r)?;
            let ref_seed = |who: &str, block: &str| derive_seed(plan.master_seed, &format!("{metric}/ref/{who}/{block}"), r as u64);
            let one = |pair: &BlockPair, resized: &[usize], probes: &[usize], who: &str| -> Result<(f64, f64)> {
                let probes = positions_in(resized, probes);
                let first = hopkins_with_probes(&pair.first.subset(resized), &probes, ref_seed(who, "first"))?;
                let last = hopkins_with_probes(&pair.last.subset(resized), &probes, ref_seed(who, "last"))?;
                Ok((first, last))
            };
            let fol = one(&data.following, &draw.following_resized, &draw.following, "group")?;
            let ign = one(&data.ignoring, &draw.ignoring_resized, &draw.ignoring, "group")?;

            let pooled_first = concat(&data.following.first.subset(&draw.following_resized), &data.ignoring.first.subset(&draw.ignoring_resized))?;
            let pooled_last = concat(&data.following.last.subset(&draw.following_resized), &data.ignoring.last.subset(&draw.ignoring_resized))?;
            let everyone: Vec<usize> = (0..pooled_first.len()).collect();
            let probes = p_sample(&everyone, f, derive_seed(plan.master_seed, &format!("{metric}/p/all"), r as u64))?;
            let all = (
                hopkins_with_probes(&pooled_first, &probes, ref_seed("all", "first"))?,
                hopkins_with_probes(&pooled_last, &probes, ref_seed("all", "last"))?,
            );
            Ok(RepValues {
                values: [fol, ign, all],
                amounts: [draw.following.len(), draw.ignoring.len(), probes.len()],
                sizes: draw.sizes(nf, ni),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let column = |g: usize, last: bool| -> Vec<f64> {
        reps.iter().map(|v| if last { v.values[g].1 } else { v.values[g].0 }).collect()
    };
    let mut rows = Vec::with_capacity(3);
    for (g, name) in ["following", "ignoring", "all"].into_iter().enumerate() {
        let (first_values, last_values) = (column(g, false), column(g, true));
        rows.push(TendencyRow {
            group: name.to_owned(),
            first: mean(&first_values),
            last: mean(&last_values),
            p_value: welch_t_test(&first_values, &last_values)?.p_value,
            amount: reps[0].amounts[g],
            first_values,
            last_values,
        });
    }
    Ok(TendencySection {
        kind,
        probe_fraction: f,
        sizes: Cohorts {
            following: reps[0].sizes[0],
            ignoring: reps[0].sizes[1],
        },
        between_first_p: welch_t_test(&rows[0].first_values, &rows[1].first_values)?.p_value,
        between_last_p: welch_t_test(&rows[0].last_values, &rows[1].last_values)?.p_value,
        rows,
    })
}

fn concat(a: &PointSet, b: &PointSet) -> Result<PointSet> {
    let ids = a.ids().iter().chain(b.ids()).cloned().collect();
    let rows: Vec<&[f64]> = a.iter().chain(b.iter()).collect();
    PointSet::from_identified_rows(ids, &rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::rng_from;
    use rand::Rng;

    fn pair(rows_first: Vec<Vec<f64>>, rows_last: Vec<Vec<f64>>, prefix: &str) -> BlockPair {
        let ids: Vec<String> = (0..rows_first.len()).map(|i| format!("{prefix}{i}")).collect();
        BlockPair::new(
            PointSet::from_identified_rows(ids.clone(), &rows_first).unwrap(),
            PointSet::from_identified_rows(ids, &rows_last).unwrap(),
        )
        .unwrap()
    }

    fn uniform_rows(n: usize, rng: &mut impl Rng) -> Vec<Vec<f64>> {
        (0..n).map(|_| (0..3).map(|_| rng.random::<f64>()).collect()).collect()
    }

    fn clustered_rows(n: usize, rng: &mut impl Rng) -> Vec<Vec<f64>> {
        let centers = [[0.1, 0.1, 0.1], [0.9, 0.9, 0.1], [0.1, 0.9, 0.9], [0.9, 0.1, 0.9]];
        (0..n)
            .map(|i| centers[i % 4].iter().map(|c| c + 0.01 * (rng.random::<f64>() - 0.5)).collect())
            .collect()
    }

    #[test]
    fn clustered_to_uniform_lowers_h() {
        let mut rng = rng_from(1);
        let f = pair(clustered_rows(120, &mut rng), uniform_rows(120, &mut rng), "f");
        let i = pair(clustered_rows(80, &mut rng), uniform_rows(80, &mut rng), "i");
        let plan = SamplingPlan { repetitions: 10, master_seed: 3, ..Default::default() };
        let s = run_tendency(InteractionKind::Click, &Cohorts { following: f, ignoring: i }, &plan).unwrap();
        for row in &s.rows {
            assert!(row.first > row.last + 0.2, "{row:?}");
            assert_eq!(row.first_values.len(), 10);
        }
        assert_eq!(s.sizes.following.resized, 80);
        assert_eq!(s.sizes.ignoring.resized, 80);
        assert_eq!(s.rows[0].amount, 8);
        assert_eq!(s.rows[2].amount, 16);
    }

    #[test]
    fn identical_groups_are_indistinguishable() {
        let mut rng = rng_from(2);
        let rows = uniform_rows(60, &mut rng);
        let last = uniform_rows(60, &mut rng);
        let f = pair(rows.clone(), last.clone(), "f");
        let i = pair(rows, last, "i");
        let plan = SamplingPlan { repetitions: 5, ..Default::default() };
        let s = run_tendency(InteractionKind::Click, &Cohorts { following: f, ignoring: i }, &plan).unwrap();
        assert_eq!(s.between_first_p, 1.0);
        assert_eq!(s.between_last_p, 1.0);
    }
}
