//! Content diversity of each user's first and last browse blocks.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sampling::{draw_repetition, SampleSizes, SamplingPlan};
use super::stats::{mean, welch_t_test};
use super::{check_group_sizes, Cohorts};
use crate::blocks::InteractionBlock;
use crate::cluster::mean_pairwise_distance;
use crate::embed::{EmbeddingTable, MissingPolicy};
use crate::error::{Error, Result};

/// Per-user diversity of the first and last block, aligned by position.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserDiversity {
    pub users: Vec<String>,
    pub first: Vec<f64>,
    pub last: Vec<f64>,
}

impl UserDiversity {
    /// Mean pairwise item distance of each user's first and last block.
    pub fn from_blocks<'a>(
        blocks: impl IntoIterator<Item = (&'a InteractionBlock, &'a InteractionBlock)>,
        table: &EmbeddingTable,
        policy: MissingPolicy,
    ) -> Result<Self> {
        let pairs: Vec<_> = blocks.into_iter().collect();
        let values = pairs
            .par_iter()
            .map(|(first, last)| Ok((block_diversity(first, table, policy)?, block_diversity(last, table, policy)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            users: pairs.iter().map(|(f, _)| f.user_id.clone()).collect(),
            first: values.iter().map(|v| v.0).collect(),
            last: values.iter().map(|v| v.1).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.users.len()
    }

    pub fn is_empty(&self) -> bool {
        self.users.is_empty()
    }
}

fn block_diversity(block: &InteractionBlock, table: &EmbeddingTable, policy: MissingPolicy) -> Result<f64> {
    let mut vectors = Vec::with_capacity(block.item_ids.len());
    for id in &block.item_ids {
        match table.get(id) {
            Some(v) => vectors.push(v),
            None if policy == MissingPolicy::Skip => {}
            None => return Err(Error::UnknownItem(id.clone())),
        }
    }
    mean_pairwise_distance(&vectors)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiversityRow {
    pub group: String,
    pub first: f64,
    pub last: f64,
    /// First vs last block, within the group.
    pub p_value: f64,
    pub first_values: Vec<f64>,
    pub last_values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiversitySection {
    pub sizes: Cohorts<SampleSizes>,
    pub rows: Vec<DiversityRow>,
    pub between_first_p: f64,
    pub between_last_p: f64,
    /// Following vs ignoring on the first-minus-last change.
    pub between_change_p: f64,
}

/// Group diversity per repetition is the mean over the sampled users.
pub fn run_diversity(data: &Cohorts<UserDiversity>, plan: &SamplingPlan) -> Result<DiversitySection> {
    plan.validate()?;
    let (nf, ni) = (data.following.len(), data.ignoring.len());
    check_group_sizes(nf, ni, 2, "diversity")?;
    let reps = (0..plan.repetitions)
        .into_par_iter()
        .map(|r| -> Result<_> {
            let draw = draw_repetition(nf, ni, plan.p_fraction_default, plan.master_seed, "diversity/browse", r)?;
            let avg = |d: &UserDiversity, idx: &[usize]| {
                let first = idx.iter().map(|&i| d.first[i]).sum::<f64>() / idx.len() as f64;
                let last = idx.iter().map(|&i| d.last[i]).sum::<f64>() / idx.len() as f64;
                (first, last)
            };
            Ok((avg(&data.following, &draw.following), avg(&data.ignoring, &draw.ignoring), draw.sizes(nf, ni)))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::with_capacity(2);
    for (g, name) in ["following", "ignoring"].into_iter().enumerate() {
        let pick = |r: &((f64, f64), (f64, f64), [SampleSizes; 2])| if g == 0 { r.0 } else { r.1 };
        let first_values: Vec<f64> = reps.iter().map(|r| pick(r).0).collect();
        let last_values: Vec<f64> = reps.iter().map(|r| pick(r).1).collect();
        rows.push(DiversityRow {
            group: name.to_owned(),
            first: mean(&first_values),
            last: mean(&last_values),
            p_value: welch_t_test(&first_values, &last_values)?.p_value,
            first_values,
            last_values,
        });
    }
    let change = |row: &DiversityRow| -> Vec<f64> {
        row.first_values.iter().zip(&row.last_values).map(|(a, b)| a - b).collect()
    };
    Ok(DiversitySection {
        sizes: Cohorts {
            following: reps[0].2[0],
            ignoring: reps[0].2[1],
        },
        between_first_p: welch_t_test(&rows[0].first_values, &rows[1].first_values)?.p_value,
        between_last_p: welch_t_test(&rows[0].last_values, &rows[1].last_values)?.p_value,
        between_change_p: welch_t_test(&change(&rows[0]), &change(&rows[1]))?.p_value,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logmodel::InteractionKind;

    fn block(user: &str, index: usize, items: &[&str]) -> InteractionBlock {
        InteractionBlock {
            user_id: user.into(),
            kind: InteractionKind::Browse,
            index,
            item_ids: items.iter().map(|s| s.to_string()).collect(),
            span: (0, 0),
        }
    }

    #[test]
    fn shared_embedding_has_no_diversity() {
        let mut table = EmbeddingTable::new(2).unwrap();
        for id in ["a", "b", "c"] {
            table.insert(id, &[0.5, 0.5]).unwrap();
        }
        let (f, l) = (block("u", 0, &["a", "b", "c"]), block("u", 2, &["c", "a"]));
        let d = UserDiversity::from_blocks([(&f, &l)], &table, MissingPolicy::Error).unwrap();
        assert_eq!((d.first[0], d.last[0]), (0.0, 0.0));
    }

    #[test]
    fn unknown_items_follow_policy() {
        let mut table = EmbeddingTable::new(1).unwrap();
        table.insert("a", &[0.0]).unwrap();
        table.insert("b", &[2.0]).unwrap();
        let (f, l) = (block("u", 0, &["a", "b", "zz"]), block("u", 1, &["a", "b"]));
        assert!(UserDiversity::from_blocks([(&f, &l)], &table, MissingPolicy::Error).is_err());
        let d = UserDiversity::from_blocks([(&f, &l)], &table, MissingPolicy::Skip).unwrap();
        assert_eq!(d.first[0], 2.0);
    }

    #[test]
    fn narrowing_cohort_is_detected() {
        let n = 40;
        let following = UserDiversity {
            users: (0..n).map(|i| format!("f{i}")).collect(),
            first: (0..n).map(|i| 1.0 + 0.01 * i as f64).collect(),
            last: (0..n).map(|i| 0.5 + 0.01 * i as f64).collect(),
        };
        let ignoring = UserDiversity {
            users: (0..n).map(|i| format!("i{i}")).collect(),
            first: (0..n).map(|i| 1.0 + 0.01 * i as f64).collect(),
            last: (0..n).map(|i| 1.0 + 0.01 * i as f64).collect(),
        };
        let s = run_diversity(&Cohorts { following, ignoring }, &SamplingPlan { repetitions: 20, ..Default::default() }).unwrap();
        assert!(s.rows[0].p_value < 1e-6);
        assert_eq!(s.rows[1].p_value, 1.0);
        assert_eq!(s.between_first_p, 1.0);
        assert!(s.between_change_p < 1e-6);
    }
}
