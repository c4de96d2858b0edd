//! Repeated-sampling measurement campaigns and their significance tests.
//!
//! Every campaign follows the same protocol: in each repetition the larger
//! cohort is resized to the smaller one's size, both are p-sampled, a metric
//! is evaluated per group, and the per-repetition values are compared with
//! Welch t-tests. Repetitions run in parallel and are collected in index
//! order, so results do not depend on the thread count.

mod diversity;
mod reinforcement;
mod report;
mod sampling;
mod stats;
mod tendency;

use serde::{Deserialize, Serialize};

use crate::cluster::PointSet;
use crate::error::{Error, Result};

pub use diversity::{run_diversity, DiversityRow, DiversitySection, UserDiversity};
pub use reinforcement::{run_reinforcement, run_selection, MetricTable, OffsetRow, ReinforcementSection, SelectionSection};
pub use report::{CohortSummary, ExperimentReport, ReportHeader};
pub use sampling::{draw_repetition, p_sample, p_size, resize_sample, RepDraw, SampleSizes, SamplingPlan};
pub use stats::{mean, paired_t_test, variance, welch_t_test, TTest};
pub use tendency::{run_tendency, TendencyRow, TendencySection};

/// A value per cohort.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cohorts<T> {
    pub following: T,
    pub ignoring: T,
}

impl<T> Cohorts<T> {
    pub fn map<U>(&self, mut f: impl FnMut(&T) -> U) -> Cohorts<U> {
        Cohorts {
            following: f(&self.following),
            ignoring: f(&self.ignoring),
        }
    }

    pub fn try_map<U>(&self, mut f: impl FnMut(&str, &T) -> Result<U>) -> Result<Cohorts<U>> {
        Ok(Cohorts {
            following: f("following", &self.following)?,
            ignoring: f("ignoring", &self.ignoring)?,
        })
    }
}

/// First- and last-block embeddings of the same users, row i of each
/// belonging to the same user.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockPair {
    pub first: PointSet,
    pub last: PointSet,
}

impl BlockPair {
    pub fn new(first: PointSet, last: PointSet) -> Result<Self> {
        if first.ids() != last.ids() {
            return Err(Error::Alignment("first and last blocks list different users".into()));
        }
        if first.dim() != last.dim() {
            return Err(Error::Alignment("first and last blocks differ in dimension".into()));
        }
        Ok(Self { first, last })
    }

    pub fn len(&self) -> usize {
        self.first.len()
    }

    pub fn is_empty(&self) -> bool {
        self.first.is_empty()
    }
}

/// Mean and within/between comparison of two sets of repetition values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub following: f64,
    pub ignoring: f64,
    pub p_value: f64,
    pub following_values: Vec<f64>,
    pub ignoring_values: Vec<f64>,
}

impl Comparison {
    pub fn new(following_values: Vec<f64>, ignoring_values: Vec<f64>) -> Result<Self> {
        Ok(Self {
            following: mean(&following_values),
            ignoring: mean(&ignoring_values),
            p_value: welch_t_test(&following_values, &ignoring_values)?.p_value,
            following_values,
            ignoring_values,
        })
    }
}

/// Positions of `subset` inside `sorted`; both ascending.
pub(crate) fn positions_in(sorted: &[usize], subset: &[usize]) -> Vec<usize> {
    subset
        .iter()
        .map(|x| sorted.binary_search(x).expect("subset of the resized group"))
        .collect()
}

pub(crate) fn check_group_sizes(n_following: usize, n_ignoring: usize, needed: usize, what: &str) -> Result<()> {
    if n_following.min(n_ignoring) < needed {
        return Err(Error::Argument(format!(
            "{what} needs at least {needed} users per cohort, got {n_following} following / {n_ignoring} ignoring"
        )));
    }
    Ok(())
}
