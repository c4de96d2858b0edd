//! Two-step group sampling: resize the larger group to the smaller one's size,
//! then draw a p-fraction from each.

use rand::seq::index;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::{derive_seed, rng_from};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingPlan {
    pub repetitions: usize,
    pub p_fraction_default: f64,
    pub p_fraction_hopkins: f64,
    pub master_seed: u64,
}

impl Default for SamplingPlan {
    fn default() -> Self {
        Self {
            repetitions: 50,
            p_fraction_default: 0.8,
            p_fraction_hopkins: 0.1,
            master_seed: 0,
        }
    }
}

impl SamplingPlan {
    pub fn validate(&self) -> Result<()> {
        if self.repetitions < 2 {
            return Err(Error::Config(format!(
                "repetitions must be at least 2, got {}",
                self.repetitions
            )));
        }
        for (name, f) in [
            ("p_fraction_default", self.p_fraction_default),
            ("p_fraction_hopkins", self.p_fraction_hopkins),
        ] {
            if !(f > 0.0 && f <= 1.0) {
                return Err(Error::Config(format!("{name} must lie in (0, 1], got {f}")));
            }
        }
        Ok(())
    }
}

/// Uniform sample of `target` members without replacement, in group order.
pub fn resize_sample<T: Clone>(group: &[T], target: usize, seed: u64) -> Result<Vec<T>> {
    if target > group.len() {
        return Err(Error::Argument(format!(
            "cannot resize a group of {} to {target}",
            group.len()
        )));
    }
    let mut picked = index::sample(&mut rng_from(seed), group.len(), target).into_vec();
    picked.sort_unstable();
    Ok(picked.into_iter().map(|i| group[i].clone()).collect())
}

/// floor(fraction · |group|) members, uniform without replacement.
pub fn p_sample<T: Clone>(group: &[T], fraction: f64, seed: u64) -> Result<Vec<T>> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::Argument(format!("sample fraction must lie in (0, 1], got {fraction}")));
    }
    resize_sample(group, p_size(group.len(), fraction), seed)
}

pub fn p_size(n: usize, fraction: f64) -> usize {
    // the epsilon keeps products like 0.29·100 from flooring to 28
    (fraction * n as f64 + 1e-9).floor() as usize
}

/// Group sizes along the two sampling steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleSizes {
    pub population: usize,
    pub resized: usize,
    pub sampled: usize,
}

/// One repetition's draw over the two groups, as indices into each group.
#[derive(Debug, Clone, PartialEq)]
pub struct RepDraw {
    pub following_resized: Vec<usize>,
    pub ignoring_resized: Vec<usize>,
    pub following: Vec<usize>,
    pub ignoring: Vec<usize>,
}

impl RepDraw {
    pub fn sizes(&self, following_population: usize, ignoring_population: usize) -> [SampleSizes; 2] {
        [
            SampleSizes {
                population: following_population,
                resized: self.following_resized.len(),
                sampled: self.following.len(),
            },
            SampleSizes {
                population: ignoring_population,
                resized: self.ignoring_resized.len(),
                sampled: self.ignoring.len(),
            },
        ]
    }
}

/// Resize then p-sample both groups for repetition `rep` of `metric`.
/// Seeds depend only on `(master, metric, rep)`.
pub fn draw_repetition(
    n_following: usize,
    n_ignoring: usize,
    fraction: f64,
    master: u64,
    metric: &str,
    rep: usize,
) -> Result<RepDraw> {
    let target = n_following.min(n_ignoring);
    // Both cohorts share the seeds, so identical cohorts draw identical samples.
    let resize_seed = derive_seed(master, &format!("{metric}/resize"), rep as u64);
    let p_seed = derive_seed(master, &format!("{metric}/p"), rep as u64);
    let step = |n: usize| -> Result<(Vec<usize>, Vec<usize>)> {
        let all: Vec<usize> = (0..n).collect();
        let resized = resize_sample(&all, target, resize_seed)?;
        let sampled = p_sample(&resized, fraction, p_seed)?;
        Ok((resized, sampled))
    };
    let (following_resized, following) = step(n_following)?;
    let (ignoring_resized, ignoring) = step(n_ignoring)?;
    Ok(RepDraw {
        following_resized,
        ignoring_resized,
        following,
        ignoring,
    })
}
