//! Page-view ratio (PVR) and the Following / Ignoring split.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::logmodel::PageView;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PvrEntry {
    pub pvr: f64,
    pub total_pvs: usize,
    pub clicked_pvs: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PvrTable {
    pub entries: BTreeMap<String, PvrEntry>,
    /// Users present in the input with no page views.
    pub excluded_users: usize,
}

/// Clicked page views over all page views, per user.
pub fn compute_pvr(page_views: &BTreeMap<String, Vec<PageView>>) -> PvrTable {
    let mut table = PvrTable::default();
    for (user, views) in page_views {
        if views.is_empty() {
            table.excluded_users += 1;
            continue;
        }
        let clicked_pvs = views.iter().filter(|v| v.is_clicked()).count();
        let total_pvs = views.len();
        table.entries.insert(
            user.clone(),
            PvrEntry {
                pvr: clicked_pvs as f64 / total_pvs as f64,
                total_pvs,
                clicked_pvs,
            },
        );
    }
    if table.excluded_users > 0 {
        log::warn!("{} users without page views excluded from PVR", table.excluded_users);
    }
    table
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Group {
    Following,
    Ignoring,
    Unassigned,
}

impl Group {
    pub fn as_str(self) -> &'static str {
        match self {
            Group::Following => "following",
            Group::Ignoring => "ignoring",
            Group::Unassigned => "unassigned",
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// How `lo` and `hi` are interpreted by [`split`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThresholdMode {
    /// Thresholds are PVR values.
    #[default]
    Value,
    /// Thresholds are population fractions of users sorted by PVR.
    Percentile,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CohortAssignment {
    pub following: BTreeSet<String>,
    pub ignoring: BTreeSet<String>,
    pub unassigned: BTreeSet<String>,
    /// PVR cut points actually applied: ignoring ≤ lo, following ≥ hi.
    pub thresholds: (f64, f64),
}

impl CohortAssignment {
    pub fn group_of(&self, user: &str) -> Option<Group> {
        if self.following.contains(user) {
            Some(Group::Following)
        } else if self.ignoring.contains(user) {
            Some(Group::Ignoring)
        } else if self.unassigned.contains(user) {
            Some(Group::Unassigned)
        } else {
            None
        }
    }
}

fn check_thresholds(lo: f64, hi: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo >= hi {
        return Err(Error::Config(format!(
            "cohort thresholds need 0 <= lo < hi <= 1, got lo={lo} hi={hi}"
        )));
    }
    Ok(())
}

/// Value-threshold split: ignoring iff pvr ≤ lo, following iff pvr ≥ hi.
pub fn split_cohorts(table: &PvrTable, lo: f64, hi: f64) -> Result<CohortAssignment> {
    check_thresholds(lo, hi)?;
    let mut out = CohortAssignment {
        thresholds: (lo, hi),
        ..Default::default()
    };
    for (user, e) in &table.entries {
        let set = if e.pvr <= lo {
            &mut out.ignoring
        } else if e.pvr >= hi {
            &mut out.following
        } else {
            &mut out.unassigned
        };
        set.insert(user.clone());
    }
    Ok(out)
}

/// Percentile split: the lowest `lo` fraction of users by PVR are ignoring,
/// users above the `hi` fraction are following. Users tied with a cut value
/// share its side, so the fractions are approximate under ties.
pub fn split_cohorts_percentile(table: &PvrTable, lo: f64, hi: f64) -> Result<CohortAssignment> {
    check_thresholds(lo, hi)?;
    let mut pvrs: Vec<f64> = table.entries.values().map(|e| e.pvr).collect();
    if pvrs.is_empty() {
        return Ok(CohortAssignment {
            thresholds: (lo, hi),
            ..Default::default()
        });
    }
    pvrs.sort_by(f64::total_cmp);
    let n = pvrs.len();
    let n_lo = (lo * n as f64).floor() as usize;
    let n_hi_start = (hi * n as f64).ceil() as usize;
    let lo_cut = if n_lo == 0 { f64::NEG_INFINITY } else { pvrs[n_lo - 1] };
    let hi_cut = if n_hi_start >= n { f64::INFINITY } else { pvrs[n_hi_start] };
    let mut out = CohortAssignment {
        thresholds: (lo_cut, hi_cut),
        ..Default::default()
    };
    for (user, e) in &table.entries {
        let set = if e.pvr <= lo_cut {
            &mut out.ignoring
        } else if e.pvr >= hi_cut {
            &mut out.following
        } else {
            &mut out.unassigned
        };
        set.insert(user.clone());
    }
    Ok(out)
}

pub fn split(table: &PvrTable, lo: f64, hi: f64, mode: ThresholdMode) -> Result<CohortAssignment> {
    match mode {
        ThresholdMode::Value => split_cohorts(table, lo, hi),
        ThresholdMode::Percentile => split_cohorts_percentile(table, lo, hi),
    }
}

/// `cohorts.csv`: `user_id,pvr,total_pvs,clicked_pvs,group`.
pub fn write_cohorts_csv<W: Write>(table: &PvrTable, assignment: &CohortAssignment, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["user_id", "pvr", "total_pvs", "clicked_pvs", "group"])?;
    for (user, e) in &table.entries {
        let group = assignment.group_of(user).unwrap_or(Group::Unassigned);
        w.write_record([
            user.as_str(),
            &e.pvr.to_string(),
            &e.total_pvs.to_string(),
            &e.clicked_pvs.to_string(),
            group.as_str(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logmodel::PageItem;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn view(user: &str, id: usize, clicks: &[bool]) -> PageView {
        PageView {
            pv_id: format!("{user}-{id}"),
            user_id: user.into(),
            start_time: id as i64 + 1,
            items: clicks
                .iter()
                .enumerate()
                .map(|(p, &c)| PageItem {
                    item_id: format!("i{p}"),
                    position: p as u32,
                    clicked: c,
                })
                .collect(),
        }
    }

    fn table_of(pvrs: &[(&str, f64)]) -> PvrTable {
        PvrTable {
            entries: pvrs
                .iter()
                .map(|&(u, p)| {
                    (
                        u.to_string(),
                        PvrEntry {
                            pvr: p,
                            total_pvs: 10,
                            clicked_pvs: (p * 10.0).round() as usize,
                        },
                    )
                })
                .collect(),
            excluded_users: 0,
        }
    }

    #[test]
    fn eight_of_ten_clicked() {
        let views: Vec<_> = (0..10).map(|i| view("u", i, &[false, i < 8])).collect();
        let t = compute_pvr(&BTreeMap::from([("u".to_string(), views)]));
        assert_eq!(t.entries["u"].pvr, 0.8);
        assert_eq!(t.entries["u"].clicked_pvs, 8);
    }

    #[test]
    fn every_pv_clicked() {
        let views: Vec<_> = (0..4).map(|i| view("u", i, &[true, false, false])).collect();
        let t = compute_pvr(&BTreeMap::from([("u".to_string(), views)]));
        assert_eq!(t.entries["u"].pvr, 1.0);
    }

    #[test]
    fn user_without_views_is_excluded() {
        let t = compute_pvr(&BTreeMap::from([("u".to_string(), Vec::new())]));
        assert!(t.entries.is_empty());
        assert_eq!(t.excluded_users, 1);
    }

    #[test]
    fn random_views_match_recount() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let mut input = BTreeMap::new();
        let mut expected = BTreeMap::new();
        for u in 0..5 {
            let user = format!("u{u}");
            let views: Vec<_> = (0..50)
                .map(|i| {
                    let clicks: Vec<bool> = (0..6).map(|_| rng.random_bool(0.08)).collect();
                    view(&user, i, &clicks)
                })
                .collect();
            let mut clicked = 0;
            for v in &views {
                let mut any = false;
                for item in &v.items {
                    any |= item.clicked;
                }
                clicked += usize::from(any);
            }
            expected.insert(user.clone(), clicked);
            input.insert(user, views);
        }
        let t = compute_pvr(&input);
        for (u, clicked) in expected {
            assert_eq!(t.entries[&u].clicked_pvs, clicked);
            assert_eq!(t.entries[&u].pvr, clicked as f64 / 50.0);
        }
    }

    #[test]
    fn three_way_split() {
        let t = table_of(&[("a", 0.1), ("b", 0.5), ("c", 0.9)]);
        let c = split_cohorts(&t, 0.2, 0.8).unwrap();
        assert_eq!(c.ignoring, BTreeSet::from(["a".to_string()]));
        assert_eq!(c.unassigned, BTreeSet::from(["b".to_string()]));
        assert_eq!(c.following, BTreeSet::from(["c".to_string()]));
    }

    #[test]
    fn boundaries_are_inclusive() {
        let t = table_of(&[("a", 0.2), ("b", 0.8)]);
        let c = split_cohorts(&t, 0.2, 0.8).unwrap();
        assert!(c.ignoring.contains("a"));
        assert!(c.following.contains("b"));
    }

    #[test]
    fn inverted_thresholds_rejected() {
        let t = table_of(&[("a", 0.2)]);
        assert!(matches!(split_cohorts(&t, 0.8, 0.2), Err(Error::Config(_))));
        assert!(matches!(split_cohorts(&t, 0.5, 0.5), Err(Error::Config(_))));
    }

    #[test]
    fn uniform_pvrs_match_filter() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let pvrs: Vec<(String, f64)> = (0..1000).map(|i| (format!("u{i:04}"), rng.random::<f64>())).collect();
        let borrowed: Vec<(&str, f64)> = pvrs.iter().map(|(u, p)| (u.as_str(), *p)).collect();
        let c = split_cohorts(&table_of(&borrowed), 0.2, 0.8).unwrap();
        assert_eq!(c.ignoring.len(), pvrs.iter().filter(|(_, p)| *p <= 0.2).count());
        assert_eq!(c.following.len(), pvrs.iter().filter(|(_, p)| *p >= 0.8).count());
        assert_eq!(c.unassigned.len(), pvrs.iter().filter(|(_, p)| *p > 0.2 && *p < 0.8).count());
    }

    #[test]
    fn percentile_split_takes_tails() {
        let pvrs: Vec<(String, f64)> = (0..10).map(|i| (format!("u{i}"), i as f64 / 20.0)).collect();
        let borrowed: Vec<(&str, f64)> = pvrs.iter().map(|(u, p)| (u.as_str(), *p)).collect();
        let c = split_cohorts_percentile(&table_of(&borrowed), 0.2, 0.8).unwrap();
        assert_eq!(c.ignoring, BTreeSet::from(["u0".to_string(), "u1".to_string()]));
        assert_eq!(c.following, BTreeSet::from(["u8".to_string(), "u9".to_string()]));
        assert_eq!(c.unassigned.len(), 6);
    }

    #[test]
    fn cohorts_csv_layout() {
        let t = table_of(&[("a", 0.1), ("c", 0.9)]);
        let c = split_cohorts(&t, 0.2, 0.8).unwrap();
        let mut buf = Vec::new();
        write_cohorts_csv(&t, &c, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "user_id,pvr,total_pvs,clicked_pvs,group\na,0.1,10,1,ignoring\nc,0.9,10,9,following\n"
        );
    }

    proptest! {
        #[test]
        fn split_is_a_partition_and_monotone(
            pvrs in proptest::collection::vec(0.0f64..=1.0, 0..60),
            lo in 0.0f64..0.5,
            gap in 0.01f64..0.5,
            bump in 0.0f64..0.3,
        ) {
            let hi = (lo + gap).min(1.0);
            let names: Vec<String> = (0..pvrs.len()).map(|i| format!("u{i}")).collect();
            let borrowed: Vec<(&str, f64)> = names.iter().map(String::as_str).zip(pvrs.iter().copied()).collect();
            let t = table_of(&borrowed);
            let c = split_cohorts(&t, lo, hi).unwrap();
            prop_assert_eq!(c.following.len() + c.ignoring.len() + c.unassigned.len(), t.entries.len());
            prop_assert!(c.following.is_disjoint(&c.ignoring));
            prop_assert!(c.following.is_disjoint(&c.unassigned));
            for u in &c.ignoring { prop_assert!(t.entries[u].pvr <= lo); }
            for u in &c.following { prop_assert!(t.entries[u].pvr >= hi); }

            let hi2 = (hi + bump).min(1.0);
            let c2 = split_cohorts(&t, lo, hi2).unwrap();
            prop_assert!(c2.following.is_subset(&c.following));
            let lo2 = (lo - bump).max(0.0);
            let c3 = split_cohorts(&t, lo2, hi).unwrap();
            prop_assert!(c3.ignoring.is_subset(&c.ignoring));
        }
    }
}
