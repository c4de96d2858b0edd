//! Page-view ratios and the following / ignoring split, with fixed
//! thresholds and with percentiles.

use echo_audit::cohort::{compute_pvr, split, write_cohorts_csv, ThresholdMode};
use echo_audit::logmodel::{group_page_views, InteractionRecord};

fn main() -> echo_audit::Result<()> {
    // user k clicks in k of their 10 page views
    let mut browse = Vec::new();
    for k in 0..=10 {
        let user = format!("user{k:02}");
        for v in 0..10 {
            browse.push(InteractionRecord::browse(v, format!("{user}-pv{v}"), user.clone(), "item", 0, v < k));
        }
    }
    let table = compute_pvr(&group_page_views(&browse)?);

    let fixed = split(&table, 0.2, 0.8, ThresholdMode::Value)?;
    println!(
        "PVR <= 0.2 / >= 0.8: {} ignoring, {} following, {} unassigned",
        fixed.ignoring.len(),
        fixed.following.len(),
        fixed.unassigned.len()
    );
    let pct = split(&table, 0.1, 0.9, ThresholdMode::Percentile)?;
    println!("10th / 90th percentile cut-offs: {:?}", pct.thresholds);

    let mut out = Vec::new();
    write_cohorts_csv(&table, &fixed, &mut out)?;
    print!("{}", String::from_utf8_lossy(&out));
    Ok(())
}
