//! Mean pairwise distance of a page's item embeddings, and a Welch test on
//! two sets of diversity values.

use echo_audit::cluster::mean_pairwise_distance;
use echo_audit::experiment::welch_t_test;

fn main() -> echo_audit::Result<()> {
    let broad = [[0.0, 0.0], [3.0, 0.0], [0.0, 4.0]];
    let narrow = [[0.0, 0.0], [0.3, 0.0], [0.0, 0.4]];
    println!("broad page: {:.3}", mean_pairwise_distance(&broad)?);
    println!("narrow page: {:.3}", mean_pairwise_distance(&narrow)?);

    let first = [4.1, 3.9, 4.3, 4.0, 4.2];
    let last = [3.2, 3.5, 3.1, 3.4, 3.3];
    let t = welch_t_test(&first, &last)?;
    println!("first vs last: t = {:.3}, df = {:.2}, p = {:.3e}", t.t, t.df, t.p_value);
    Ok(())
}
