//! Calinski-Harabasz score, contingency table and adjusted Rand index.

use echo_audit::cluster::{adjusted_rand_index, calinski_harabasz, contingency_table, PointSet};

fn main() -> echo_audit::Result<()> {
    let points = PointSet::from_rows(&[[0.0, 0.0], [0.0, 1.0], [10.0, 0.0], [10.0, 1.0]])?;
    println!("CH, natural split: {}", calinski_harabasz(&points, &[0, 0, 1, 1])?);
    println!("CH, crossed split: {:.4}", calinski_harabasz(&points, &[0, 1, 0, 1])?);

    let p = [0, 0, 0, 1, 1, 1, 2, 2];
    let q = [1, 1, 0, 0, 2, 2, 2, 2];
    let t = contingency_table(&p, &q)?;
    println!("contingency {:?}, row sums {:?}, column sums {:?}", t.counts, t.row_sums, t.col_sums);
    println!("ARI(p, q) = {:.4}", adjusted_rand_index(&p, &q)?);
    println!("ARI(p, relabelled p) = {}", adjusted_rand_index(&p, &[2, 2, 2, 0, 0, 0, 1, 1])?);
    Ok(())
}
