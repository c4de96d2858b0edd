//! Hopkins statistic on uniform and on clustered data.

use echo_audit::cluster::{hopkins, PointSet};
use echo_audit::seed::rng_from;
use rand::Rng;

fn main() -> echo_audit::Result<()> {
    let mut rng = rng_from(2);
    let uniform: Vec<Vec<f64>> = (0..1000).map(|_| (0..4).map(|_| rng.random::<f64>()).collect()).collect();
    let clustered: Vec<Vec<f64>> = (0..1000)
        .map(|i| {
            let c = (i % 5) as f64 * 10.0;
            (0..4).map(|_| c + rng.random::<f64>() * 0.5).collect()
        })
        .collect();
    for (name, rows) in [("uniform", uniform), ("clustered", clustered)] {
        let h = hopkins(&PointSet::from_rows(&rows)?, 100, 9)?;
        println!("{name:9} H = {h:.3}");
    }
    Ok(())
}
