//! Fit k-means on Gaussian blobs and choose the cluster count by BIC.

use echo_audit::cluster::{kmeans, select_k, BicVariant, KSelection, PointSet};
use echo_audit::seed::rng_from;
use rand::Rng;
use rand_distr::{Distribution, Normal};

fn main() -> echo_audit::Result<()> {
    let mut rng = rng_from(5);
    let noise = Normal::new(0.0, 0.4).unwrap();
    let centers: Vec<Vec<f64>> = (0..4).map(|_| (0..6).map(|_| rng.random_range(-15.0..15.0)).collect()).collect();
    let rows: Vec<Vec<f64>> = centers
        .iter()
        .flat_map(|c| (0..150).map(|_| c.iter().map(|x| x + noise.sample(&mut rng)).collect::<Vec<f64>>()).collect::<Vec<_>>())
        .collect();
    let points = PointSet::from_rows(&rows)?;

    let part = kmeans(&points, 4, 1)?;
    println!("k = 4 cluster sizes {:?}, within SS {:.2}", part.sizes, part.within_ss(&points));

    for variant in [BicVariant::XMeans, BicVariant::Literal] {
        let sel = select_k(&points, 2..=10, 5, 7, variant, KSelection::GlobalMax)?;
        println!("{variant:?}: k* = {}", sel.k_star);
        for (k, v) in sel.curve {
            println!("  k = {k:2}  BIC {v:.1}");
        }
    }
    Ok(())
}
