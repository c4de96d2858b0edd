//! Geometry and cluster-validity mathematics.

mod bic;
mod diversity;
mod hopkins;
mod kmeans;
mod points;
mod validity;

pub use bic::{bic, bic_curve, bic_penalty, pick_peak, select_k, summarize_curves, BicVariant, KSelection, KSelectionResult};
pub use diversity::mean_pairwise_distance;
pub use hopkins::{hopkins, hopkins_with_probes};
pub use kmeans::{kmeans, kmeans_with, KMeansParams, KMeansRun, Partition};
pub use points::{dist, sq_dist, PointSet};
pub use validity::{
    adjusted_rand_index, align_by_id, ari_from_table, calinski_harabasz, calinski_harabasz_with, contingency_table,
    ChWeighting, ContingencyTable,
};
