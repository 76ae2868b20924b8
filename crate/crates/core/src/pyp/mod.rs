//! The pyp-means hard-clustering algorithm.
//!
//! A point opens a new cluster when its squared distance to every existing
//! center exceeds `lambda - ln(c) * theta`, where `c` is the current cluster
//! count. With `theta = 0` this is dp-means; with a fixed `c` and no penalty
//! it is k-means. One outer iteration runs
//! [`partition`] -> [`recluster_dr`] -> [`update_centers`] -> [`agglomerate`].

mod agglomerate;
mod estimate;
mod fit;
mod kmeans;
mod params;
mod partition;
mod recluster;
mod state;

pub use agglomerate::{agglomerate, agglomerate_step, merge_gain_threshold, Merge};
pub use estimate::{estimate_lambda, estimate_lambda_with_ratio, LambdaEstimate};
pub use fit::{fit, IterationStats, RunResult};
pub use kmeans::kmeans;
pub use params::{threshold, PypParams, Variant};
pub use partition::{partition, Partition};
pub use recluster::{recluster_dr, recluster_dr_traced, Selection};
pub use state::{km_cost, objective, penalty, update_centers, ClusterState};

/// Rows at or above this count are processed with rayon.
pub(crate) const PAR_MIN_LEN: usize = 2048;

#[inline]
pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Nearest center by squared distance; ties go to the lowest index.
#[inline]
pub(crate) fn nearest(x: &[f64], centers: &[f64], d: usize) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (k, mu) in centers.chunks_exact(d).enumerate() {
        let dist = sq_dist(x, mu);
        if dist < best.1 {
            best = (k, dist);
        }
    }
    best
}
