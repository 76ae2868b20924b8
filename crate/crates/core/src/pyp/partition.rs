use rayon::prelude::*;

use crate::dataset::Dataset;
use crate::pyp::params::PypParams;
use crate::pyp::state::ClusterState;
use crate::pyp::{nearest, PAR_MIN_LEN};

/// Split of the data into points within reach of a center and the rest.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    /// Nearest center for points within reach, `None` for points in `d_r`.
    pub assignments: Vec<Option<usize>>,
    /// Out-of-reach point indices, ascending.
    pub d_r: Vec<usize>,
}

/// Assigns every point whose squared distance to its nearest center is
/// within `threshold(params, c)` to that center and collects the others.
pub fn partition(ds: &Dataset, state: &ClusterState, params: &PypParams) -> Partition {
    let c = state.c();
    let centers = &state.centers;
    let d = ds.d();
    let classify = |i: usize| {
        let (k, dist) = nearest(ds.row(i), centers, d);
        (!params.is_out(dist, c)).then_some(k)
    };
    let assignments: Vec<Option<usize>> = if ds.n() >= PAR_MIN_LEN {
        (0..ds.n())
            .into_par_iter()
            .with_min_len(256)
            .map(classify)
            .collect()
    } else {
        (0..ds.n()).map(classify).collect()
    };
    let d_r = assignments
        .iter()
        .enumerate()
        .filter_map(|(i, a)| a.is_none().then_some(i))
        .collect();
    Partition { assignments, d_r }
}
