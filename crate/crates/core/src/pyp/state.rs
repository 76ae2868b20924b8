use crate::dataset::Dataset;
use crate::pyp::params::{PypParams, Variant};
use crate::pyp::sq_dist;

/// Centers, per-point cluster ids and cluster sizes.
///
/// Cluster ids are zero-based indices into `sizes` and into the row-major
/// `centers` buffer. After a completed iteration every cluster is non-empty
/// and `sizes[k]` counts the points assigned to `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterState {
    /// Row-major `c x d` center matrix.
    pub centers: Vec<f64>,
    pub d: usize,
    pub assignments: Vec<usize>,
    pub sizes: Vec<usize>,
}

impl ClusterState {
    /// One cluster holding every point, centered at the global mean.
    pub fn initial(ds: &Dataset) -> Self {
        ClusterState {
            centers: ds.mean(),
            d: ds.d(),
            assignments: vec![0; ds.n()],
            sizes: vec![ds.n()],
        }
    }

    /// Builds the state whose centers are the means of the given partition.
    /// Ids are compacted so that no empty cluster remains.
    pub fn from_assignments(ds: &Dataset, assignments: Vec<usize>) -> Self {
        let c = assignments.iter().copied().max().map_or(0, |m| m + 1);
        let stale = ClusterState {
            centers: vec![0.0; c * ds.d()],
            d: ds.d(),
            sizes: vec![0; c],
            assignments,
        };
        update_centers(ds, &stale)
    }

    pub fn c(&self) -> usize {
        self.sizes.len()
    }

    pub fn center(&self, k: usize) -> &[f64] {
        &self.centers[k * self.d..(k + 1) * self.d]
    }

    /// Recounts `sizes` from `assignments`, keeping the current `c`.
    pub(crate) fn recount(&mut self) {
        self.sizes.iter_mut().for_each(|s| *s = 0);
        for &a in &self.assignments {
            self.sizes[a] += 1;
        }
    }

    /// Points grouped by cluster id.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.c()];
        for (i, &a) in self.assignments.iter().enumerate() {
            out[a].push(i);
        }
        out
    }
}

/// Moves every center to the mean of its members. Clusters left without
/// members are deleted and the remaining ids compacted in their original
/// order.
pub fn update_centers(ds: &Dataset, state: &ClusterState) -> ClusterState {
    let d = ds.d();
    let c = state.c();
    let mut sums = vec![0.0; c * d];
    let mut counts = vec![0usize; c];
    for (x, &a) in ds.rows().zip(&state.assignments) {
        counts[a] += 1;
        for (s, v) in sums[a * d..(a + 1) * d].iter_mut().zip(x) {
            *s += v;
        }
    }
    let mut remap = vec![usize::MAX; c];
    let mut centers = Vec::with_capacity(c * d);
    let mut sizes = Vec::with_capacity(c);
    for k in 0..c {
        if counts[k] == 0 {
            continue;
        }
        remap[k] = sizes.len();
        let n = counts[k] as f64;
        centers.extend(sums[k * d..(k + 1) * d].iter().map(|s| s / n));
        sizes.push(counts[k]);
    }
    ClusterState {
        centers,
        d,
        assignments: state.assignments.iter().map(|&a| remap[a]).collect(),
        sizes,
    }
}

/// Sum of squared distances from each point to its assigned center.
pub fn km_cost(ds: &Dataset, state: &ClusterState) -> f64 {
    ds.rows()
        .zip(&state.assignments)
        .map(|(x, &a)| sq_dist(x, state.center(a)))
        .sum()
}

/// The c-penalty `(lambda - ln(c) * theta) * c`; zero for k-means.
pub fn penalty(params: &PypParams, c: usize) -> f64 {
    if params.variant == Variant::KMeans || c == 0 {
        return 0.0;
    }
    let cf = c as f64;
    (params.lambda - cf.ln() * params.effective_theta()) * cf
}

/// km-cost plus the c-penalty.
pub fn objective(ds: &Dataset, state: &ClusterState, params: &PypParams) -> f64 {
    km_cost(ds, state) + penalty(params, state.c())
}
