use std::time::Instant;

use crate::dataset::Dataset;
use crate::error::Result;
use crate::pyp::agglomerate::agglomerate;
use crate::pyp::kmeans::kmeans;
use crate::pyp::params::{PypParams, Variant};
use crate::pyp::partition::partition;
use crate::pyp::recluster::recluster_dr_traced;
use crate::pyp::state::{objective, update_centers, ClusterState};

/// Per-iteration diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationStats {
    /// Size of the out-of-reach set after partitioning.
    pub dr_size: usize,
    /// Clusters opened by re-clustering.
    pub created: usize,
    /// Clusters deleted for having no members.
    pub deleted: usize,
    pub merged: usize,
    /// Cluster count at the end of the iteration.
    pub c: usize,
    pub objective: f64,
    /// Seconds.
    pub elapsed: f64,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub state: ClusterState,
    /// Objective of the single-cluster starting state (for k-means, the cost
    /// after the first assignment).
    pub initial_objective: f64,
    /// Objective at the end of every iteration.
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Seconds.
    pub wall_time: f64,
    pub stats: Vec<IterationStats>,
}

impl RunResult {
    pub fn objective(&self) -> f64 {
        self.objective_trace
            .last()
            .copied()
            .unwrap_or(self.initial_objective)
    }

    /// Equality of everything except timings.
    pub fn same_outcome(&self, other: &RunResult) -> bool {
        let strip = |s: &[IterationStats]| -> Vec<(usize, usize, usize, usize, usize, u64)> {
            s.iter()
                .map(|x| (x.dr_size, x.created, x.deleted, x.merged, x.c, x.objective.to_bits()))
                .collect()
        };
        self.state == other.state
            && self.initial_objective.to_bits() == other.initial_objective.to_bits()
            && self.objective_trace.len() == other.objective_trace.len()
            && self
                .objective_trace
                .iter()
                .zip(&other.objective_trace)
                .all(|(a, b)| a.to_bits() == b.to_bits())
            && self.iterations == other.iterations
            && self.converged == other.converged
            && strip(&self.stats) == strip(&other.stats)
    }
}

/// Runs the algorithm selected by `params.variant` to convergence.
///
/// pyp/dp start from one cluster at the global mean and iterate partition,
/// furthest-first re-clustering, center update and (optionally)
/// agglomeration until the assignments stop changing and the objective moves
/// by at most `tol`, or `max_iter` is hit (`converged = false`).
pub fn fit(ds: &Dataset, params: &PypParams) -> Result<RunResult> {
    params.validate()?;
    if params.variant == Variant::KMeans {
        return kmeans(ds, params);
    }
    let start = Instant::now();
    let mut state = ClusterState::initial(ds);
    let initial_objective = objective(ds, &state, params);
    let mut prev = initial_objective;
    let mut trace = Vec::new();
    let mut stats = Vec::new();
    let mut converged = false;

    for _ in 0..params.max_iter {
        let t0 = Instant::now();
        let part = partition(ds, &state, params);
        let (grown, selections) = recluster_dr_traced(ds, &part, &state, params);
        let created = selections.iter().filter(|s| s.created).count();
        let updated = update_centers(ds, &grown);
        let deleted = grown.c() - updated.c();
        let (next, merges) = if params.agglomeration {
            agglomerate(ds, &updated, params)
        } else {
            (updated, Vec::new())
        };
        let obj = objective(ds, &next, params);
        stats.push(IterationStats {
            dr_size: part.d_r.len(),
            created,
            deleted,
            merged: merges.len(),
            c: next.c(),
            objective: obj,
            elapsed: t0.elapsed().as_secs_f64(),
        });
        trace.push(obj);
        let done = next.assignments == state.assignments && (obj - prev).abs() <= params.tol;
        state = next;
        prev = obj;
        if done {
            converged = true;
            break;
        }
    }

    Ok(RunResult {
        state,
        initial_objective,
        iterations: trace.len(),
        objective_trace: trace,
        converged,
        wall_time: start.elapsed().as_secs_f64(),
        stats,
    })
}
