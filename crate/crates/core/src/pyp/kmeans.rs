//! Lloyd's algorithm with k-means++ seeding, used for the `kmeans` variant
//! and for clustering spectral embeddings.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::pyp::fit::{IterationStats, RunResult};
use crate::pyp::params::PypParams;
use crate::pyp::state::{km_cost, update_centers, ClusterState};
use crate::pyp::{nearest, sq_dist};

/// Independent restarts; the lowest final cost wins.
const RESTARTS: usize = 10;

/// Runs k-means with `params.fixed_c` clusters.
pub fn kmeans(ds: &Dataset, params: &PypParams) -> Result<RunResult> {
    let k = params
        .fixed_c
        .ok_or_else(|| Error::InvalidParams("kmeans requires fixed_c".into()))?;
    if k == 0 || k > ds.n() {
        return Err(Error::InvalidParams(format!(
            "fixed_c = {k} must lie in 1..={}",
            ds.n()
        )));
    }
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut best: Option<RunResult> = None;
    for _ in 0..RESTARTS {
        let run = lloyd(ds, k, params, &mut rng);
        let cost = *run.objective_trace.last().expect("at least one iteration");
        if best
            .as_ref()
            .is_none_or(|b| cost < *b.objective_trace.last().unwrap())
        {
            best = Some(run);
        }
    }
    let mut best = best.expect("RESTARTS >= 1");
    best.wall_time = start.elapsed().as_secs_f64();
    Ok(best)
}

fn seed_plus_plus(ds: &Dataset, k: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let n = ds.n();
    let mut centers = Vec::with_capacity(k * ds.d());
    centers.extend_from_slice(ds.row(rng.random_range(0..n)));
    let mut min_d: Vec<f64> = ds.rows().map(|x| sq_dist(x, &centers)).collect();
    while centers.len() < k * ds.d() {
        let total: f64 = min_d.iter().sum();
        let pick = if total > 0.0 {
            let mut r = rng.random_range(0.0..total);
            let mut idx = n - 1;
            for (i, &w) in min_d.iter().enumerate() {
                if r < w {
                    idx = i;
                    break;
                }
                r -= w;
            }
            idx
        } else {
            rng.random_range(0..n)
        };
        let mu = ds.row(pick).to_vec();
        for (m, x) in min_d.iter_mut().zip(ds.rows()) {
            *m = m.min(sq_dist(x, &mu));
        }
        centers.extend_from_slice(&mu);
    }
    centers
}

fn lloyd(ds: &Dataset, k: usize, params: &PypParams, rng: &mut ChaCha8Rng) -> RunResult {
    let start = Instant::now();
    let d = ds.d();
    let mut state = ClusterState {
        centers: seed_plus_plus(ds, k, rng),
        d,
        assignments: vec![usize::MAX; ds.n()],
        sizes: vec![0; k],
    };
    let mut trace = Vec::new();
    let mut stats = Vec::new();
    let mut converged = false;
    let mut prev_cost = f64::INFINITY;
    let mut initial = None;
    for _ in 0..params.max_iter {
        let t0 = Instant::now();
        let assignments: Vec<usize> = ds.rows().map(|x| nearest(x, &state.centers, d).0).collect();
        let unchanged = assignments == state.assignments;
        let mut next = ClusterState {
            assignments,
            ..state.clone()
        };
        next.recount();
        if initial.is_none() {
            initial = Some(km_cost(ds, &next));
        }
        let mut updated = update_centers(ds, &next);
        if updated.c() < k {
            updated = reseed_empty(ds, updated, k);
        }
        let cost = km_cost(ds, &updated);
        trace.push(cost);
        stats.push(IterationStats {
            dr_size: 0,
            created: 0,
            deleted: 0,
            merged: 0,
            c: updated.c(),
            objective: cost,
            elapsed: t0.elapsed().as_secs_f64(),
        });
        let done = unchanged && (prev_cost - cost).abs() <= params.tol;
        prev_cost = cost;
        state = updated;
        if done {
            converged = true;
            break;
        }
    }
    let state = update_centers(ds, &state);
    RunResult {
        iterations: trace.len(),
        initial_objective: initial.unwrap_or(prev_cost),
        objective_trace: trace,
        converged,
        wall_time: start.elapsed().as_secs_f64(),
        stats,
        state,
    }
}

/// Refills clusters lost to emptiness with the points farthest from their
/// centers, so that `k` clusters survive while distinct points remain.
fn reseed_empty(ds: &Dataset, mut state: ClusterState, k: usize) -> ClusterState {
    while state.c() < k {
        let (far, dist) = ds
            .rows()
            .enumerate()
            .map(|(i, x)| (i, sq_dist(x, state.center(state.assignments[i]))))
            .fold((0, -1.0), |b, p| if p.1 > b.1 { p } else { b });
        if dist <= 0.0 {
            break;
        }
        state.centers.extend_from_slice(ds.row(far));
        state.sizes.push(0);
        state.assignments[far] = state.c() - 1;
        state = update_centers(ds, &state);
    }
    state
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::accuracy;

    fn blobs() -> Dataset {
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for (l, (cx, cy)) in [(0.0, 0.0), (10.0, 0.0), (0.0, 10.0)].into_iter().enumerate() {
            for j in 0..20 {
                let a = j as f64 * 0.7;
                rows.push([cx + a.cos() * 0.5, cy + a.sin() * 0.5]);
                labels.push(l + 1);
            }
        }
        Dataset::from_rows(&rows).unwrap().with_labels(labels).unwrap()
    }

    #[test]
    fn recovers_separated_blobs() {
        let ds = blobs();
        let run = kmeans(&ds, &PypParams::kmeans(3).with_seed(7)).unwrap();
        assert!(run.converged);
        assert_eq!(run.state.c(), 3);
        let pred: Vec<usize> = run.state.assignments.iter().map(|a| a + 1).collect();
        assert_eq!(accuracy(ds.labels().unwrap(), &pred).unwrap(), 100.0);
        let w = run.objective_trace.windows(2).all(|w| w[1] <= w[0] + 1e-9);
        assert!(w);
    }

    #[test]
    fn duplicate_points_drop_to_distinct_count() {
        let ds = Dataset::from_rows(&[[1.0], [1.0], [2.0]]).unwrap();
        let run = kmeans(&ds, &PypParams::kmeans(3)).unwrap();
        assert_eq!(run.state.c(), 2);
        assert_eq!(run.state.assignments[0], run.state.assignments[1]);
    }

    #[test]
    fn rejects_k_above_n() {
        let ds = Dataset::from_rows(&[[1.0]]).unwrap();
        assert!(kmeans(&ds, &PypParams::kmeans(2)).is_err());
    }
}
