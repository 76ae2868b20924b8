//! Furthest-first re-clustering of the out-of-reach set.
//!
//! The point farthest from every current center is examined first. If it is
//! out of reach and the cluster cap allows it, it becomes a singleton center
//! and the remaining min-distances are refreshed against it. The first point
//! that does not open a cluster fixes the threshold; every point after it is
//! no farther away, so the rest of the pass only assigns to nearest centers.

use std::cmp::Ordering;

use rayon::prelude::*;

use crate::dataset::Dataset;
use crate::pyp::params::PypParams;
use crate::pyp::partition::Partition;
use crate::pyp::state::ClusterState;
use crate::pyp::{nearest, sq_dist, PAR_MIN_LEN};

/// One selection made during a re-clustering pass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Selection {
    pub point: usize,
    /// Squared distance to the nearest center at selection time.
    pub min_dist: f64,
    /// Cluster count when the point was examined.
    pub c: usize,
    pub created: bool,
}

/// Applies a [`Partition`] to `state` and assigns every out-of-reach point.
///
/// Returns a state that may still contain empty clusters; run
/// [`update_centers`](crate::pyp::update_centers) afterwards.
pub fn recluster_dr(
    ds: &Dataset,
    part: &Partition,
    state: &ClusterState,
    params: &PypParams,
) -> ClusterState {
    recluster_dr_traced(ds, part, state, params).0
}

/// [`recluster_dr`] plus the sequence of selections in the order they were
/// made.
pub fn recluster_dr_traced(
    ds: &Dataset,
    part: &Partition,
    state: &ClusterState,
    params: &PypParams,
) -> (ClusterState, Vec<Selection>) {
    let d = ds.d();
    let mut out = state.clone();
    for (i, a) in part.assignments.iter().enumerate() {
        if let Some(k) = *a {
            out.assignments[i] = k;
        }
    }

    // (point, min squared distance, nearest center), kept in ascending
    // point order so that argmax ties resolve to the lowest index
    let mut pending: Vec<(usize, f64, usize)> = part
        .d_r
        .iter()
        .map(|&i| {
            let (k, dist) = nearest(ds.row(i), &out.centers, d);
            (i, dist, k)
        })
        .collect();
    let mut trace = Vec::with_capacity(pending.len());
    let mut c = out.c();

    'outer: while !pending.is_empty() {
        let pos = argmax_dist(&pending);
        let (point, dist, _) = pending[pos];
        if params.can_grow(c) && params.is_out(dist, c) {
            pending.remove(pos);
            trace.push(Selection {
                point,
                min_dist: dist,
                c,
                created: true,
            });
            let new_k = c;
            out.centers.extend_from_slice(ds.row(point));
            out.sizes.push(0);
            out.assignments[point] = new_k;
            c += 1;
            refresh(ds, &mut pending, out.center(new_k), new_k);
            continue;
        }

        // Threshold is now fixed: walk the rest in descending distance.
        pending.sort_by(|a, b| match b.1.partial_cmp(&a.1) {
            Some(Ordering::Equal) | None => a.0.cmp(&b.0),
            Some(o) => o,
        });
        for idx in 0..pending.len() {
            let (point, dist, k) = pending[idx];
            if params.can_grow(c) && params.is_out(dist, c) {
                pending.drain(..idx);
                pending.sort_by_key(|p| p.0);
                continue 'outer;
            }
            trace.push(Selection {
                point,
                min_dist: dist,
                c,
                created: false,
            });
            out.assignments[point] = k;
        }
        pending.clear();
    }
    out.recount();
    (out, trace)
}

fn argmax_dist(pending: &[(usize, f64, usize)]) -> usize {
    let mut best = 0;
    for (j, p) in pending.iter().enumerate().skip(1) {
        if p.1 > pending[best].1 {
            best = j;
        }
    }
    best
}

fn refresh(ds: &Dataset, pending: &mut [(usize, f64, usize)], mu: &[f64], k: usize) {
    let update = |p: &mut (usize, f64, usize)| {
        let dist = sq_dist(ds.row(p.0), mu);
        if dist < p.1 {
            p.1 = dist;
            p.2 = k;
        }
    };
    if pending.len() >= PAR_MIN_LEN {
        pending.par_iter_mut().with_min_len(512).for_each(update);
    } else {
        pending.iter_mut().for_each(update);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pyp::{partition, update_centers};

    fn line(xs: &[f64]) -> Dataset {
        let rows: Vec<[f64; 1]> = xs.iter().map(|&x| [x]).collect();
        Dataset::from_rows(&rows).unwrap()
    }

    #[test]
    fn hand_trace() {
        let ds = line(&[0.0, 0.2, 10.0]);
        let p = PypParams::pyp(1.0, 0.0);
        let st = ClusterState::initial(&ds);
        let part = partition(&ds, &st, &p);
        let (out, trace) = recluster_dr_traced(&ds, &part, &st, &p);

        let order: Vec<(usize, bool)> = trace.iter().map(|s| (s.point, s.created)).collect();
        assert_eq!(order, vec![(2, true), (0, true), (1, false)]);
        assert!((trace[0].min_dist - 43.56).abs() < 1e-12);
        assert!((trace[1].min_dist - 11.56).abs() < 1e-12);
        assert!((trace[2].min_dist - 0.04).abs() < 1e-12);
        assert_eq!(out.c(), 3);
        assert_eq!(out.centers, vec![3.4, 10.0, 0.0]);
        assert_eq!(out.assignments, vec![2, 2, 1]);
        assert_eq!(out.sizes, vec![0, 1, 2]);

        let up = update_centers(&ds, &out);
        assert_eq!(up.c(), 2);
        assert_eq!(up.centers, vec![10.0, 0.1]);
    }

    #[test]
    fn below_threshold_assigns_to_nearest() {
        let ds = line(&[0.0, 0.5f64.sqrt()]);
        let st = ClusterState {
            centers: vec![0.0],
            d: 1,
            assignments: vec![0, 0],
            sizes: vec![2],
        };
        let part = Partition {
            assignments: vec![Some(0), None],
            d_r: vec![1],
        };
        let (out, trace) = recluster_dr_traced(&ds, &part, &st, &PypParams::pyp(1.0, 0.0));
        assert_eq!(out.c(), 1);
        assert_eq!(out.assignments, vec![0, 0]);
        assert!(!trace[0].created);
    }

    #[test]
    fn cap_forces_assignment() {
        // exp(1 / 1) = 2.718: at most two clusters
        let ds = line(&[0.0, 10.0, 20.0, 30.0]);
        let p = PypParams::pyp(1.0, 1.0);
        let st = ClusterState {
            centers: vec![0.0],
            d: 1,
            assignments: vec![0; 4],
            sizes: vec![4],
        };
        let part = partition(&ds, &st, &p);
        assert_eq!(part.d_r, vec![1, 2, 3]);
        let (out, trace) = recluster_dr_traced(&ds, &part, &st, &p);
        assert_eq!(out.c(), 2);
        assert_eq!(out.centers, vec![0.0, 30.0]);
        assert_eq!(out.assignments, vec![0, 0, 1, 1]);
        assert_eq!(trace.iter().filter(|s| s.created).count(), 1);
    }

    #[test]
    fn equal_distances_pick_lowest_index() {
        let ds = line(&[-5.0, 5.0]);
        let p = PypParams::pyp(1.0, 0.0);
        let st = ClusterState::initial(&ds);
        let part = partition(&ds, &st, &p);
        let (_, trace) = recluster_dr_traced(&ds, &part, &st, &p);
        assert_eq!(trace[0].point, 0);
    }
}
