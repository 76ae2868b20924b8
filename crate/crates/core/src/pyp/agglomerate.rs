use crate::dataset::Dataset;
use crate::pyp::params::PypParams;
use crate::pyp::state::{penalty, ClusterState};
use crate::pyp::sq_dist;

/// Record of one executed merge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Merge {
    /// Surviving (lower) id before the merge.
    pub kept: usize,
    /// Absorbed id before the merge.
    pub absorbed: usize,
    pub center_dist: f64,
    pub threshold: f64,
    /// `n1 * n2 * |mu1 - mu2|^2 / (n1 + n2)`.
    pub km_increase: f64,
    /// Drop of the c-penalty from `c` to `c - 1` clusters.
    pub penalty_decrease: f64,
}

/// Largest squared center separation at which merging two clusters of sizes
/// `n1`, `n2` lowers the objective, with `c` the count before the merge.
///
/// The value is `(n1 + n2) / (n1 n2)` times the penalty difference
/// `lambda - theta (c ln c - (c - 1) ln(c - 1))`. It may be negative for
/// large `c`, in which case no merge qualifies.
pub fn merge_gain_threshold(params: &PypParams, c: usize, n1: usize, n2: usize) -> f64 {
    let (cf, n1f, n2f) = (c as f64, n1 as f64, n2 as f64);
    let xlnx = |x: f64| if x > 0.0 { x * x.ln() } else { 0.0 };
    let gap = params.lambda - params.effective_theta() * (xlnx(cf) - xlnx(cf - 1.0));
    (n1f + n2f) / (n1f * n2f) * gap
}

/// Executes the single best qualifying merge, if any: among pairs whose
/// squared center separation is below [`merge_gain_threshold`], the one with
/// the smallest ratio of separation to threshold.
///
/// `_ds` is unused because the merged center is the size-weighted mean of the
/// two centers; it is kept for symmetry with the other steps.
pub fn agglomerate_step(
    _ds: &Dataset,
    state: &ClusterState,
    params: &PypParams,
) -> Option<(ClusterState, Merge)> {
    let c = state.c();
    if c < 2 {
        return None;
    }
    let mut best: Option<(f64, Merge)> = None;
    for j in 0..c {
        for k in j + 1..c {
            let (nj, nk) = (state.sizes[j], state.sizes[k]);
            let thr = merge_gain_threshold(params, c, nj, nk);
            if thr <= 0.0 {
                continue;
            }
            let dist = sq_dist(state.center(j), state.center(k));
            if dist >= thr {
                continue;
            }
            let ratio = dist / thr;
            if best.as_ref().is_none_or(|(r, _)| ratio < *r) {
                let (njf, nkf) = (nj as f64, nk as f64);
                best = Some((
                    ratio,
                    Merge {
                        kept: j,
                        absorbed: k,
                        center_dist: dist,
                        threshold: thr,
                        km_increase: njf * nkf * dist / (njf + nkf),
                        penalty_decrease: penalty(params, c) - penalty(params, c - 1),
                    },
                ));
            }
        }
    }
    let (_, merge) = best?;
    Some((merge_pair(state, merge.kept, merge.absorbed), merge))
}

/// Merges cluster `k` into cluster `j < k`; the new center is the
/// size-weighted mean and ids above `k` shift down by one.
pub(crate) fn merge_pair(state: &ClusterState, j: usize, k: usize) -> ClusterState {
    debug_assert!(j < k);
    let d = state.d;
    let (nj, nk) = (state.sizes[j] as f64, state.sizes[k] as f64);
    let merged: Vec<f64> = state
        .center(j)
        .iter()
        .zip(state.center(k))
        .map(|(a, b)| (nj * a + nk * b) / (nj + nk))
        .collect();
    let mut centers = state.centers.clone();
    centers[j * d..(j + 1) * d].copy_from_slice(&merged);
    centers.drain(k * d..(k + 1) * d);
    let mut sizes = state.sizes.clone();
    sizes[j] += sizes[k];
    sizes.remove(k);
    let assignments = state
        .assignments
        .iter()
        .map(|&a| match a.cmp(&k) {
            std::cmp::Ordering::Less => a,
            std::cmp::Ordering::Equal => j,
            std::cmp::Ordering::Greater => a - 1,
        })
        .collect();
    ClusterState {
        centers,
        d,
        assignments,
        sizes,
    }
}

/// Repeats [`agglomerate_step`] until no pair qualifies. Every executed
/// merge strictly lowers the objective.
pub fn agglomerate(ds: &Dataset, state: &ClusterState, params: &PypParams) -> (ClusterState, Vec<Merge>) {
    let mut cur = state.clone();
    let mut merges = Vec::new();
    while let Some((next, m)) = agglomerate_step(ds, &cur, params) {
        cur = next;
        merges.push(m);
    }
    (cur, merges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pyp::{km_cost, objective};

    fn line(xs: &[f64]) -> Dataset {
        let rows: Vec<[f64; 1]> = xs.iter().map(|&x| [x]).collect();
        Dataset::from_rows(&rows).unwrap()
    }

    #[test]
    fn gain_threshold_examples() {
        assert_eq!(merge_gain_threshold(&PypParams::pyp(1.0, 0.0), 2, 2, 2), 1.0);
        // 2 (1 - 0.3 (3 ln 3 - 2 ln 2)), evaluated to 30 digits with mpmath
        let v = merge_gain_threshold(&PypParams::pyp(1.0, 0.3), 3, 1, 1);
        assert!((v - 0.854_274_497_069_336_9).abs() < 1e-14, "{v}");
        // negative gap for large c
        assert!(merge_gain_threshold(&PypParams::pyp(1.0, 0.5), 6, 1, 1) < 0.0);
    }

    #[test]
    fn two_by_two_illustration() {
        // Two 2-point clusters whose centers are 0.8 r apart, with r = lambda.
        let r = 1.0;
        let half = 0.8f64.sqrt() / 2.0;
        let ds = Dataset::from_rows(&[[-half, 0.1], [-half, -0.1], [half, 0.1], [half, -0.1]]).unwrap();
        let st = ClusterState::from_assignments(&ds, vec![0, 0, 1, 1]);
        let p = PypParams::pyp(r, 0.0);
        let thr = merge_gain_threshold(&p, 2, 2, 2);
        assert_eq!(thr, r);
        let (out, merges) = agglomerate(&ds, &st, &p);
        assert_eq!(merges.len(), 1);
        assert!((merges[0].center_dist - 0.8 * r).abs() < 1e-12);
        assert_eq!(out.c(), 1);
    }

    #[test]
    fn singleton_merge_example() {
        let ds = line(&[0.0, 2.0]);
        let st = ClusterState::from_assignments(&ds, vec![0, 1]);
        let p = PypParams::pyp(5.0, 0.0);
        let before_km = km_cost(&ds, &st);
        let before = objective(&ds, &st, &p);
        let (out, merges) = agglomerate(&ds, &st, &p);
        assert_eq!(merges[0].threshold, 10.0);
        assert_eq!(out.c(), 1);
        assert_eq!(out.centers, vec![1.0]);
        assert_eq!(km_cost(&ds, &out) - before_km, 2.0);
        assert_eq!(merges[0].km_increase, 2.0);
        assert_eq!(merges[0].penalty_decrease, 5.0);
        assert_eq!(before - objective(&ds, &out, &p), 3.0);
    }

    #[test]
    fn no_merge_cases() {
        let ds = line(&[0.0, 10.0]);
        let st = ClusterState::from_assignments(&ds, vec![0, 1]);
        let (out, merges) = agglomerate(&ds, &st, &PypParams::pyp(1.0, 0.0));
        assert!(merges.is_empty());
        assert_eq!(out, st);

        let one = ClusterState::initial(&ds);
        assert_eq!(agglomerate(&ds, &one, &PypParams::pyp(100.0, 0.0)).0, one);
    }

    #[test]
    fn cascades_best_pair_first() {
        // 0 and 1 are closest; after merging them the result absorbs 3.
        let ds = line(&[0.0, 1.0, 3.0, 100.0]);
        let st = ClusterState::from_assignments(&ds, vec![0, 1, 2, 3]);
        let (out, merges) = agglomerate(&ds, &st, &PypParams::pyp(5.0, 0.0));
        assert_eq!((merges[0].kept, merges[0].absorbed), (0, 1));
        assert_eq!(out.c(), 2);
        assert_eq!(out.assignments, vec![0, 0, 0, 1]);
        assert!((out.centers[0] - 4.0 / 3.0).abs() < 1e-12);
    }
}
