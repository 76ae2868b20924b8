//! Partition-comparison and cluster-size metrics.
//!
//! Label values are arbitrary; only the induced partitions matter. ACC is on
//! the 0-100 scale, NMI on 0-1, both with natural logarithms.

mod hungarian;

use std::collections::BTreeMap;

pub use hungarian::min_cost_assignment;

use crate::error::{Error, Result};

/// Counts `n_ij` of points with true class `i` and predicted cluster `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    pub counts: Vec<Vec<u64>>,
    pub row_sums: Vec<u64>,
    pub col_sums: Vec<u64>,
    pub total: u64,
}

impl ContingencyTable {
    /// Rows follow the sorted distinct true labels, columns the sorted
    /// distinct predicted labels.
    pub fn new(true_labels: &[usize], pred_labels: &[usize]) -> Result<Self> {
        if true_labels.len() != pred_labels.len() {
            return Err(Error::LengthMismatch {
                left: true_labels.len(),
                right: pred_labels.len(),
            });
        }
        if true_labels.is_empty() {
            return Err(Error::InvalidDataset("no labels".into()));
        }
        let rows = dense_ids(true_labels);
        let cols = dense_ids(pred_labels);
        let (kr, kc) = (rows.len(), cols.len());
        let mut counts = vec![vec![0u64; kc]; kr];
        for (t, p) in true_labels.iter().zip(pred_labels) {
            counts[rows[t]][cols[p]] += 1;
        }
        let row_sums = counts.iter().map(|r| r.iter().sum()).collect();
        let col_sums = (0..kc).map(|j| counts.iter().map(|r| r[j]).sum()).collect();
        Ok(ContingencyTable {
            counts,
            row_sums,
            col_sums,
            total: true_labels.len() as u64,
        })
    }
}

fn dense_ids(labels: &[usize]) -> BTreeMap<usize, usize> {
    let mut ids: BTreeMap<usize, usize> = labels.iter().map(|&l| (l, 0)).collect();
    for (i, v) in ids.values_mut().enumerate() {
        *v = i;
    }
    ids
}

/// Clustering accuracy in percent under the best one-to-one mapping of
/// predicted clusters onto true classes (Hungarian assignment; the smaller
/// side is padded with empty dummy labels).
pub fn accuracy(true_labels: &[usize], pred_labels: &[usize]) -> Result<f64> {
    let table = ContingencyTable::new(true_labels, pred_labels)?;
    let matched = matched_count(&table);
    Ok(100.0 * matched as f64 / table.total as f64)
}

/// Largest number of points that agree under a one-to-one label mapping.
pub fn matched_count(table: &ContingencyTable) -> u64 {
    let k = table.row_sums.len().max(table.col_sums.len());
    let cost: Vec<Vec<i64>> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| {
                    let c = table.counts.get(i).and_then(|r| r.get(j)).copied().unwrap_or(0);
                    -(c as i64)
                })
                .collect()
        })
        .collect();
    let assignment = min_cost_assignment(&cost);
    assignment
        .iter()
        .enumerate()
        .map(|(i, &j)| (-cost[i][j]) as u64)
        .sum()
}

/// Normalized mutual information `I(X;Y) / sqrt(H(X) H(Y))`.
///
/// When either partition has a single block the ratio is 0/0; the result is
/// 1 if both are single-block and 0 otherwise.
pub fn nmi(true_labels: &[usize], pred_labels: &[usize]) -> Result<f64> {
    let t = ContingencyTable::new(true_labels, pred_labels)?;
    let n = t.total as f64;
    let entropy = |sums: &[u64]| -> f64 {
        sums.iter()
            .filter(|&&s| s > 0)
            .map(|&s| s as f64 / n * (n / s as f64).ln())
            .sum()
    };
    let hx = entropy(&t.row_sums);
    let hy = entropy(&t.col_sums);
    if hx == 0.0 || hy == 0.0 {
        return Ok(if hx == 0.0 && hy == 0.0 { 1.0 } else { 0.0 });
    }
    if is_bijective(&t) {
        return Ok(1.0);
    }
    let mut mi = 0.0;
    for (i, row) in t.counts.iter().enumerate() {
        for (j, &nij) in row.iter().enumerate() {
            if nij == 0 {
                continue;
            }
            let nij = nij as f64;
            let ratio = (n * nij) / (t.row_sums[i] as f64 * t.col_sums[j] as f64);
            mi += nij / n * ratio.ln();
        }
    }
    Ok((mi / (hx * hy).sqrt()).clamp(0.0, 1.0))
}

/// Each row and each column has exactly one non-empty cell.
fn is_bijective(t: &ContingencyTable) -> bool {
    t.row_sums.len() == t.col_sums.len()
        && t.counts
            .iter()
            .all(|r| r.iter().filter(|&&c| c > 0).count() == 1)
        && (0..t.col_sums.len()).all(|j| t.counts.iter().filter(|r| r[j] > 0).count() == 1)
}

/// Ratio of found to true cluster counts. `found_c` may be an average over
/// runs.
pub fn discovery_rate(found_c: f64, true_c: usize) -> Result<f64> {
    if true_c == 0 {
        return Err(Error::InvalidParams("true cluster count must be >= 1".into()));
    }
    Ok(found_c / true_c as f64)
}

/// Maximum-likelihood power-law exponent of a cluster-size multiset,
/// `1 + c / sum(ln(x_i / x_min))`. Equal sizes give `+inf`.
pub fn alpha_hat(sizes: &[usize]) -> Result<f64> {
    let Some(&xmin) = sizes.iter().min() else {
        return Err(Error::InvalidParams("alpha_hat needs at least one size".into()));
    };
    if xmin == 0 {
        return Err(Error::InvalidParams("cluster sizes must be positive".into()));
    }
    let s: f64 = sizes
        .iter()
        .map(|&x| (x as f64 / xmin as f64).ln())
        .sum();
    if s == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(1.0 + sizes.len() as f64 / s)
}

/// Sizes of the blocks of a labelling.
pub fn cluster_sizes(labels: &[usize]) -> Vec<usize> {
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for &l in labels {
        *counts.entry(l).or_default() += 1;
    }
    counts.into_values().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Brute-force ACC over every injective relabeling of predicted ids.
    fn brute_accuracy(t: &[usize], p: &[usize]) -> f64 {
        let tk = dense_ids(t);
        let pk = dense_ids(p);
        let k = tk.len().max(pk.len());
        let mut perm: Vec<usize> = (0..k).collect();
        let mut best = 0usize;
        permute(&mut perm, 0, &mut |perm| {
            let hits = t
                .iter()
                .zip(p)
                .filter(|(a, b)| perm[pk[b]] == tk[a])
                .count();
            best = best.max(hits);
        });
        100.0 * best as f64 / t.len() as f64
    }

    fn permute(v: &mut Vec<usize>, i: usize, f: &mut dyn FnMut(&[usize])) {
        if i == v.len() {
            f(v);
            return;
        }
        for j in i..v.len() {
            v.swap(i, j);
            permute(v, i + 1, f);
            v.swap(i, j);
        }
    }

    #[test]
    fn accuracy_examples() {
        assert_eq!(accuracy(&[1, 1, 2], &[2, 2, 1]).unwrap(), 100.0);
        assert_eq!(accuracy(&[1, 1, 2, 2], &[1, 2, 2, 2]).unwrap(), 75.0);
        assert_eq!(brute_accuracy(&[1, 1, 2, 2], &[1, 2, 2, 2]), 75.0);
        assert_eq!(accuracy(&[3, 1, 4, 1, 5], &[3, 1, 4, 1, 5]).unwrap(), 100.0);
        assert!(matches!(accuracy(&[1], &[1, 2]), Err(Error::LengthMismatch { .. })));
        // more predicted clusters than classes
        assert_eq!(accuracy(&[1, 1, 1, 1], &[1, 2, 3, 3]).unwrap(), 50.0);
    }

    #[test]
    fn nmi_examples() {
        assert_eq!(nmi(&[1, 1, 2, 2, 3], &[1, 1, 2, 2, 3]).unwrap(), 1.0);
        assert_eq!(nmi(&[1, 1, 2, 2], &[1, 2, 1, 2]).unwrap(), 0.0);
        // direct contingency arithmetic, cross-checked by an mpmath entropy
        // computation H(X) + H(Y) - H(X,Y)
        let v = nmi(&[1, 1, 2, 2], &[1, 1, 1, 2]).unwrap();
        assert!((v - 0.345_592_029_944_211_36).abs() < 1e-14, "{v}");
        assert_eq!(nmi(&[1, 1, 1], &[4, 4, 4]).unwrap(), 1.0);
        assert_eq!(nmi(&[1, 1, 1], &[1, 2, 3]).unwrap(), 0.0);
        assert!(nmi(&[1], &[1, 1]).is_err());
    }

    #[test]
    fn contingency_sums() {
        let t = ContingencyTable::new(&[1, 1, 2, 2], &[1, 1, 1, 2]).unwrap();
        assert_eq!(t.counts, vec![vec![2, 0], vec![1, 1]]);
        assert_eq!(t.row_sums, vec![2, 2]);
        assert_eq!(t.col_sums, vec![3, 1]);
        assert_eq!(t.total, 4);
    }

    #[test]
    fn discovery_rate_examples() {
        assert_eq!(discovery_rate(10.0, 10).unwrap(), 1.0);
        assert_eq!(discovery_rate(9.0, 10).unwrap(), 0.9);
        let v = discovery_rate(53.8, 51).unwrap();
        assert!((v - 1.0549).abs() < 1e-4);
        assert!(discovery_rate(1.0, 0).is_err());
    }

    #[test]
    fn alpha_hat_examples() {
        assert_eq!(alpha_hat(&[330, 330, 330, 330, 330, 330, 330]).unwrap(), f64::INFINITY);
        assert_eq!(alpha_hat(&[5]).unwrap(), f64::INFINITY);
        // 1 + 3 / ln(200/30), evaluated to 30 digits with mpmath
        let v = alpha_hat(&[200, 30, 30]).unwrap();
        assert!((v - 2.581_344_366_144_801_8).abs() < 1e-14, "{v}");
        let mut sizes = vec![200, 200];
        sizes.extend([30; 8]);
        let v = alpha_hat(&sizes).unwrap();
        assert!((v - 3.635_573_943_574_67).abs() < 1e-14, "{v}");
        assert!(alpha_hat(&[]).is_err());
        assert!(alpha_hat(&[0, 3]).is_err());
    }

    fn labels(max_k: usize) -> impl Strategy<Value = (Vec<usize>, Vec<usize>)> {
        (1usize..40).prop_flat_map(move |n| {
            (
                proptest::collection::vec(1..=max_k, n),
                proptest::collection::vec(1..=max_k, n),
            )
        })
    }

    proptest! {
        #[test]
        fn hungarian_matches_brute_force((t, p) in labels(6)) {
            prop_assert_eq!(accuracy(&t, &p).unwrap(), brute_accuracy(&t, &p));
        }

        #[test]
        fn nmi_symmetric_bounded_relabel_invariant((t, p) in labels(5), shift in 1usize..50) {
            let a = nmi(&t, &p).unwrap();
            let b = nmi(&p, &t).unwrap();
            prop_assert!((a - b).abs() < 1e-12);
            prop_assert!((0.0..=1.0).contains(&a));
            let relabeled: Vec<usize> = p.iter().map(|x| 100 - x + shift).collect();
            prop_assert!((nmi(&t, &relabeled).unwrap() - a).abs() < 1e-12);
            prop_assert_eq!(accuracy(&t, &relabeled).unwrap(), accuracy(&t, &p).unwrap());
        }

        #[test]
        fn alpha_hat_scale_free(sizes in proptest::collection::vec(1usize..500, 1..20), k in 1usize..20) {
            let scaled: Vec<usize> = sizes.iter().map(|s| s * k).collect();
            prop_assert_eq!(alpha_hat(&sizes).unwrap(), alpha_hat(&scaled).unwrap());
        }
    }
}
