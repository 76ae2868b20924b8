//! Spectral variant: eigendecompose a kernel matrix, choose the number of
//! clusters from where the eigenvalues cross the shrinking threshold
//! `lambda - ln(c) * theta`, and run k-means on the rows of the top-`c`
//! eigenvector matrix.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::pyp::{fit, sq_dist, PypParams, RunResult};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelKind {
    /// `exp(-|x - y|^2 / (2 sigma^2))`
    Rbf { sigma: f64 },
    /// `<x, y>`
    Linear,
}

impl KernelKind {
    /// RBF with `sigma` set to the median pairwise Euclidean distance (1 if
    /// every pair coincides).
    pub fn rbf_median(ds: &Dataset) -> Self {
        let mut dists = Vec::with_capacity(ds.n() * ds.n().saturating_sub(1) / 2);
        for i in 0..ds.n() {
            for j in i + 1..ds.n() {
                dists.push(sq_dist(ds.row(i), ds.row(j)).sqrt());
            }
        }
        let sigma = if dists.is_empty() {
            1.0
        } else {
            let mid = dists.len() / 2;
            *dists.select_nth_unstable_by(mid, f64::total_cmp).1
        };
        KernelKind::Rbf {
            sigma: if sigma > 0.0 { sigma } else { 1.0 },
        }
    }
}

/// Symmetric `n x n` kernel matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelMatrix {
    pub values: DMatrix<f64>,
}

impl KernelMatrix {
    /// Validates symmetry (to 1e-12) and finiteness.
    pub fn new(values: DMatrix<f64>) -> Result<Self> {
        if !values.is_square() {
            return Err(Error::InvalidParams("kernel matrix must be square".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams("kernel matrix has non-finite entries".into()));
        }
        let n = values.nrows();
        for i in 0..n {
            for j in i + 1..n {
                if (values[(i, j)] - values[(j, i)]).abs() > 1e-12 {
                    return Err(Error::InvalidParams(format!(
                        "kernel matrix not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(KernelMatrix { values })
    }

    pub fn n(&self) -> usize {
        self.values.nrows()
    }
}

/// Eigenvalues in descending order with matching orthonormal eigenvector
/// columns.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: DMatrix<f64>,
}

pub fn build_kernel(ds: &Dataset, kind: KernelKind) -> Result<KernelMatrix> {
    if let KernelKind::Rbf { sigma } = kind {
        if !(sigma > 0.0) {
            return Err(Error::InvalidParams("rbf sigma must be > 0".into()));
        }
    }
    let n = ds.n();
    let mut k = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = match kind {
                KernelKind::Rbf { sigma } => {
                    (-sq_dist(ds.row(i), ds.row(j)) / (2.0 * sigma * sigma)).exp()
                }
                KernelKind::Linear => ds.row(i).iter().zip(ds.row(j)).map(|(a, b)| a * b).sum(),
            };
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
    }
    Ok(KernelMatrix { values: k })
}

/// Symmetric eigendecomposition (Householder tridiagonalization followed by
/// implicit QR), sorted by descending eigenvalue.
pub fn eigen(kernel: &KernelMatrix) -> Result<EigenSystem> {
    let n = kernel.n();
    let dec = SymmetricEigen::try_new(kernel.values.clone(), 1e-12, 10_000)
        .ok_or_else(|| Error::Eigen("symmetric QR iteration did not converge".into()))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| dec.eigenvalues[b].total_cmp(&dec.eigenvalues[a]).then(a.cmp(&b)));
    let eigenvalues = order.iter().map(|&i| dec.eigenvalues[i]).collect();
    let eigenvectors = DMatrix::from_fn(n, n, |r, c| dec.eigenvectors[(r, order[c])]);
    Ok(EigenSystem {
        eigenvalues,
        eigenvectors,
    })
}

/// Number of clusters read off a descending spectrum.
///
/// Scans `c` from `n - 1` down to 1 and returns the first `c` with
/// `ev[c] > lambda - ln(c) theta` and `ev[c + 1] < lambda - ln(c + 1) theta`
/// (1-based). Failing that, the largest `c` with `ev[c]` above its
/// threshold, and failing that 1.
pub fn select_c(eigenvalues: &[f64], lambda: f64, theta: f64) -> usize {
    let n = eigenvalues.len();
    let thr = |c: usize| lambda - (c as f64).ln() * theta;
    let above = |c: usize| eigenvalues[c - 1] > thr(c);
    for c in (1..n).rev() {
        if above(c) && eigenvalues[c] < thr(c + 1) {
            return c;
        }
    }
    (1..=n).rev().find(|&c| above(c)).unwrap_or(1)
}

/// `tr(Y^T (K - t I) Y)` for the threshold `t = lambda - ln(c) theta`,
/// where `c` is the number of columns of `y`.
pub fn trace_objective(kernel: &KernelMatrix, y: &DMatrix<f64>, lambda: f64, theta: f64) -> f64 {
    let c = y.ncols();
    let t = lambda - (c as f64).ln() * theta;
    let shifted = &kernel.values - DMatrix::identity(kernel.n(), kernel.n()) * t;
    (y.transpose() * shifted * y).trace()
}

/// Clusters a precomputed kernel: eigendecompose, select `c`, embed each
/// point as its row of the top-`c` eigenvectors, and run k-means with
/// `fixed_c = c` on the embedding.
pub fn spectral_fit_kernel(
    kernel: &KernelMatrix,
    lambda: f64,
    theta: f64,
    seed: u64,
) -> Result<(RunResult, EigenSystem)> {
    let sys = eigen(kernel)?;
    let c = select_c(&sys.eigenvalues, lambda, theta);
    let n = kernel.n();
    let mut emb = Vec::with_capacity(n * c);
    for i in 0..n {
        for j in 0..c {
            emb.push(sys.eigenvectors[(i, j)]);
        }
    }
    let emb = Dataset::new(emb, n, c, None, None)?;
    let run = fit(&emb, &PypParams::kmeans(c).with_seed(seed))?;
    Ok((run, sys))
}

pub fn spectral_fit(
    ds: &Dataset,
    kind: KernelKind,
    lambda: f64,
    theta: f64,
    seed: u64,
) -> Result<RunResult> {
    let k = build_kernel(ds, kind)?;
    Ok(spectral_fit_kernel(&k, lambda, theta, seed)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_examples() {
        let ds = Dataset::from_rows(&[[0.3, 0.7], [0.3, 0.7]]).unwrap();
        let k = build_kernel(&ds, KernelKind::Rbf { sigma: 0.1 }).unwrap();
        assert_eq!(k.values, DMatrix::from_element(2, 2, 1.0));

        let ds = Dataset::from_rows(&[[1.0, 0.0], [0.0, 1.0]]).unwrap();
        let k = build_kernel(&ds, KernelKind::Linear).unwrap();
        assert_eq!(k.values, DMatrix::identity(2, 2));

        let ds = Dataset::from_rows(&[[0.0], [1.0], [5.0]]).unwrap();
        let k = build_kernel(&ds, KernelKind::Rbf { sigma: 1e9 }).unwrap();
        assert!(k.values.iter().all(|v| (v - 1.0).abs() < 1e-15));
        assert!(build_kernel(&ds, KernelKind::Rbf { sigma: 0.0 }).is_err());
    }

    #[test]
    fn select_c_examples() {
        // lambda_2 = 0.5 < 1 - 0.1 ln 2 = 0.9307
        assert_eq!(select_c(&[5.0, 0.5, 0.1], 1.0, 0.1), 1);
        assert_eq!(select_c(&[5.0, 4.0, 0.1], 1.0, 0.0), 2);
        assert_eq!(select_c(&[0.5, 0.4, 0.1], 1.0, 0.0), 1);
        assert_eq!(select_c(&[3.0, 2.0], 1.0, 0.0), 2);
        assert_eq!(select_c(&[7.0], 1.0, 0.0), 1);
    }

    #[test]
    fn select_c_ignores_appended_small_eigenvalues() {
        let base = [9.0, 6.0, 2.5, 1.2, 0.9, 0.3];
        for (lambda, theta) in [(1.0, 0.0), (2.0, 0.3), (5.0, 1.0), (0.1, 0.0)] {
            let c = select_c(&base, lambda, theta);
            let mut ext = base.to_vec();
            ext.extend([-1e6, -2e6]);
            assert_eq!(select_c(&ext, lambda, theta), c);
        }
    }

    #[test]
    fn rejects_asymmetric_kernel() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.4, 1.0]);
        assert!(KernelMatrix::new(m).is_err());
    }

    #[test]
    fn single_point() {
        let ds = Dataset::from_rows(&[[1.0, 2.0]]).unwrap();
        let run = spectral_fit(&ds, KernelKind::rbf_median(&ds), 0.5, 0.0, 0).unwrap();
        assert_eq!(run.state.c(), 1);
        assert_eq!(run.state.assignments, vec![0]);
    }

    #[test]
    fn duplicates_share_a_cluster() {
        let ds = Dataset::from_rows(&[[0.0, 0.0], [0.0, 0.0], [5.0, 5.0], [5.1, 5.0], [0.1, 0.0]]).unwrap();
        let run = spectral_fit(&ds, KernelKind::Rbf { sigma: 1.0 }, 0.5, 0.0, 3).unwrap();
        assert_eq!(run.state.c(), 2);
        let a = &run.state.assignments;
        assert_eq!(a[0], a[1]);
        assert_eq!(a[0], a[4]);
        assert_eq!(a[2], a[3]);
        assert_ne!(a[0], a[2]);
    }
}
