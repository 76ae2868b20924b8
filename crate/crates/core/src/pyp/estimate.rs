use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::pyp::sq_dist;

/// Data-driven `lambda` with `theta = lambda / ratio`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaEstimate {
    pub lambda: f64,
    pub theta: f64,
}

/// Farthest-first estimate of `lambda` for a rough cluster count, with
/// `theta = lambda / 10`.
pub fn estimate_lambda(ds: &Dataset, rough_c: usize) -> Result<LambdaEstimate> {
    estimate_lambda_with_ratio(ds, rough_c, 10.0)
}

/// Starting from the global mean as the only center, repeatedly promotes the
/// point farthest (by min squared distance) from all centers. `lambda` is the
/// farthest distance observed at the `rough_c`-th selection, i.e. with the
/// mean plus `rough_c - 1` points as centers.
pub fn estimate_lambda_with_ratio(
    ds: &Dataset,
    rough_c: usize,
    theta_ratio: f64,
) -> Result<LambdaEstimate> {
    if rough_c == 0 || rough_c > ds.n() {
        return Err(Error::InvalidParams(format!(
            "rough_c = {rough_c} must lie in 1..={}",
            ds.n()
        )));
    }
    if !(theta_ratio > 0.0) {
        return Err(Error::InvalidParams("theta ratio must be > 0".into()));
    }
    let mean = ds.mean();
    let mut min_d: Vec<f64> = ds.rows().map(|x| sq_dist(x, &mean)).collect();
    let mut lambda = 0.0;
    for k in 1..=rough_c {
        let (far, dist) = min_d
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |b, p| if p.1 > b.1 { p } else { b });
        lambda = dist;
        if k == rough_c {
            break;
        }
        let mu = ds.row(far).to_vec();
        for (m, x) in min_d.iter_mut().zip(ds.rows()) {
            *m = m.min(sq_dist(x, &mu));
        }
    }
    if !(lambda > 0.0) {
        return Err(Error::DegenerateLambda(lambda));
    }
    Ok(LambdaEstimate {
        lambda,
        theta: lambda / theta_ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let ds = Dataset::from_rows(&[[0.0], [10.0]]).unwrap();
        let est = estimate_lambda(&ds, 1).unwrap();
        assert_eq!(est.lambda, 25.0);
        assert_eq!(est.theta, 2.5);
        assert_eq!(estimate_lambda_with_ratio(&ds, 1, 6.0).unwrap().theta, 25.0 / 6.0);

        // mean 5 -> pick 0 (tie, lowest index) -> 10 is 100 away from 0 but
        // 25 from the mean
        assert_eq!(estimate_lambda(&ds, 2).unwrap().lambda, 25.0);

        let ds = Dataset::from_rows(&[[0.0], [1.0], [10.0]]).unwrap();
        // mean 11/3; farthest 10 -> then 0 at 121/9 from the mean
        let est = estimate_lambda(&ds, 2).unwrap();
        assert!((est.lambda - 121.0 / 9.0).abs() < 1e-12);
        // last selection: 1 is 1 away from 0
        assert_eq!(estimate_lambda(&ds, 3).unwrap().lambda, 1.0);
    }

    #[test]
    fn errors() {
        let ds = Dataset::from_rows(&[[3.0, 1.0], [3.0, 1.0]]).unwrap();
        assert!(matches!(estimate_lambda(&ds, 1), Err(Error::DegenerateLambda(_))));
        assert!(estimate_lambda(&ds, 3).is_err());
        assert!(estimate_lambda(&ds, 0).is_err());
    }
}
