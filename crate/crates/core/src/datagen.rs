//! Power-law Gaussian mixtures: a few large "head" clusters and many small
//! "tail" clusters, each `N(mu_k, I)` around a center drawn uniformly in a
//! cube.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::dataset::Dataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub c: usize,
    pub d: usize,
    pub big_size: usize,
    pub small_size: usize,
    pub n_big: usize,
    pub center_box: f64,
    /// Redraw any center closer than this to an earlier one.
    pub min_center_dist: Option<f64>,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            c: 10,
            d: 3,
            big_size: 200,
            small_size: 30,
            n_big: 2,
            center_box: 20.0,
            min_center_dist: None,
            seed: 0,
        }
    }
}

impl SynthSpec {
    pub fn new(c: usize, seed: u64) -> Self {
        SynthSpec {
            c,
            n_big: c.min(2),
            seed,
            ..Default::default()
        }
    }

    /// Points generated for cluster `k` (zero-based).
    pub fn size_of(&self, k: usize) -> usize {
        if k < self.n_big {
            self.big_size
        } else {
            self.small_size
        }
    }

    pub fn sizes(&self) -> Vec<usize> {
        (0..self.c).map(|k| self.size_of(k)).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.c == 0 || self.d == 0 || self.big_size == 0 || self.small_size == 0 {
            return Err(Error::InvalidParams(
                "c, d and cluster sizes must be >= 1".into(),
            ));
        }
        if self.n_big > self.c {
            return Err(Error::InvalidParams("n_big must not exceed c".into()));
        }
        if !(self.center_box > 0.0) {
            return Err(Error::InvalidParams("center_box must be > 0".into()));
        }
        Ok(())
    }
}

/// Draws the cluster centers, one `d`-vector per cluster.
pub fn draw_centers(spec: &SynthSpec, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut centers: Vec<Vec<f64>> = Vec::with_capacity(spec.c);
    // Rejection can stall in a crowded box; give up on the separation
    // requirement after this many tries per center.
    const MAX_TRIES: usize = 10_000;
    while centers.len() < spec.c {
        let mut tries = 0;
        let mu = loop {
            let mu: Vec<f64> = (0..spec.d)
                .map(|_| rng.random_range(0.0..spec.center_box))
                .collect();
            tries += 1;
            let ok = spec.min_center_dist.is_none_or(|min| {
                centers.iter().all(|o| {
                    o.iter().zip(&mu).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() >= min * min
                })
            });
            if ok || tries >= MAX_TRIES {
                break mu;
            }
        };
        centers.push(mu);
    }
    centers
}

/// Generates the dataset with labels `1..=c` and returns it together with
/// the true centers.
pub fn generate_with_centers(spec: &SynthSpec) -> Result<(Dataset, Vec<Vec<f64>>)> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let centers = draw_centers(spec, &mut rng);
    let n: usize = spec.sizes().iter().sum();
    let mut points = Vec::with_capacity(n * spec.d);
    let mut labels = Vec::with_capacity(n);
    for (k, mu) in centers.iter().enumerate() {
        for _ in 0..spec.size_of(k) {
            for &m in mu {
                let z: f64 = rng.sample(StandardNormal);
                points.push(m + z);
            }
            labels.push(k + 1);
        }
    }
    let ds = Dataset::new(points, n, spec.d, Some(labels), None)?;
    Ok((ds, centers))
}

pub fn generate(spec: &SynthSpec) -> Result<Dataset> {
    Ok(generate_with_centers(spec)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::{alpha_hat, cluster_sizes};

    #[test]
    fn size_bookkeeping() {
        let spec = SynthSpec {
            n_big: 1,
            ..SynthSpec::new(3, 1)
        };
        let ds = generate(&spec).unwrap();
        assert_eq!(ds.n(), 260);
        assert_eq!(ds.d(), 3);
        assert_eq!(cluster_sizes(ds.labels().unwrap()), vec![200, 30, 30]);
    }

    #[test]
    fn single_cluster() {
        let ds = generate(&SynthSpec::new(1, 4)).unwrap();
        let sizes = cluster_sizes(ds.labels().unwrap());
        assert_eq!(sizes, vec![200]);
        assert_eq!(alpha_hat(&sizes).unwrap(), f64::INFINITY);
    }

    #[test]
    fn ten_clusters_alpha() {
        let ds = generate(&SynthSpec::new(10, 2)).unwrap();
        let v = alpha_hat(&cluster_sizes(ds.labels().unwrap())).unwrap();
        // 1 + 10 / (2 ln(200/30))
        assert!((v - 3.635_573_943_574_67).abs() < 1e-12);
    }

    #[test]
    fn deterministic_and_means_near_centers() {
        let spec = SynthSpec::new(6, 11);
        let (a, centers) = generate_with_centers(&spec).unwrap();
        assert_eq!(generate(&spec).unwrap(), a);
        let labels = a.labels().unwrap();
        for (k, mu) in centers.iter().enumerate() {
            let rows: Vec<&[f64]> = a
                .rows()
                .zip(labels)
                .filter(|(_, &l)| l == k + 1)
                .map(|(r, _)| r)
                .collect();
            let size = rows.len();
            assert_eq!(size, spec.size_of(k));
            let dist: f64 = (0..spec.d)
                .map(|j| {
                    let m = rows.iter().map(|r| r[j]).sum::<f64>() / size as f64;
                    (m - mu[j]).powi(2)
                })
                .sum::<f64>()
                .sqrt();
            assert!(dist <= 4.0 * (spec.d as f64 / size as f64).sqrt(), "cluster {k}: {dist}");
        }
    }

    #[test]
    fn separation_is_enforced() {
        let spec = SynthSpec {
            min_center_dist: Some(6.0),
            ..SynthSpec::new(10, 5)
        };
        let (_, centers) = generate_with_centers(&spec).unwrap();
        for i in 0..centers.len() {
            for j in i + 1..centers.len() {
                let d2: f64 = centers[i].iter().zip(&centers[j]).map(|(a, b)| (a - b).powi(2)).sum();
                assert!(d2.sqrt() >= 6.0);
            }
        }
    }

    #[test]
    fn invalid_spec() {
        let spec = SynthSpec {
            n_big: 5,
            ..SynthSpec::new(3, 0)
        };
        assert!(generate(&spec).is_err());
    }
}
