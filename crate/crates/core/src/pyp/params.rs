use crate::error::{Error, Result};

/// Which member of the algorithm family to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Cluster-count dependent threshold `lambda - ln(c) * theta`.
    Pyp,
    /// Fixed threshold `lambda` (theta pinned to zero).
    Dp,
    /// Lloyd's algorithm with a fixed number of clusters.
    KMeans,
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pyp" => Ok(Variant::Pyp),
            "dp" => Ok(Variant::Dp),
            "kmeans" => Ok(Variant::KMeans),
            other => Err(Error::InvalidParams(format!("unknown variant {other:?}"))),
        }
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Variant::Pyp => "pyp",
            Variant::Dp => "dp",
            Variant::KMeans => "kmeans",
        })
    }
}

/// Parameters of a fit. `lambda` and `theta` are on the squared-distance
/// scale.
#[derive(Debug, Clone, PartialEq)]
pub struct PypParams {
    pub lambda: f64,
    pub theta: f64,
    pub max_iter: usize,
    /// Absolute tolerance on the change of the objective.
    pub tol: f64,
    pub agglomeration: bool,
    pub variant: Variant,
    /// Cluster count for [`Variant::KMeans`].
    pub fixed_c: Option<usize>,
    pub seed: u64,
    /// Compare `min_dist - theta` instead of `min_dist` against the
    /// threshold when deciding whether a point is out of reach.
    pub alg1_offset: bool,
}

impl Default for PypParams {
    fn default() -> Self {
        PypParams {
            lambda: 1.0,
            theta: 0.0,
            max_iter: 200,
            tol: 1e-9,
            agglomeration: true,
            variant: Variant::Pyp,
            fixed_c: None,
            seed: 0,
            alg1_offset: false,
        }
    }
}

impl PypParams {
    pub fn pyp(lambda: f64, theta: f64) -> Self {
        PypParams {
            lambda,
            theta,
            ..Default::default()
        }
    }

    pub fn dp(lambda: f64) -> Self {
        PypParams {
            lambda,
            variant: Variant::Dp,
            ..Default::default()
        }
    }

    pub fn kmeans(k: usize) -> Self {
        PypParams {
            variant: Variant::KMeans,
            fixed_c: Some(k),
            agglomeration: false,
            ..Default::default()
        }
    }

    pub fn with_agglomeration(mut self, on: bool) -> Self {
        self.agglomeration = on;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    /// Theta as actually used: zero for dp-means.
    pub fn effective_theta(&self) -> f64 {
        match self.variant {
            Variant::Dp => 0.0,
            _ => self.theta,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iter == 0 {
            return Err(Error::InvalidParams("max_iter must be >= 1".into()));
        }
        if !(self.tol >= 0.0) {
            return Err(Error::InvalidParams("tol must be >= 0".into()));
        }
        match self.variant {
            Variant::KMeans => match self.fixed_c {
                Some(k) if k >= 1 => Ok(()),
                _ => Err(Error::InvalidParams("kmeans requires fixed_c >= 1".into())),
            },
            Variant::Pyp | Variant::Dp => {
                if !(self.lambda > 0.0 && self.lambda.is_finite()) {
                    return Err(Error::InvalidParams(format!(
                        "lambda must be finite and > 0, got {}",
                        self.lambda
                    )));
                }
                if !(self.theta >= 0.0 && self.theta.is_finite()) {
                    return Err(Error::InvalidParams(format!(
                        "theta must be finite and >= 0, got {}",
                        self.theta
                    )));
                }
                Ok(())
            }
        }
    }

    /// Whether `c` clusters respect `c < exp(lambda / theta)`.
    pub(crate) fn within_cap(&self, c: usize) -> bool {
        let theta = self.effective_theta();
        theta == 0.0 || (c as f64).ln() < self.lambda / theta
    }

    /// Whether a cluster may be opened when `c` already exist.
    pub(crate) fn can_grow(&self, c: usize) -> bool {
        self.within_cap(c + 1)
    }

    /// True when a point at squared distance `dist` from its nearest center
    /// is out of reach of all `c` centers.
    pub(crate) fn is_out(&self, dist: f64, c: usize) -> bool {
        let thr = self.lambda - (c as f64).ln() * self.effective_theta();
        if self.alg1_offset {
            dist - self.effective_theta() > thr
        } else {
            dist > thr
        }
    }
}

/// New-cluster threshold `lambda - ln(c) * theta` for `c` existing clusters.
///
/// Fails with [`Error::ClusterCapReached`] once `c >= exp(lambda / theta)`.
pub fn threshold(params: &PypParams, c: usize) -> Result<f64> {
    if c == 0 {
        return Err(Error::InvalidParams("cluster count must be >= 1".into()));
    }
    let theta = params.effective_theta();
    if !params.within_cap(c) {
        return Err(Error::ClusterCapReached {
            c,
            cap: (params.lambda / theta).exp(),
        });
    }
    Ok(params.lambda - (c as f64).ln() * theta)
}
