//! Modified Pólya urn whose new-color weight grows with the number of colors.
//!
//! With `c` colors in the urn and `n_k` balls of color `k`, the next ball
//! takes color `k` with weight `n_k * exp(theta / 2eps)` and a new color with
//! weight `lambda * exp(ln(c) * theta / 2eps)`. At `theta = 0` this is the
//! Chinese restaurant process with concentration `lambda`.
//!
//! Colors are numbered from 1 in order of creation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct UrnConfig {
    pub lambda_raw: f64,
    pub theta_raw: f64,
    pub epsilon: f64,
    pub n_draws: usize,
    pub seed: u64,
}

impl UrnConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda_raw > 0.0 && self.theta_raw >= 0.0 && self.epsilon > 0.0) {
            return Err(Error::InvalidParams(
                "urn needs lambda_raw > 0, theta_raw >= 0, epsilon > 0".into(),
            ));
        }
        if self.n_draws == 0 {
            return Err(Error::InvalidParams("n_draws must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UrnTrace {
    /// Color of every ball in draw order.
    pub colors: Vec<usize>,
    /// Final number of balls per color, indexed by color - 1.
    pub sizes: Vec<usize>,
}

/// Allocation probabilities for the next ball: one entry per existing color
/// followed by the new-color probability.
pub fn alloc_weights(cfg: &UrnConfig, sizes: &[usize]) -> Vec<f64> {
    let a = cfg.theta_raw / (2.0 * cfg.epsilon);
    let ln_c = (sizes.len() as f64).ln();
    // Rescale only when exp would overflow, so theta = 0 stays exact.
    let nmax = sizes.iter().copied().max().unwrap_or(1) as f64;
    let top = (nmax.ln() + a).max(cfg.lambda_raw.ln() + ln_c * a);
    let shift = if top > 600.0 { top } else { 0.0 };
    let mut w: Vec<f64> = sizes
        .iter()
        .map(|&n| n as f64 * (a - shift).exp())
        .collect();
    w.push(cfg.lambda_raw * (ln_c * a - shift).exp());
    let z: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= z);
    w
}

/// Draws `n_draws` balls. The first ball always opens color 1.
pub fn simulate(cfg: &UrnConfig) -> Result<UrnTrace> {
    simulate_with(cfg, |_, _| ())
}

/// [`simulate`], calling `observe(sizes_before, new_color_probability)` for
/// every draw after the first, before the ball is placed.
pub fn simulate_with<F>(cfg: &UrnConfig, mut observe: F) -> Result<UrnTrace>
where
    F: FnMut(&[usize], f64),
{
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut colors = Vec::with_capacity(cfg.n_draws);
    let mut sizes = vec![1usize];
    colors.push(1);
    for _ in 1..cfg.n_draws {
        let w = alloc_weights(cfg, &sizes);
        observe(&sizes, *w.last().expect("non-empty"));
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut pick = w.len() - 1;
        for (k, p) in w.iter().enumerate() {
            acc += p;
            if u < acc {
                pick = k;
                break;
            }
        }
        if pick == sizes.len() {
            sizes.push(1);
        } else {
            sizes[pick] += 1;
        }
        colors.push(pick + 1);
    }
    Ok(UrnTrace { colors, sizes })
}

/// Probability of a creation-ordered color sequence: the product of the
/// sequential allocation probabilities, with the forced first draw counted
/// as 1.
pub fn joint_probability(cfg: &UrnConfig, colors: &[usize]) -> Result<f64> {
    let mut sizes: Vec<usize> = Vec::new();
    let mut logp = 0.0;
    for (pos, &color) in colors.iter().enumerate() {
        let c = sizes.len();
        if color == 0 || color > c + 1 {
            return Err(Error::InvalidColorSequence {
                position: pos,
                color,
                clusters: c,
            });
        }
        if c > 0 {
            logp += alloc_weights(cfg, &sizes)[color - 1].ln();
        }
        if color == c + 1 {
            sizes.push(1);
        } else {
            sizes[color - 1] += 1;
        }
    }
    Ok(logp.exp())
}

/// Relabels a sequence so that colors are numbered by first appearance.
pub fn canonicalize(colors: &[usize]) -> Vec<usize> {
    let mut map = std::collections::HashMap::new();
    colors
        .iter()
        .map(|&c| {
            let next = map.len() + 1;
            *map.entry(c).or_insert(next)
        })
        .collect()
}

/// Exchangeability probe: enumerates every distinct ordering of `seq`,
/// canonicalizes it, and returns `(max - min) / max` of the joint
/// probabilities. Zero means the urn is exchangeable on this multiset.
///
/// The enumeration is factorial; keep `seq.len()` small.
pub fn exchangeability_spread(cfg: &UrnConfig, seq: &[usize]) -> Result<f64> {
    let mut items = seq.to_vec();
    items.sort_unstable();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    loop {
        let p = joint_probability(cfg, &canonicalize(&items))?;
        lo = lo.min(p);
        hi = hi.max(p);
        if !next_permutation(&mut items) {
            break;
        }
    }
    Ok((hi - lo) / hi)
}

fn next_permutation(v: &mut [usize]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        return false;
    };
    let j = (i..v.len()).rev().find(|&j| v[j] > v[i - 1]).expect("pivot");
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Standard Pitman-Yor urn weights with discount `d`, for reference:
/// existing color `(n_k - d) / (lambda + n)`, new color
/// `(lambda + c d) / (lambda + n)`.
pub fn pitman_yor_weights(lambda: f64, discount: f64, sizes: &[usize]) -> Vec<f64> {
    let n: usize = sizes.iter().sum();
    let z = lambda + n as f64;
    let mut w: Vec<f64> = sizes.iter().map(|&k| (k as f64 - discount) / z).collect();
    w.push((lambda + sizes.len() as f64 * discount) / z);
    w
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(lambda: f64, theta: f64, eps: f64) -> UrnConfig {
        UrnConfig {
            lambda_raw: lambda,
            theta_raw: theta,
            epsilon: eps,
            n_draws: 1,
            seed: 0,
        }
    }

    #[test]
    fn weight_examples() {
        assert_eq!(alloc_weights(&cfg(1.0, 0.0, 1.0), &[1]), vec![0.5, 0.5]);
        assert_eq!(alloc_weights(&cfg(1.0, 0.0, 1.0), &[3, 1]), vec![0.6, 0.2, 0.2]);
        // weights {2e, e, 2}; new color 2 / (3e + 2), mpmath to 30 digits
        let w = alloc_weights(&cfg(1.0, 1.0, 0.5), &[2, 1]);
        assert!((w[2] - 0.196_950_313_313_971_9).abs() < 1e-15, "{}", w[2]);
        assert!((w[0] / w[1] - 2.0).abs() < 1e-14);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn theta_zero_is_crp() {
        let sizes = [5, 2, 7, 1];
        let w = alloc_weights(&cfg(2.5, 0.0, 0.3), &sizes);
        assert_eq!(w, pitman_yor_weights(2.5, 0.0, &sizes));
    }

    #[test]
    fn new_color_probability_grows_with_c() {
        let c = cfg(1.0, 0.4, 0.5);
        let mut prev = 0.0;
        for k in 1..=12 {
            let mut sizes = vec![1; k];
            sizes[0] = 13 - k;
            let p = *alloc_weights(&c, &sizes).last().unwrap();
            assert!(p >= prev);
            prev = p;
        }
    }

    #[test]
    fn simulate_basics() {
        let mut c = cfg(1.0, 0.5, 1.0);
        let t = simulate(&c).unwrap();
        assert_eq!(t.colors, vec![1]);
        assert_eq!(t.sizes, vec![1]);

        c.n_draws = 500;
        c.seed = 9;
        let t = simulate(&c).unwrap();
        assert_eq!(t.sizes.iter().sum::<usize>(), 500);
        assert_eq!(*t.colors.iter().max().unwrap(), t.sizes.len());
        assert_eq!(canonicalize(&t.colors), t.colors);
        assert_eq!(simulate(&c).unwrap(), t);

        let tiny = UrnConfig {
            lambda_raw: 1e-300,
            theta_raw: 0.0,
            ..c
        };
        assert_eq!(simulate(&tiny).unwrap().sizes, vec![500]);
    }

    #[test]
    fn joint_probability_examples() {
        let c = cfg(1.0, 0.0, 1.0);
        assert_eq!(joint_probability(&c, &[1]).unwrap(), 1.0);
        assert!((joint_probability(&c, &[1, 1]).unwrap() - 0.5).abs() < 1e-15);
        assert!((joint_probability(&c, &[1, 2]).unwrap() - 0.5).abs() < 1e-15);
        assert!(matches!(
            joint_probability(&c, &[1, 3]),
            Err(Error::InvalidColorSequence { position: 1, .. })
        ));
        assert!(joint_probability(&c, &[2]).is_err());
    }

    #[test]
    fn crp_is_exchangeable() {
        let c = cfg(1.7, 0.0, 1.0);
        let spread = exchangeability_spread(&c, &[1, 1, 1, 2, 2, 3]).unwrap();
        assert!(spread < 1e-12, "{spread}");
    }

    #[test]
    fn permutation_enumeration_counts() {
        let mut v = vec![1, 1, 2, 3];
        let mut n = 1;
        while next_permutation(&mut v) {
            n += 1;
        }
        assert_eq!(n, 12);
    }
}
