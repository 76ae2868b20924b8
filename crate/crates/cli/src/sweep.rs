//! Repeated-run grids. Each (cell, repeat) pair is an independent fit; runs
//! execute in parallel and are aggregated in grid order.

use std::fmt::Write as _;

use anyhow::{bail, Result};
use pyp_means::datagen::{generate, SynthSpec};
use pyp_means::dataset::{normalize, Dataset};
use pyp_means::metrics::{accuracy, discovery_rate, nmi};
use pyp_means::pyp::{estimate_lambda_with_ratio, fit, PypParams, Variant};
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LambdaSpec {
    Fixed(f64),
    /// Farthest-first estimate with the true cluster count as the rough
    /// count.
    Estimate,
}

impl std::fmt::Display for LambdaSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LambdaSpec::Fixed(v) => write!(f, "{v}"),
            LambdaSpec::Estimate => f.write_str("estimate"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub theta_ratio: f64,
    pub agglomeration: bool,
    pub alg1_offset: bool,
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            theta_ratio: 10.0,
            agglomeration: true,
            alg1_offset: false,
            max_iter: 200,
            tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunScore {
    pub lambda: f64,
    pub theta: f64,
    pub found_c: usize,
    pub nmi: f64,
    pub acc: f64,
    pub discovery_rate: f64,
    pub converged: bool,
}

/// Fits one labelled dataset and scores it against its labels.
pub fn score_run(
    ds: &Dataset,
    variant: Variant,
    lambda: LambdaSpec,
    opts: &RunOptions,
    seed: u64,
) -> Result<RunScore> {
    let (Some(labels), Some(true_c)) = (ds.labels(), ds.num_classes()) else {
        bail!("sweeps need labelled data");
    };
    let (lambda, theta) = match lambda {
        LambdaSpec::Fixed(l) => (l, l / opts.theta_ratio),
        LambdaSpec::Estimate => {
            let est = estimate_lambda_with_ratio(ds, true_c, opts.theta_ratio)?;
            (est.lambda, est.theta)
        }
    };
    let mut params = match variant {
        Variant::Pyp => PypParams::pyp(lambda, theta),
        Variant::Dp => PypParams::dp(lambda),
        Variant::KMeans => PypParams::kmeans(true_c),
    };
    if variant != Variant::KMeans {
        params.agglomeration = opts.agglomeration;
    }
    params.alg1_offset = opts.alg1_offset;
    params.max_iter = opts.max_iter;
    params.tol = opts.tol;
    params.seed = seed;
    let run = fit(ds, &params)?;
    let pred = &run.state.assignments;
    Ok(RunScore {
        lambda,
        theta: params.effective_theta(),
        found_c: run.state.c(),
        nmi: nmi(labels, pred)?,
        acc: accuracy(labels, pred)?,
        discovery_rate: discovery_rate(run.state.c() as f64, true_c)?,
        converged: run.converged,
    })
}

/// The synthetic protocol: generate with `SynthSpec::new(true_c, seed)`,
/// min-max normalize, fit and score.
pub fn synthetic_run(
    true_c: usize,
    variant: Variant,
    lambda: LambdaSpec,
    opts: &RunOptions,
    seed: u64,
) -> Result<RunScore> {
    let ds = normalize(&generate(&SynthSpec::new(true_c, seed))?);
    score_run(&ds, variant, lambda, opts, seed)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanStd {
    pub mean: f64,
    /// Sample standard deviation; 0 for a single run.
    pub std: f64,
}

impl MeanStd {
    pub fn of(xs: impl IntoIterator<Item = f64>) -> Self {
        let xs: Vec<f64> = xs.into_iter().collect();
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let std = if xs.len() > 1 {
            (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        MeanStd { mean, std }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellSummary {
    pub lambda: MeanStd,
    pub nmi: MeanStd,
    pub acc: MeanStd,
    pub discovery_rate: MeanStd,
    pub found_c: MeanStd,
    pub converged: usize,
    pub runs: usize,
}

impl CellSummary {
    pub fn of(scores: &[RunScore]) -> Self {
        let col = |f: fn(&RunScore) -> f64| MeanStd::of(scores.iter().map(f));
        CellSummary {
            lambda: col(|s| s.lambda),
            nmi: col(|s| s.nmi),
            acc: col(|s| s.acc),
            discovery_rate: col(|s| s.discovery_rate),
            found_c: col(|s| s.found_c as f64),
            converged: scores.iter().filter(|s| s.converged).count(),
            runs: scores.len(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Cell {
    pub variant: Variant,
    /// True cluster count for generated data, `None` for a file.
    pub true_c: Option<usize>,
    pub lambda: LambdaSpec,
}

pub struct Grid {
    pub file: Option<Dataset>,
    pub normalize: bool,
    pub cells: Vec<Cell>,
    pub repeats: usize,
    pub seed: u64,
    pub opts: RunOptions,
}

impl Grid {
    /// Runs every cell `repeats` times. Repeat `r` uses seed `seed + r` for
    /// both data generation and the fit.
    pub fn run(&self) -> Result<Vec<(Cell, CellSummary)>> {
        if self.cells.is_empty() || self.repeats == 0 {
            bail!("empty sweep grid");
        }
        let jobs: Vec<(usize, u64)> = (0..self.cells.len())
            .flat_map(|i| (0..self.repeats as u64).map(move |r| (i, self.seed + r)))
            .collect();
        let scores: Vec<RunScore> = jobs
            .par_iter()
            .map(|&(i, seed)| {
                let cell = &self.cells[i];
                match (&self.file, cell.true_c) {
                    (Some(ds), _) => score_run(ds, cell.variant, cell.lambda, &self.opts, seed),
                    (None, Some(c)) => {
                        let mut ds = generate(&SynthSpec::new(c, seed))?;
                        if self.normalize {
                            ds = normalize(&ds);
                        }
                        score_run(&ds, cell.variant, cell.lambda, &self.opts, seed)
                    }
                    (None, None) => bail!("cell without data"),
                }
            })
            .collect::<Result<_>>()?;
        Ok(self
            .cells
            .iter()
            .zip(scores.chunks(self.repeats))
            .map(|(cell, s)| (cell.clone(), CellSummary::of(s)))
            .collect())
    }
}

pub const CSV_HEADER: &str = "variant,true_c,lambda,theta_ratio,runs,mean_lambda,mean_nmi,std_nmi,mean_acc,std_acc,mean_discovery_rate,std_discovery_rate,mean_c,std_c,converged";

pub fn to_csv(rows: &[(Cell, CellSummary)], theta_ratio: f64) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for (cell, s) in rows {
        let true_c = cell.true_c.map(|c| c.to_string()).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            cell.variant,
            true_c,
            cell.lambda,
            theta_ratio,
            s.runs,
            s.lambda.mean,
            s.nmi.mean,
            s.nmi.std,
            s.acc.mean,
            s.acc.std,
            s.discovery_rate.mean,
            s.discovery_rate.std,
            s.found_c.mean,
            s.found_c.std,
            s.converged
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_std() {
        let m = MeanStd::of([1.0, 2.0, 3.0]);
        assert_eq!(m.mean, 2.0);
        assert_eq!(m.std, 1.0);
        assert_eq!(MeanStd::of([4.0]).std, 0.0);
    }

    #[test]
    fn grid_rows_follow_cells() {
        let grid = Grid {
            file: None,
            normalize: true,
            cells: [0.05, 0.1, 0.2]
                .iter()
                .map(|&l| Cell {
                    variant: Variant::Dp,
                    true_c: Some(3),
                    lambda: LambdaSpec::Fixed(l),
                })
                .collect(),
            repeats: 3,
            seed: 1,
            opts: RunOptions::default(),
        };
        let rows = grid.run().unwrap();
        assert_eq!(rows.len(), 3);
        let csv = to_csv(&rows, 10.0);
        assert_eq!(csv.lines().count(), 4);
        assert!(csv.lines().nth(2).unwrap().starts_with("dp,3,0.1,10,3,"));
    }

    #[test]
    fn empty_grid_is_an_error() {
        let grid = Grid {
            file: None,
            normalize: false,
            cells: vec![],
            repeats: 5,
            seed: 0,
            opts: RunOptions::default(),
        };
        assert!(grid.run().is_err());
    }
}
