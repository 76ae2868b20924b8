use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{bail, ensure, Context, Result};
use pyp_means::datagen::{generate, SynthSpec};
use pyp_means::dataset::{load_csv, normalize, Dataset, LabelColumn};
use pyp_means::metrics::{accuracy, alpha_hat, cluster_sizes, discovery_rate, nmi};
use pyp_means::pyp::{estimate_lambda_with_ratio, fit, PypParams, RunResult, Variant};
use pyp_means::spectral::{build_kernel, spectral_fit_kernel, KernelKind};
use pyp_means::urn::{simulate, UrnConfig};

use crate::args::{
    ClusterArgs, DatagenArgs, EvaluateArgs, FitArgs, InputArgs, KernelArg, SpectralArgs, SweepArgs,
    UrnArgs,
};
use crate::record::RunRecord;
use crate::sweep::{to_csv, Cell, Grid, LambdaSpec, RunOptions};
use crate::Outcome;

pub const ASSIGNMENTS_FILE: &str = "assignments.csv";
pub const RECORD_FILE: &str = "record.txt";

fn load_input(args: &InputArgs, rec: &mut RunRecord) -> Result<Dataset> {
    let label_col = args.labels.as_deref().map(LabelColumn::parse);
    let raw = load_csv(&args.input, label_col.as_ref())?;
    rec.set_fingerprint(&args.input, raw.n(), raw.d())?;
    rec.set("dataset.normalized", args.normalize);
    Ok(if args.normalize { normalize(&raw) } else { raw })
}

/// Resolves lambda and theta from the flags and echoes them into `rec`.
fn resolve_params(fit: &FitArgs, ds: &Dataset, rec: &mut RunRecord) -> Result<PypParams> {
    rec.set("params.variant", fit.variant);
    let mut params = if fit.variant == Variant::KMeans {
        let Some(k) = fit.k else {
            bail!("--variant kmeans needs --k");
        };
        rec.set("params.k", k);
        PypParams::kmeans(k)
    } else {
        let ratio = fit.theta_ratio.unwrap_or(10.0);
        let (lambda, theta, source) = match (fit.lambda, fit.estimate_c) {
            (Some(l), None) => match fit.theta {
                Some(t) => (l, t, "explicit"),
                None => (l, l / ratio, "ratio"),
            },
            (None, Some(rough)) => {
                rec.set("params.estimate_c", rough);
                let est = estimate_lambda_with_ratio(ds, rough, ratio)?;
                match fit.theta {
                    Some(t) => (est.lambda, t, "explicit"),
                    None => (est.lambda, est.theta, "ratio"),
                }
            }
            _ => bail!("give --lambda or --estimate-c"),
        };
        let mut p = PypParams::pyp(lambda, theta);
        p.variant = fit.variant;
        p.agglomeration = !fit.no_agglomeration;
        p.theta = p.effective_theta();
        rec.set("params.lambda", p.lambda);
        rec.set("params.theta", p.theta);
        if fit.variant == Variant::Pyp && source == "ratio" {
            rec.set("params.theta_ratio", ratio);
        }
        rec.set("params.agglomeration", p.agglomeration);
        rec.set("params.alg1_offset", fit.alg1_offset);
        p
    };
    params.alg1_offset = fit.alg1_offset;
    params.max_iter = fit.max_iter;
    params.tol = fit.tol;
    params.seed = fit.seed;
    params.validate()?;
    rec.set("params.max_iter", params.max_iter);
    rec.set("params.tol", params.tol);
    rec.set("params.seed", params.seed);
    Ok(params)
}

fn record_result(run: &RunResult, ds: &Dataset, rec: &mut RunRecord) -> Result<()> {
    rec.set("result.c", run.state.c());
    rec.set("result.objective", run.objective());
    rec.set("result.iterations", run.iterations);
    rec.set("result.converged", run.converged);
    rec.set("result.wall_time", run.wall_time);
    record_metrics(ds, &run.state.assignments, rec)
}

fn record_metrics(ds: &Dataset, pred: &[usize], rec: &mut RunRecord) -> Result<()> {
    let sizes = cluster_sizes(pred);
    rec.set("metrics.found_c", sizes.len());
    rec.set("metrics.alpha_hat", alpha_hat(&sizes)?);
    if let (Some(labels), Some(true_c)) = (ds.labels(), ds.num_classes()) {
        rec.set("metrics.true_c", true_c);
        rec.set("metrics.acc", accuracy(labels, pred)?);
        rec.set("metrics.nmi", nmi(labels, pred)?);
        rec.set("metrics.discovery_rate", discovery_rate(sizes.len() as f64, true_c)?);
    }
    Ok(())
}

/// `point,cluster` rows with zero-based point indices and one-based
/// cluster ids.
pub fn assignments_csv(assignments: &[usize]) -> String {
    let mut out = String::with_capacity(assignments.len() * 8 + 16);
    out.push_str("point,cluster\n");
    for (i, a) in assignments.iter().enumerate() {
        let _ = writeln!(out, "{i},{}", a + 1);
    }
    out
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))
}

fn finish(dir: &Path, assignments: &[usize], rec: &RunRecord, converged: bool) -> Result<Outcome> {
    write_file(dir, ASSIGNMENTS_FILE, &assignments_csv(assignments))?;
    write_file(dir, RECORD_FILE, &rec.to_text())?;
    print!("{}", rec.to_text());
    Ok(if converged {
        Outcome::Converged
    } else {
        Outcome::NotConverged
    })
}

pub fn cluster(args: &ClusterArgs) -> Result<Outcome> {
    let mut rec = RunRecord::new();
    rec.set("command", "cluster");
    let ds = load_input(&args.fit.data, &mut rec)?;
    let params = resolve_params(&args.fit, &ds, &mut rec)?;
    let run = fit(&ds, &params)?;
    record_result(&run, &ds, &mut rec)?;
    finish(&args.fit.output_dir, &run.state.assignments, &rec, run.converged)
}

pub fn spectral(args: &SpectralArgs) -> Result<Outcome> {
    let mut rec = RunRecord::new();
    rec.set("command", "spectral");
    let ds = load_input(&args.fit.data, &mut rec)?;
    ensure!(
        args.fit.variant != Variant::KMeans,
        "spectral selects c itself; use --variant pyp or dp"
    );
    let params = resolve_params(&args.fit, &ds, &mut rec)?;
    let kind = match (args.kernel, args.sigma) {
        (KernelArg::Linear, _) => KernelKind::Linear,
        (KernelArg::Rbf, Some(sigma)) => KernelKind::Rbf { sigma },
        (KernelArg::Rbf, None) => KernelKind::rbf_median(&ds),
    };
    match kind {
        KernelKind::Linear => rec.set("spectral.kernel", "linear"),
        KernelKind::Rbf { sigma } => {
            rec.set("spectral.kernel", "rbf");
            rec.set("spectral.sigma", sigma);
        }
    }
    let kernel = build_kernel(&ds, kind)?;
    let (run, sys) =
        spectral_fit_kernel(&kernel, params.lambda, params.effective_theta(), params.seed)?;
    let c = run.state.c();
    rec.set("spectral.eigenvalue_c", sys.eigenvalues[c - 1]);
    if let Some(next) = sys.eigenvalues.get(c) {
        rec.set("spectral.eigenvalue_next", next);
    }
    record_result(&run, &ds, &mut rec)?;
    finish(&args.fit.output_dir, &run.state.assignments, &rec, run.converged)
}

pub fn urn(args: &UrnArgs) -> Result<Outcome> {
    let cfg = UrnConfig {
        lambda_raw: args.lambda,
        theta_raw: args.theta,
        epsilon: args.epsilon,
        n_draws: args.draws,
        seed: args.seed,
    };
    let trace = simulate(&cfg)?;
    let mut sizes_csv = String::from("color,size\n");
    for (k, s) in trace.sizes.iter().enumerate() {
        let _ = writeln!(sizes_csv, "{},{s}", k + 1);
    }
    let mut hist = std::collections::BTreeMap::<usize, usize>::new();
    for &s in &trace.sizes {
        *hist.entry(s).or_default() += 1;
    }
    let mut hist_csv = String::from("size,count\n");
    for (s, n) in hist {
        let _ = writeln!(hist_csv, "{s},{n}");
    }
    let mut rec = RunRecord::new();
    rec.set("command", "urn");
    rec.set("params.lambda", cfg.lambda_raw);
    rec.set("params.theta", cfg.theta_raw);
    rec.set("params.epsilon", cfg.epsilon);
    rec.set("params.draws", cfg.n_draws);
    rec.set("params.seed", cfg.seed);
    rec.set("result.colors", trace.sizes.len());
    rec.set("result.alpha_hat", alpha_hat(&trace.sizes)?);
    write_file(&args.output_dir, "urn_sizes.csv", &sizes_csv)?;
    write_file(&args.output_dir, "urn_histogram.csv", &hist_csv)?;
    write_file(&args.output_dir, RECORD_FILE, &rec.to_text())?;
    print!("{}", rec.to_text());
    Ok(Outcome::Converged)
}

pub fn datagen(args: &DatagenArgs) -> Result<Outcome> {
    let mut spec = SynthSpec::new(args.c, args.seed);
    spec.d = args.d;
    spec.big_size = args.big_size;
    spec.small_size = args.small_size;
    if let Some(n_big) = args.n_big {
        spec.n_big = n_big;
    }
    spec.center_box = args.center_box;
    spec.min_center_dist = args.min_center_dist;
    let ds = generate(&spec)?;
    if let Some(dir) = args.output.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    ds.save_csv(&args.output)?;
    println!("wrote {} points in {} clusters to {}", ds.n(), spec.c, args.output.display());
    Ok(Outcome::Converged)
}

/// Reads a `point,cluster` file and returns cluster ids in point order.
fn read_assignments(path: &Path, n: usize) -> Result<Vec<usize>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut lines = text.lines();
    ensure!(lines.next() == Some("point,cluster"), "{}: expected header point,cluster", path.display());
    let mut out = Vec::with_capacity(n);
    for (row, line) in lines.enumerate() {
        let (p, c) = line
            .split_once(',')
            .with_context(|| format!("{}: row {}: expected two fields", path.display(), row + 1))?;
        let p: usize = p.trim().parse().with_context(|| format!("row {}: bad point index", row + 1))?;
        let c: usize = c.trim().parse().with_context(|| format!("row {}: bad cluster id", row + 1))?;
        ensure!(p == row, "row {}: point indices must run 0..n in order", row + 1);
        out.push(c);
    }
    ensure!(out.len() == n, "{} assignments for {n} points", out.len());
    Ok(out)
}

pub fn evaluate(args: &EvaluateArgs) -> Result<Outcome> {
    let mut rec = RunRecord::new();
    rec.set("command", "evaluate");
    let input = InputArgs {
        input: args.input.clone(),
        labels: Some(args.labels.clone()),
        normalize: false,
    };
    let ds = load_input(&input, &mut rec)?;
    ensure!(ds.labels().is_some(), "evaluate needs ground-truth labels");
    let pred = read_assignments(&args.assignments, ds.n())?;
    rec.set("assignments.path", args.assignments.display());
    record_metrics(&ds, &pred, &mut rec)?;
    if let Some(dir) = &args.output_dir {
        write_file(dir, RECORD_FILE, &rec.to_text())?;
    }
    print!("{}", rec.to_text());
    Ok(Outcome::Converged)
}

pub fn sweep(args: &SweepArgs) -> Result<Outcome> {
    let file = match &args.input {
        Some(path) => {
            let ds = load_csv(path, Some(&LabelColumn::parse(&args.labels)))?;
            Some(if args.normalize { normalize(&ds) } else { ds })
        }
        None => None,
    };
    let mut lambdas: Vec<LambdaSpec> = args.lambda.iter().map(|&l| LambdaSpec::Fixed(l)).collect();
    if args.estimate {
        lambdas.push(LambdaSpec::Estimate);
    }
    let true_cs: Vec<Option<usize>> = if file.is_some() {
        vec![None]
    } else {
        args.generate_c.iter().map(|&c| Some(c)).collect()
    };
    let mut cells = Vec::new();
    for &variant in &args.variant {
        for &true_c in &true_cs {
            for &lambda in &lambdas {
                cells.push(Cell {
                    variant,
                    true_c,
                    lambda,
                });
            }
        }
    }
    let grid = Grid {
        file,
        normalize: args.normalize,
        cells,
        repeats: args.repeats,
        seed: args.seed,
        opts: RunOptions {
            theta_ratio: args.theta_ratio,
            agglomeration: !args.no_agglomeration,
            alg1_offset: args.alg1_offset,
            max_iter: args.max_iter,
            tol: args.tol,
        },
    };
    let rows = grid.run()?;
    let csv = to_csv(&rows, args.theta_ratio);
    write_file(&args.output_dir, "sweep.csv", &csv)?;
    print!("{csv}");
    let all_converged = rows.iter().all(|(_, s)| s.converged == s.runs);
    Ok(if all_converged {
        Outcome::Converged
    } else {
        Outcome::NotConverged
    })
}
