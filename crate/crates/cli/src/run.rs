//! Experiment runners.
//!
//! Each runner computes everything first and returns its artifacts as
//! `(file name, contents)` pairs; [`run`] writes them afterwards from a
//! single thread.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use renorm_core::formats::{format_f64, write_matrix_csv, write_records_csv, write_trajectories_csv};
use renorm_core::hyperwalk::{empirical_measure, limit_disc_point, trajectory, Trajectory, WalkSpec};
use renorm_core::matcore::{mat_exp, mat_exp_series_oracle};
use renorm_core::renorm::{
    binomial, convergence_scan, k_term_limit_check, norm_budget_check, product, scalar_product, sym_sum_bruteforce,
    sym_sum_dp, weighted_average, WeightFunction, BRUTEFORCE_BUDGET, LIMIT_EXP_TOL,
};
use renorm_core::sequences::MeasureParams;
use renorm_core::{Complex64, Matrix};

use crate::config::{Experiment, ExperimentConfig};
use crate::error::CliError;
use crate::svg::emit_svg;

/// Default tolerances for `--check`.
pub mod tolerances {
    /// Relative distance between `mat_exp` and the 60-term series.
    pub const EXP_ORACLE: f64 = 1e-12;
    /// `||Pi_n(t) - exp(tA)||_F` for `product`.
    pub const PRODUCT: f64 = 1e-3;
    /// Dynamic programming against enumeration.
    pub const SYMSUM_ORACLE: f64 = 1e-12;
    /// Relative slack on the domination bound.
    pub const BUDGET_SLACK: f64 = 1e-12;
    /// Weighted average against `L / (k + 1)` at the largest `n`.
    pub const WEIGHTED: f64 = 1e-3;
    /// Disc endpoint against the closed-form image.
    pub const WALK_ENDPOINT: f64 = 1e-3;
    /// Constant `c` in the scalar-product bound `c |e^l| mean|u|^2 / (2n)`.
    pub const SCALAR_BOUND_CONSTANT: f64 = 1.5;
}

/// Outcome of a `--check` evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    /// Lines to print on stdout; the last one is the summary.
    pub lines: Vec<String>,
    pub artifacts: Vec<PathBuf>,
    pub check: Option<CheckReport>,
}

struct Computed {
    lines: Vec<String>,
    files: Vec<(String, String)>,
    passed: bool,
    detail: String,
}

const EXP_TOL: f64 = 1e-15;

/// Runs one experiment and writes its artifacts under `cfg.out`.
pub fn run(cfg: &ExperimentConfig) -> Result<RunOutcome, CliError> {
    let start = Instant::now();
    let computed = match cfg.experiment {
        Experiment::Exp => run_exp(cfg)?,
        Experiment::Product => run_product(cfg)?,
        Experiment::Scan => run_scan(cfg)?,
        Experiment::Symsum => run_symsum(cfg)?,
        Experiment::LemmaScalar => run_lemma_scalar(cfg)?,
        Experiment::LemmaWeighted => run_lemma_weighted(cfg)?,
        Experiment::Hyperwalk => run_walk(cfg, true)?,
        Experiment::Figure => run_walk(cfg, false)?,
    };
    let elapsed = start.elapsed().as_secs_f64();

    fs::create_dir_all(&cfg.out).map_err(|e| CliError::io(&cfg.out, e))?;
    let mut artifacts = Vec::with_capacity(computed.files.len());
    for (name, contents) in &computed.files {
        let path = cfg.out.join(name);
        fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
        artifacts.push(path);
    }

    let mut lines = computed.lines;
    let status = match (cfg.check, computed.passed) {
        (false, _) => String::new(),
        (true, true) => " check=pass".into(),
        (true, false) => " check=FAIL".into(),
    };
    lines.push(format!("{}: {}{status} runtime={elapsed:.3}s", cfg.experiment.name(), computed.detail));
    let check = cfg.check.then(|| CheckReport { passed: computed.passed, detail: computed.detail.clone() });
    Ok(RunOutcome { lines, artifacts, check })
}

fn t_label(t: Complex64) -> String {
    if t.im == 0.0 {
        format!("{}", t.re)
    } else {
        format!("{}{:+}i", t.re, t.im)
    }
}

fn run_exp(cfg: &ExperimentConfig) -> Result<Computed, CliError> {
    let x = cfg.matrix.as_ref().ok_or_else(|| CliError::field("matrix", "required by exp"))?;
    let e = mat_exp(x, EXP_TOL)?;
    let oracle = mat_exp_series_oracle(x, 60);
    let rel = e.distance(&oracle)? / oracle.frobenius().max(1.0);
    let tol = cfg.tol.unwrap_or(tolerances::EXP_ORACLE);
    let mut lines: Vec<String> = e.to_string().lines().map(str::to_owned).collect();
    lines.insert(0, format!("exp of a {0}x{0} matrix:", x.dim()));
    Ok(Computed {
        lines,
        files: vec![("exp.csv".into(), write_matrix_csv(&e))],
        passed: rel <= tol,
        detail: format!("oracle_rel_diff={rel:.3e} tol={tol:.1e}"),
    })
}

fn run_product(cfg: &ExperimentConfig) -> Result<Computed, CliError> {
    let seq = cfg.sequence()?;
    let mean = cfg.target_mean(&seq)?;
    let tol = cfg.tol.unwrap_or(tolerances::PRODUCT);
    let mut table = String::from("n,t_re,t_im,err,mean_err,alpha_hat\n");
    let mut files = Vec::new();
    let mut worst: f64 = 0.0;
    for (j, &t) in cfg.t.iter().enumerate() {
        let res = product(&seq, cfg.n, t)?;
        let target = limit_matrix(&mean, t)?;
        let err = res.value.distance(&target)?;
        let mean_err = res.cesaro.distance(&mean)?;
        worst = worst.max(err);
        let _ = writeln!(
            table,
            "{},{},{},{},{},{}",
            res.n,
            format_f64(t.re),
            format_f64(t.im),
            format_f64(err),
            format_f64(mean_err),
            format_f64(res.alpha_hat)
        );
        files.push((format!("product_t{j}.csv"), write_matrix_csv(&res.value)));
    }
    files.insert(0, ("product.csv".into(), table));
    Ok(Computed {
        lines: Vec::new(),
        files,
        passed: worst <= tol,
        detail: format!("n={} max_err={worst:.6e} tol={tol:.1e}", cfg.n),
    })
}

fn run_scan(cfg: &ExperimentConfig) -> Result<Computed, CliError> {
    let seq = cfg.sequence()?;
    let mean = cfg.target_mean(&seq)?;
    let mut records = Vec::new();
    let mut passed = true;
    let mut lines = Vec::new();
    for &t in &cfg.t {
        let mut recs = convergence_scan(&seq, t, &cfg.n_grid, &mean)?;
        if !cfg.timing {
            recs.iter_mut().for_each(|r| r.seconds = 0.0);
        }
        let decreasing = recs.windows(2).all(|w| w[1].err < w[0].err);
        let last = recs.last().expect("nonempty grid").err;
        passed &= decreasing && cfg.tol.is_none_or(|tol| last <= tol);
        lines.push(format!("t={}: final_err={last:.6e} decreasing={decreasing}", t_label(t)));
        records.extend(recs);
    }
    let final_err = records.last().expect("nonempty grid").err;
    Ok(Computed {
        lines,
        files: vec![("scan.csv".into(), write_records_csv(&records)?)],
        passed,
        detail: format!("rows={} final_err={final_err:.6e}", records.len()),
    })
}

fn run_symsum(cfg: &ExperimentConfig) -> Result<Computed, CliError> {
    let seq = cfg.sequence()?;
    let mean = cfg.target_mean(&seq)?;
    let k = cfg.k;
    let t = cfg.t[0];
    if let Some(&n) = cfg.n_grid.iter().find(|&&n| n < k) {
        return Err(CliError::field("n_grid", format!("n = {n} is smaller than the order k = {k}")));
    }
    let limits = k_term_limit_check(&seq, k, &cfg.n_grid, &mean)?;
    let mut csv = String::from("n,k,limit_dist,bruteforce_diff,budget_lhs,budget_rhs\n");
    let mut oracle_ok = true;
    let mut budget_ok = true;
    let mut worst_diff: f64 = 0.0;
    for &(n, dist) in &limits {
        let brute_diff = if binomial(n, k).is_some_and(|c| c <= BRUTEFORCE_BUDGET) {
            let d = sym_sum_dp(&seq, n, k)?.distance(&sym_sum_bruteforce(&seq, n, k)?)?;
            worst_diff = worst_diff.max(d);
            oracle_ok &= d <= tolerances::SYMSUM_ORACLE;
            format_f64(d)
        } else {
            String::new()
        };
        let budget = norm_budget_check(&seq, n, k, t)?;
        budget_ok &= budget.holds(tolerances::BUDGET_SLACK);
        let _ = writeln!(
            csv,
            "{n},{k},{},{brute_diff},{},{}",
            format_f64(dist),
            format_f64(budget.lhs),
            format_f64(budget.rhs)
        );
    }
    let last = limits.last().expect("nonempty grid").1;
    let passed = oracle_ok && budget_ok && cfg.tol.is_none_or(|tol| last <= tol);
    Ok(Computed {
        lines: Vec::new(),
        files: vec![("symsum.csv".into(), csv)],
        passed,
        detail: format!("k={k} final_limit_dist={last:.6e} max_oracle_diff={worst_diff:.3e} budget_holds={budget_ok}"),
    })
}

fn run_lemma_scalar(cfg: &ExperimentConfig) -> Result<Computed, CliError> {
    let u = &cfg.u;
    let len = u.len() as f64;
    let mean: Complex64 = u.iter().sum::<Complex64>() / len;
    let second_moment = u.iter().map(|z| z.norm_sqr()).sum::<f64>() / len;
    let limit = mean.exp();
    let mut csv = String::from("n,re,im,err,bound\n");
    let mut passed = true;
    let mut last_err = 0.0;
    for &n in &cfg.n_grid {
        let p = scalar_product(u.iter().copied().cycle(), n)?;
        let err = (p - limit).norm();
        let bound =
            cfg.tol.unwrap_or(tolerances::SCALAR_BOUND_CONSTANT * limit.norm() * second_moment / (2.0 * n as f64));
        passed &= err <= bound;
        last_err = err;
        let _ =
            writeln!(csv, "{n},{},{},{},{}", format_f64(p.re), format_f64(p.im), format_f64(err), format_f64(bound));
    }
    Ok(Computed {
        lines: Vec::new(),
        files: vec![("lemma_scalar.csv".into(), csv)],
        passed,
        detail: format!("limit={:.12} final_err={last_err:.6e}", t_label(limit)),
    })
}

fn run_lemma_weighted(cfg: &ExperimentConfig) -> Result<Computed, CliError> {
    let seq = cfg.sequence()?;
    let mean = cfg.target_mean(&seq)?;
    let tol = cfg.tol.unwrap_or(tolerances::WEIGHTED);
    let last_n = *cfg.n_grid.last().expect("nonempty grid");
    let mut csv = String::from("n,k,err\n");
    let mut worst_final: f64 = 0.0;
    for &k in &cfg.weight_k {
        let g = WeightFunction::Monomial(k);
        let limit = mean.scale(Complex64::new(g.integral(), 0.0));
        for &n in &cfg.n_grid {
            let err = weighted_average(&seq, &g, n)?.distance(&limit)?;
            if n == last_n {
                worst_final = worst_final.max(err);
            }
            let _ = writeln!(csv, "{n},{k},{}", format_f64(err));
        }
    }
    Ok(Computed {
        lines: Vec::new(),
        files: vec![("lemma_weighted.csv".into(), csv)],
        passed: worst_final <= tol,
        detail: format!("n={last_n} max_final_err={worst_final:.6e} tol={tol:.1e}"),
    })
}

/// A walk run: trajectories plus endpoint deviations from the closed form.
#[derive(Debug, Clone)]
pub struct WalkRun {
    /// Measure predicted by the symbol model.
    pub measure: MeasureParams,
    /// Cylinder masses realized by the first `n` symbols.
    pub realized: MeasureParams,
    pub trajectories: Vec<Trajectory>,
    /// Largest endpoint distance to the closed-form image at `realized`.
    pub realized_dev: f64,
    /// Largest endpoint distance to the closed-form image at `measure`.
    pub model_dev: f64,
    /// Every retained path point lies strictly inside the disc.
    pub inside: bool,
}

/// Runs the walk described by `cfg`.
pub fn walk(cfg: &ExperimentConfig) -> Result<WalkRun, CliError> {
    let stream = cfg.stream()?.ok_or_else(|| CliError::field("model", "walks need a symbol model"))?;
    let freq = stream.frequencies();
    if freq.len() != 2 {
        return Err(CliError::field("model", "walks need the alphabet {1, 2}"));
    }
    let measure = MeasureParams::from_mu1(freq[0])?;
    let spec = WalkSpec::new(measure, stream, cfg.t_grid.clone(), cfg.n, cfg.base)?;
    let realized = empirical_measure(&spec)?;
    let trajectories = trajectory(&spec)?;
    let (mut realized_dev, mut model_dev) = (0.0_f64, 0.0_f64);
    let mut inside = true;
    for tr in &trajectories {
        let end = tr.endpoint.z();
        realized_dev = realized_dev.max((end - limit_disc_point(&realized, tr.t, cfg.base)?.z()).norm());
        model_dev = model_dev.max((end - limit_disc_point(&measure, tr.t, cfg.base)?.z()).norm());
        inside &= tr.path.iter().all(|(_, p)| p.z().norm() < 1.0);
    }
    Ok(WalkRun { measure, realized, trajectories, realized_dev, model_dev, inside })
}

fn run_walk(cfg: &ExperimentConfig, with_csv: bool) -> Result<Computed, CliError> {
    let run = walk(cfg)?;
    let tol = cfg.tol.unwrap_or(tolerances::WALK_ENDPOINT);
    let title = format!(
        "Renormalized two-horocycle walk, mu1 = {}, n = {}, {} values of t",
        run.measure.mu1(),
        cfg.n,
        run.trajectories.len()
    );
    let svg = emit_svg(&run.trajectories, &title)?;
    let name = cfg.experiment.name();
    let mut files = Vec::new();
    if with_csv {
        files.push((format!("{name}.csv"), write_trajectories_csv(&run.trajectories)?));
    }
    files.push((format!("{name}.svg"), svg));
    Ok(Computed {
        lines: Vec::new(),
        files,
        passed: run.realized_dev <= tol && run.inside,
        detail: format!(
            "curves={} realized_mu1={} endpoint_dev={:.6e} model_endpoint_dev={:.6e} tol={tol:.1e} inside_disc={}",
            run.trajectories.len(),
            run.realized.mu1(),
            run.realized_dev,
            run.model_dev,
            run.inside
        ),
    })
}

/// The limit matrix used by `product` and `scan` for a given `t`.
pub fn limit_matrix(mean: &Matrix, t: Complex64) -> Result<Matrix, CliError> {
    Ok(mat_exp(&mean.scale(t), LIMIT_EXP_TOL)?)
}
