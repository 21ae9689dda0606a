//! Multi-seed experiment execution and rate-report emission.

use std::io::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::fit::{loglog_fit, LineFit};
use crate::geometry::ProxOp;
use crate::harness::config::{ExperimentConfig, OutputFormat};
use crate::optimizers::{proj_storm, prox_sgd, SgdOptions, StormOptions, Trajectory};
use crate::oracles::PRNG_ALGORITHM;
use crate::{Error, Result};

/// Mean gaps this small count as "converged below floor" and are excluded
/// from slope fits.
pub const GAP_FLOOR: f64 = 1e-14;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PerT {
    pub t: usize,
    pub queries: u64,
    pub mean_gap: f64,
    /// Standard error of the mean across seeds.
    pub std_error: f64,
    pub below_floor: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_grad_error_sq: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SlopeCheck {
    /// Theoretical exponent for this optimizer at this alpha.
    pub target: f64,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fitted: Option<LineFit>,
    /// None when too few usable points to fit.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub passed: Option<bool>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ResolvedParams {
    pub optimizer: String,
    pub alpha: f64,
    pub eta0: f64,
    pub l: f64,
    pub tau: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta0_certificate: Option<f64>,
    pub seeds: usize,
    pub t_max: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RateReport {
    pub schema_version: u32,
    pub prng_algorithm: String,
    pub config: ExperimentConfig,
    pub resolved: ResolvedParams,
    pub per_t: Vec<PerT>,
    /// Fit of log mean gap against log T over the upper half of the T list.
    pub slope_vs_t: SlopeCheck,
    /// Same against log cumulative oracle queries.
    pub slope_vs_queries: SlopeCheck,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CurveRow {
    pub t: usize,
    pub queries: u64,
    pub seed: u64,
    pub gap: f64,
    pub grad_error_sq: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentOutput {
    pub report: RateReport,
    pub curves: Vec<CurveRow>,
}

fn run_one_seed(
    config: &ExperimentConfig,
    built: &crate::harness::config::BuiltInstance,
    seed: u64,
    t_max: usize,
) -> Result<Trajectory> {
    let mut oracle = config.build_oracle(built, seed)?;
    let x0 = config.start_point(built)?;
    let o = &config.optimizer;
    let alpha = o.alpha.unwrap_or_else(|| built.objective.certificate().alpha);
    match o.kind.as_str() {
        "proj-sgd" | "prox-sgd" => {
            let mut opts = SgdOptions::new(t_max, o.eta0, o.b0.unwrap_or(1.0), alpha);
            if let Some(flag) = o.enforce_step_rule {
                opts.enforce_step_rule = flag;
            }
            let prox = match o.l1_lambda {
                Some(lambda) if o.kind == "prox-sgd" => ProxOp::L1 { lambda },
                _ => ProxOp::Indicator(built.domain.clone()),
            };
            prox_sgd(&mut oracle, &prox, &x0, &opts)
        }
        "proj-storm" => {
            let mut opts = StormOptions::new(t_max, o.eta0, o.a0.unwrap(), o.beta0.unwrap(), alpha);
            if let Some(b) = o.g0_batch {
                opts.g0_batch = b;
            }
            if let Some(flag) = o.enforce_step_rule {
                opts.enforce_step_rule = flag;
            }
            proj_storm(&mut oracle, &built.domain, &x0, &opts)
        }
        other => Err(Error::Config(vec![format!(
            "optimizer.kind {other:?} unknown"
        )])),
    }
}

/// Runs every configured seed to the largest T, reads checkpoint statistics
/// at each T in the list, and fits asymptotic slopes against the
/// theoretical targets.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    config.validate()?;
    let built = config.build_instance()?;
    let t_max = *config.run.t.last().unwrap();
    let threads = config
        .run
        .parallelism
        .unwrap_or_else(|| rayon::current_num_threads().max(1));
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(vec![format!("thread pool: {e}")]))?;
    let trajectories: Result<Vec<Trajectory>> = pool.install(|| {
        config
            .run
            .seeds
            .par_iter()
            .map(|&seed| run_one_seed(config, &built, seed, t_max))
            .collect()
    });
    let trajectories = trajectories?;

    let mut warnings: Vec<String> = Vec::new();
    for (traj, seed) in trajectories.iter().zip(&config.run.seeds) {
        for w in &traj.warnings {
            warnings.push(format!("seed {seed}: {w}"));
        }
    }

    let mut curves = Vec::new();
    let mut per_t = Vec::new();
    for &t in &config.run.t {
        let mut gaps = Vec::new();
        let mut errs = Vec::new();
        let mut queries = 0;
        for (traj, &seed) in trajectories.iter().zip(&config.run.seeds) {
            let rec = traj.record_at(t).ok_or_else(|| {
                Error::CheckFailed(format!("no trajectory record at t = {t}"))
            })?;
            let gap = rec.gap.ok_or_else(|| {
                Error::CheckFailed("instance has no known minimum; cannot report gaps".into())
            })?;
            queries = rec.queries;
            if let Some(e) = rec.grad_error_sq {
                errs.push(e);
            }
            gaps.push(gap);
            curves.push(CurveRow {
                t,
                queries: rec.queries,
                seed,
                gap,
                grad_error_sq: rec.grad_error_sq,
            });
        }
        let n = gaps.len() as f64;
        let mean = gaps.iter().sum::<f64>() / n;
        let var = gaps.iter().map(|g| (g - mean).powi(2)).sum::<f64>() / n;
        per_t.push(PerT {
            t,
            queries,
            mean_gap: mean,
            std_error: (var / n).sqrt(),
            below_floor: mean < GAP_FLOOR,
            mean_grad_error_sq: if errs.len() == gaps.len() {
                Some(errs.iter().sum::<f64>() / n)
            } else {
                None
            },
        });
    }

    let cert = built.objective.certificate();
    let alpha = config.optimizer.alpha.unwrap_or(cert.alpha);
    let (t_target, q_target) = slope_targets(&config.optimizer.kind, alpha);
    let t_tol = config.run.slope_tolerance.unwrap_or(0.15);
    let q_tol = config.run.query_slope_tolerance.unwrap_or(t_tol);

    // asymptotic regime only: upper half of the T list, floor cells dropped
    let tail = &per_t[per_t.len() / 2..];
    let usable: Vec<&PerT> = tail.iter().filter(|c| !c.below_floor).collect();
    let fit_pair = |xs: Vec<f64>| -> Option<LineFit> {
        let ys: Vec<f64> = usable.iter().map(|c| c.mean_gap).collect();
        loglog_fit(&xs, &ys).ok()
    };
    let (fit_t, fit_q) = if usable.len() >= 2 {
        (
            fit_pair(usable.iter().map(|c| c.t as f64).collect()),
            fit_pair(usable.iter().map(|c| c.queries as f64).collect()),
        )
    } else {
        warnings.push("too few above-floor cells for a slope fit".into());
        (None, None)
    };
    let check = |fitted: Option<LineFit>, target: f64, tol: f64| SlopeCheck {
        target,
        tolerance: tol,
        passed: fitted.map(|f| (f.slope - target).abs() <= tol),
        fitted,
    };

    let report = RateReport {
        schema_version: 1,
        prng_algorithm: PRNG_ALGORITHM.to_string(),
        config: config.clone(),
        resolved: ResolvedParams {
            optimizer: config.optimizer.kind.clone(),
            alpha,
            eta0: config.optimizer.eta0,
            l: cert.l,
            tau: cert.tau,
            eta0_certificate: cert.eta0,
            seeds: config.run.seeds.len(),
            t_max,
        },
        per_t,
        slope_vs_t: check(fit_t, t_target, t_tol),
        slope_vs_queries: check(fit_q, q_target, q_tol),
        warnings,
    };
    Ok(ExperimentOutput { report, curves })
}

/// Theoretical gap exponents vs T and vs cumulative queries. SGD's growing
/// batches make queries scale like T^{(4−α)/(2−α)}; STORM uses two queries
/// per step, so both exponents coincide at −α/2.
pub fn slope_targets(kind: &str, alpha: f64) -> (f64, f64) {
    match kind {
        "proj-sgd" | "prox-sgd" => (-alpha / (2.0 - alpha), -alpha / (4.0 - alpha)),
        _ => (-alpha / 2.0, -alpha / 2.0),
    }
}

fn report_json(report: &RateReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

fn curves_csv(curves: &[CurveRow]) -> String {
    let mut s = String::from("t,queries,seed,gap,grad_error_sq\n");
    for row in curves {
        let err = row
            .grad_error_sq
            .map(|e| format!("{e}"))
            .unwrap_or_default();
        s.push_str(&format!(
            "{},{},{},{},{}\n",
            row.t, row.queries, row.seed, row.gap, err
        ));
    }
    s
}

/// Writes report.json and/or curves.csv into `dir`.
pub fn write_outputs(out: &ExperimentOutput, dir: &Path, format: OutputFormat) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    if matches!(format, OutputFormat::Json | OutputFormat::Both) {
        let mut f = std::fs::File::create(dir.join("report.json"))?;
        f.write_all(report_json(&out.report).as_bytes())?;
    }
    if matches!(format, OutputFormat::Csv | OutputFormat::Both) {
        let mut f = std::fs::File::create(dir.join("curves.csv"))?;
        f.write_all(curves_csv(&out.curves).as_bytes())?;
    }
    Ok(())
}
