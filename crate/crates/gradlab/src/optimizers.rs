//! Proj-SGD, Prox-SGD and Proj-STORM with the schedules from the theory.

use serde::{Deserialize, Serialize};

use crate::geometry::{Domain, ProxOp, Vector};
use crate::oracles::Oracle;
use crate::{Error, Result};

/// Named step/weight schedules. `t` is 0-indexed; where the theory indexes
/// from 1 the formulas below use (t+1).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Schedule {
    /// Constant eta0.
    Constant { base: f64 },
    /// Growing STORM step eta_t = eta0 (t+1)^{1 - alpha/2}.
    StormStep { eta0: f64, alpha: f64 },
    /// Clamped correction weight a_t = min(a0/(t+1), 1).
    StormWeight { a0: f64 },
    /// Clamped averaging weight beta_t = min(beta0/(t+1), 1).
    StormAveraging { beta0: f64 },
    /// Growing batch b_t = ceil(b0 max(t,1)^{2/(2-alpha)}).
    SgdBatch { b0: f64, alpha: f64 },
}

/// Value of a schedule at iteration t.
pub fn schedule_eval(s: &Schedule, t: usize) -> f64 {
    let t1 = (t + 1) as f64;
    match s {
        Schedule::Constant { base } => *base,
        Schedule::StormStep { eta0, alpha } => eta0 * t1.powf(1.0 - alpha / 2.0),
        Schedule::StormWeight { a0 } => (a0 / t1).min(1.0),
        Schedule::StormAveraging { beta0 } => (beta0 / t1).min(1.0),
        Schedule::SgdBatch { b0, alpha } => {
            let tt = (t.max(1)) as f64;
            (b0 * tt.powf(2.0 / (2.0 - alpha))).ceil()
        }
    }
}

/// One recorded iterate.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrajRecord {
    pub t: usize,
    pub x: Vector,
    /// F(x_t) − F*, when the instance knows its minimum.
    pub gap: Option<f64>,
    /// Cumulative oracle queries after reaching this iterate.
    pub queries: u64,
    /// ‖g_t − ∇F(x_t)‖² for the estimate g_t held at this iterate.
    pub grad_error_sq: Option<f64>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Trajectory {
    pub records: Vec<TrajRecord>,
    pub warnings: Vec<String>,
}

impl Trajectory {
    pub fn final_x(&self) -> &Vector {
        &self.records.last().expect("non-empty trajectory").x
    }

    pub fn record_at(&self, t: usize) -> Option<&TrajRecord> {
        self.records.iter().find(|r| r.t == t)
    }
}

/// Options shared by Proj-SGD and Prox-SGD (growing minibatch schedule).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SgdOptions {
    pub t_max: usize,
    pub eta0: f64,
    pub b0: f64,
    pub alpha: f64,
    /// When true (default) reject eta0 > 1/(2L) if the certificate has a
    /// finite L; when false, run anyway and record a warning.
    pub enforce_step_rule: bool,
}

impl SgdOptions {
    pub fn new(t_max: usize, eta0: f64, b0: f64, alpha: f64) -> SgdOptions {
        SgdOptions {
            t_max,
            eta0,
            b0,
            alpha,
            enforce_step_rule: true,
        }
    }
}

/// Proj-STORM options (decaying step/weight/averaging schedules).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StormOptions {
    pub t_max: usize,
    pub eta0: f64,
    pub a0: f64,
    pub beta0: f64,
    pub alpha: f64,
    /// Batch size of the initial estimate g_0.
    pub g0_batch: usize,
    pub enforce_step_rule: bool,
}

impl StormOptions {
    pub fn new(t_max: usize, eta0: f64, a0: f64, beta0: f64, alpha: f64) -> StormOptions {
        StormOptions {
            t_max,
            eta0,
            a0,
            beta0,
            alpha,
            g0_batch: 1,
            enforce_step_rule: true,
        }
    }
}

fn validate_common(alpha: f64, eta0: f64, t_max: usize) -> Result<()> {
    if !(1.0..2.0).contains(&alpha) {
        return Err(Error::InvalidArgument(format!(
            "optimizer schedules need alpha in [1, 2), got {alpha}"
        )));
    }
    if !(eta0 > 0.0 && eta0.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "eta0 must be positive, got {eta0}"
        )));
    }
    if t_max == 0 {
        return Err(Error::InvalidArgument("t_max must be >= 1".into()));
    }
    Ok(())
}

fn record(
    traj: &mut Trajectory,
    oracle: &Oracle,
    t: usize,
    x: &Vector,
    grad_error_sq: Option<f64>,
) -> Result<()> {
    let gap = match oracle.objective().min_value() {
        Some(_) => Some(oracle.objective().gap(x)?),
        None => None,
    };
    traj.records.push(TrajRecord {
        t,
        x: x.clone(),
        gap,
        queries: oracle.query_count(),
        grad_error_sq,
    });
    Ok(())
}

fn numeric_failure(t: usize, traj: Trajectory) -> Error {
    Error::NumericFailure {
        at: t,
        message: "iterate left the finite floats".into(),
        trajectory: Box::new(traj),
    }
}

/// Projected minibatch SGD with the growing batch schedule
/// b_t = ⌈b0 max(t,1)^{2/(2−α)}⌉ and constant step eta0 ≤ 1/(2L):
/// x_{t+1} = proj_𝒳(x_t − eta0 ḡ_t).
pub fn proj_sgd(
    oracle: &mut Oracle,
    domain: &Domain,
    x0: &Vector,
    opts: &SgdOptions,
) -> Result<Trajectory> {
    prox_sgd(oracle, &ProxOp::Indicator(domain.clone()), x0, opts)
}

/// Proximal minibatch SGD: x_{t+1} = prox_{eta0 h}(x_t − eta0 ḡ_t).
/// With an indicator prox this is bit-for-bit Proj-SGD.
pub fn prox_sgd(
    oracle: &mut Oracle,
    prox: &ProxOp,
    x0: &Vector,
    opts: &SgdOptions,
) -> Result<Trajectory> {
    validate_common(opts.alpha, opts.eta0, opts.t_max)?;
    if !(opts.b0 >= 1.0 && opts.b0.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "b0 must be >= 1, got {}",
            opts.b0
        )));
    }
    let mut traj = Trajectory::default();
    check_step_rule(
        &mut traj,
        opts.enforce_step_rule,
        opts.eta0,
        0.5,
        oracle.objective().certificate().l,
        "eta0 <= 1/(2L)",
    )?;
    if let ProxOp::Indicator(domain) = prox {
        if !domain.contains(x0, 1e-12) {
            return Err(Error::Precondition("x0 must be feasible".into()));
        }
    }
    let batch = Schedule::SgdBatch {
        b0: opts.b0,
        alpha: opts.alpha,
    };
    let mut x = x0.clone();
    record(&mut traj, oracle, 0, &x, None)?;
    for t in 0..opts.t_max {
        let b_t = schedule_eval(&batch, t) as usize;
        let g = oracle.minibatch_mean(&x, b_t)?;
        let err = g.sub(&oracle.objective().gradient(&x)?);
        traj.records.last_mut().unwrap().grad_error_sq = Some(err.dot(&err));
        x = prox.apply(opts.eta0, &x.sub(&g.scale(opts.eta0)))?;
        if !x.is_finite() {
            return Err(numeric_failure(t + 1, traj));
        }
        record(&mut traj, oracle, t + 1, &x, None)?;
    }
    Ok(traj)
}

/// Projected STORM. Per step, with one shared-seed batch at {x_t, x_{t+1}}:
///
///   x̂_{t+1} = proj_𝒳(x_t − η_t g_t)
///   x_{t+1} = (1 − β_t) x_t + β_t x̂_{t+1}
///   g_{t+1} = (1 − a_t)(g_t − g(x_t, Z_{t+1})) + g(x_{t+1}, Z_{t+1})
///
/// with η_t = η0 (t+1)^{1−α/2}, a_t = min(a0/(t+1), 1),
/// β_t = min(β0/(t+1), 1). Two queries per step after the g0 batch.
pub fn proj_storm(
    oracle: &mut Oracle,
    domain: &Domain,
    x0: &Vector,
    opts: &StormOptions,
) -> Result<Trajectory> {
    validate_common(opts.alpha, opts.eta0, opts.t_max)?;
    if !(opts.a0 > 1.0 && opts.a0 < 2.0) {
        return Err(Error::InvalidArgument(format!(
            "storm needs a0 in (1, 2), got {}",
            opts.a0
        )));
    }
    if !(opts.beta0 > 0.0 && opts.beta0.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "beta0 must be positive, got {}",
            opts.beta0
        )));
    }
    if opts.g0_batch == 0 {
        return Err(Error::InvalidArgument("g0_batch must be >= 1".into()));
    }
    if !domain.contains(x0, 1e-12) {
        return Err(Error::Precondition("x0 must be feasible".into()));
    }
    let mut traj = Trajectory::default();
    check_step_rule(
        &mut traj,
        opts.enforce_step_rule,
        opts.beta0 * opts.eta0,
        1.0,
        oracle.objective().certificate().l,
        "beta0 * eta0 <= 1/L",
    )?;
    let step = Schedule::StormStep {
        eta0: opts.eta0,
        alpha: opts.alpha,
    };
    let weight = Schedule::StormWeight { a0: opts.a0 };
    let avg = Schedule::StormAveraging { beta0: opts.beta0 };

    let mut x = x0.clone();
    let mut g = oracle.minibatch_mean(&x, opts.g0_batch)?;
    let err0 = g.sub(&oracle.objective().gradient(&x)?);
    record(&mut traj, oracle, 0, &x, Some(err0.dot(&err0)))?;
    for t in 0..opts.t_max {
        let eta_t = schedule_eval(&step, t);
        let a_t = schedule_eval(&weight, t);
        let beta_t = schedule_eval(&avg, t);
        let x_hat = domain.project(&x.sub(&g.scale(eta_t)))?;
        let x_next = x.lerp(&x_hat, beta_t);
        let resp = oracle.query_batch(&[x.clone(), x_next.clone()])?;
        g = g
            .sub(&resp.gradients[0])
            .scale(1.0 - a_t)
            .add(&resp.gradients[1]);
        x = x_next;
        if !(x.is_finite() && g.is_finite()) {
            return Err(numeric_failure(t + 1, traj));
        }
        let err = g.sub(&oracle.objective().gradient(&x)?);
        record(&mut traj, oracle, t + 1, &x, Some(err.dot(&err)))?;
    }
    Ok(traj)
}

fn check_step_rule(
    traj: &mut Trajectory,
    enforce: bool,
    effective_step: f64,
    limit_factor: f64,
    l: f64,
    rule: &str,
) -> Result<()> {
    let limit = limit_factor / l;
    if !l.is_finite() {
        traj.warnings
            .push(format!("step rule {rule} unverifiable: certificate has no finite L"));
        return Ok(());
    }
    if effective_step > limit * (1.0 + 1e-12) {
        if enforce {
            return Err(Error::Precondition(format!(
                "step rule {rule} violated: step {effective_step} > {limit} (L = {l}); pass enforce_step_rule = false to override"
            )));
        }
        traj.warnings.push(format!(
            "step rule {rule} overridden: step {effective_step} > {limit} (L = {l})"
        ));
    }
    Ok(())
}
