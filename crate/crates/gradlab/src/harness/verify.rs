//! Named verification checks over the default instance matrix, selectable
//! by substring filter.

use serde::Serialize;

use crate::geometry::Domain;
use crate::instances::{
    make_foster_instance, make_lower_bound_pair, make_nbs_instance, make_phi_kl_instance,
    make_power_instance, theoretical_constants, Objective,
};
use crate::verifiers::{
    check_delta_recursion, check_poly_bound, check_variance_recursion, kl_per_step,
    verify_distance_bounds, verify_grad_dominance, verify_holder, verify_local_grad_dominance,
    verify_phi_kl, verify_projected_grad_dominance, verify_smoothness, CheckReport,
    DeltaRecursionParams, GridSpec,
};
use crate::geometry::Vector;
use crate::Result;

#[derive(Clone, Debug, Serialize)]
pub struct NamedCheck {
    pub name: String,
    pub report: CheckReport,
}

type CheckFn = fn() -> Result<CheckReport>;

fn interval_grid(r: f64, points: usize) -> GridSpec {
    GridSpec::new(Domain::Interval { lo: 0.0, hi: r }, points)
}

fn dominance_member(alpha: f64, member_one: bool) -> Result<CheckReport> {
    let pair = make_lower_bound_pair(alpha, 1.0, 1.0, 0.1)?;
    let cert = theoretical_constants(&pair);
    let f: &dyn Objective = if member_one { pair.f1.as_ref() } else { pair.f0.as_ref() };
    verify_grad_dominance(f, &interval_grid(1.0, 2001), cert.alpha, cert.tau, 1e-6)
}

fn projected_dominance_member(member_one: bool) -> Result<CheckReport> {
    let pair = make_lower_bound_pair(1.5, 1.0, 1.0, 0.1)?;
    let cert = theoretical_constants(&pair);
    let eta0 = cert.eta0.unwrap();
    let f: &dyn Objective = if member_one { pair.f1.as_ref() } else { pair.f0.as_ref() };
    verify_projected_grad_dominance(
        f,
        &f.natural_domain(),
        &interval_grid(1.0, 2001),
        cert.alpha,
        cert.tau,
        &[eta0 / 2.0, eta0],
        1e-6,
    )
}

fn smoothness_member(member_one: bool) -> Result<CheckReport> {
    let pair = make_lower_bound_pair(1.5, 1.0, 1.0, 0.1)?;
    let f = if member_one { &pair.f1 } else { &pair.f0 };
    verify_smoothness(
        f.as_ref(),
        &interval_grid(1.0, 2001),
        f.certificate().l,
        1e-6,
    )
}

fn nbs_local_dominance() -> Result<CheckReport> {
    let inst = make_nbs_instance(2.0, 0.4, 1.0, 1.0, 2, 1)?;
    let cert = inst.certificate();
    let depth = -inst.min_value().unwrap();
    verify_local_grad_dominance(
        &inst,
        &interval_grid(1.0, 4001),
        cert.alpha,
        cert.tau,
        depth,
        1e-9,
    )
}

fn phi_kl_check() -> Result<CheckReport> {
    let inst = make_phi_kl_instance(2.0, 0.25, 1.0, 1.0, 4, 2)?;
    verify_phi_kl(&inst, 2001, 1e-9)
}

fn foster_dominance() -> Result<CheckReport> {
    let inst = make_foster_instance(1.0, 2.0, 4, 6, 7)?;
    let grid = GridSpec::new(Domain::ball(Vector::zeros(6), 2.0)?, 400);
    // the quadratic identity is exactly (2, 1/(2b))-dominance with equality
    verify_grad_dominance(&inst, &grid, 2.0, 1.0 / (2.0 * inst.b), 1e-9)
}

fn holder_power() -> Result<CheckReport> {
    let inst = make_power_instance(3.0, 1.0, Vector::scalar(0.0), Domain::interval(-1.0, 1.0)?)?;
    let grid = GridSpec::new(Domain::Interval { lo: -1.0, hi: 1.0 }, 2001);
    verify_holder(&inst, &grid, 1.5 * 2f64.sqrt(), 3.0, 1e-9)
}

fn distance_bound_f0() -> Result<CheckReport> {
    let pair = make_lower_bound_pair(1.5, 1.0, 1.0, 0.1)?;
    let cert = theoretical_constants(&pair);
    verify_distance_bounds(
        pair.f0.as_ref(),
        &interval_grid(1.0, 2001),
        cert.alpha,
        cert.tau,
        cert.l,
        1e-9,
    )
}

fn kl_integrand_shape() -> Result<CheckReport> {
    let pair = make_lower_bound_pair(1.5, 1.0, 1.0, 0.1)?;
    let mut worst: (f64, f64) = (f64::NEG_INFINITY, 0.0);
    for k in 0..=100_000u32 {
        let x = k as f64 / 100_000.0;
        let v = kl_per_step(&pair, 1.0, x)?;
        if x >= 2.0 * pair.rho && v != 0.0 {
            return Ok(CheckReport {
                passed: false,
                conclusive: true,
                worst_ratio: v,
                worst_point: Some(Vector::scalar(x)),
                details: format!("integrand nonzero at x = {x} past the split point"),
            });
        }
        if v > worst.0 {
            worst = (v, x);
        }
    }
    let passed = worst.1 == 0.0;
    Ok(CheckReport {
        passed,
        conclusive: true,
        worst_ratio: worst.0,
        worst_point: Some(Vector::scalar(worst.1)),
        details: format!(
            "per-query divergence peaks at x = {} (value {:.3e})",
            worst.1, worst.0
        ),
    })
}

fn recursion_variance() -> Result<CheckReport> {
    check_variance_recursion(1.5, 1.0, 1.0, 1.0, 1.0, 1.0, 100_000)
}

fn recursion_delta() -> Result<CheckReport> {
    check_delta_recursion(&DeltaRecursionParams {
        alpha: 1.5,
        tau: 1.0,
        q0: 2.0,
        c0: 4.0,
        eta0: 1.0,
        beta0: 1.0,
        e: 1.0,
        delta0: 1.0,
        t_max: 100_000,
    })
}

fn recursion_poly() -> Result<CheckReport> {
    check_poly_bound(2.0, 1.0, 0.5, 1.5)
}

/// The registered checks, in report order. Names are stable identifiers
/// meant for substring filtering.
fn registry() -> Vec<(&'static str, CheckFn)> {
    vec![
        ("dominance-f0-alpha1.2", || dominance_member(1.2, false)),
        ("dominance-f0-alpha1.5", || dominance_member(1.5, false)),
        ("dominance-f0-alpha1.8", || dominance_member(1.8, false)),
        ("dominance-f1-alpha1.2", || dominance_member(1.2, true)),
        ("dominance-f1-alpha1.5", || dominance_member(1.5, true)),
        ("dominance-f1-alpha1.8", || dominance_member(1.8, true)),
        ("dominance-projected-f0", || projected_dominance_member(false)),
        ("dominance-projected-f1", || projected_dominance_member(true)),
        ("dominance-local-nbs", nbs_local_dominance),
        ("dominance-phi-kl", phi_kl_check),
        ("dominance-foster-identity", foster_dominance),
        ("smoothness-f0", || smoothness_member(false)),
        ("smoothness-f1", || smoothness_member(true)),
        ("holder-power-growth", holder_power),
        ("distance-bound-f0", distance_bound_f0),
        ("kl-integrand-shape", kl_integrand_shape),
        ("recursion-variance", recursion_variance),
        ("recursion-delta", recursion_delta),
        ("recursion-poly-bound", recursion_poly),
    ]
}

/// Runs every registered check whose name contains `filter` (empty filter
/// selects everything). Check failures are report entries, not errors.
pub fn run_verification_suite(filter: &str) -> Result<Vec<NamedCheck>> {
    let mut out = Vec::new();
    for (name, f) in registry() {
        if !name.contains(filter) {
            continue;
        }
        out.push(NamedCheck {
            name: name.to_string(),
            report: f()?,
        });
    }
    Ok(out)
}
