//! Prox-SGD with the indicator prox of the feasible set reproduces
//! Proj-SGD bit for bit, and an l1 prox on an unconstrained quadratic
//! soft-thresholds the iterates.

use std::sync::Arc;

use gradlab::geometry::{Domain, ProxOp, Vector};
use gradlab::instances::{make_lower_bound_pair, make_power_instance, Objective};
use gradlab::optimizers::{proj_sgd, prox_sgd, SgdOptions};
use gradlab::oracles::Oracle;

fn main() -> gradlab::Result<()> {
    let pair = make_lower_bound_pair(1.5, 1.0, 1.0, 0.1)?;
    let domain = Domain::interval(0.0, pair.r)?;
    let x0 = pair.f1.default_start();
    let opts = SgdOptions::new(20, 0.05, 1.0, 1.0);

    let f: Arc<dyn Objective> = pair.f1.clone();
    let mut o1 = Oracle::gaussian(f.clone(), 1.0, 42)?;
    let mut o2 = Oracle::gaussian(f, 1.0, 42)?;
    let a = proj_sgd(&mut o1, &domain, &x0, &opts)?;
    let b = prox_sgd(&mut o2, &ProxOp::Indicator(domain), &x0, &opts)?;
    for (ra, rb) in a.records.iter().zip(&b.records) {
        assert_eq!(ra.x.as_slice(), rb.x.as_slice());
    }
    println!(
        "proj vs prox(indicator): {} iterates identical, final x = {:.6}",
        a.records.len(),
        a.final_x().as_scalar()
    );

    // l1 prox: the quadratic pulls toward 0.8, the penalty snaps small
    // coordinates to zero
    let quad: Arc<dyn Objective> = Arc::new(make_power_instance(
        2.0,
        0.5,
        Vector::scalar(0.8),
        Domain::all_space(1)?,
    )?);
    let mut oracle = Oracle::exact(quad, 0);
    let traj = prox_sgd(
        &mut oracle,
        &ProxOp::L1 { lambda: 0.3 },
        &Vector::scalar(2.0),
        &SgdOptions::new(30, 0.5, 1.0, 1.0),
    )?;
    println!(
        "l1 prox fixed point: {:.6} (shrunk from the unpenalized 0.8)",
        traj.final_x().as_scalar()
    );
    Ok(())
}
