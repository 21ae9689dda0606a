//! Closed forms of the hard pair (f0, f1): frozen constants at
//! alpha = 1.5, C = R = 1, rho = 0.1, and the per-step Gaussian KL
//! profile that makes the two members statistically indistinguishable
//! away from the perturbed region.

use gradlab::geometry::Vector;
use gradlab::instances::{make_lower_bound_pair, theoretical_constants, Objective};
use gradlab::verifiers::kl_per_step;

fn main() -> gradlab::Result<()> {
    let pair = make_lower_bound_pair(1.5, 1.0, 1.0, 0.1)?;
    let cert = theoretical_constants(&pair);
    let zero = Vector::scalar(0.0);

    println!("L        = {}", cert.l);
    println!("tau      = {:.12} (= (1/3)^1.5)", cert.tau);
    println!("eta0     = {:.12} (= 1/15)", cert.eta0.unwrap());
    println!("f1(0)    = {:.12}", pair.f1.value(&zero)?);
    println!("f1'(0)   = {:.12}", pair.f1.gradient(&zero)?.as_scalar());
    println!("f0(0)    = {:.12}", pair.f0.value(&zero)?);

    println!("\nper-step KL at sigma = 1:");
    for x in [0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.5, 1.0] {
        println!("  x = {x:>4}: {:.10}", kl_per_step(&pair, 1.0, x)?);
    }
    // members coincide past twice the perturbation radius
    assert_eq!(kl_per_step(&pair, 1.0, 0.2)?, 0.0);
    Ok(())
}
