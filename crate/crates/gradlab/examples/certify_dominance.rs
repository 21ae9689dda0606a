//! Certify (alpha, tau)-gradient-dominance of the hard pair on a grid,
//! in both the unconstrained and projected (gradient-mapping) forms, and
//! show that halving tau is caught as a violation.

use gradlab::geometry::Domain;
use gradlab::instances::{make_lower_bound_pair, theoretical_constants};
use gradlab::verifiers::{verify_grad_dominance, verify_projected_grad_dominance, GridSpec};

fn main() -> gradlab::Result<()> {
    let pair = make_lower_bound_pair(1.5, 1.0, 1.0, 0.1)?;
    let cert = theoretical_constants(&pair);
    println!(
        "pair alpha = {}, tau = {:.6}, L = {}, eta0 = {:.6}",
        cert.alpha,
        cert.tau,
        cert.l,
        cert.eta0.unwrap()
    );

    let domain = Domain::interval(0.0, pair.r)?;
    let grid = GridSpec::new(domain.clone(), 4001);

    for (name, member) in [("f0", &pair.f0), ("f1", &pair.f1)] {
        let rep = verify_grad_dominance(member.as_ref(), &grid, cert.alpha, cert.tau, 1e-6)?;
        println!(
            "{name}: dominance worst ratio {:.6} passed = {}",
            rep.worst_ratio, rep.passed
        );

        let etas = [cert.eta0.unwrap(), cert.eta0.unwrap() / 4.0];
        let rep = verify_projected_grad_dominance(
            member.as_ref(),
            &domain,
            &grid,
            cert.alpha,
            cert.tau,
            &etas,
            1e-6,
        )?;
        println!(
            "{name}: projected dominance worst ratio {:.6} passed = {}",
            rep.worst_ratio, rep.passed
        );
    }

    // negative control: an undersized tau must be rejected
    let rep = verify_grad_dominance(pair.f1.as_ref(), &grid, cert.alpha, cert.tau / 2.0, 1e-6)?;
    println!(
        "f1 with tau/2: worst ratio {:.6} passed = {} (expected failure)",
        rep.worst_ratio, rep.passed
    );
    assert!(!rep.passed);
    Ok(())
}
