//! The noisy-binary-search chain: derive (p, N) from a precision budget,
//! build the instance, check local dominance near the hidden valley, and
//! sample the Bernoulli slope oracle to confirm unbiasedness and the hard
//! per-draw norm bound.

use std::sync::Arc;

use gradlab::geometry::{Domain, Vector};
use gradlab::instances::{make_nbs_instance, nbs_parameters, NoisySlope, Objective};
use gradlab::oracles::Oracle;
use gradlab::verifiers::{verify_local_grad_dominance, GridSpec};

fn main() -> gradlab::Result<()> {
    let (alpha, tau, g, r) = (2.0, 1.0, 1.0, 1.0);
    let (p, n) = nbs_parameters(0.04, alpha, tau, g, r)?;
    println!("epsilon = 0.04 -> p = {p:.4}, N = {n}");

    let inst = Arc::new(make_nbs_instance(alpha, p, g, r, n, 1)?);
    println!(
        "valley on [{:.3}, {:.3}], minimizer {:.3}, min value {:.6}",
        inst.breakpoint(1),
        inst.breakpoint(2),
        inst.midpoint(1),
        inst.min_value().unwrap()
    );

    // dominance holds locally (gap below the budget), not globally
    let grid = GridSpec::new(Domain::interval(0.0, r)?, 8011);
    let rep = verify_local_grad_dominance(inst.as_ref(), &grid, alpha, tau, 0.04, 1e-9)?;
    println!("local dominance: {}", rep.details);
    assert!(rep.passed && rep.conclusive);

    // the oracle flips a +-p biased coin per query; mean matches the true
    // slope, every draw is bounded by G
    let noisy: Arc<dyn NoisySlope> = inst.clone();
    let mut oracle = Oracle::nbs(noisy, 17);
    for x in [0.1, inst.midpoint(1), 0.8] {
        let stats = oracle.oracle_statistics(&Vector::scalar(x), 40_000)?;
        println!(
            "x = {x:.3}: mean error {:.5}, variance {:.5}, max |draw| {:.5}",
            stats.mean_error_norm, stats.variance, stats.max_norm
        );
        assert!(stats.max_norm <= g + 1e-12);
    }
    Ok(())
}
