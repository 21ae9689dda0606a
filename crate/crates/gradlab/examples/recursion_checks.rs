//! Desk-scale checks of the three recursion lemmas behind the STORM
//! analysis: the variance envelope V_t <= E/t, the gap recursion decaying
//! like t^(-alpha/2), and the closed-form polynomial bound.

use gradlab::verifiers::{
    check_delta_recursion, check_poly_bound, check_variance_recursion, DeltaRecursionParams,
};

fn main() -> gradlab::Result<()> {
    let rep = check_variance_recursion(1.5, 1.0, 1.0, 2.0, 1.0, 4.0, 5000)?;
    println!("variance: {}", rep.details);
    assert!(rep.passed);

    // drift coefficient q0 eta0^2 / (2 tau^{2/alpha}) of order one makes
    // the t^(-alpha/2) asymptote visible at desk scale (L = 8 gives 1)
    for alpha in [1.0, 1.5, 1.9] {
        let p = DeltaRecursionParams {
            alpha,
            tau: 1.0,
            q0: 2.0,
            c0: 4.0,
            eta0: 1.0,
            beta0: 1.0,
            e: 1.0,
            delta0: 1.0,
            t_max: 200_000,
        };
        let rep = check_delta_recursion(&p)?;
        println!("delta at alpha = {alpha}: {}", rep.details);
        assert!(rep.passed);
    }

    let rep = check_poly_bound(0.7, 1.3, 0.02, 1.5)?;
    println!("poly bound: {}", rep.details);
    assert!(rep.passed);
    Ok(())
}
