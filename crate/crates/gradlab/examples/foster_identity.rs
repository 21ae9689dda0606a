//! The Foster-style quadratic-over-a-random-subspace instance: the exact
//! identity ||grad F(x)||^2 = 2 b (F(x) - F*) with b = 2 sigma / (R sqrt(m)),
//! plus the bounded second moment of its oracle.

use std::sync::Arc;

use gradlab::geometry::Vector;
use gradlab::instances::{make_foster_instance, Objective};
use gradlab::oracles::Oracle;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> gradlab::Result<()> {
    let inst = Arc::new(make_foster_instance(1.0, 2.0, 4, 6, 99)?);
    println!("b = {} (expect 2 sigma / (R sqrt(m)) = 0.5)", inst.b);
    let x_star = inst.minimizer().unwrap();
    println!("||x*|| = {} (expect R/2 = 1)", x_star.norm());

    // identity on random points
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let x = Vector::new((0..6).map(|_| rng.gen_range(-2.0..2.0)).collect())?;
        let lhs = inst.gradient(&x)?.norm().powi(2);
        let rhs = 2.0 * inst.b * inst.gap(&x)?;
        worst = worst.max((lhs - rhs).abs() / rhs.max(1.0));
    }
    println!("identity worst relative error: {worst:.3e}");
    assert!(worst < 1e-10);

    let mut oracle = Oracle::foster(inst.clone(), 21);
    let stats = oracle.oracle_statistics(&Vector::zeros(6), 50_000)?;
    println!(
        "oracle at 0: mean error {:.5}, variance {:.5} (bounded by sigma^2 = 1)",
        stats.mean_error_norm, stats.variance
    );
    Ok(())
}
