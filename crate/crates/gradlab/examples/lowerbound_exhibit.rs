//! Queries-vs-epsilon exhibit on the chain instances: tighter targets
//! densify the chain and shrink the coin bias, and the measured
//! first-passage query counts grow with a fitted power-law exponent.

use gradlab::harness::lowerbound_demo;

fn main() -> gradlab::Result<()> {
    let table = lowerbound_demo(&[0.04, 0.02, 0.01, 0.005], 2.0, 1.0, 1.0, 1.0, 11)?;
    println!("{:>10} {:>8} {:>4} {:>10}", "epsilon", "p", "N", "queries");
    for row in &table.rows {
        println!(
            "{:>10} {:>8.4} {:>4} {:>10.1}",
            row.epsilon,
            row.p.unwrap(),
            row.n.unwrap(),
            row.queries.unwrap()
        );
    }
    println!("fitted exponent: {:.3}", table.exponent.unwrap().slope);
    println!("{}", table.label);
    Ok(())
}
