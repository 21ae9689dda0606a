//! Proj-SGD rate experiment from a config file: growing minibatches on
//! the exponential instance at the alpha = 1 endpoint, gap ~ T^(-1) and
//! queries exponent -1/3.

use gradlab::harness::{run_experiment, ExperimentConfig};

fn main() -> gradlab::Result<()> {
    let config = ExperimentConfig::load(std::path::Path::new("configs/sgd_exponential.toml"))?;
    let out = run_experiment(&config)?;
    let report = &out.report;

    println!("{:>8} {:>12} {:>14} {:>14}", "T", "queries", "mean gap", "std err");
    for row in &report.per_t {
        println!(
            "{:>8} {:>12} {:>14.6e} {:>14.6e}",
            row.t, row.queries, row.mean_gap, row.std_error
        );
    }
    let fit = report.slope_vs_t.fitted.unwrap();
    println!(
        "gap slope vs T: {:.4} (target {:.4} +- {:.2})",
        fit.slope, report.slope_vs_t.target, report.slope_vs_t.tolerance
    );
    let fit = report.slope_vs_queries.fitted.unwrap();
    println!(
        "gap slope vs queries: {:.4} (target {:.4} +- {:.2})",
        fit.slope,
        report.slope_vs_queries.target,
        report.slope_vs_queries.tolerance
    );
    assert_eq!(report.slope_vs_t.passed, Some(true));
    assert_eq!(report.slope_vs_queries.passed, Some(true));
    Ok(())
}
