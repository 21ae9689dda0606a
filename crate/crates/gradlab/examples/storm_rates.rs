//! Proj-STORM rate experiment from a config file: variance-reduced
//! single-query steps on the harder pair member at alpha = 1.5, gap
//! ~ T^(-3/4) in both T and queries.

use gradlab::harness::{run_experiment, ExperimentConfig};

fn main() -> gradlab::Result<()> {
    let config = ExperimentConfig::load(std::path::Path::new("configs/storm_f1.toml"))?;
    let out = run_experiment(&config)?;
    let report = &out.report;

    println!("{:>8} {:>12} {:>14} {:>18}", "T", "queries", "mean gap", "mean grad err^2");
    for row in &report.per_t {
        println!(
            "{:>8} {:>12} {:>14.6e} {:>18.6e}",
            row.t,
            row.queries,
            row.mean_gap,
            row.mean_grad_error_sq.unwrap_or(f64::NAN)
        );
    }
    let fit = report.slope_vs_t.fitted.unwrap();
    println!(
        "gap slope vs T: {:.4} (target {:.4} +- {:.2})",
        fit.slope, report.slope_vs_t.target, report.slope_vs_t.tolerance
    );
    assert_eq!(report.slope_vs_t.passed, Some(true));
    Ok(())
}
