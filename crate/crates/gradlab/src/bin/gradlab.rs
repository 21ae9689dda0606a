//! CLI front-end: run experiments, verify certificates, fit rates, and
//! exhibit the lower-bound query scaling.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use gradlab::harness::config::ExperimentConfig;
use gradlab::harness::run::{run_experiment, write_outputs, ExperimentOutput};
use gradlab::harness::{lowerbound_demo, run_verification_suite, OutputFormat};
use gradlab::{Error, Result};

#[derive(Parser)]
#[command(name = "gradlab", version, about = "stochastic gradient-dominance laboratory")]
struct Cli {
    /// Output directory (overrides output.dir from the config).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (overrides run.parallelism).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Artifact format: json, csv or both.
    #[arg(long, global = true)]
    format: Option<String>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the configured experiment and write report.json / curves.csv.
    Run { config: PathBuf },
    /// Run the registered certificate checks, optionally filtered.
    Verify {
        #[arg(long, default_value = "")]
        filter: String,
    },
    /// Run the experiment and judge the fitted slopes against theory.
    Rates { config: PathBuf },
    /// Empirical queries-vs-epsilon exhibit on the noisy chain.
    LowerboundDemo {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        tau: f64,
        #[arg(long)]
        g: f64,
        #[arg(long)]
        r: f64,
        #[arg(long, value_delimiter = ',', required = true)]
        eps: Vec<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn load_with_overrides(cli: &Cli, path: &PathBuf) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::load(path)?;
    if let Some(out) = &cli.out {
        cfg.output.dir = Some(out.display().to_string());
    }
    if let Some(jobs) = cli.jobs {
        cfg.run.parallelism = Some(jobs);
    }
    if let Some(fmt) = &cli.format {
        cfg.output.format = Some(fmt.parse()?);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn emit(cfg: &ExperimentConfig, out: &ExperimentOutput) -> Result<()> {
    let dir = cfg.output.dir.clone().unwrap_or_else(|| ".".into());
    let format = cfg.output.format.unwrap_or(OutputFormat::Both);
    write_outputs(out, PathBuf::from(&dir).as_path(), format)?;
    for cell in &out.report.per_t {
        let floor = if cell.below_floor {
            "  [converged below floor]"
        } else {
            ""
        };
        println!(
            "T = {:6}  queries = {:10}  mean gap = {:.6e} ± {:.1e}{floor}",
            cell.t, cell.queries, cell.mean_gap, cell.std_error
        );
    }
    for (name, s) in [
        ("gap vs T", &out.report.slope_vs_t),
        ("gap vs queries", &out.report.slope_vs_queries),
    ] {
        match &s.fitted {
            Some(fit) => println!(
                "slope {name}: {:.4} (target {:.4} ± {:.2})",
                fit.slope, s.target, s.tolerance
            ),
            None => println!("slope {name}: not fitted"),
        }
    }
    for w in &out.report.warnings {
        eprintln!("warning: {w}");
    }
    println!("wrote artifacts to {dir}");
    Ok(())
}

fn run(cli: &Cli) -> Result<i32> {
    match &cli.cmd {
        Cmd::Run { config } => {
            let cfg = load_with_overrides(cli, config)?;
            let out = run_experiment(&cfg)?;
            emit(&cfg, &out)?;
            Ok(0)
        }
        Cmd::Rates { config } => {
            let cfg = load_with_overrides(cli, config)?;
            let out = run_experiment(&cfg)?;
            emit(&cfg, &out)?;
            let mut code = 0;
            for (name, s) in [
                ("gap vs T", &out.report.slope_vs_t),
                ("gap vs queries", &out.report.slope_vs_queries),
            ] {
                match s.passed {
                    Some(true) => println!("rate check {name}: PASS"),
                    Some(false) => {
                        println!("rate check {name}: FAIL");
                        code = 2;
                    }
                    None => println!("rate check {name}: inconclusive (no fit)"),
                }
            }
            Ok(code)
        }
        Cmd::Verify { filter } => {
            let checks = run_verification_suite(filter)?;
            if checks.is_empty() {
                println!("no checks selected");
                return Ok(0);
            }
            let mut code = 0;
            for c in &checks {
                let verdict = if c.report.passed { "PASS" } else { "FAIL" };
                println!("{:28} {verdict}  {}", c.name, c.report.details);
                if !c.report.passed {
                    code = 2;
                }
            }
            if let Some(dir) = &cli.out {
                std::fs::create_dir_all(dir)?;
                let json = serde_json::to_string_pretty(&checks)
                    .expect("check reports serialize");
                std::fs::write(dir.join("report.json"), json + "\n")?;
            }
            Ok(code)
        }
        Cmd::LowerboundDemo {
            alpha,
            tau,
            g,
            r,
            eps,
            seed,
        } => {
            let table = lowerbound_demo(eps, *alpha, *tau, *g, *r, *seed)?;
            println!("{:>10}  {:>8}  {:>5}  {:>12}  note", "epsilon", "p", "N", "queries");
            for row in &table.rows {
                println!(
                    "{:>10}  {:>8}  {:>5}  {:>12}  {}",
                    row.epsilon,
                    row.p.map(|p| format!("{p:.4}")).unwrap_or_else(|| "-".into()),
                    row.n.map(|n| n.to_string()).unwrap_or_else(|| "-".into()),
                    row.queries
                        .map(|q| format!("{q:.1}"))
                        .unwrap_or_else(|| "-".into()),
                    row.note
                );
            }
            if let Some(fit) = &table.exponent {
                println!("fitted exponent (log queries vs log epsilon): {:.3}", fit.slope);
            }
            println!("{}", table.label);
            if let Some(dir) = &cli.out {
                std::fs::create_dir_all(dir)?;
                let json = serde_json::to_string_pretty(&table).expect("table serializes");
                std::fs::write(dir.join("report.json"), json + "\n")?;
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            let code = e.exit_code();
            if let Error::NumericFailure { trajectory, .. } = &e {
                eprintln!("  failed after {} recorded steps", trajectory.records.len());
            }
            ExitCode::from(code as u8)
        }
    }
}
