//! End-to-end checks of the gradlab binary: exit codes, artifact layout,
//! and consistency between report.json and curves.csv.

use std::fs;
use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gradlab"))
}

fn config_dir() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs"))
}

#[test]
fn unknown_config_key_exits_with_config_code() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    fs::write(
        &bad,
        "[instance]\nkind = \"power\"\nalpha = 2.0\nlambda = 0.5\nr = 2.0\nbogus_key = 1\n\
         \n[oracle]\nkind = \"exact\"\n\n[optimizer]\nkind = \"proj-sgd\"\neta0 = 0.1\n\
         \n[run]\nseeds = [1]\nT = [4]\n\n[output]\ndir = \"out\"\nformat = \"json\"\n",
    )
    .unwrap();
    let out = bin().arg("run").arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(3), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn run_writes_report_and_curves_that_agree() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .arg("--out")
        .arg(dir.path())
        .arg("--format")
        .arg("both")
        .arg("run")
        .arg(config_dir().join("quadratic_exact.toml"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));

    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap())
            .unwrap();
    assert_eq!(report["schema_version"], 1);
    assert_eq!(report["prng_algorithm"], "chacha8-ctr64");

    let csv = fs::read_to_string(dir.path().join("curves.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "t,queries,seed,gap,grad_error_sq");
    let rows: Vec<&str> = lines.collect();
    // one row per (T, seed): 8 Ts x 1 seed
    assert_eq!(rows.len(), 8);

    // the per-T means in the report must be reproducible from the CSV
    for per_t in report["per_t"].as_array().unwrap() {
        let t = per_t["t"].as_u64().unwrap();
        let gaps: Vec<f64> = rows
            .iter()
            .map(|r| {
                let f: Vec<&str> = r.split(',').collect();
                (f[0].parse::<u64>().unwrap(), f[3].parse::<f64>().unwrap())
            })
            .filter(|(rt, _)| *rt == t)
            .map(|(_, g)| g)
            .collect();
        assert_eq!(gaps.len(), 1);
        let mean = gaps.iter().sum::<f64>() / gaps.len() as f64;
        let reported = per_t["mean_gap"].as_f64().unwrap();
        assert!(
            (mean - reported).abs() <= 1e-12 * (1.0 + reported.abs()),
            "t = {t}: csv mean {mean} vs report {reported}"
        );
    }
}

#[test]
fn verify_subcommand_filters_and_reports() {
    let out = bin().args(["verify", "--filter", "dominance"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    let pass_lines = stdout.lines().filter(|l| l.contains("PASS")).count();
    assert!(pass_lines >= 5, "expected several dominance checks, got:\n{stdout}");

    let out = bin()
        .args(["verify", "--filter", "no-such-check-anywhere"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("no checks selected"));
}

#[test]
fn rates_subcommand_exits_zero_on_passing_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .arg("--out")
        .arg(dir.path())
        .arg("rates")
        .arg(config_dir().join("quadratic_exact.toml"))
        .output()
        .unwrap();
    // the exact quadratic hits the gap floor; slope checks are then
    // unfittable rather than failed, so the gate stays green
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn lowerbound_demo_prints_labeled_table() {
    let out = bin()
        .args([
            "lowerbound-demo",
            "--alpha", "2", "--tau", "1", "--g", "1", "--r", "1",
            "--eps", "0.04,0.01", "--seed", "11",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("empirical exhibit"));
    assert!(stdout.contains("fitted exponent"));
}
