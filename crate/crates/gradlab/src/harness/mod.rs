//! Experiment runner: config parsing, multi-seed execution, rate fitting,
//! verification suites, and report emission.

pub mod config;
pub mod demo;
pub mod run;
pub mod verify;

pub use config::{ExperimentConfig, OutputFormat};
pub use demo::{lowerbound_demo, DemoRow, DemoTable};
pub use run::{run_experiment, write_outputs, CurveRow, ExperimentOutput, RateReport};
pub use verify::{run_verification_suite, NamedCheck};
