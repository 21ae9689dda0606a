//! A desk-scale laboratory for stochastic first-order optimization under
//! (α, τ)-gradient-dominance.
//!
//! The crate builds closed-form hard instances (the two-function lower-bound
//! pair, the noisy-binary-search chain, the finite-sum quadratic, a φ-KL
//! variant), wraps them in stochastic gradient oracles with shared-seed batch
//! semantics, runs Proj-SGD / Prox-SGD / Proj-STORM on them, and checks the
//! resulting trajectories and certificates against the theory: dominance and
//! smoothness on dense grids, variance/gap recursions at equality, and
//! log-log rate fits against the predicted exponents.
//!
//! Modules follow the pipeline: [`geometry`] (vectors, domains, projections,
//! prox), [`instances`] (objectives and their certificates), [`oracles`],
//! [`optimizers`], [`verifiers`], and [`harness`] (configs, experiment
//! runner, verification suite, lower-bound demo).

pub mod fit;
pub mod geometry;
pub mod harness;
pub mod instances;
pub mod optimizers;
pub mod oracles;
pub mod verifiers;

use optimizers::Trajectory;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("infeasible precision target: {0}")]
    InfeasiblePrecision(String),
    #[error("certificate violation: {0}")]
    CertificateViolation(String),
    #[error("non-finite value: {0}")]
    NonFinite(String),
    #[error("numeric failure at iteration {at}: {message}")]
    NumericFailure {
        at: usize,
        message: String,
        trajectory: Box<Trajectory>,
    },
    #[error("config error:\n  {}", .0.join("\n  "))]
    Config(Vec<String>),
    #[error("check failed: {0}")]
    CheckFailed(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code contract: 0 success, 2 failed checks/rates,
    /// 3 config errors, 4 numeric failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::InvalidArgument(_) | Error::Precondition(_) => 3,
            Error::NumericFailure { .. } | Error::NonFinite(_) => 4,
            _ => 2,
        }
    }
}
