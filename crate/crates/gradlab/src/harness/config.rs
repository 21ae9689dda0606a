//! TOML experiment configuration. Unknown keys are hard errors: silent
//! typos corrupt experiments.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::geometry::{Domain, Vector};
use crate::instances::{
    make_exponential_instance, make_foster_instance, make_lower_bound_pair, make_nbs_instance,
    make_phi_kl_instance, make_power_instance, FosterInstance, NoisySlope, Objective,
};
use crate::oracles::Oracle;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
    Both,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<OutputFormat> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            "both" => Ok(OutputFormat::Both),
            other => Err(Error::Config(vec![format!(
                "output.format must be json, csv or both, got {other:?}"
            )])),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceSpec {
    /// One of: pair-f0, pair-f1, nbs, phi-kl, foster, power, exponential.
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j_star: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub basis_seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSpec {
    /// One of: gaussian, nbs, foster, exact.
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerSpec {
    /// One of: proj-sgd, prox-sgd, proj-storm.
    pub kind: String,
    pub eta0: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g0_batch: Option<usize>,
    /// L1 penalty weight; switches prox-sgd to the soft-threshold prox.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l1_lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub enforce_step_rule: Option<bool>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    pub seeds: Vec<u64>,
    #[serde(rename = "T")]
    pub t: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parallelism: Option<usize>,
    /// Band half-width for the gap-vs-T slope check.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slope_tolerance: Option<f64>,
    /// Band half-width for the gap-vs-queries slope check.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub query_slope_tolerance: Option<f64>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<OutputFormat>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub instance: InstanceSpec,
    pub oracle: OracleSpec,
    pub optimizer: OptimizerSpec,
    pub run: RunSpec,
    #[serde(default)]
    pub output: OutputSpec,
}

/// An instance constructed from a spec, with the concrete handles the
/// oracle backends need.
pub struct BuiltInstance {
    pub objective: Arc<dyn Objective>,
    pub noisy: Option<Arc<dyn NoisySlope>>,
    pub foster: Option<Arc<FosterInstance>>,
    pub domain: Domain,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<ExperimentConfig> {
        let text = std::fs::read_to_string(path)?;
        let cfg: ExperimentConfig = toml::from_str(&text)
            .map_err(|e| Error::Config(vec![format!("{}: {e}", path.display())]))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks everything checkable without running; collects every
    /// violation instead of stopping at the first.
    pub fn validate(&self) -> Result<()> {
        let mut bad = Vec::new();
        self.check_instance(&mut bad);
        self.check_oracle(&mut bad);
        self.check_optimizer(&mut bad);
        if self.run.seeds.is_empty() {
            bad.push("run.seeds must be nonempty".into());
        }
        if self.run.t.is_empty() {
            bad.push("run.T must be nonempty".into());
        } else if !self.run.t.windows(2).all(|w| w[0] < w[1]) {
            bad.push("run.T must be strictly increasing".into());
        }
        if self.run.t.first() == Some(&0) {
            bad.push("run.T entries must be >= 1".into());
        }
        if self.run.parallelism == Some(0) {
            bad.push("run.parallelism must be >= 1".into());
        }
        for (name, tol) in [
            ("slope_tolerance", self.run.slope_tolerance),
            ("query_slope_tolerance", self.run.query_slope_tolerance),
        ] {
            if let Some(v) = tol {
                if !(v > 0.0 && v.is_finite()) {
                    bad.push(format!("run.{name} must be positive and finite"));
                }
            }
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(bad))
        }
    }

    fn check_instance(&self, bad: &mut Vec<String>) {
        let i = &self.instance;
        let need = |bad: &mut Vec<String>, names: &[(&str, bool)]| {
            for (name, present) in names {
                if !present {
                    bad.push(format!(
                        "instance.{name} is required for kind {:?}",
                        i.kind
                    ));
                }
            }
        };
        match i.kind.as_str() {
            "pair-f0" | "pair-f1" => need(
                bad,
                &[
                    ("alpha", i.alpha.is_some()),
                    ("c", i.c.is_some()),
                    ("r", i.r.is_some()),
                    ("rho", i.rho.is_some()),
                ],
            ),
            "nbs" => need(
                bad,
                &[
                    ("alpha", i.alpha.is_some()),
                    ("p", i.p.is_some()),
                    ("g", i.g.is_some()),
                    ("r", i.r.is_some()),
                    ("n", i.n.is_some()),
                    ("j_star", i.j_star.is_some()),
                ],
            ),
            "phi-kl" => need(
                bad,
                &[
                    ("q", i.q.is_some()),
                    ("p", i.p.is_some()),
                    ("g", i.g.is_some()),
                    ("r", i.r.is_some()),
                    ("n", i.n.is_some()),
                    ("j_star", i.j_star.is_some()),
                ],
            ),
            "foster" => need(
                bad,
                &[
                    ("sigma", i.sigma.is_some()),
                    ("r", i.r.is_some()),
                    ("m", i.m.is_some()),
                    ("d", i.d.is_some()),
                ],
            ),
            "power" => need(
                bad,
                &[
                    ("alpha", i.alpha.is_some()),
                    ("lambda", i.lambda.is_some()),
                    ("r", i.r.is_some()),
                ],
            ),
            "exponential" => need(
                bad,
                &[("scale", i.scale.is_some()), ("r", i.r.is_some())],
            ),
            other => bad.push(format!(
                "instance.kind {other:?} is not one of pair-f0, pair-f1, nbs, \
                 phi-kl, foster, power, exponential"
            )),
        }
    }

    fn check_oracle(&self, bad: &mut Vec<String>) {
        match self.oracle.kind.as_str() {
            "gaussian" => match self.oracle.sigma {
                None => bad.push("oracle.sigma is required for kind \"gaussian\"".into()),
                Some(s) if !(s >= 0.0 && s.is_finite()) => {
                    bad.push("oracle.sigma must be a finite nonnegative real".into())
                }
                _ => {}
            },
            "nbs" => {
                if !matches!(self.instance.kind.as_str(), "nbs" | "phi-kl") {
                    bad.push("oracle.kind \"nbs\" needs an nbs or phi-kl instance".into());
                }
            }
            "foster" => {
                if self.instance.kind != "foster" {
                    bad.push("oracle.kind \"foster\" needs a foster instance".into());
                }
            }
            "exact" => {}
            other => bad.push(format!(
                "oracle.kind {other:?} is not one of gaussian, nbs, foster, exact"
            )),
        }
    }

    fn check_optimizer(&self, bad: &mut Vec<String>) {
        let o = &self.optimizer;
        match o.kind.as_str() {
            "proj-sgd" | "prox-sgd" => {
                if o.b0.is_none() {
                    bad.push(format!("optimizer.b0 is required for kind {:?}", o.kind));
                }
            }
            "proj-storm" => {
                if o.a0.is_none() {
                    bad.push("optimizer.a0 is required for kind \"proj-storm\"".into());
                }
                if o.beta0.is_none() {
                    bad.push("optimizer.beta0 is required for kind \"proj-storm\"".into());
                }
            }
            other => bad.push(format!(
                "optimizer.kind {other:?} is not one of proj-sgd, prox-sgd, proj-storm"
            )),
        }
        if !(o.eta0 > 0.0 && o.eta0.is_finite()) {
            bad.push("optimizer.eta0 must be a positive finite real".into());
        }
    }

    /// Constructs the configured instance; precondition violations surface
    /// as config errors.
    pub fn build_instance(&self) -> Result<BuiltInstance> {
        let i = &self.instance;
        let wrap = |e: Error| match e {
            Error::InvalidArgument(m) | Error::Precondition(m) => {
                Error::Config(vec![format!("instance: {m}")])
            }
            other => other,
        };
        let built = match i.kind.as_str() {
            "pair-f0" | "pair-f1" => {
                let pair = make_lower_bound_pair(
                    i.alpha.unwrap(),
                    i.c.unwrap(),
                    i.r.unwrap(),
                    i.rho.unwrap(),
                )
                .map_err(wrap)?;
                let member = if i.kind == "pair-f0" { pair.f0 } else { pair.f1 };
                let domain = member.natural_domain();
                BuiltInstance {
                    objective: member,
                    noisy: None,
                    foster: None,
                    domain,
                }
            }
            "nbs" => {
                let inst = Arc::new(
                    make_nbs_instance(
                        i.alpha.unwrap(),
                        i.p.unwrap(),
                        i.g.unwrap(),
                        i.r.unwrap(),
                        i.n.unwrap(),
                        i.j_star.unwrap(),
                    )
                    .map_err(wrap)?,
                );
                BuiltInstance {
                    objective: inst.clone(),
                    noisy: Some(inst.clone()),
                    foster: None,
                    domain: inst.natural_domain(),
                }
            }
            "phi-kl" => {
                let inst = Arc::new(
                    make_phi_kl_instance(
                        i.q.unwrap(),
                        i.p.unwrap(),
                        i.g.unwrap(),
                        i.r.unwrap(),
                        i.n.unwrap(),
                        i.j_star.unwrap(),
                    )
                    .map_err(wrap)?,
                );
                BuiltInstance {
                    objective: inst.clone(),
                    noisy: Some(inst.clone()),
                    foster: None,
                    domain: inst.natural_domain(),
                }
            }
            "foster" => {
                let inst = Arc::new(
                    make_foster_instance(
                        i.sigma.unwrap(),
                        i.r.unwrap(),
                        i.m.unwrap(),
                        i.d.unwrap(),
                        i.basis_seed.unwrap_or(0),
                    )
                    .map_err(wrap)?,
                );
                BuiltInstance {
                    objective: inst.clone(),
                    noisy: None,
                    foster: Some(inst.clone()),
                    domain: inst.natural_domain(),
                }
            }
            "power" => {
                let r = i.r.unwrap();
                let inst = make_power_instance(
                    i.alpha.unwrap(),
                    i.lambda.unwrap(),
                    Vector::scalar(0.0),
                    Domain::interval(-r, r).map_err(wrap)?,
                )
                .map_err(wrap)?;
                let domain = inst.natural_domain();
                BuiltInstance {
                    objective: Arc::new(inst),
                    noisy: None,
                    foster: None,
                    domain,
                }
            }
            "exponential" => {
                let inst =
                    make_exponential_instance(i.scale.unwrap(), i.r.unwrap()).map_err(wrap)?;
                let domain = inst.natural_domain();
                BuiltInstance {
                    objective: Arc::new(inst),
                    noisy: None,
                    foster: None,
                    domain,
                }
            }
            other => {
                return Err(Error::Config(vec![format!(
                    "instance.kind {other:?} unknown"
                )]))
            }
        };
        Ok(built)
    }

    /// Fresh oracle for one run.
    pub fn build_oracle(&self, built: &BuiltInstance, seed: u64) -> Result<Oracle> {
        match self.oracle.kind.as_str() {
            "gaussian" => Oracle::gaussian(
                built.objective.clone(),
                self.oracle.sigma.unwrap_or(0.0),
                seed,
            ),
            "nbs" => {
                let noisy = built.noisy.clone().ok_or_else(|| {
                    Error::Config(vec!["oracle.kind \"nbs\" needs an nbs/phi-kl instance".into()])
                })?;
                Ok(Oracle::nbs(noisy, seed))
            }
            "foster" => {
                let inst = built.foster.clone().ok_or_else(|| {
                    Error::Config(vec!["oracle.kind \"foster\" needs a foster instance".into()])
                })?;
                Ok(Oracle::foster(inst, seed))
            }
            "exact" => Ok(Oracle::exact(built.objective.clone(), seed)),
            other => Err(Error::Config(vec![format!("oracle.kind {other:?} unknown")])),
        }
    }

    pub fn start_point(&self, built: &BuiltInstance) -> Result<Vector> {
        match &self.optimizer.x0 {
            Some(coords) => {
                let v = Vector::new(coords.clone())?;
                built.objective.check_dim(&v)?;
                Ok(v)
            }
            None => Ok(built.objective.default_start()),
        }
    }
}
