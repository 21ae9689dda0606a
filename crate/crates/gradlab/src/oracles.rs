//! Stochastic first-order oracles with shared-seed batch semantics.
//!
//! One call to [`Oracle::query_batch`] draws a single realization Z and
//! evaluates the stochastic gradient g(·, Z) at every requested point, which
//! is what the STORM correction term needs for its difference
//! g(x_{t+1}, Z) − g(x_t, Z) to telescope.

use std::collections::HashMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::Vector;
use crate::instances::{standard_normal, FosterInstance, NoisySlope, Objective};
use crate::{Error, Result};

/// Identifier of the counter-based splittable generator behind every oracle,
/// recorded in reports for reproducibility.
pub const PRNG_ALGORITHM: &str = "chacha8-ctr64";

enum Backend {
    /// Exact gradient plus isotropic Gaussian noise of total variance σ².
    Gaussian {
        objective: Arc<dyn Objective>,
        sigma: f64,
    },
    /// Bernoulli-coin slope estimator of the NBS-style chains: one coin per
    /// breakpoint per draw, sample (G/2)(1−g_j)Z_j + (G/2)(1+g_j)Z_{j+1}.
    Nbs { instance: Arc<dyn NoisySlope> },
    /// Uniformly sampled summand gradient σ z_i + b x of the finite-sum
    /// quadratic.
    Foster { instance: Arc<FosterInstance> },
    /// Noiseless control.
    Exact { objective: Arc<dyn Objective> },
}

pub struct Oracle {
    backend: Backend,
    rng: ChaCha8Rng,
    seed: u64,
    query_count: u64,
    draw_tag: u64,
}

/// One shared-seed batch: the tag identifies the realization Z, the outputs
/// line up with the queried points.
#[derive(Clone, Debug)]
pub struct BatchResponse {
    pub draw_tag: u64,
    pub gradients: Vec<Vector>,
}

/// Empirical moments from repeated single-point queries.
#[derive(Clone, Debug)]
pub struct OracleStats {
    pub mean_error_norm: f64,
    pub variance: f64,
    pub max_norm: f64,
    pub samples: usize,
}

impl Oracle {
    pub fn gaussian(objective: Arc<dyn Objective>, sigma: f64, seed: u64) -> Result<Oracle> {
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "noise level sigma must be nonnegative, got {sigma}"
            )));
        }
        Ok(Oracle {
            backend: Backend::Gaussian { objective, sigma },
            rng: ChaCha8Rng::seed_from_u64(seed),
            seed,
            query_count: 0,
            draw_tag: 0,
        })
    }

    pub fn nbs(instance: Arc<dyn NoisySlope>, seed: u64) -> Oracle {
        Oracle {
            backend: Backend::Nbs { instance },
            rng: ChaCha8Rng::seed_from_u64(seed),
            seed,
            query_count: 0,
            draw_tag: 0,
        }
    }

    pub fn foster(instance: Arc<FosterInstance>, seed: u64) -> Oracle {
        Oracle {
            backend: Backend::Foster { instance },
            rng: ChaCha8Rng::seed_from_u64(seed),
            seed,
            query_count: 0,
            draw_tag: 0,
        }
    }

    pub fn exact(objective: Arc<dyn Objective>, seed: u64) -> Oracle {
        Oracle {
            backend: Backend::Exact { objective },
            rng: ChaCha8Rng::seed_from_u64(seed),
            seed,
            query_count: 0,
            draw_tag: 0,
        }
    }

    pub fn objective(&self) -> &dyn Objective {
        match &self.backend {
            Backend::Gaussian { objective, .. } | Backend::Exact { objective } => {
                objective.as_ref()
            }
            Backend::Nbs { instance } => instance.as_ref(),
            Backend::Foster { instance } => instance.as_ref(),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Gradient samples consumed so far (one per point per batch).
    pub fn query_count(&self) -> u64 {
        self.query_count
    }

    /// Average-smoothness constant of this oracle's sample paths, when known.
    pub fn l_tilde(&self) -> Option<f64> {
        match &self.backend {
            // additive noise: g(x,Z) - g(y,Z) = grad F(x) - grad F(y)
            Backend::Gaussian { objective, .. } | Backend::Exact { objective } => {
                let l = objective.certificate().l;
                l.is_finite().then_some(l)
            }
            Backend::Foster { instance } => Some(instance.b),
            Backend::Nbs { .. } => None, // sample slopes are piecewise, not Lipschitz in x
        }
    }

    /// Draw one realization Z and return g(x, Z) for every point.
    pub fn query_batch(&mut self, points: &[Vector]) -> Result<BatchResponse> {
        if points.is_empty() {
            return Err(Error::InvalidArgument("empty batch".into()));
        }
        let dim = self.objective().dim();
        for p in points {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: p.dim(),
                });
            }
        }
        self.draw_tag += 1;
        self.query_count += points.len() as u64;
        let gradients = match &self.backend {
            Backend::Gaussian { objective, sigma } => {
                let scale = sigma / (dim as f64).sqrt();
                let noise = Vector::raw(
                    (0..dim)
                        .map(|_| scale * standard_normal(&mut self.rng))
                        .collect(),
                );
                points
                    .iter()
                    .map(|p| objective.gradient(p).map(|g| g.add(&noise)))
                    .collect::<Result<Vec<_>>>()?
            }
            Backend::Exact { objective } => points
                .iter()
                .map(|p| objective.gradient(p))
                .collect::<Result<Vec<_>>>()?,
            Backend::Nbs { instance } => {
                // coins are shared across the batch and memoized per index
                let mut coins: HashMap<usize, f64> = HashMap::new();
                let p_bias = instance.p();
                let j_star = instance.j_star();
                let g = instance.g_bound();
                let rng = &mut self.rng;
                let mut coin = |j: usize| -> f64 {
                    *coins.entry(j).or_insert_with(|| {
                        // E[Z_j] = +p above j*, -p at or below it
                        let p_up = if j > j_star {
                            0.5 * (1.0 + p_bias)
                        } else {
                            0.5 * (1.0 - p_bias)
                        };
                        if rng.gen::<f64>() < p_up {
                            1.0
                        } else {
                            -1.0
                        }
                    })
                };
                points
                    .iter()
                    .map(|pt| {
                        let x = pt.as_scalar();
                        let j = instance.interval_index(x);
                        let w = instance.g_weight(x);
                        let slope = 0.5 * g * ((1.0 - w) * coin(j) + (1.0 + w) * coin(j + 1));
                        Vector::scalar(slope)
                    })
                    .collect()
            }
            Backend::Foster { instance } => {
                let i = self.rng.gen_range(0..instance.m);
                points
                    .iter()
                    .map(|p| instance.z[i].scale(instance.sigma).add(&p.scale(instance.b)))
                    .collect()
            }
        };
        Ok(BatchResponse {
            draw_tag: self.draw_tag,
            gradients,
        })
    }

    /// Mean of `b` independent single-point draws at x.
    pub fn minibatch_mean(&mut self, x: &Vector, b: usize) -> Result<Vector> {
        if b == 0 {
            return Err(Error::InvalidArgument("batch size must be >= 1".into()));
        }
        let mut acc = Vector::zeros(x.dim());
        let pts = [x.clone()];
        for _ in 0..b {
            acc = acc.add(&self.query_batch(&pts)?.gradients[0]);
        }
        Ok(acc.scale(1.0 / b as f64))
    }

    /// Empirical unbiasedness / variance / norm statistics at x from n
    /// independent draws.
    pub fn oracle_statistics(&mut self, x: &Vector, n: usize) -> Result<OracleStats> {
        if n == 0 {
            return Err(Error::InvalidArgument("need at least one sample".into()));
        }
        let exact = self.objective().gradient(x)?;
        let mut mean = Vector::zeros(x.dim());
        let mut var = 0.0;
        let mut max_norm: f64 = 0.0;
        let pts = [x.clone()];
        for _ in 0..n {
            let g = self.query_batch(&pts)?.gradients.remove(0);
            max_norm = max_norm.max(g.norm());
            let err = g.sub(&exact);
            var += err.dot(&err);
            mean = mean.add(&g);
        }
        Ok(OracleStats {
            mean_error_norm: mean.scale(1.0 / n as f64).dist(&exact),
            variance: var / n as f64,
            max_norm,
            samples: n,
        })
    }
}
