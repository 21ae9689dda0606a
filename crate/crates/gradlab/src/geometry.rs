//! Vectors, feasible sets, Euclidean projection, gradient mappings, prox.

use serde::{Deserialize, Serialize};

use crate::instances::Objective;
use crate::{Error, Result};

/// Dense Euclidean vector. Entries are finite by construction via
/// [`Vector::new`]; arithmetic helpers do not re-validate (the optimizers
/// check `is_finite` once per iteration instead).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidArgument("vector must be non-empty".into()));
        }
        if entries.iter().any(|e| !e.is_finite()) {
            return Err(Error::NonFinite(format!("vector entries {entries:?}")));
        }
        Ok(Vector(entries))
    }

    /// Unvalidated constructor for internal arithmetic results.
    pub(crate) fn raw(entries: Vec<f64>) -> Self {
        Vector(entries)
    }

    pub fn scalar(x: f64) -> Self {
        Vector(vec![x])
    }

    pub fn zeros(dim: usize) -> Self {
        Vector(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// First coordinate; the 1-D instances treat vectors as scalars.
    pub fn as_scalar(&self) -> f64 {
        self.0[0]
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|e| e.is_finite())
    }

    pub fn add(&self, other: &Vector) -> Vector {
        Vector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Vector) -> Vector {
        Vector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, s: f64) -> Vector {
        Vector(self.0.iter().map(|a| a * s).collect())
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn dist(&self, other: &Vector) -> f64 {
        self.sub(other).norm()
    }

    /// Convex combination `(1 - beta) * self + beta * other`.
    pub fn lerp(&self, other: &Vector, beta: f64) -> Vector {
        Vector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| (1.0 - beta) * a + beta * b)
                .collect(),
        )
    }

    fn check_dim(&self, expected: usize) -> Result<()> {
        if self.dim() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: self.dim(),
            });
        }
        Ok(())
    }
}

/// Closed convex feasible set 𝒳.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Domain {
    Interval { lo: f64, hi: f64 },
    Box { lo: Vector, hi: Vector },
    Ball { center: Vector, radius: f64 },
    AllSpace { dim: usize },
}

impl Domain {
    pub fn interval(lo: f64, hi: f64) -> Result<Domain> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidArgument(format!(
                "interval needs finite lo < hi, got [{lo}, {hi}]"
            )));
        }
        Ok(Domain::Interval { lo, hi })
    }

    pub fn hyper_box(lo: Vector, hi: Vector) -> Result<Domain> {
        if lo.dim() != hi.dim() {
            return Err(Error::DimensionMismatch {
                expected: lo.dim(),
                got: hi.dim(),
            });
        }
        if lo
            .as_slice()
            .iter()
            .zip(hi.as_slice())
            .any(|(l, h)| !(l < h))
        {
            return Err(Error::InvalidArgument(
                "box needs lo < hi in every coordinate".into(),
            ));
        }
        Ok(Domain::Box { lo, hi })
    }

    pub fn ball(center: Vector, radius: f64) -> Result<Domain> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "ball radius must be positive and finite, got {radius}"
            )));
        }
        Ok(Domain::Ball { center, radius })
    }

    pub fn all_space(dim: usize) -> Result<Domain> {
        if dim == 0 {
            return Err(Error::InvalidArgument("dimension must be positive".into()));
        }
        Ok(Domain::AllSpace { dim })
    }

    pub fn dim(&self) -> usize {
        match self {
            Domain::Interval { .. } => 1,
            Domain::Box { lo, .. } => lo.dim(),
            Domain::Ball { center, .. } => center.dim(),
            Domain::AllSpace { dim } => *dim,
        }
    }

    /// Euclidean diameter; `f64::INFINITY` for the unconstrained domain.
    pub fn diameter(&self) -> f64 {
        match self {
            Domain::Interval { lo, hi } => hi - lo,
            Domain::Box { lo, hi } => hi.dist(lo),
            Domain::Ball { radius, .. } => 2.0 * radius,
            Domain::AllSpace { .. } => f64::INFINITY,
        }
    }

    /// Euclidean projection onto the set. Exact (coordinate clamp / radial
    /// rescale), hence idempotent and nonexpansive.
    pub fn project(&self, v: &Vector) -> Result<Vector> {
        v.check_dim(self.dim())?;
        let out = match self {
            Domain::Interval { lo, hi } => Vector::raw(
                v.as_slice()
                    .iter()
                    .map(|x| x.clamp(*lo, *hi))
                    .collect::<Vec<_>>(),
            ),
            Domain::Box { lo, hi } => Vector::raw(
                v.as_slice()
                    .iter()
                    .zip(lo.as_slice().iter().zip(hi.as_slice()))
                    .map(|(x, (l, h))| x.clamp(*l, *h))
                    .collect::<Vec<_>>(),
            ),
            Domain::Ball { center, radius } => {
                let d = v.dist(center);
                if d <= *radius {
                    v.clone()
                } else {
                    center.add(&v.sub(center).scale(radius / d))
                }
            }
            Domain::AllSpace { .. } => v.clone(),
        };
        Ok(out)
    }

    pub fn contains(&self, v: &Vector, tol: f64) -> bool {
        if v.dim() != self.dim() {
            return false;
        }
        match self.project(v) {
            Ok(p) => p.dist(v) <= tol,
            Err(_) => false,
        }
    }
}

/// Projected gradient mapping G_{η,𝒳}(x) = (x − proj_𝒳(x − η∇F(x))) / η.
///
/// Requires x ∈ 𝒳 (tolerance 1e-12) and η > 0.
pub fn projected_gradient_mapping(
    f: &dyn Objective,
    domain: &Domain,
    x: &Vector,
    eta: f64,
) -> Result<Vector> {
    estimated_gradient_mapping(&f.gradient(x)?, domain, x, eta)
}

/// Gradient mapping evaluated with a supplied (possibly stochastic)
/// gradient estimate g in place of ∇F(x).
pub fn estimated_gradient_mapping(
    g: &Vector,
    domain: &Domain,
    x: &Vector,
    eta: f64,
) -> Result<Vector> {
    if !(eta.is_finite() && eta > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "step size eta must be positive, got {eta}"
        )));
    }
    x.check_dim(domain.dim())?;
    g.check_dim(domain.dim())?;
    if !domain.contains(x, 1e-12) {
        return Err(Error::Precondition(format!(
            "gradient mapping base point {:?} is not feasible",
            x.as_slice()
        )));
    }
    let raw = x.sub(&g.scale(eta));
    let stepped = domain.project(&raw)?;
    // when the projection is the identity the mapping equals g exactly;
    // reconstructing it by differencing would only add cancellation noise
    // at near-stationary points
    if stepped.as_slice() == raw.as_slice() {
        return Ok(g.clone());
    }
    Ok(x.sub(&stepped).scale(1.0 / eta))
}

/// Proximal operator used by Prox-SGD: either the indicator of a domain
/// (exact projection) or λ‖·‖₁ (soft thresholding).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum ProxOp {
    Indicator(Domain),
    L1 { lambda: f64 },
}

impl ProxOp {
    pub fn l1(lambda: f64) -> Result<ProxOp> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "l1 weight must be positive, got {lambda}"
            )));
        }
        Ok(ProxOp::L1 { lambda })
    }

    /// prox_{η h}(v). For the indicator this is the projection and is
    /// independent of η; for λ‖·‖₁ it soft-thresholds at ηλ.
    pub fn apply(&self, eta: f64, v: &Vector) -> Result<Vector> {
        if !(eta.is_finite() && eta > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "prox step eta must be positive, got {eta}"
            )));
        }
        match self {
            ProxOp::Indicator(domain) => domain.project(v),
            ProxOp::L1 { lambda } => {
                let thr = eta * lambda;
                Ok(Vector::raw(
                    v.as_slice()
                        .iter()
                        .map(|x| x.signum() * (x.abs() - thr).max(0.0))
                        .collect(),
                ))
            }
        }
    }

    /// Value of the regularizer h at v (0 for indicators on feasible points).
    pub fn penalty(&self, v: &Vector) -> f64 {
        match self {
            ProxOp::Indicator(domain) => {
                if domain.contains(v, 1e-9) {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            ProxOp::L1 { lambda } => lambda * v.as_slice().iter().map(|x| x.abs()).sum::<f64>(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::make_lower_bound_pair;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn ball_projection_rescales_radially() {
        let dom = Domain::ball(Vector::zeros(2), 1.0).unwrap();
        let p = dom.project(&Vector::new(vec![3.0, 4.0]).unwrap()).unwrap();
        assert!((p.as_slice()[0] - 0.6).abs() < 1e-15);
        assert!((p.as_slice()[1] - 0.8).abs() < 1e-15);
        // interior point is untouched
        let q = Vector::new(vec![0.3, -0.4]).unwrap();
        assert_eq!(dom.project(&q).unwrap(), q);
    }

    #[test]
    fn interval_projection_clamps() {
        let dom = Domain::interval(0.0, 1.0).unwrap();
        assert_eq!(dom.project(&Vector::scalar(-0.5)).unwrap().as_scalar(), 0.0);
        assert_eq!(dom.project(&Vector::scalar(0.25)).unwrap().as_scalar(), 0.25);
        assert_eq!(dom.project(&Vector::scalar(7.0)).unwrap().as_scalar(), 1.0);
    }

    #[test]
    fn mapping_equals_gradient_when_step_stays_interior() {
        // f0 with alpha = 1.5, C = 1: f0(x) = x^3 on [0, 1], f0'(0.5) = 0.75.
        let pair = make_lower_bound_pair(1.5, 1.0, 1.0, 0.1).unwrap();
        let dom = Domain::interval(0.0, 1.0).unwrap();
        let x = Vector::scalar(0.5);
        let m = projected_gradient_mapping(pair.f0.as_ref(), &dom, &x, 0.1).unwrap();
        assert!((m.as_scalar() - 0.75).abs() < 1e-13);
    }

    #[test]
    fn mapping_with_clipping_is_shorter_than_gradient() {
        let pair = make_lower_bound_pair(1.5, 1.0, 1.0, 0.1).unwrap();
        // Domain cut so the step 0.5 - 0.1 * 0.75 = 0.425 lands outside.
        let dom = Domain::interval(0.45, 1.0).unwrap();
        let x = Vector::scalar(0.5);
        let m = projected_gradient_mapping(pair.f0.as_ref(), &dom, &x, 0.1).unwrap();
        assert!((m.as_scalar() - 0.5).abs() < 1e-13); // (0.5 - 0.45) / 0.1
        assert!(m.as_scalar() < 0.75);
    }

    #[test]
    fn mapping_rejects_infeasible_base_point() {
        let pair = make_lower_bound_pair(1.5, 1.0, 1.0, 0.1).unwrap();
        let dom = Domain::interval(0.0, 1.0).unwrap();
        let err = projected_gradient_mapping(pair.f0.as_ref(), &dom, &Vector::scalar(1.5), 0.1);
        assert!(matches!(err, Err(Error::Precondition(_))));
    }

    #[test]
    fn soft_threshold_matches_hand_computation() {
        let prox = ProxOp::l1(1.0).unwrap();
        let out = prox
            .apply(0.5, &Vector::new(vec![1.2, -0.3, 0.5]).unwrap())
            .unwrap();
        assert_eq!(out.as_slice(), &[0.7, 0.0, 0.0]);
    }

    #[test]
    fn indicator_prox_is_projection_for_every_eta() {
        let dom = Domain::interval(0.0, 1.0).unwrap();
        let prox = ProxOp::Indicator(dom.clone());
        let v = Vector::scalar(2.5);
        for eta in [1e-6, 0.1, 1.0, 50.0] {
            assert_eq!(
                prox.apply(eta, &v).unwrap(),
                dom.project(&v).unwrap(),
                "eta = {eta}"
            );
        }
    }

    /// prox nonexpansiveness in the step argument:
    /// ‖prox(x − ηv) − prox(x − ηu)‖ ≤ η‖v − u‖, checked on >= 1e4 triples
    /// per prox kind.
    #[test]
    fn prox_step_nonexpansiveness() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let domains = [
            ProxOp::Indicator(Domain::interval(-1.0, 2.0).unwrap()),
            ProxOp::Indicator(Domain::ball(Vector::zeros(3), 1.5).unwrap()),
            ProxOp::Indicator(
                Domain::hyper_box(
                    Vector::new(vec![-1.0, -2.0, 0.0]).unwrap(),
                    Vector::new(vec![1.0, 0.5, 3.0]).unwrap(),
                )
                .unwrap(),
            ),
            ProxOp::L1 { lambda: 0.7 },
        ];
        for prox in &domains {
            let d = match prox {
                ProxOp::Indicator(dom) => dom.dim(),
                ProxOp::L1 { .. } => 3,
            };
            for _ in 0..10_000 {
                let x = Vector::raw((0..d).map(|_| rng.gen_range(-3.0..3.0)).collect());
                let u = Vector::raw((0..d).map(|_| rng.gen_range(-5.0..5.0)).collect());
                let v = Vector::raw((0..d).map(|_| rng.gen_range(-5.0..5.0)).collect());
                let eta = rng.gen_range(1e-3..2.0);
                let pu = prox.apply(eta, &x.sub(&u.scale(eta))).unwrap();
                let pv = prox.apply(eta, &x.sub(&v.scale(eta))).unwrap();
                let lhs = pu.dist(&pv);
                let rhs = eta * u.dist(&v);
                assert!(lhs <= rhs + 1e-12, "lhs {lhs} > rhs {rhs}");
            }
        }
    }

    proptest! {
        #[test]
        fn projection_is_idempotent_and_nonexpansive(
            a in -10.0f64..10.0, b in -10.0f64..10.0,
            c in -10.0f64..10.0, d in -10.0f64..10.0,
        ) {
            let dom = Domain::ball(Vector::zeros(2), 2.0).unwrap();
            let u = Vector::raw(vec![a, b]);
            let v = Vector::raw(vec![c, d]);
            let pu = dom.project(&u).unwrap();
            let pv = dom.project(&v).unwrap();
            prop_assert!(pu.dist(&dom.project(&pu).unwrap()) <= 1e-12);
            prop_assert!(pu.dist(&pv) <= u.dist(&v) + 1e-12);
        }
    }
}
