//! Grid certification of dominance/smoothness certificates and closed-form
//! recursion checkers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::fit::{loglog_fit, LineFit};
use crate::geometry::{projected_gradient_mapping, Domain, Vector};
use crate::instances::{LowerBoundPair, Objective, PhiKlInstance};
use crate::{Error, Result};

/// Deterministic evaluation grid. Intervals get a uniform grid; boxes,
/// balls and free space get seeded uniform samples. Points within
/// `exclusion_radius` of a supplied breakpoint are dropped.
#[derive(Clone, Debug)]
pub struct GridSpec {
    pub domain: Domain,
    pub points: usize,
    pub exclusion_radius: f64,
    pub seed: u64,
}

impl GridSpec {
    pub fn new(domain: Domain, points: usize) -> GridSpec {
        GridSpec {
            domain,
            points,
            exclusion_radius: 0.0,
            seed: 0,
        }
    }

    pub fn with_exclusion(mut self, radius: f64) -> GridSpec {
        self.exclusion_radius = radius;
        self
    }

    pub fn sample(&self, breakpoints: &[f64]) -> Result<Vec<Vector>> {
        if self.points < 2 {
            return Err(Error::InvalidArgument("grid needs >= 2 points".into()));
        }
        let excluded = |x: f64| {
            breakpoints
                .iter()
                .any(|b| (x - b).abs() < self.exclusion_radius)
        };
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let out: Vec<Vector> = match &self.domain {
            Domain::Interval { lo, hi } => {
                let n = self.points;
                (0..n)
                    .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
                    .filter(|x| !excluded(*x))
                    .map(Vector::scalar)
                    .collect()
            }
            Domain::Box { lo, hi } => (0..self.points)
                .map(|_| {
                    Vector::raw(
                        lo.as_slice()
                            .iter()
                            .zip(hi.as_slice())
                            .map(|(l, h)| rng.gen_range(*l..*h))
                            .collect(),
                    )
                })
                .collect(),
            Domain::Ball { center, radius } => (0..self.points)
                .map(|_| {
                    // rejection sampling from the bounding box
                    loop {
                        let v = Vector::raw(
                            (0..center.dim())
                                .map(|_| rng.gen_range(-radius..*radius))
                                .collect(),
                        );
                        if v.norm() <= *radius {
                            return center.add(&v);
                        }
                    }
                })
                .collect(),
            Domain::AllSpace { dim } => (0..self.points)
                .map(|_| {
                    Vector::raw(
                        (0..*dim)
                            .map(|_| crate::instances::standard_normal(&mut rng))
                            .collect(),
                    )
                })
                .collect(),
        };
        if out.len() < 2 {
            return Err(Error::InvalidArgument(
                "exclusion radius removed almost the whole grid".into(),
            ));
        }
        Ok(out)
    }
}

/// Result of a single verification check. `worst_ratio` is the maximal
/// observed (value / bound); for slope checks it is the fitted slope and
/// the pass rule lives in `details`. `conclusive` is false when the check
/// had nothing to certify (e.g. an empty local neighborhood).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckReport {
    pub passed: bool,
    pub conclusive: bool,
    pub worst_ratio: f64,
    pub worst_point: Option<Vector>,
    pub details: String,
}

impl CheckReport {
    fn from_ratio(worst_ratio: f64, worst_point: Option<Vector>, tol: f64, what: &str) -> Self {
        CheckReport {
            passed: worst_ratio <= 1.0 + tol,
            conclusive: true,
            worst_ratio,
            worst_point,
            details: format!("{what}: worst ratio {worst_ratio:.12e}, tolerance {tol:.1e}"),
        }
    }
}

const GAP_FLOOR: f64 = 1e-14;
const GRAD_FLOOR: f64 = 1e-10;

fn dominance_ratio(gap: f64, grad_norm: f64, alpha: f64, tau: f64) -> f64 {
    if gap <= GAP_FLOOR && grad_norm <= GRAD_FLOOR {
        return 0.0; // both sides vanish at the minimizer
    }
    gap / (tau * grad_norm.powf(alpha))
}

/// Grid check of F(x) − F* ≤ τ‖∇F(x)‖^α.
pub fn verify_grad_dominance(
    f: &dyn Objective,
    grid: &GridSpec,
    alpha: f64,
    tau: f64,
    tol: f64,
) -> Result<CheckReport> {
    if !(tau > 0.0) {
        return Err(Error::InvalidArgument("tau must be positive".into()));
    }
    let mut worst = (f64::NEG_INFINITY, None);
    for x in grid.sample(&f.breakpoints())? {
        let gap = f.gap(&x)?;
        let gn = f.gradient(&x)?.norm();
        let ratio = dominance_ratio(gap, gn, alpha, tau);
        if ratio > worst.0 {
            worst = (ratio, Some(x));
        }
    }
    Ok(CheckReport::from_ratio(
        worst.0,
        worst.1,
        tol,
        "grad dominance",
    ))
}

/// Grid check of the projected variant
/// F(x) − F* ≤ τ‖G_{η,𝒳}(x)‖^α for every η in `etas` (each must respect
/// the certificate's η₀ when one is present).
pub fn verify_projected_grad_dominance(
    f: &dyn Objective,
    domain: &Domain,
    grid: &GridSpec,
    alpha: f64,
    tau: f64,
    etas: &[f64],
    tol: f64,
) -> Result<CheckReport> {
    if etas.is_empty() {
        return Err(Error::InvalidArgument("need at least one eta".into()));
    }
    if let Some(eta0) = f.certificate().eta0 {
        for eta in etas {
            if *eta > eta0 * (1.0 + 1e-12) {
                return Err(Error::InvalidArgument(format!(
                    "eta {eta} exceeds the certified eta0 {eta0}"
                )));
            }
        }
    }
    let mut worst = (f64::NEG_INFINITY, None);
    for x in grid.sample(&f.breakpoints())? {
        if !domain.contains(&x, 1e-12) {
            continue;
        }
        let gap = f.gap(&x)?;
        for eta in etas {
            let gn = projected_gradient_mapping(f, domain, &x, *eta)?.norm();
            let ratio = dominance_ratio(gap, gn, alpha, tau);
            if ratio > worst.0 {
                worst = (ratio, Some(x.clone()));
            }
        }
    }
    Ok(CheckReport::from_ratio(
        worst.0,
        worst.1,
        tol,
        "projected grad dominance",
    ))
}

/// Dominance restricted to the near-optimal slice {x : F(x) − F* ≤ ε}.
/// Returns an inconclusive (but not failed) report if the grid misses the
/// slice entirely.
pub fn verify_local_grad_dominance(
    f: &dyn Objective,
    grid: &GridSpec,
    alpha: f64,
    tau: f64,
    epsilon: f64,
    tol: f64,
) -> Result<CheckReport> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidArgument("epsilon must be positive".into()));
    }
    let mut worst = (f64::NEG_INFINITY, None);
    let mut hits = 0usize;
    for x in grid.sample(&f.breakpoints())? {
        let gap = f.gap(&x)?;
        if gap > epsilon {
            continue;
        }
        hits += 1;
        let gn = f.gradient(&x)?.norm();
        let ratio = dominance_ratio(gap, gn, alpha, tau);
        if ratio > worst.0 {
            worst = (ratio, Some(x));
        }
    }
    if hits == 0 {
        return Ok(CheckReport {
            passed: true,
            conclusive: false,
            worst_ratio: f64::NAN,
            worst_point: None,
            details: format!("local grad dominance: no grid point with gap <= {epsilon}"),
        });
    }
    let mut rep = CheckReport::from_ratio(worst.0, worst.1, tol, "local grad dominance");
    rep.details.push_str(&format!(" ({hits} points in slice)"));
    Ok(rep)
}

/// Grid check of ‖∇F(x) − ∇F(y)‖ ≤ L‖x − y‖ on adjacent grid pairs plus
/// seeded long-range pairs.
pub fn verify_smoothness(
    f: &dyn Objective,
    grid: &GridSpec,
    l: f64,
    tol: f64,
) -> Result<CheckReport> {
    verify_holder_inner(f, grid, l, 1.0, tol, "smoothness")
}

/// Grid check of the Hölder condition ‖∇F(x) − ∇F(y)‖ ≤ L‖x − y‖^{1/(β−1)}
/// (β = 2 recovers plain smoothness).
pub fn verify_holder(
    f: &dyn Objective,
    grid: &GridSpec,
    l: f64,
    beta: f64,
    tol: f64,
) -> Result<CheckReport> {
    if !(beta > 1.0) {
        return Err(Error::InvalidArgument(format!(
            "needs beta > 1, got {beta}"
        )));
    }
    verify_holder_inner(f, grid, l, 1.0 / (beta - 1.0), tol, "holder gradient")
}

fn verify_holder_inner(
    f: &dyn Objective,
    grid: &GridSpec,
    l: f64,
    exponent: f64,
    tol: f64,
    what: &str,
) -> Result<CheckReport> {
    if !(l > 0.0 && l.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "needs finite positive L, got {l}"
        )));
    }
    let pts = grid.sample(&f.breakpoints())?;
    let mut pairs: Vec<(usize, usize)> = (1..pts.len()).map(|i| (i - 1, i)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(grid.seed ^ 0x5eed);
    for _ in 0..pts.len() {
        let i = rng.gen_range(0..pts.len());
        let j = rng.gen_range(0..pts.len());
        if i != j {
            pairs.push((i, j));
        }
    }
    let mut worst = (f64::NEG_INFINITY, None);
    for (i, j) in pairs {
        let d = pts[i].dist(&pts[j]);
        if d < 1e-13 {
            continue;
        }
        let gd = f.gradient(&pts[i])?.dist(&f.gradient(&pts[j])?);
        let ratio = gd / (l * d.powf(exponent));
        if ratio > worst.0 {
            worst = (ratio, Some(pts[i].clone()));
        }
    }
    Ok(CheckReport::from_ratio(worst.0, worst.1, tol, what))
}

/// φ-KL check φ'(F(x) − F*) · |F'(x)| ≥ 1 on the distinguished interval
/// (minus an exclusion zone around the minimizer where both sides blow up
/// numerically).
pub fn verify_phi_kl(inst: &PhiKlInstance, points: usize, tol: f64) -> Result<CheckReport> {
    let a_lo = inst.breakpoint(inst.j_star);
    let a_hi = inst.breakpoint(inst.j_star + 1);
    let grid = GridSpec::new(Domain::interval(a_lo, a_hi)?, points)
        .with_exclusion(inst.half_width() * 1e-6);
    let mid = inst.midpoint(inst.j_star);
    let min = inst.min_value().unwrap();
    let mut worst = (f64::NEG_INFINITY, None);
    for x in grid.sample(&[a_lo, mid, a_hi])? {
        let gap = inst.value(&x)? - min;
        let grad = inst.gradient(&x)?.norm();
        if gap <= 0.0 || grad <= 0.0 {
            continue;
        }
        // the KL inequality phi'(gap) * |F'| >= 1, recorded as the ratio
        // 1 / (phi'(gap) |F'|) so that <= 1 passes
        let ratio = 1.0 / (inst.phi_prime(gap) * grad);
        if ratio > worst.0 {
            worst = (ratio, Some(x));
        }
    }
    Ok(CheckReport::from_ratio(worst.0, worst.1, tol, "phi-kl"))
}

/// Distance-to-minimizer bounds: pointwise
/// ‖x − x*‖ ≤ (α/(α−1)) τ^{1/α} gap^{(α−1)/α} and globally ≤ R0(α).
pub fn verify_distance_bounds(
    f: &dyn Objective,
    grid: &GridSpec,
    alpha: f64,
    tau: f64,
    l: f64,
    tol: f64,
) -> Result<CheckReport> {
    let x_star = f
        .minimizer()
        .ok_or_else(|| Error::Precondition("needs a known minimizer".into()))?;
    let r0 = crate::instances::r0_bound(alpha, l, tau)?;
    let mut worst = (f64::NEG_INFINITY, None);
    for x in grid.sample(&f.breakpoints())? {
        let d = x.dist(&x_star);
        let gap = f.gap(&x)?.max(0.0);
        let pointwise = crate::instances::distance_bound(alpha, tau, gap)?;
        let bound = pointwise.min(r0);
        let ratio = if d <= GAP_FLOOR { 0.0 } else { d / bound };
        if ratio > worst.0 {
            worst = (ratio, Some(x));
        }
    }
    Ok(CheckReport::from_ratio(
        worst.0,
        worst.1,
        tol,
        "distance bounds",
    ))
}

/// Per-step KL divergence contribution |f0'(x) − f1'(x)|² / (2σ²) of a
/// Gaussian oracle on the hard pair. Zero for x ≥ 2ρ where the members
/// coincide.
pub fn kl_per_step(pair: &LowerBoundPair, sigma: f64, x: f64) -> Result<f64> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "sigma must be positive, got {sigma}"
        )));
    }
    let v = Vector::scalar(x);
    let d = pair.f0.gradient(&v)?.as_scalar() - pair.f1.gradient(&v)?.as_scalar();
    Ok(d * d / (2.0 * sigma * sigma))
}

/// Iterates the STORM variance recursion at equality,
/// V_{t+1} = (1 − a_t)² V_t + 2σ² a_t² + 2L̃² β_t² R²  (a_t = a0/(t+1),
/// β_t = β0/(t+1)), and asserts the closed bound V_t ≤ E/t for t ≥ 1 with
/// E = V0(a0 − 1) + 2σ² a0³ + 2L̃² a0 β0² R².
///
/// The bound is indexed as derived (V_{T+1} ≤ E/(T+1)); starting it one
/// step earlier is falsified by the noise terms at t = 1 for every a0 < 2.
pub fn check_variance_recursion(
    a0: f64,
    beta0: f64,
    sigma: f64,
    l_tilde: f64,
    r: f64,
    v0: f64,
    t_max: usize,
) -> Result<CheckReport> {
    if !(a0 > 1.0 && a0 < 2.0) {
        return Err(Error::InvalidArgument(format!(
            "needs a0 in (1, 2), got {a0}"
        )));
    }
    if !(beta0 > 0.0 && sigma >= 0.0 && l_tilde >= 0.0 && r > 0.0 && v0 >= 0.0) {
        return Err(Error::InvalidArgument(
            "needs beta0 > 0, r > 0 and nonnegative sigma, l_tilde, v0".into(),
        ));
    }
    if t_max < 2 {
        return Err(Error::InvalidArgument("t_max must be >= 2".into()));
    }
    let e = v0 * (a0 - 1.0)
        + 2.0 * sigma * sigma * a0.powi(3)
        + 2.0 * l_tilde * l_tilde * a0 * beta0 * beta0 * r * r;
    if e == 0.0 {
        // degenerate noiseless case: V_t stays 0, bound holds trivially
        return Ok(CheckReport::from_ratio(0.0, None, 1e-12, "variance recursion"));
    }
    let mut v = v0;
    let mut worst = (f64::NEG_INFINITY, 0usize);
    for t in 0..t_max {
        let t1 = (t + 1) as f64;
        let a_t = (a0 / t1).min(1.0);
        let b_t = (beta0 / t1).min(1.0);
        v = (1.0 - a_t).powi(2) * v
            + 2.0 * sigma * sigma * a_t * a_t
            + 2.0 * l_tilde * l_tilde * b_t * b_t * r * r;
        let ratio = v * t1 / e;
        if ratio > worst.0 {
            worst = (ratio, t + 1);
        }
    }
    let mut rep = CheckReport::from_ratio(worst.0, None, 1e-12, "variance recursion");
    rep.details
        .push_str(&format!(" (worst at t = {}, E = {e:.6e})", worst.1));
    Ok(rep)
}

/// Parameters of the gap recursion checker. Canonical choices
/// q0 = L β0²/4 and c0 = L β0/2 mirror the convergence proof.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct DeltaRecursionParams {
    pub alpha: f64,
    pub tau: f64,
    pub q0: f64,
    pub c0: f64,
    pub eta0: f64,
    pub beta0: f64,
    /// Variance-envelope constant E feeding the noise term.
    pub e: f64,
    pub delta0: f64,
    pub t_max: usize,
}

/// Iterates the deterministic gap recursion
///
///   δ_{t+1} = δ_t − (q_t η_t²/(2τ^{2/α})) δ_t^{2/α}
///             + ½ (β_t/(2c_t) + 2 q_t η_t²) E/(t+1)
///
/// with q_t = q0 (t+1)^{−2+α/2}, η_t = η0 (t+1)^{1−α/2}, β_t = β0/(t+1),
/// c_t = c0 (t+1)^{−1+α/2}, clamping negative overshoots to zero, and fits
/// the decay exponent over the last decade. Passes when the fitted slope
/// is ≤ −α/2 + 0.1.
pub fn check_delta_recursion(p: &DeltaRecursionParams) -> Result<CheckReport> {
    if !(1.0..2.0).contains(&p.alpha) {
        return Err(Error::InvalidArgument(format!(
            "needs alpha in [1, 2), got {}",
            p.alpha
        )));
    }
    if !(p.tau > 0.0 && p.q0 > 0.0 && p.c0 > 0.0 && p.eta0 > 0.0 && p.beta0 > 0.0) {
        return Err(Error::InvalidArgument(
            "tau, q0, c0, eta0, beta0 must all be positive".into(),
        ));
    }
    if !(p.e >= 0.0 && p.delta0 > 0.0) {
        return Err(Error::InvalidArgument(
            "needs E >= 0 and delta0 > 0".into(),
        ));
    }
    if p.t_max < 100 {
        return Err(Error::InvalidArgument(
            "t_max must be >= 100 for a slope fit".into(),
        ));
    }
    let mut delta = p.delta0;
    let mut clamped = 0usize;
    let mut ts = Vec::new();
    let mut ds = Vec::new();
    for t in 0..p.t_max {
        let t1 = (t + 1) as f64;
        let q_t = p.q0 * t1.powf(-2.0 + p.alpha / 2.0);
        let eta_t = p.eta0 * t1.powf(1.0 - p.alpha / 2.0);
        let beta_t = p.beta0 / t1;
        let c_t = p.c0 * t1.powf(-1.0 + p.alpha / 2.0);
        let decay = q_t * eta_t * eta_t / (2.0 * p.tau.powf(2.0 / p.alpha))
            * delta.powf(2.0 / p.alpha);
        let noise = 0.5 * (beta_t / (2.0 * c_t) + 2.0 * q_t * eta_t * eta_t) * p.e / t1;
        delta = delta - decay + noise;
        if delta < 0.0 {
            delta = 0.0;
            clamped += 1;
        }
        if t + 1 >= p.t_max / 10 {
            ts.push(t1 + 1.0);
            ds.push(delta);
        }
    }
    let target = -p.alpha / 2.0;
    let fit: LineFit = loglog_fit(&ts, &ds)?;
    Ok(CheckReport {
        passed: fit.slope <= target + 0.1,
        conclusive: true,
        worst_ratio: fit.slope / target,
        worst_point: None,
        details: format!(
            "delta recursion: fitted slope {:.4} over t in [{}, {}], target {:.4} + 0.1, {} clamps to zero",
            fit.slope,
            p.t_max / 10,
            p.t_max,
            target,
            clamped
        ),
    })
}

/// Checks the closed-form maximum of F(B) = A0 B − A1 B^{2/α} + A2 over
/// B ≥ 0 (α in [1, 2)): numerical grid + golden-section maximum against
///
///   A2 + (α/2)^{α/(2−α)} ((2−α)/2) A0^{2/(2−α)} A1^{−α/(2−α)}
///
/// and the stationary point B* = (α A0/(2 A1))^{α/(2−α)}.
pub fn check_poly_bound(a0: f64, a1: f64, a2: f64, alpha: f64) -> Result<CheckReport> {
    if !(1.0..2.0).contains(&alpha) {
        return Err(Error::InvalidArgument(format!(
            "needs alpha in [1, 2), got {alpha}"
        )));
    }
    if !(a0 > 0.0 && a1 > 0.0) {
        return Err(Error::InvalidArgument("needs A0 > 0 and A1 > 0".into()));
    }
    let f = |b: f64| a0 * b - a1 * b.powf(2.0 / alpha) + a2;
    let b_star = (alpha * a0 / (2.0 * a1)).powf(alpha / (2.0 - alpha));
    let bound = a2
        + (alpha / 2.0).powf(alpha / (2.0 - alpha)) * ((2.0 - alpha) / 2.0)
            * a0.powf(2.0 / (2.0 - alpha))
            * a1.powf(-alpha / (2.0 - alpha));

    // stationary identity: F(B*) must equal the bound exactly
    let scale = bound.abs().max(a2.abs()).max(1.0);
    let identity_err = (f(b_star) - bound).abs() / scale;

    // grid + golden-section search for the true maximum
    let hi = 4.0 * b_star.max(1.0);
    let n = 20_000;
    let mut best = (f64::NEG_INFINITY, 0.0);
    for i in 0..=n {
        let b = hi * i as f64 / n as f64;
        let v = f(b);
        if v > best.0 {
            best = (v, b);
        }
    }
    let (mut lo_b, mut hi_b) = (
        (best.1 - hi / n as f64).max(0.0),
        best.1 + hi / n as f64,
    );
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let m1 = hi_b - phi * (hi_b - lo_b);
        let m2 = lo_b + phi * (hi_b - lo_b);
        if f(m1) < f(m2) {
            lo_b = m1;
        } else {
            hi_b = m2;
        }
    }
    let numeric_max = f(0.5 * (lo_b + hi_b)).max(best.0);

    let ratio = if (numeric_max - a2).abs() < 1e-15 && (bound - a2).abs() < 1e-15 {
        1.0
    } else {
        (numeric_max - a2) / (bound - a2)
    };
    let passed = identity_err <= 1e-10 && numeric_max <= bound + 1e-10 * scale;
    Ok(CheckReport {
        passed,
        conclusive: true,
        worst_ratio: ratio,
        worst_point: Some(Vector::scalar(b_star)),
        details: format!(
            "poly bound: numeric max {numeric_max:.12e} vs closed form {bound:.12e}, stationary identity error {identity_err:.2e} at B* = {b_star:.6e}"
        ),
    })
}
