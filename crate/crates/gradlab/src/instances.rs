//! Closed-form objectives with analytic minimizers and dominance
//! certificates, plus the closed-form constants used by the verifiers.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::geometry::{Domain, Vector};
use crate::{Error, Result};

/// Certified analytic constants attached to an instance.
///
/// `tau` is the (α, τ)-gradient-dominance constant F(x) − F* ≤ τ‖∇F(x)‖^α,
/// `eta0` (when present) the step-size range on which the projected variant
/// of the inequality is certified, `l` the smoothness constant of the
/// member itself, and `l_tilde` the average-smoothness constant of its
/// canonical oracle.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DominanceCertificate {
    pub alpha: f64,
    pub tau: f64,
    pub eta0: Option<f64>,
    pub l: f64,
    pub l_tilde: f64,
    pub g_bound: Option<f64>,
}

/// A differentiable objective with enough analytic structure for the
/// verifiers: exact values, exact gradients, and (where known) the
/// minimizer, minimum value and a dominance certificate.
pub trait Objective: Send + Sync {
    fn dim(&self) -> usize;
    fn value(&self, x: &Vector) -> Result<f64>;
    fn gradient(&self, x: &Vector) -> Result<Vector>;
    fn minimizer(&self) -> Option<Vector>;
    fn min_value(&self) -> Option<f64>;
    fn certificate(&self) -> DominanceCertificate;
    /// The domain the certificate refers to.
    fn natural_domain(&self) -> Domain;
    /// Kinks / piece boundaries of 1-D instances, for grid exclusion.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
    /// Canonical (feasible, far-from-optimal) starting point.
    fn default_start(&self) -> Vector;

    fn check_dim(&self, x: &Vector) -> Result<()> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.dim(),
            });
        }
        Ok(())
    }

    /// F(x) − F*; requires a known minimum value.
    fn gap(&self, x: &Vector) -> Result<f64> {
        let min = self.min_value().ok_or_else(|| {
            Error::Precondition("objective has no known minimum value".into())
        })?;
        Ok(self.value(x)? - min)
    }
}

// ---------------------------------------------------------------------------
// Lower-bound pair f0 / f1
// ---------------------------------------------------------------------------

/// Which member of the hard pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairMemberKind {
    F0,
    F1,
}

/// One member of the 1-D two-function pair on [0, R] (extended smoothly to
/// the whole line). With q = α/(α−1):
///
///   f0(x) = C|x|^q on |x| ≤ R, linear continuation of slope ±C q R^{q−1}
///   f1(x) = 2^{q−1} C (|x−ρ|^q + ρ^q) on [0, 2ρ], equal to f0 on [2ρ, R],
///           linear continuation below 0.
///
/// f0 minimizes at 0 with value 0; f1 minimizes at ρ with value
/// 2^{q−1} C ρ^q. The two coincide outside [0, 2ρ).
#[derive(Clone, Debug)]
pub struct PairMember {
    pub kind: PairMemberKind,
    pub alpha: f64,
    pub c: f64,
    pub r: f64,
    pub rho: f64,
    q: f64,
}

impl PairMember {
    fn new(kind: PairMemberKind, alpha: f64, c: f64, r: f64, rho: f64) -> Self {
        PairMember {
            kind,
            alpha,
            c,
            r,
            rho,
            q: alpha / (alpha - 1.0),
        }
    }

    fn f0_value(&self, x: f64) -> f64 {
        let (c, r, q) = (self.c, self.r, self.q);
        if x.abs() <= r {
            c * x.abs().powf(q)
        } else {
            // slope-matched linear continuation, offset -C R^q / (alpha - 1)
            let slope = c * q * r.powf(q - 1.0);
            let offset = -c * r.powf(q) / (self.alpha - 1.0);
            slope * x.abs() + offset
        }
    }

    fn f0_grad(&self, x: f64) -> f64 {
        let (c, r, q) = (self.c, self.r, self.q);
        if x.abs() <= r {
            c * q * x.abs().powf(q - 1.0) * x.signum()
        } else {
            c * q * r.powf(q - 1.0) * x.signum()
        }
    }

    fn f1_value(&self, x: f64) -> f64 {
        let (c, rho, q) = (self.c, self.rho, self.q);
        let a = 2f64.powf(q - 1.0) * c;
        if x < 0.0 {
            -q * a * rho.powf(q - 1.0) * x + 2.0 * a * rho.powf(q)
        } else if x < 2.0 * rho {
            a * ((x - rho).abs().powf(q) + rho.powf(q))
        } else {
            self.f0_value(x)
        }
    }

    fn f1_grad(&self, x: f64) -> f64 {
        let (c, rho, q) = (self.c, self.rho, self.q);
        let a = 2f64.powf(q - 1.0) * c;
        if x < 0.0 {
            -q * a * rho.powf(q - 1.0)
        } else if x < 2.0 * rho {
            q * a * (x - rho).abs().powf(q - 1.0) * (x - rho).signum()
        } else {
            self.f0_grad(x)
        }
    }
}

impl Objective for PairMember {
    fn dim(&self) -> usize {
        1
    }

    fn value(&self, x: &Vector) -> Result<f64> {
        self.check_dim(x)?;
        let x = x.as_scalar();
        Ok(match self.kind {
            PairMemberKind::F0 => self.f0_value(x),
            PairMemberKind::F1 => self.f1_value(x),
        })
    }

    fn gradient(&self, x: &Vector) -> Result<Vector> {
        self.check_dim(x)?;
        let x = x.as_scalar();
        Ok(Vector::scalar(match self.kind {
            PairMemberKind::F0 => self.f0_grad(x),
            PairMemberKind::F1 => self.f1_grad(x),
        }))
    }

    fn minimizer(&self) -> Option<Vector> {
        Some(Vector::scalar(match self.kind {
            PairMemberKind::F0 => 0.0,
            PairMemberKind::F1 => self.rho,
        }))
    }

    fn min_value(&self) -> Option<f64> {
        Some(match self.kind {
            PairMemberKind::F0 => 0.0,
            PairMemberKind::F1 => 2f64.powf(self.q - 1.0) * self.c * self.rho.powf(self.q),
        })
    }

    fn certificate(&self) -> DominanceCertificate {
        let base = pair_constants(self.alpha, self.c, self.r, self.rho);
        match self.kind {
            PairMemberKind::F0 => base,
            PairMemberKind::F1 => {
                // f1's curvature peaks at the kink scale rho, which can
                // exceed the f0 constant when rho is not tiny.
                let q = self.q;
                let l1 = 2f64.powf(q - 1.0) * self.c * q * (q - 1.0) * self.rho.powf(q - 2.0);
                DominanceCertificate {
                    l: base.l.max(l1),
                    ..base
                }
            }
        }
    }

    fn natural_domain(&self) -> Domain {
        Domain::Interval { lo: 0.0, hi: self.r }
    }

    fn breakpoints(&self) -> Vec<f64> {
        match self.kind {
            PairMemberKind::F0 => vec![-self.r, 0.0, self.r],
            PairMemberKind::F1 => vec![0.0, 2.0 * self.rho, self.r],
        }
    }

    fn default_start(&self) -> Vector {
        Vector::scalar(self.r)
    }
}

/// The indistinguishable-under-noise pair (f0, f1) with shared constants.
#[derive(Clone)]
pub struct LowerBoundPair {
    pub alpha: f64,
    pub c: f64,
    pub r: f64,
    pub rho: f64,
    pub f0: Arc<PairMember>,
    pub f1: Arc<PairMember>,
}

pub fn make_lower_bound_pair(alpha: f64, c: f64, r: f64, rho: f64) -> Result<LowerBoundPair> {
    if !(alpha > 1.0 && alpha < 2.0) {
        return Err(Error::InvalidArgument(format!(
            "pair needs alpha in (1, 2), got {alpha}; the alpha = 1 endpoint has no x^(alpha/(alpha-1)) profile — use the finite-sum quadratic or exponential instance"
        )));
    }
    if !(c > 0.0 && c <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "pair needs C in (0, 1], got {c}"
        )));
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidArgument(format!("pair needs R > 0, got {r}")));
    }
    if !(rho > 0.0 && 2.0 * rho <= r) {
        return Err(Error::InvalidArgument(format!(
            "pair needs 0 < rho <= R/2, got rho {rho}, R {r}"
        )));
    }
    Ok(LowerBoundPair {
        alpha,
        c,
        r,
        rho,
        f0: Arc::new(PairMember::new(PairMemberKind::F0, alpha, c, r, rho)),
        f1: Arc::new(PairMember::new(PairMemberKind::F1, alpha, c, r, rho)),
    })
}

fn pair_constants(alpha: f64, c: f64, r: f64, rho: f64) -> DominanceCertificate {
    let q = alpha / (alpha - 1.0);
    let l = c * alpha / (alpha - 1.0).powi(2) * r.powf((2.0 - alpha) / (alpha - 1.0));
    let tau = c.powf(1.0 - alpha) * ((alpha - 1.0) / alpha).powf(alpha);
    let eta0 = [
        2f64.powf(-1.0 / (alpha - 1.0)) / c * ((alpha - 1.0) / alpha)
            * rho.powf(-(2.0 - alpha) / (alpha - 1.0)),
        2.0 * rho / (q * c * r.powf(q - 1.0)),
        1.0 / (q * c * r.powf(q - 1.0)),
        1.0,
    ]
    .into_iter()
    .fold(f64::INFINITY, f64::min);
    DominanceCertificate {
        alpha,
        tau,
        eta0: Some(eta0),
        l,
        l_tilde: l,
        g_bound: Some(c * q * r.powf(q - 1.0)),
    }
}

/// The shared certificate of the pair (smoothness, dominance, projected
/// step-size range) from the closed forms.
pub fn theoretical_constants(pair: &LowerBoundPair) -> DominanceCertificate {
    pair_constants(pair.alpha, pair.c, pair.r, pair.rho)
}

// ---------------------------------------------------------------------------
// Noisy-binary-search chain
// ---------------------------------------------------------------------------

/// Interface shared by the NBS-style piecewise instances so the Bernoulli
/// oracle can sample them uniformly: local profile weight g_j(x), interval
/// lookup, coin bias.
pub trait NoisySlope: Objective {
    fn p(&self) -> f64;
    fn g_bound(&self) -> f64;
    fn j_star(&self) -> usize;
    fn num_intervals(&self) -> usize;
    /// 1-indexed interval containing x (x = R maps to the last interval).
    fn interval_index(&self, x: f64) -> usize;
    /// Profile weight g_j(x) ∈ [−1, 1] for x in its interval.
    fn g_weight(&self, x: f64) -> f64;
}

/// Piecewise instance on [0, R] split into N intervals of width R/N with
/// breakpoints a_j = (j−1)R/N. F has slope −pG below the distinguished
/// interval j*, +pG above it, and a power-profile valley of exponent
/// α/(α−1) inside it; the minimizer sits at the interval midpoint.
#[derive(Clone, Debug)]
pub struct NbsInstance {
    pub alpha: f64,
    pub p: f64,
    pub g: f64,
    pub r: f64,
    pub n: usize,
    pub j_star: usize,
}

impl NbsInstance {
    pub fn breakpoint(&self, j: usize) -> f64 {
        (j as f64 - 1.0) * self.r / self.n as f64
    }

    pub fn half_width(&self) -> f64 {
        self.r / (2.0 * self.n as f64)
    }

    pub fn midpoint(&self, j: usize) -> f64 {
        self.breakpoint(j) + self.half_width()
    }
}

pub fn make_nbs_instance(
    alpha: f64,
    p: f64,
    g: f64,
    r: f64,
    n: usize,
    j_star: usize,
) -> Result<NbsInstance> {
    if !(alpha > 1.0 && alpha <= 2.0) {
        return Err(Error::InvalidArgument(format!(
            "nbs needs alpha in (1, 2], got {alpha}"
        )));
    }
    if !(p > 0.0 && p < 0.5) {
        return Err(Error::InvalidArgument(format!(
            "nbs needs coin bias p in (0, 1/2), got {p}"
        )));
    }
    if !(g > 0.0 && g.is_finite()) {
        return Err(Error::InvalidArgument(format!("nbs needs G > 0, got {g}")));
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidArgument(format!("nbs needs R > 0, got {r}")));
    }
    if n < 2 {
        return Err(Error::InvalidArgument(format!("nbs needs N >= 2, got {n}")));
    }
    if !(1 <= j_star && j_star <= n - 1) {
        return Err(Error::InvalidArgument(format!(
            "nbs needs 1 <= j* <= N-1, got j* {j_star}, N {n}"
        )));
    }
    Ok(NbsInstance {
        alpha,
        p,
        g,
        r,
        n,
        j_star,
    })
}

impl NoisySlope for NbsInstance {
    fn p(&self) -> f64 {
        self.p
    }
    fn g_bound(&self) -> f64 {
        self.g
    }
    fn j_star(&self) -> usize {
        self.j_star
    }
    fn num_intervals(&self) -> usize {
        self.n
    }

    fn interval_index(&self, x: f64) -> usize {
        let j = (x * self.n as f64 / self.r).floor() as isize + 1;
        j.clamp(1, self.n as isize) as usize
    }

    fn g_weight(&self, x: f64) -> f64 {
        let j = self.interval_index(x);
        let h = self.half_width();
        let d = x - self.midpoint(j);
        let e = 1.0 / (self.alpha - 1.0);
        d.signum() * d.abs().powf(e) / h.powf(e)
    }
}

impl Objective for NbsInstance {
    fn dim(&self) -> usize {
        1
    }

    fn value(&self, x: &Vector) -> Result<f64> {
        self.check_dim(x)?;
        let x = x.as_scalar();
        let (p, g) = (self.p, self.g);
        let a_lo = self.breakpoint(self.j_star);
        let a_hi = self.breakpoint(self.j_star + 1);
        let h = self.half_width();
        let q = self.alpha / (self.alpha - 1.0);
        Ok(if x < a_lo {
            p * g * (a_lo - x)
        } else if x <= a_hi {
            let d = x - self.midpoint(self.j_star);
            p * g / q * (d.abs().powf(q) / h.powf(q - 1.0) - h)
        } else {
            p * g * (x - a_hi)
        })
    }

    fn gradient(&self, x: &Vector) -> Result<Vector> {
        self.check_dim(x)?;
        let x = x.as_scalar();
        let (p, g) = (self.p, self.g);
        let a_lo = self.breakpoint(self.j_star);
        let a_hi = self.breakpoint(self.j_star + 1);
        Ok(Vector::scalar(if x < a_lo {
            -p * g
        } else if x <= a_hi {
            p * g * self.g_weight(x)
        } else {
            p * g
        }))
    }

    fn minimizer(&self) -> Option<Vector> {
        Some(Vector::scalar(self.midpoint(self.j_star)))
    }

    fn min_value(&self) -> Option<f64> {
        // -pG (alpha-1) R / (2 alpha N)
        Some(-self.p * self.g * self.half_width() * (self.alpha - 1.0) / self.alpha)
    }

    fn certificate(&self) -> DominanceCertificate {
        // Local dominance constant on the distinguished interval;
        // smoothness constant of the valley profile at the interval edge.
        let h = self.half_width();
        let tau = (self.alpha - 1.0) / self.alpha * h * (self.p * self.g).powf(1.0 - self.alpha);
        let l = self.p * self.g / ((self.alpha - 1.0) * h);
        DominanceCertificate {
            alpha: self.alpha,
            tau,
            eta0: None,
            l,
            l_tilde: l,
            g_bound: Some(self.g),
        }
    }

    fn natural_domain(&self) -> Domain {
        Domain::Interval { lo: 0.0, hi: self.r }
    }

    fn breakpoints(&self) -> Vec<f64> {
        (1..=self.n + 1).map(|j| self.breakpoint(j)).collect()
    }

    fn default_start(&self) -> Vector {
        // far end of the chain relative to j*
        if self.midpoint(self.j_star) > self.r / 2.0 {
            Vector::scalar(0.0)
        } else {
            Vector::scalar(self.r)
        }
    }
}

/// Feasible (p, N) for an NBS instance that forces gap > ε outside the
/// distinguished interval: p = 2ε^{1/α}/(G τ^{1/α}),
/// N = ⌈(α−1)R / (2α ε^{(α−1)/α} τ^{1/α})⌉ (at least 2).
///
/// After integer rounding the constructor re-checks the local-dominance
/// budget and the identification margin; rounding N up can only consume up
/// to half of the paper-level 2ε margin, so the post-rounding check is
/// against ε.
pub fn nbs_parameters(epsilon: f64, alpha: f64, tau: f64, g: f64, r: f64) -> Result<(f64, usize)> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    if !(alpha > 1.0 && alpha <= 2.0) {
        return Err(Error::InvalidArgument(format!(
            "nbs needs alpha in (1, 2], got {alpha}"
        )));
    }
    if !(tau > 0.0 && g > 0.0 && r > 0.0) {
        return Err(Error::InvalidArgument(
            "tau, G and R must all be positive".into(),
        ));
    }
    let cap = (((alpha - 1.0) / alpha).powf(alpha) * tau).min(1.0);
    if epsilon > cap {
        return Err(Error::InfeasiblePrecision(format!(
            "epsilon {epsilon} exceeds the regime bound {cap}"
        )));
    }
    let p = 2.0 * epsilon.powf(1.0 / alpha) / (g * tau.powf(1.0 / alpha));
    if p >= 0.5 {
        return Err(Error::InfeasiblePrecision(format!(
            "epsilon {epsilon} needs coin bias p = {p} >= 1/2; increase tau or G"
        )));
    }
    let n_real = (alpha - 1.0) * r
        / (2.0 * alpha * epsilon.powf((alpha - 1.0) / alpha) * tau.powf(1.0 / alpha));
    let n = (n_real.ceil() as usize).max(2);
    // Re-verify on the integer N: dominance budget and identification margin.
    let half = r / (2.0 * n as f64);
    let local_tau = (alpha - 1.0) / alpha * half * (p * g).powf(1.0 - alpha);
    if local_tau > tau * (1.0 + 1e-12) {
        return Err(Error::CertificateViolation(format!(
            "post-rounding local dominance {local_tau} exceeds budget {tau}"
        )));
    }
    let margin = p * g * half * (alpha - 1.0) / alpha;
    if margin < epsilon * (1.0 - 1e-12) {
        return Err(Error::InfeasiblePrecision(format!(
            "post-rounding identification margin {margin} below epsilon {epsilon}"
        )));
    }
    Ok((p, n))
}

// ---------------------------------------------------------------------------
// phi-KL variant (psi-power valley)
// ---------------------------------------------------------------------------

/// NBS-shaped instance whose valley profile is driven by ψ(s) = s^q
/// (q > 1), certifying the φ-Kurdyka–Łojasiewicz property
/// φ'(F(x) − F*) · |F'(x)| ≥ 1 with φ = ψ^{-1}.
#[derive(Clone, Debug)]
pub struct PhiKlInstance {
    pub q_psi: f64,
    pub p: f64,
    pub g: f64,
    pub r: f64,
    pub n: usize,
    pub j_star: usize,
}

impl PhiKlInstance {
    pub fn psi(&self, s: f64) -> f64 {
        s.powf(self.q_psi)
    }
    pub fn psi_prime(&self, s: f64) -> f64 {
        self.q_psi * s.powf(self.q_psi - 1.0)
    }
    /// φ = ψ^{-1}, so φ(u) = u^{1/q}.
    pub fn phi_prime(&self, u: f64) -> f64 {
        u.powf(1.0 / self.q_psi - 1.0) / self.q_psi
    }
    pub fn breakpoint(&self, j: usize) -> f64 {
        (j as f64 - 1.0) * self.r / self.n as f64
    }
    pub fn half_width(&self) -> f64 {
        self.r / (2.0 * self.n as f64)
    }
    pub fn midpoint(&self, j: usize) -> f64 {
        self.breakpoint(j) + self.half_width()
    }
}

fn phi_kl_validate(q_psi: f64, p: f64, g: f64, r: f64, n: usize, j_star: usize) -> Result<()> {
    if !(q_psi > 1.0 && q_psi.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "phi-kl needs psi exponent q > 1, got {q_psi}"
        )));
    }
    if !(p > 0.0 && p < 0.5) {
        return Err(Error::InvalidArgument(format!(
            "phi-kl needs coin bias p in (0, 1/2), got {p}"
        )));
    }
    if !(g > 0.0 && r > 0.0) {
        return Err(Error::InvalidArgument("G and R must be positive".into()));
    }
    if n < 2 || j_star < 1 || j_star > n - 1 {
        return Err(Error::InvalidArgument(format!(
            "phi-kl needs N >= 2 and 1 <= j* <= N-1, got N {n}, j* {j_star}"
        )));
    }
    Ok(())
}

/// Checked constructor: requires the slope budget pG ≥ ψ'(R/2N) so the
/// φ-KL inequality holds up to the valley edge.
pub fn make_phi_kl_instance(
    q_psi: f64,
    p: f64,
    g: f64,
    r: f64,
    n: usize,
    j_star: usize,
) -> Result<PhiKlInstance> {
    phi_kl_validate(q_psi, p, g, r, n, j_star)?;
    let inst = PhiKlInstance {
        q_psi,
        p,
        g,
        r,
        n,
        j_star,
    };
    let budget = inst.psi_prime(inst.half_width());
    if p * g < budget * (1.0 - 1e-12) {
        return Err(Error::CertificateViolation(format!(
            "phi-kl needs pG >= psi'(R/2N) = {budget}, got pG = {}",
            p * g
        )));
    }
    Ok(inst)
}

/// Constructor that skips the pG ≥ ψ'(R/2N) budget check, for building
/// deliberate counterexamples in tests.
pub fn make_phi_kl_instance_unchecked(
    q_psi: f64,
    p: f64,
    g: f64,
    r: f64,
    n: usize,
    j_star: usize,
) -> Result<PhiKlInstance> {
    phi_kl_validate(q_psi, p, g, r, n, j_star)?;
    Ok(PhiKlInstance {
        q_psi,
        p,
        g,
        r,
        n,
        j_star,
    })
}

impl NoisySlope for PhiKlInstance {
    fn p(&self) -> f64 {
        self.p
    }
    fn g_bound(&self) -> f64 {
        self.g
    }
    fn j_star(&self) -> usize {
        self.j_star
    }
    fn num_intervals(&self) -> usize {
        self.n
    }

    fn interval_index(&self, x: f64) -> usize {
        let j = (x * self.n as f64 / self.r).floor() as isize + 1;
        j.clamp(1, self.n as isize) as usize
    }

    fn g_weight(&self, x: f64) -> f64 {
        let j = self.interval_index(x);
        let d = x - self.midpoint(j);
        d.signum() * self.psi_prime(d.abs()) / self.psi_prime(self.half_width())
    }
}

impl Objective for PhiKlInstance {
    fn dim(&self) -> usize {
        1
    }

    fn value(&self, x: &Vector) -> Result<f64> {
        self.check_dim(x)?;
        let x = x.as_scalar();
        let (p, g) = (self.p, self.g);
        let a_lo = self.breakpoint(self.j_star);
        let a_hi = self.breakpoint(self.j_star + 1);
        let h = self.half_width();
        Ok(if x < a_lo {
            p * g * (a_lo - x)
        } else if x <= a_hi {
            let d = (x - self.midpoint(self.j_star)).abs();
            p * g * (self.psi(d) - self.psi(h)) / self.psi_prime(h)
        } else {
            p * g * (x - a_hi)
        })
    }

    fn gradient(&self, x: &Vector) -> Result<Vector> {
        self.check_dim(x)?;
        let x = x.as_scalar();
        let a_lo = self.breakpoint(self.j_star);
        let a_hi = self.breakpoint(self.j_star + 1);
        Ok(Vector::scalar(if x < a_lo {
            -self.p * self.g
        } else if x <= a_hi {
            self.p * self.g * self.g_weight(x)
        } else {
            self.p * self.g
        }))
    }

    fn minimizer(&self) -> Option<Vector> {
        Some(Vector::scalar(self.midpoint(self.j_star)))
    }

    fn min_value(&self) -> Option<f64> {
        let h = self.half_width();
        Some(-self.p * self.g * self.psi(h) / self.psi_prime(h))
    }

    fn certificate(&self) -> DominanceCertificate {
        // Power psi corresponds to alpha = q/(q-1) dominance with
        // tau = A^{1-alpha} q^{-alpha}, A = pG / psi'(R/2N).
        let q = self.q_psi;
        let alpha = q / (q - 1.0);
        let a = self.p * self.g / self.psi_prime(self.half_width());
        let tau = a.powf(1.0 - alpha) * q.powf(-alpha);
        let l = self.p * self.g * (q - 1.0) / self.half_width();
        DominanceCertificate {
            alpha,
            tau,
            eta0: None,
            l,
            l_tilde: l,
            g_bound: Some(self.g),
        }
    }

    fn natural_domain(&self) -> Domain {
        Domain::Interval { lo: 0.0, hi: self.r }
    }

    fn breakpoints(&self) -> Vec<f64> {
        (1..=self.n + 1).map(|j| self.breakpoint(j)).collect()
    }

    fn default_start(&self) -> Vector {
        if self.midpoint(self.j_star) > self.r / 2.0 {
            Vector::scalar(0.0)
        } else {
            Vector::scalar(self.r)
        }
    }
}

// ---------------------------------------------------------------------------
// Finite-sum quadratic (alpha = 1 endpoint)
// ---------------------------------------------------------------------------

/// Finite-sum quadratic on the ball B(0; R):
/// F(x) = (σ/m) Σ_i ⟨x, z_i⟩ + (b/2)‖x‖² with orthonormal z_i and
/// b = 2σ/(R√m). Minimizer −(σ/(bm)) Σ z_i of norm R/2, minimum
/// −σ²/(2bm), and the exact identity ‖∇F‖² = 2b (F − F*).
#[derive(Clone, Debug)]
pub struct FosterInstance {
    pub sigma: f64,
    pub r: f64,
    pub m: usize,
    pub dim: usize,
    pub b: f64,
    pub basis_seed: u64,
    pub z: Vec<Vector>,
    /// (σ/m) Σ z_i — the deterministic part of the gradient.
    pub s: Vector,
}

pub fn make_foster_instance(
    sigma: f64,
    r: f64,
    m: usize,
    dim: usize,
    basis_seed: u64,
) -> Result<FosterInstance> {
    if !(sigma > 0.0 && r > 0.0) {
        return Err(Error::InvalidArgument(
            "sigma and R must be positive".into(),
        ));
    }
    if m == 0 || dim < m {
        return Err(Error::InvalidArgument(format!(
            "needs 1 <= m <= dim for an orthonormal family, got m {m}, dim {dim}"
        )));
    }
    // Seeded Gaussian matrix, then modified Gram-Schmidt.
    let mut rng = ChaCha8Rng::seed_from_u64(basis_seed);
    let mut z: Vec<Vec<f64>> = Vec::with_capacity(m);
    for _ in 0..m {
        z.push((0..dim).map(|_| standard_normal(&mut rng)).collect());
    }
    for i in 0..m {
        for k in 0..i {
            let proj: f64 = z[i].iter().zip(&z[k]).map(|(a, b)| a * b).sum();
            let zk = z[k].clone();
            for (a, b) in z[i].iter_mut().zip(&zk) {
                *a -= proj * b;
            }
        }
        let norm: f64 = z[i].iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm < 1e-8 {
            return Err(Error::NumericFailure {
                at: i,
                message: "degenerate random basis during orthonormalization".into(),
                trajectory: Box::default(),
            });
        }
        for a in z[i].iter_mut() {
            *a /= norm;
        }
    }
    // Orthonormality must hold to 1e-12.
    for i in 0..m {
        for k in 0..=i {
            let dot: f64 = z[i].iter().zip(&z[k]).map(|(a, b)| a * b).sum();
            let want = if i == k { 1.0 } else { 0.0 };
            if (dot - want).abs() > 1e-12 {
                return Err(Error::CertificateViolation(format!(
                    "basis not orthonormal: <z{i}, z{k}> = {dot}"
                )));
            }
        }
    }
    let b = 2.0 * sigma / (r * (m as f64).sqrt());
    let z: Vec<Vector> = z.into_iter().map(Vector::raw).collect();
    let mut s = Vector::zeros(dim);
    for zi in &z {
        s = s.add(zi);
    }
    let s = s.scale(sigma / m as f64);
    Ok(FosterInstance {
        sigma,
        r,
        m,
        dim,
        b,
        basis_seed,
        z,
        s,
    })
}

pub(crate) fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
    // Box-Muller; keeps the oracle stack on the one seeded ChaCha stream.
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen::<f64>();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

impl Objective for FosterInstance {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &Vector) -> Result<f64> {
        self.check_dim(x)?;
        Ok(self.s.dot(x) + 0.5 * self.b * x.dot(x))
    }

    fn gradient(&self, x: &Vector) -> Result<Vector> {
        self.check_dim(x)?;
        Ok(self.s.add(&x.scale(self.b)))
    }

    fn minimizer(&self) -> Option<Vector> {
        Some(self.s.scale(-1.0 / self.b))
    }

    fn min_value(&self) -> Option<f64> {
        Some(-self.sigma * self.sigma / (2.0 * self.b * self.m as f64))
    }

    fn certificate(&self) -> DominanceCertificate {
        DominanceCertificate {
            alpha: 1.0,
            tau: 2.0 * self.r,
            eta0: None,
            l: self.b,
            l_tilde: self.b,
            g_bound: Some(self.sigma + self.b * self.r),
        }
    }

    fn natural_domain(&self) -> Domain {
        Domain::Ball {
            center: Vector::zeros(self.dim),
            radius: self.r,
        }
    }

    fn default_start(&self) -> Vector {
        // boundary point opposite the minimizer
        let x_star = self.minimizer().unwrap();
        let n = x_star.norm();
        x_star.scale(-self.r / n)
    }
}

// ---------------------------------------------------------------------------
// Power and exponential instances
// ---------------------------------------------------------------------------

/// Radial power objective λ‖x − x*‖^{α/(α−1)} with exact dominance
/// constant τ = λ^{1−α} ((α−1)/α)^α met with equality everywhere.
#[derive(Clone, Debug)]
pub struct PowerInstance {
    pub alpha: f64,
    pub lambda: f64,
    pub x_star: Vector,
    pub domain: Domain,
}

pub fn make_power_instance(
    alpha: f64,
    lambda: f64,
    x_star: Vector,
    domain: Domain,
) -> Result<PowerInstance> {
    // alpha > 2 gives growth exponent q = alpha/(alpha-1) < 2, i.e. a
    // weakly smooth (Hölder-gradient) profile; allowed for the Hölder
    // verifier even though the dominance theory lives in alpha <= 2.
    if !(alpha > 1.0 && alpha.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "power instance needs alpha > 1, got {alpha}"
        )));
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "power instance needs lambda > 0, got {lambda}"
        )));
    }
    if x_star.dim() != domain.dim() {
        return Err(Error::DimensionMismatch {
            expected: domain.dim(),
            got: x_star.dim(),
        });
    }
    if !domain.contains(&x_star, 1e-12) {
        return Err(Error::Precondition(
            "power instance minimizer must lie in the domain".into(),
        ));
    }
    Ok(PowerInstance {
        alpha,
        lambda,
        x_star,
        domain,
    })
}

impl Objective for PowerInstance {
    fn dim(&self) -> usize {
        self.x_star.dim()
    }

    fn value(&self, x: &Vector) -> Result<f64> {
        self.check_dim(x)?;
        let q = self.alpha / (self.alpha - 1.0);
        Ok(self.lambda * x.dist(&self.x_star).powf(q))
    }

    fn gradient(&self, x: &Vector) -> Result<Vector> {
        self.check_dim(x)?;
        let q = self.alpha / (self.alpha - 1.0);
        let d = x.sub(&self.x_star);
        let n = d.norm();
        if n == 0.0 {
            return Ok(Vector::zeros(self.dim()));
        }
        Ok(d.scale(self.lambda * q * n.powf(q - 2.0)))
    }

    fn minimizer(&self) -> Option<Vector> {
        Some(self.x_star.clone())
    }

    fn min_value(&self) -> Option<f64> {
        Some(0.0)
    }

    fn certificate(&self) -> DominanceCertificate {
        let q = self.alpha / (self.alpha - 1.0);
        let tau = self.lambda.powf(1.0 - self.alpha) * q.powf(-self.alpha);
        // Hessian norm grows like d^{q-2}: bounded on bounded domains for
        // q >= 2, unbounded at x* for q < 2 (weakly smooth profiles).
        let diam = self.domain.diameter();
        let l = if q < 2.0 {
            f64::INFINITY
        } else if diam.is_finite() {
            self.lambda * q * (q - 1.0).max(1.0) * diam.powf(q - 2.0)
        } else if self.alpha == 2.0 {
            2.0 * self.lambda
        } else {
            f64::INFINITY
        };
        let g_bound = if diam.is_finite() {
            Some(self.lambda * q * diam.powf(q - 1.0))
        } else {
            None
        };
        DominanceCertificate {
            alpha: self.alpha,
            tau,
            eta0: None,
            l,
            l_tilde: l,
            g_bound,
        }
    }

    fn natural_domain(&self) -> Domain {
        self.domain.clone()
    }

    fn default_start(&self) -> Vector {
        match &self.domain {
            Domain::Interval { hi, .. } => Vector::scalar(*hi),
            Domain::Box { hi, .. } => hi.clone(),
            Domain::Ball { center, radius } => {
                let d = self.x_star.sub(center);
                let n = d.norm();
                if n < 1e-12 {
                    let mut e = vec![0.0; self.dim()];
                    e[0] = *radius;
                    center.add(&Vector::raw(e))
                } else {
                    center.sub(&d.scale(radius / n))
                }
            }
            Domain::AllSpace { dim } => {
                let mut e = vec![0.0; *dim];
                e[0] = 1.0;
                self.x_star.add(&Vector::raw(e))
            }
        }
    }
}

/// Tight (1, s)-dominated 1-D instance on [0, R]:
/// F(x) = s (e^{x/s} − 1), so F(x) − F* = s(1 − e^{−x/s}) · F'(x) ≤ s F'(x)
/// with near-equality away from the minimizer at 0. This is the α = 1
/// endpoint of the testbed, where the pair construction degenerates.
#[derive(Clone, Debug)]
pub struct ExponentialInstance {
    pub scale: f64,
    pub r: f64,
}

pub fn make_exponential_instance(scale: f64, r: f64) -> Result<ExponentialInstance> {
    if !(scale > 0.0 && scale.is_finite() && r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "exponential instance needs scale > 0 and R > 0, got {scale}, {r}"
        )));
    }
    Ok(ExponentialInstance { scale, r })
}

impl Objective for ExponentialInstance {
    fn dim(&self) -> usize {
        1
    }

    fn value(&self, x: &Vector) -> Result<f64> {
        self.check_dim(x)?;
        Ok(self.scale * ((x.as_scalar() / self.scale).exp() - 1.0))
    }

    fn gradient(&self, x: &Vector) -> Result<Vector> {
        self.check_dim(x)?;
        Ok(Vector::scalar((x.as_scalar() / self.scale).exp()))
    }

    fn minimizer(&self) -> Option<Vector> {
        Some(Vector::scalar(0.0))
    }

    fn min_value(&self) -> Option<f64> {
        Some(0.0)
    }

    fn certificate(&self) -> DominanceCertificate {
        let l = (self.r / self.scale).exp() / self.scale;
        DominanceCertificate {
            alpha: 1.0,
            tau: self.scale,
            eta0: Some(self.scale.min(1.0)),
            l,
            l_tilde: l,
            g_bound: Some((self.r / self.scale).exp()),
        }
    }

    fn natural_domain(&self) -> Domain {
        Domain::Interval { lo: 0.0, hi: self.r }
    }

    fn default_start(&self) -> Vector {
        Vector::scalar(self.r)
    }
}

// ---------------------------------------------------------------------------
// Closed-form bounds
// ---------------------------------------------------------------------------

fn check_alpha_beta_l_tau(alpha: f64, l: f64, tau: f64) -> Result<()> {
    if !(alpha >= 1.0 && alpha < 2.0) {
        return Err(Error::InvalidArgument(format!(
            "needs alpha in [1, 2), got {alpha}"
        )));
    }
    if !(l > 0.0 && tau > 0.0) {
        return Err(Error::InvalidArgument(
            "L and tau must be positive".into(),
        ));
    }
    Ok(())
}

/// Radius bound R0(α) = (α/(α−1)) (2L)^{(α−1)/(2−α)} τ^{1/(2−α)} on the
/// distance from any point to the minimizer set of an L-smooth
/// (α, τ)-dominated function (α in (1, 2)).
pub fn r0_bound(alpha: f64, l: f64, tau: f64) -> Result<f64> {
    check_alpha_beta_l_tau(alpha, l, tau)?;
    if alpha == 1.0 {
        return Err(Error::InvalidArgument(
            "r0_bound needs alpha > 1 (alpha/(alpha-1) diverges at 1)".into(),
        ));
    }
    Ok(alpha / (alpha - 1.0)
        * (2.0 * l).powf((alpha - 1.0) / (2.0 - alpha))
        * tau.powf(1.0 / (2.0 - alpha)))
}

/// Gap bound Δ(α, β) = β^{α/(β−α)} L^{α(β−1)/(β−α)} τ^{β/(β−α)} on
/// sup F − F* for a function that is (α, τ)-dominated with
/// (1/(β−1))-Hölder gradients, β > α.
pub fn holder_gap_bound(alpha: f64, beta: f64, l: f64, tau: f64) -> Result<f64> {
    check_alpha_beta_l_tau(alpha, l, tau)?;
    if !(beta > alpha) {
        return Err(Error::InvalidArgument(format!(
            "needs beta > alpha, got alpha {alpha}, beta {beta}"
        )));
    }
    Ok(beta.powf(alpha / (beta - alpha))
        * l.powf(alpha * (beta - 1.0) / (beta - alpha))
        * tau.powf(beta / (beta - alpha)))
}

/// Distance-to-minimizer bound (α/(α−1)) τ^{1/α} (F(x) − F*)^{(α−1)/α}
/// for (α, τ)-dominated functions, α in (1, 2].
pub fn distance_bound(alpha: f64, tau: f64, gap: f64) -> Result<f64> {
    if !(alpha > 1.0 && alpha <= 2.0) {
        return Err(Error::InvalidArgument(format!(
            "needs alpha in (1, 2], got {alpha}"
        )));
    }
    if !(tau > 0.0) {
        return Err(Error::InvalidArgument("tau must be positive".into()));
    }
    if !(gap >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "gap must be nonnegative, got {gap}"
        )));
    }
    Ok(alpha / (alpha - 1.0) * tau.powf(1.0 / alpha) * gap.powf((alpha - 1.0) / alpha))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: f64) -> Vector {
        Vector::scalar(x)
    }

    #[test]
    fn pair_f0_values_and_gradients() {
        // alpha = 1.5, C = 1: q = 3, f0(x) = x^3 on [0, 1].
        let pair = make_lower_bound_pair(1.5, 1.0, 1.0, 0.1).unwrap();
        assert_eq!(pair.f0.value(&v(0.5)).unwrap(), 0.125);
        assert_eq!(pair.f0.gradient(&v(0.5)).unwrap().as_scalar(), 0.75);
        assert_eq!(pair.f0.value(&v(0.0)).unwrap(), 0.0);
        // linear continuation: slope 3 past R = 1, value continuous at R
        let at_r = pair.f0.value(&v(1.0)).unwrap();
        let past = pair.f0.value(&v(1.001)).unwrap();
        assert!((at_r - 1.0).abs() < 1e-15);
        assert!((past - (1.0 + 3.0 * 0.001)).abs() < 1e-12);
    }

    #[test]
    fn pair_f1_values_and_gradients() {
        // alpha = 1.5, C = 1, rho = 0.1: q = 3, scale 2^{q-1} = 4.
        // f1(0) = 4 (0.1^3 + 0.1^3) = 0.008, f1'(0) = -3*4*0.01 = -0.12.
        let pair = make_lower_bound_pair(1.5, 1.0, 1.0, 0.1).unwrap();
        assert!((pair.f1.value(&v(0.0)).unwrap() - 0.008).abs() < 1e-15);
        assert!((pair.f1.gradient(&v(0.0)).unwrap().as_scalar() + 0.12).abs() < 1e-15);
        // minimum at rho with value 4 * 0.1^3 = 0.004
        assert!((pair.f1.min_value().unwrap() - 0.004).abs() < 1e-15);
        assert_eq!(pair.f1.minimizer().unwrap().as_scalar(), 0.1);
        assert_eq!(pair.f1.gradient(&v(0.1)).unwrap().as_scalar(), 0.0);
        // coincides with f0 from 2 rho on
        for x in [0.2, 0.35, 0.7, 1.0] {
            assert!(
                (pair.f1.value(&v(x)).unwrap() - pair.f0.value(&v(x)).unwrap()).abs() < 1e-15,
                "x = {x}"
            );
        }
    }

    #[test]
    fn pair_members_are_continuous_and_c1_at_breakpoints() {
        for &(alpha, c, rho) in &[(1.2, 0.25, 0.05), (1.5, 1.0, 0.1), (1.8, 0.5, 0.1)] {
            let pair = make_lower_bound_pair(alpha, c, 1.0, rho).unwrap();
            let h = 1e-9;
            for f in [&pair.f0, &pair.f1] {
                for bp in f.breakpoints() {
                    let lo = f.value(&v(bp - h)).unwrap();
                    let hi = f.value(&v(bp + h)).unwrap();
                    assert!((lo - hi).abs() < 1e-6, "value jump at {bp}");
                    let glo = f.gradient(&v(bp - h)).unwrap().as_scalar();
                    let ghi = f.gradient(&v(bp + h)).unwrap().as_scalar();
                    assert!((glo - ghi).abs() < 1e-3, "gradient jump at {bp}");
                }
            }
        }
    }

    #[test]
    fn pair_theoretical_constants_frozen_values() {
        // alpha = 1.5, C = 1, R = 1, rho = 0.1:
        //   L = 1 * 1.5 / 0.25 * 1 = 6
        //   tau = (1/3)^1.5
        //   eta0 = min{2^{-2} * (1/3) * 10, 0.2/3, 1/3, 1} = 1/15
        let pair = make_lower_bound_pair(1.5, 1.0, 1.0, 0.1).unwrap();
        let k = theoretical_constants(&pair);
        assert!((k.l - 6.0).abs() < 1e-12);
        assert!((k.tau - (1.0f64 / 3.0).powf(1.5)).abs() < 1e-15);
        assert!((k.eta0.unwrap() - 0.2 / 3.0).abs() < 1e-15);
        assert_eq!(k.g_bound.unwrap(), 3.0);
    }

    #[test]
    fn pair_rejects_bad_parameters() {
        assert!(make_lower_bound_pair(1.0, 1.0, 1.0, 0.1).is_err());
        assert!(make_lower_bound_pair(2.0, 1.0, 1.0, 0.1).is_err());
        assert!(make_lower_bound_pair(1.5, 0.0, 1.0, 0.1).is_err());
        assert!(make_lower_bound_pair(1.5, 1.0, 1.0, 0.6).is_err()); // 2 rho > R
    }

    #[test]
    fn f0_dominance_holds_with_equality_in_the_interior() {
        let pair = make_lower_bound_pair(1.5, 1.0, 1.0, 0.1).unwrap();
        let tau = theoretical_constants(&pair).tau;
        for x in [0.05, 0.3, 0.77, 0.999] {
            let gap = pair.f0.gap(&v(x)).unwrap();
            let gn = pair.f0.gradient(&v(x)).unwrap().norm();
            let ratio = gap / gn.powf(1.5);
            assert!((ratio - tau).abs() < 1e-12, "x = {x}: ratio {ratio}");
        }
    }

    #[test]
    fn nbs_instance_frozen_values() {
        // alpha = 2, p = 0.2, G = 1, R = 1, N = 4, j* = 2:
        // a_2 = 0.25, minimizer 0.375, F(0) = 0.2 * 0.25 = 0.05,
        // min = -0.2 * 0.125 * 0.5 = -0.0125.
        let inst = make_nbs_instance(2.0, 0.2, 1.0, 1.0, 4, 2).unwrap();
        assert_eq!(inst.minimizer().unwrap().as_scalar(), 0.375);
        assert!((inst.value(&v(0.0)).unwrap() - 0.05).abs() < 1e-15);
        assert!((inst.min_value().unwrap() + 0.0125).abs() < 1e-15);
        // slope +- pG outside the distinguished interval
        assert_eq!(inst.gradient(&v(0.1)).unwrap().as_scalar(), -0.2);
        assert_eq!(inst.gradient(&v(0.9)).unwrap().as_scalar(), 0.2);
        // linear profile inside (alpha = 2)
        assert!((inst.gradient(&v(0.3125)).unwrap().as_scalar() + 0.1).abs() < 1e-12);
        // value continuous at interval edges
        for bp in [0.25, 0.5] {
            let lo = inst.value(&v(bp - 1e-10)).unwrap();
            let hi = inst.value(&v(bp + 1e-10)).unwrap();
            assert!((lo - hi).abs() < 1e-8);
        }
        // local dominance constant: (1/2) * 0.125 * (0.2)^{-1} = 0.3125
        let cert = inst.certificate();
        assert!((cert.tau - 0.3125).abs() < 1e-12);
    }

    #[test]
    fn nbs_gradient_is_expectation_consistent_with_value() {
        // numeric derivative of F matches the analytic gradient
        let inst = make_nbs_instance(1.5, 0.3, 2.0, 1.0, 5, 3).unwrap();
        for x in [0.05, 0.33, 0.45, 0.52, 0.55, 0.81] {
            let h = 1e-7;
            let num = (inst.value(&v(x + h)).unwrap() - inst.value(&v(x - h)).unwrap()) / (2.0 * h);
            let ana = inst.gradient(&v(x)).unwrap().as_scalar();
            assert!((num - ana).abs() < 1e-5, "x = {x}: {num} vs {ana}");
        }
    }

    #[test]
    fn nbs_parameters_feasible_and_infeasible() {
        // alpha = 2, tau = 1, G = 1, R = 1, eps = 0.04:
        // p = 2 sqrt(0.04) = 0.4, N = ceil(1/(4*0.2)) = 2.
        let (p, n) = nbs_parameters(0.04, 2.0, 1.0, 1.0, 1.0).unwrap();
        assert!((p - 0.4).abs() < 1e-15);
        assert_eq!(n, 2);
        // boundary eps = tau/4 with G small drives p past 1/2
        assert!(matches!(
            nbs_parameters(0.25, 2.0, 4.0, 1.0, 1.0),
            Err(Error::InfeasiblePrecision(_))
        ));
        // eps beyond the regime cap
        assert!(nbs_parameters(0.5, 2.0, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn phi_kl_with_square_psi_matches_nbs_alpha2() {
        // p = 0.25 sits exactly on the slope budget pG = psi'(R/2N)
        let kl = make_phi_kl_instance(2.0, 0.25, 1.0, 1.0, 4, 2).unwrap();
        let nbs = make_nbs_instance(2.0, 0.25, 1.0, 1.0, 4, 2).unwrap();
        for x in [0.0, 0.1, 0.27, 0.375, 0.44, 0.7, 1.0] {
            assert!(
                (kl.value(&v(x)).unwrap() - nbs.value(&v(x)).unwrap()).abs() < 1e-14,
                "value at {x}"
            );
            assert!(
                (kl.gradient(&v(x)).unwrap().as_scalar()
                    - nbs.gradient(&v(x)).unwrap().as_scalar())
                .abs()
                    < 1e-14,
                "gradient at {x}"
            );
        }
        // min = -pG psi(h)/psi'(h) = -0.25 * 0.0625 = -0.015625
        assert!((kl.min_value().unwrap() + 0.015625).abs() < 1e-15);
    }

    #[test]
    fn phi_kl_budget_check() {
        // pG = 0.2, psi'(R/2N) = 3 * 0.125^2 = 0.0469 -> ok for q = 3
        assert!(make_phi_kl_instance(3.0, 0.2, 1.0, 1.0, 4, 2).is_ok());
        // q = 1.1 makes psi'(0.125) = 1.1 * 0.125^{0.1} = 0.894 > 0.2 -> rejected
        assert!(matches!(
            make_phi_kl_instance(1.1, 0.2, 1.0, 1.0, 4, 2),
            Err(Error::CertificateViolation(_))
        ));
        // ... but the unchecked constructor builds it
        assert!(make_phi_kl_instance_unchecked(1.1, 0.2, 1.0, 1.0, 4, 2).is_ok());
    }

    #[test]
    fn foster_instance_closed_forms() {
        let inst = make_foster_instance(1.0, 2.0, 4, 6, 7).unwrap();
        // b = 2 sigma / (R sqrt(m)) = 2 / (2 * 2) = 0.5
        assert!((inst.b - 0.5).abs() < 1e-15);
        // minimizer norm R/2
        assert!((inst.minimizer().unwrap().norm() - 1.0).abs() < 1e-12);
        // min value -sigma^2/(2 b m) = -1/4
        assert!((inst.min_value().unwrap() + 0.25).abs() < 1e-12);
        assert!((inst.value(&inst.minimizer().unwrap()).unwrap() - inst.min_value().unwrap())
            .abs()
            < 1e-12);
        // identity ||grad||^2 = 2 b (F - F*) at random-ish points
        for k in 0..20 {
            let x = Vector::raw((0..6).map(|i| ((i + k) as f64 * 0.37).sin()).collect());
            let x = inst.natural_domain().project(&x).unwrap();
            let lhs = inst.gradient(&x).unwrap().dot(&inst.gradient(&x).unwrap());
            let rhs = 2.0 * inst.b * inst.gap(&x).unwrap();
            assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0));
        }
    }

    #[test]
    fn foster_basis_is_deterministic_in_the_seed() {
        let a = make_foster_instance(1.0, 2.0, 4, 6, 7).unwrap();
        let b = make_foster_instance(1.0, 2.0, 4, 6, 7).unwrap();
        let c = make_foster_instance(1.0, 2.0, 4, 6, 8).unwrap();
        assert_eq!(a.s, b.s);
        assert_ne!(a.s, c.s);
    }

    #[test]
    fn power_instance_equality_dominance() {
        let dom = Domain::ball(Vector::zeros(2), 3.0).unwrap();
        let inst =
            make_power_instance(1.5, 0.8, Vector::new(vec![0.5, -0.2]).unwrap(), dom).unwrap();
        let cert = inst.certificate();
        for x in [[1.0, 1.0], [-2.0, 0.3], [0.51, -0.21]] {
            let x = Vector::new(x.to_vec()).unwrap();
            let gap = inst.gap(&x).unwrap();
            let gn = inst.gradient(&x).unwrap().norm();
            let ratio = gap / gn.powf(1.5);
            assert!((ratio - cert.tau).abs() < 1e-9 * cert.tau);
        }
        // gradient vanishes exactly at the minimizer
        assert_eq!(
            inst.gradient(&inst.minimizer().unwrap()).unwrap().norm(),
            0.0
        );
    }

    #[test]
    fn exponential_instance_is_tight_alpha_one() {
        let inst = make_exponential_instance(1.0, 2.0).unwrap();
        let cert = inst.certificate();
        assert_eq!(cert.alpha, 1.0);
        for x in [0.5, 1.0, 1.7, 2.0] {
            let gap = inst.gap(&v(x)).unwrap();
            let gn = inst.gradient(&v(x)).unwrap().norm();
            assert!(gap <= cert.tau * gn + 1e-12);
            // tight away from the minimizer: ratio -> tau
            if x >= 1.0 {
                assert!(gap / gn > 0.6 * cert.tau);
            }
        }
        assert!((cert.l - 2f64.exp()).abs() < 1e-12);
    }

    #[test]
    fn closed_form_bounds_frozen_values() {
        assert!((r0_bound(1.5, 1.0, 1.0).unwrap() - 6.0).abs() < 1e-12);
        assert!((r0_bound(1.5, 2.0, 0.5).unwrap() - 3.0).abs() < 1e-12);
        assert!((holder_gap_bound(1.0, 2.0, 1.0, 1.0).unwrap() - 2.0).abs() < 1e-12);
        assert!((holder_gap_bound(1.5, 2.0, 1.0, 1.0).unwrap() - 8.0).abs() < 1e-12);
        assert!((distance_bound(2.0, 1.0, 4.0).unwrap() - 4.0).abs() < 1e-12);
        assert!((distance_bound(1.5, 1.0, 1.0).unwrap() - 3.0).abs() < 1e-12);
        assert!(r0_bound(0.5, 1.0, 1.0).is_err());
        assert!(holder_gap_bound(1.5, 1.2, 1.0, 1.0).is_err());
        assert!(distance_bound(1.5, 1.0, -1.0).is_err());
    }

    #[test]
    fn distance_bound_is_tight_on_f0() {
        // For f0 with C = 1: |x| = (gap)^{1/q} and the bound is exactly |x|.
        let pair = make_lower_bound_pair(1.5, 1.0, 1.0, 0.1).unwrap();
        for x in [0.1, 0.4, 0.9] {
            let gap = pair.f0.gap(&v(x)).unwrap();
            let bound = distance_bound(1.5, theoretical_constants(&pair).tau, gap).unwrap();
            assert!((bound - x).abs() < 1e-12);
        }
    }
}
