//! Two-way relay network with an `N_r`-antenna relay using maximum ratio
//! combining: closed-form end-user SNRs, the sum-SNR budget, optimal power
//! allocations for common-rate and weighted sum-rate objectives, and numeric
//! recovery of powers from target SNRs.
//!
//! Two single-antenna users exchange unit-energy symbols through the relay
//! in three time slots: both transmit in the first, and the relay beamforms
//! the combined signal back to each user in the second and third. After
//! self-interference cancellation the end-user SNRs are
//!
//! ```text
//! γ₂ = (P₁P_r/σ²)·‖h₁‖²‖h₂‖² / ((P₂+P_r)‖h₂‖² + P₁‖h₁‖² + σ²)
//! γ₁ = (P₂P_r/σ²)·‖h₁‖²‖h₂‖² / ((P₁+P_r)‖h₁‖² + P₂‖h₂‖² + σ²)
//! ```
//!
//! (user 1 decodes user 2's symbol, so `P₂` drives `γ₁` and vice versa).
//! Under the total power constraint `P₁+P₂+P_r ≤ P_t` the achievable SNR
//! pairs satisfy `γ₁+γ₂ ≤ K` with
//! `K = γ₁ᵣγ₂ᵣ / (√(γ₁ᵣ+1) + √(γ₂ᵣ+1))²` and `γᵢᵣ = P_t‖hᵢ‖²/σ²`
//! ([`snr_sum_budget`]), which turns both power-allocation problems into
//! instances of the simplex-bounded framework in [`crate::framework`].

use num_complex::Complex64;
use std::fmt;

use crate::framework::{FeasibleRegion, SimplexBound};

/// Pre-log factor of the rate expressions: the conventional half-duplex 1/2,
/// kept even though the protocol occupies three time slots. Use the
/// `*_with_prelog` variants to override.
pub const DEFAULT_PRELOG: f64 = 0.5;

/// Default SNR-space residual tolerance for [`recover_powers`].
pub const DEFAULT_RECOVERY_TOL: f64 = 1e-8;

/// Default membership tolerance for [`relay_feasible_region`]: loose enough
/// to admit boundary points at double precision, tight enough to reject
/// genuinely infeasible targets.
pub const DEFAULT_MEMBERSHIP_TOL: f64 = 1e-6;

/// Errors from relay-level constructors and solvers.
#[derive(Debug, Clone, PartialEq)]
pub enum RelayError {
    /// A parameter violated its domain (detail in `name`).
    InvalidParameter { name: &'static str, value: f64 },
    /// Channel vectors were empty, mismatched, or identically zero.
    InvalidChannel { reason: &'static str },
    /// The closed-form weighted solution has a negative SNR component:
    /// the weight ratio exceeds what the budget supports
    /// (`min(a1,a2)·(1+K) < max(a1,a2)`), so the candidate point leaves the
    /// physical orthant and no optimality claim is possible.
    WeightTooSkewed { a1: f64, a2: f64, budget: f64 },
    /// No power split attains the target SNRs within tolerance; the target
    /// lies outside the achievable region.
    Unachievable {
        gamma1: f64,
        gamma2: f64,
        best_residual: f64,
    },
}

impl fmt::Display for RelayError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::InvalidParameter { name, value } => {
                write!(f, "invalid {name}: {value}")
            }
            Self::InvalidChannel { reason } => write!(f, "invalid channel: {reason}"),
            Self::WeightTooSkewed { a1, a2, budget } => write!(
                f,
                "weights ({a1}, {a2}) too skewed for sum-SNR budget {budget}: \
                 closed-form point leaves the nonnegative orthant"
            ),
            Self::Unachievable {
                gamma1,
                gamma2,
                best_residual,
            } => write!(
                f,
                "target SNRs ({gamma1}, {gamma2}) unachievable; best residual {best_residual:e}"
            ),
        }
    }
}

impl std::error::Error for RelayError {}

/// Reciprocal channel state: the two user-to-relay channel vectors, the
/// common AWGN variance, and the antenna count implied by vector length.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelState {
    h1: Vec<Complex64>,
    h2: Vec<Complex64>,
    h1_norm_sq: f64,
    h2_norm_sq: f64,
    sigma2: f64,
}

impl ChannelState {
    pub fn new(h1: Vec<Complex64>, h2: Vec<Complex64>, sigma2: f64) -> Result<Self, RelayError> {
        if h1.is_empty() {
            return Err(RelayError::InvalidChannel {
                reason: "empty channel vector",
            });
        }
        if h1.len() != h2.len() {
            return Err(RelayError::InvalidChannel {
                reason: "channel vectors have different lengths",
            });
        }
        if !(sigma2 > 0.0 && sigma2.is_finite()) {
            return Err(RelayError::InvalidParameter {
                name: "sigma2",
                value: sigma2,
            });
        }
        let h1_norm_sq: f64 = h1.iter().map(|z| z.norm_sqr()).sum();
        let h2_norm_sq: f64 = h2.iter().map(|z| z.norm_sqr()).sum();
        if !h1_norm_sq.is_finite() || !h2_norm_sq.is_finite() {
            return Err(RelayError::InvalidChannel {
                reason: "channel vector has non-finite entries",
            });
        }
        if h1_norm_sq <= 0.0 || h2_norm_sq <= 0.0 {
            return Err(RelayError::InvalidChannel {
                reason: "channel vector has zero norm",
            });
        }
        Ok(Self {
            h1,
            h2,
            h1_norm_sq,
            h2_norm_sq,
            sigma2,
        })
    }

    /// Deterministic channel with prescribed squared norms, spread uniformly
    /// over `nr` real-valued antenna coefficients. The closed forms depend
    /// on the channel only through `‖h₁‖²`, `‖h₂‖²`, so this is the natural
    /// way to pin a scenario like "gains 24 and 96".
    pub fn from_gains(
        h1_norm_sq: f64,
        h2_norm_sq: f64,
        sigma2: f64,
        nr: usize,
    ) -> Result<Self, RelayError> {
        if nr == 0 {
            return Err(RelayError::InvalidChannel {
                reason: "antenna count must be at least 1",
            });
        }
        if !(h1_norm_sq > 0.0 && h1_norm_sq.is_finite()) {
            return Err(RelayError::InvalidParameter {
                name: "h1_norm_sq",
                value: h1_norm_sq,
            });
        }
        if !(h2_norm_sq > 0.0 && h2_norm_sq.is_finite()) {
            return Err(RelayError::InvalidParameter {
                name: "h2_norm_sq",
                value: h2_norm_sq,
            });
        }
        let c1 = Complex64::new((h1_norm_sq / nr as f64).sqrt(), 0.0);
        let c2 = Complex64::new((h2_norm_sq / nr as f64).sqrt(), 0.0);
        Self::new(vec![c1; nr], vec![c2; nr], sigma2)
    }

    pub fn nr(&self) -> usize {
        self.h1.len()
    }

    pub fn h1(&self) -> &[Complex64] {
        &self.h1
    }

    pub fn h2(&self) -> &[Complex64] {
        &self.h2
    }

    pub fn h1_norm_sq(&self) -> f64 {
        self.h1_norm_sq
    }

    pub fn h2_norm_sq(&self) -> f64 {
        self.h2_norm_sq
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }
}

/// Transmit powers `(P₁, P₂, P_r)` on the simplex `P₁+P₂+P_r ≤ P_t`.
///
/// The equivalent unit-square view `P₁ = αβP_t`, `P₂ = (1−α)βP_t`,
/// `P_r = (1−β)P_t` is available through [`PowerAllocation::from_alpha_beta`]
/// and [`PowerAllocation::alpha_beta`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerAllocation {
    p1: f64,
    p2: f64,
    pr: f64,
    pt: f64,
}

impl PowerAllocation {
    pub fn new(p1: f64, p2: f64, pr: f64, pt: f64) -> Result<Self, RelayError> {
        if !(pt > 0.0 && pt.is_finite()) {
            return Err(RelayError::InvalidParameter {
                name: "pt",
                value: pt,
            });
        }
        for (name, value) in [("p1", p1), ("p2", p2), ("pr", pr)] {
            if !(value >= 0.0 && value.is_finite()) {
                return Err(RelayError::InvalidParameter { name, value });
            }
        }
        let total = p1 + p2 + pr;
        if total > pt * (1.0 + 1e-12) {
            return Err(RelayError::InvalidParameter {
                name: "p1+p2+pr",
                value: total,
            });
        }
        Ok(Self { p1, p2, pr, pt })
    }

    /// Build from the unit-square parametrization; the relay power is
    /// computed as the exact remainder so the three powers sum to `pt`.
    pub fn from_alpha_beta(alpha: f64, beta: f64, pt: f64) -> Result<Self, RelayError> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(RelayError::InvalidParameter {
                name: "alpha",
                value: alpha,
            });
        }
        if !(0.0..=1.0).contains(&beta) {
            return Err(RelayError::InvalidParameter {
                name: "beta",
                value: beta,
            });
        }
        if !(pt > 0.0 && pt.is_finite()) {
            return Err(RelayError::InvalidParameter {
                name: "pt",
                value: pt,
            });
        }
        let p1 = alpha * beta * pt;
        let p2 = (1.0 - alpha) * beta * pt;
        let pr = (pt - p1 - p2).max(0.0);
        Ok(Self { p1, p2, pr, pt })
    }

    pub fn p1(&self) -> f64 {
        self.p1
    }

    pub fn p2(&self) -> f64 {
        self.p2
    }

    pub fn pr(&self) -> f64 {
        self.pr
    }

    pub fn pt(&self) -> f64 {
        self.pt
    }

    /// Recover `(α, β)`. Exact when the powers sum to `pt`; `α` defaults to
    /// 0 when both user powers vanish.
    pub fn alpha_beta(&self) -> (f64, f64) {
        let user_power = self.p1 + self.p2;
        let beta = user_power / self.pt;
        let alpha = if user_power > 0.0 {
            self.p1 / user_power
        } else {
            0.0
        };
        (alpha, beta)
    }
}

/// Achievable end-user SNR pair (linear scale).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrPair {
    pub gamma1: f64,
    pub gamma2: f64,
}

impl SnrPair {
    pub fn new(gamma1: f64, gamma2: f64) -> Result<Self, RelayError> {
        for (name, value) in [("gamma1", gamma1), ("gamma2", gamma2)] {
            if !(value >= 0.0 && value.is_finite()) {
                return Err(RelayError::InvalidParameter { name, value });
            }
        }
        Ok(Self { gamma1, gamma2 })
    }

    pub fn min(&self) -> f64 {
        self.gamma1.min(self.gamma2)
    }

    pub fn sum(&self) -> f64 {
        self.gamma1 + self.gamma2
    }
}

/// Effective single-hop SNRs `γᵢᵣ = P_t‖hᵢ‖²/σ²` entering the budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveGains {
    pub gamma1r: f64,
    pub gamma2r: f64,
}

impl EffectiveGains {
    pub fn new(gamma1r: f64, gamma2r: f64) -> Result<Self, RelayError> {
        for (name, value) in [("gamma1r", gamma1r), ("gamma2r", gamma2r)] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(RelayError::InvalidParameter { name, value });
            }
        }
        Ok(Self { gamma1r, gamma2r })
    }
}

/// End-user SNRs for a power split, exactly as the closed form displays
/// them. Denominators are bounded below by `σ² > 0`, so this never divides
/// by zero.
pub fn snr_pair(p: &PowerAllocation, ch: &ChannelState) -> SnrPair {
    let n1 = ch.h1_norm_sq();
    let n2 = ch.h2_norm_sq();
    let s2 = ch.sigma2();
    let cross = n1 * n2;
    let gamma2 = (p.p1() * p.pr() / s2) * cross / ((p.p2() + p.pr()) * n2 + p.p1() * n1 + s2);
    let gamma1 = (p.p2() * p.pr() / s2) * cross / ((p.p1() + p.pr()) * n1 + p.p2() * n2 + s2);
    SnrPair { gamma1, gamma2 }
}

/// Effective single-hop gains for a total power budget.
pub fn effective_gains(ch: &ChannelState, pt: f64) -> Result<EffectiveGains, RelayError> {
    if !(pt > 0.0 && pt.is_finite()) {
        return Err(RelayError::InvalidParameter {
            name: "pt",
            value: pt,
        });
    }
    EffectiveGains::new(
        pt * ch.h1_norm_sq() / ch.sigma2(),
        pt * ch.h2_norm_sq() / ch.sigma2(),
    )
}

/// The sum-SNR budget `K = γ₁ᵣγ₂ᵣ / (√(γ₁ᵣ+1) + √(γ₂ᵣ+1))²`: every
/// achievable pair satisfies `γ₁+γ₂ ≤ K`, with equality attained.
pub fn snr_sum_budget(g: &EffectiveGains) -> f64 {
    let root_sum = (g.gamma1r + 1.0).sqrt() + (g.gamma2r + 1.0).sqrt();
    g.gamma1r * g.gamma2r / (root_sum * root_sum)
}

/// The balanced user split. Algebraically identical to
/// `(−γ₂ᵣ−1+√((γ₂ᵣ+1)(γ₁ᵣ+1))) / (γ₁ᵣ−γ₂ᵣ)` but free of the 0/0 at
/// `γ₁ᵣ = γ₂ᵣ` (symmetric channels give exactly 1/2).
pub fn common_rate_alpha(g: &EffectiveGains) -> f64 {
    let s1 = (g.gamma1r + 1.0).sqrt();
    let s2 = (g.gamma2r + 1.0).sqrt();
    s2 / (s1 + s2)
}

/// Optimal powers for the common-rate (max-min SNR) problem: half the budget
/// to the relay, the user half split by [`common_rate_alpha`]. The resulting
/// SNRs balance at `K/2` each.
pub fn common_rate_powers(ch: &ChannelState, pt: f64) -> Result<PowerAllocation, RelayError> {
    let gains = effective_gains(ch, pt)?;
    PowerAllocation::from_alpha_beta(common_rate_alpha(&gains), 0.5, pt)
}

/// Closed-form SNR pair maximizing the weighted sum-rate:
/// `γᵢ = (aᵢ−aⱼ)/(a₁+a₂) + aᵢ/(a₁+a₂)·K`.
///
/// Fails with [`RelayError::WeightTooSkewed`] when a component comes out
/// negative; clamping to zero would silently fabricate an optimality claim,
/// so the caller decides how to proceed.
pub fn weighted_optimal_snrs(
    a1: f64,
    a2: f64,
    g: &EffectiveGains,
) -> Result<SnrPair, RelayError> {
    for (name, value) in [("a1", a1), ("a2", a2)] {
        if !(value > 0.0 && value.is_finite()) {
            return Err(RelayError::InvalidParameter { name, value });
        }
    }
    let budget = snr_sum_budget(g);
    let weight_sum = a1 + a2;
    let gamma1 = (a1 - a2) / weight_sum + a1 / weight_sum * budget;
    let gamma2 = (a2 - a1) / weight_sum + a2 / weight_sum * budget;
    if gamma1 < 0.0 || gamma2 < 0.0 {
        return Err(RelayError::WeightTooSkewed { a1, a2, budget });
    }
    Ok(SnrPair { gamma1, gamma2 })
}

/// Weighted sum-rate `prelog·(a₁log₂(1+γ₁) + a₂log₂(1+γ₂))` in bits per
/// channel use, with the default pre-log factor.
pub fn weighted_sum_rate(s: &SnrPair, a1: f64, a2: f64) -> f64 {
    weighted_sum_rate_with_prelog(s, a1, a2, DEFAULT_PRELOG)
}

pub fn weighted_sum_rate_with_prelog(s: &SnrPair, a1: f64, a2: f64, prelog: f64) -> f64 {
    prelog * (a1 * (1.0 + s.gamma1).log2() + a2 * (1.0 + s.gamma2).log2())
}

/// Common rate `prelog·log₂(1 + min(γ₁, γ₂))` with the default pre-log.
pub fn common_rate(s: &SnrPair) -> f64 {
    common_rate_with_prelog(s, DEFAULT_PRELOG)
}

pub fn common_rate_with_prelog(s: &SnrPair, prelog: f64) -> f64 {
    prelog * (1.0 + s.min()).log2()
}

const NEWTON_MAX_ITERS: usize = 80;
const NEWTON_FD_STEP: f64 = 1e-6;
const FALLBACK_GRID: usize = 32; // 33x33 seeding grid

/// Invert the SNR map: find powers whose [`snr_pair`] matches `target`
/// within `tol` per component.
///
/// Solved by damped 2-D Newton iteration on `(α, β)` with a
/// finite-difference Jacobian, projected into the unit square, starting at
/// `(1/2, 1/2)`; a coarse 33×33 grid reseeds the iteration if it stalls.
/// The returned powers sum to `pt` by construction. Targets outside the
/// achievable region surface as [`RelayError::Unachievable`].
pub fn recover_powers(
    target: &SnrPair,
    ch: &ChannelState,
    pt: f64,
    tol: f64,
) -> Result<PowerAllocation, RelayError> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(RelayError::InvalidParameter {
            name: "tol",
            value: tol,
        });
    }
    if !(pt > 0.0 && pt.is_finite()) {
        return Err(RelayError::InvalidParameter {
            name: "pt",
            value: pt,
        });
    }
    for (name, value) in [("gamma1", target.gamma1), ("gamma2", target.gamma2)] {
        if !(value >= 0.0 && value.is_finite()) {
            return Err(RelayError::InvalidParameter { name, value });
        }
    }

    let residual = |alpha: f64, beta: f64| -> (f64, f64) {
        let p = PowerAllocation::from_alpha_beta(alpha, beta, pt)
            .expect("projected point stays in the unit square");
        let s = snr_pair(&p, ch);
        (s.gamma1 - target.gamma1, s.gamma2 - target.gamma2)
    };
    let inf_norm = |r: (f64, f64)| r.0.abs().max(r.1.abs());

    if let Some((alpha, beta)) = newton_from(0.5, 0.5, tol, &residual) {
        return PowerAllocation::from_alpha_beta(alpha, beta, pt);
    }

    // Grid reseed: best coarse point, then Newton again.
    let mut best = (0.5, 0.5, f64::INFINITY);
    for i in 0..=FALLBACK_GRID {
        let alpha = i as f64 / FALLBACK_GRID as f64;
        for j in 0..=FALLBACK_GRID {
            let beta = j as f64 / FALLBACK_GRID as f64;
            let r = inf_norm(residual(alpha, beta));
            if r < best.2 {
                best = (alpha, beta, r);
            }
        }
    }
    if let Some((alpha, beta)) = newton_from(best.0, best.1, tol, &residual) {
        return PowerAllocation::from_alpha_beta(alpha, beta, pt);
    }

    Err(RelayError::Unachievable {
        gamma1: target.gamma1,
        gamma2: target.gamma2,
        best_residual: best.2,
    })
}

/// Damped Newton iteration on the unit square, run to numerical exhaustion
/// (until no damped step improves the residual). Returns the final point
/// when its residual infinity-norm is within `tol`, `None` otherwise.
///
/// `tol` is the acceptance criterion, not the stopping rule: a loose
/// tolerance still gets the fully converged root, it just also accepts
/// boundary-grazing targets that stall slightly short of it.
fn newton_from<F>(mut alpha: f64, mut beta: f64, tol: f64, residual: &F) -> Option<(f64, f64)>
where
    F: Fn(f64, f64) -> (f64, f64),
{
    let clamp = |v: f64| v.clamp(0.0, 1.0);
    let norm_sq = |r: (f64, f64)| r.0 * r.0 + r.1 * r.1;

    let mut r = residual(alpha, beta);
    for _ in 0..NEWTON_MAX_ITERS {
        if r.0 == 0.0 && r.1 == 0.0 {
            break;
        }

        // Central differences, one-sided at the box edges.
        let h = NEWTON_FD_STEP;
        let (a_lo, a_hi) = (clamp(alpha - h), clamp(alpha + h));
        let (b_lo, b_hi) = (clamp(beta - h), clamp(beta + h));
        let ra_hi = residual(a_hi, beta);
        let ra_lo = residual(a_lo, beta);
        let rb_hi = residual(alpha, b_hi);
        let rb_lo = residual(alpha, b_lo);
        let j11 = (ra_hi.0 - ra_lo.0) / (a_hi - a_lo);
        let j21 = (ra_hi.1 - ra_lo.1) / (a_hi - a_lo);
        let j12 = (rb_hi.0 - rb_lo.0) / (b_hi - b_lo);
        let j22 = (rb_hi.1 - rb_lo.1) / (b_hi - b_lo);

        let det = j11 * j22 - j12 * j21;
        if !det.is_finite() || det.abs() < 1e-300 {
            break;
        }
        let da = (-r.0 * j22 + r.1 * j12) / det;
        let db = (-r.1 * j11 + r.0 * j21) / det;

        // Backtrack until the squared residual improves.
        let mut lambda = 1.0;
        let current = norm_sq(r);
        let mut advanced = false;
        for _ in 0..24 {
            let cand = (clamp(alpha + lambda * da), clamp(beta + lambda * db));
            let rc = residual(cand.0, cand.1);
            if norm_sq(rc) < current {
                alpha = cand.0;
                beta = cand.1;
                r = rc;
                advanced = true;
                break;
            }
            lambda *= 0.5;
        }
        if !advanced {
            break;
        }
    }
    if r.0.abs() <= tol && r.1.abs() <= tol {
        Some((alpha, beta))
    } else {
        None
    }
}

/// The achievable SNR region in `(γ₁, γ₂)` coordinates: membership is
/// "[`recover_powers`] succeeds within `tol`", the declared bound is the
/// unit-cost simplex with budget `K`.
pub fn relay_feasible_region(
    ch: &ChannelState,
    pt: f64,
    tol: f64,
) -> Result<FeasibleRegion, RelayError> {
    let gains = effective_gains(ch, pt)?;
    let bound = SimplexBound::unit(2, snr_sum_budget(&gains))
        .map_err(|_| RelayError::InvalidParameter {
            name: "budget",
            value: snr_sum_budget(&gains),
        })?;
    let channel = ch.clone();
    Ok(FeasibleRegion::new(bound, move |x| {
        if x.len() != 2 || x[0] < 0.0 || x[1] < 0.0 {
            return false;
        }
        let target = SnrPair {
            gamma1: x[0],
            gamma2: x[1],
        };
        recover_powers(&target, &channel, pt, tol).is_ok()
    }))
}

/// The shifted region for the weighted sum-rate problem: points
/// `X = (1+γ₁, 1+γ₂)` with budget `2 + K`, so the weighted-product framework
/// applies directly.
pub fn relay_shifted_region(
    ch: &ChannelState,
    pt: f64,
    tol: f64,
) -> Result<FeasibleRegion, RelayError> {
    let gains = effective_gains(ch, pt)?;
    let budget = 2.0 + snr_sum_budget(&gains);
    let bound = SimplexBound::unit(2, budget).map_err(|_| RelayError::InvalidParameter {
        name: "budget",
        value: budget,
    })?;
    let channel = ch.clone();
    Ok(FeasibleRegion::new(bound, move |x| {
        if x.len() != 2 || x[0] < 1.0 || x[1] < 1.0 {
            return false;
        }
        let target = SnrPair {
            gamma1: x[0] - 1.0,
            gamma2: x[1] - 1.0,
        };
        recover_powers(&target, &channel, pt, tol).is_ok()
    }))
}
