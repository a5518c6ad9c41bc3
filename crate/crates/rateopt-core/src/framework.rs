//! Closed-form optimizers for weighted-product and max-min objectives over
//! feasible regions bounded by a weighted simplex.
//!
//! The setting: a feasible region `Θ ⊂ ℝ₊ⁿ` (an arbitrary membership
//! predicate, not necessarily convex) is known to sit inside the weighted
//! simplex `Ω_B(K) = {X ≥ 0 : Σ bᵢXᵢ ≤ K}`. Two problems admit closed-form
//! solutions under that inclusion:
//!
//! * `max Π Xᵢ^{aᵢ}` is solved by the candidate point
//!   `ϑᵢ = aᵢK / (bᵢ Σⱼ aⱼ)` whenever `ϑ ∈ Θ` ([`solve_weighted_product`]).
//!   At `ϑ` the weighted AM–GM inequality is tight: all `bᵢϑᵢ/aᵢ` are equal
//!   and `Σ bᵢϑᵢ = K`.
//! * `max minᵢ Xᵢ` is solved by the balanced point `Yᵢ = K / Σ bᵢ` whenever
//!   `Y ∈ Θ` ([`solve_max_min`]).
//!
//! When the candidate point falls outside the region the solver returns it
//! with `feasible = false` and makes no optimality claim; falling back to a
//! generic solver is out of scope. Because `Θ` is a black-box predicate, the
//! inclusion `Θ ⊂ Ω_B(K)` cannot be proven here; [`certify_region_bound`]
//! spot-checks it by sampling.
//!
//! Weighted products overflow quickly, so all objective comparisons are done
//! on `Σ aᵢ ln Xᵢ` ([`log_weighted_geometric_objective`]); the exponentiated
//! value is derived from that.

use std::fmt;
use std::sync::Arc;

/// Relative slack used by [`certify_region_bound`]: a sampled in-region point
/// only flags a violation when `Σ bᵢxᵢ > K·(1 + BOUND_CERT_REL_TOL)`.
/// Membership itself stays exact; the slack only absorbs floating-point
/// rounding in the budget sum.
pub const BOUND_CERT_REL_TOL: f64 = 1e-9;

/// Errors from framework-level constructors and operations.
#[derive(Debug, Clone, PartialEq)]
pub enum FrameworkError {
    /// A weight or cost vector was constructed with no entries.
    EmptyVector,
    /// A weight or cost entry was zero, negative, or non-finite.
    NonPositiveEntry { index: usize, value: f64 },
    /// The simplex budget `K` was zero, negative, or non-finite.
    NonPositiveBudget { value: f64 },
    /// A point's dimension does not match the bound or weight dimension.
    DimensionMismatch { expected: usize, got: usize },
    /// The weighted geometric objective was evaluated at a point with a
    /// zero or negative coordinate.
    NonPositiveCoordinate { index: usize, value: f64 },
}

impl fmt::Display for FrameworkError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::EmptyVector => write!(f, "vector must have at least one entry"),
            Self::NonPositiveEntry { index, value } => {
                write!(f, "entry {index} must be positive and finite, got {value}")
            }
            Self::NonPositiveBudget { value } => {
                write!(f, "budget K must be positive and finite, got {value}")
            }
            Self::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            Self::NonPositiveCoordinate { index, value } => {
                write!(f, "coordinate {index} must be positive, got {value}")
            }
        }
    }
}

impl std::error::Error for FrameworkError {}

fn validate_positive(values: &[f64]) -> Result<(), FrameworkError> {
    if values.is_empty() {
        return Err(FrameworkError::EmptyVector);
    }
    for (index, &value) in values.iter().enumerate() {
        if !(value > 0.0 && value.is_finite()) {
            return Err(FrameworkError::NonPositiveEntry { index, value });
        }
    }
    Ok(())
}

/// Positive exponent weights `a₁..aₙ` of the weighted-product objective.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    a: Vec<f64>,
}

impl WeightVector {
    pub fn new(a: Vec<f64>) -> Result<Self, FrameworkError> {
        validate_positive(&a)?;
        Ok(Self { a })
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    /// Always false: construction requires at least one entry.
    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.a
    }

    pub fn sum(&self) -> f64 {
        self.a.iter().sum()
    }
}

/// Positive budget coefficients `b₁..bₙ` (budget consumed per unit of `Xᵢ`).
#[derive(Debug, Clone, PartialEq)]
pub struct CostVector {
    b: Vec<f64>,
}

impl CostVector {
    pub fn new(b: Vec<f64>) -> Result<Self, FrameworkError> {
        validate_positive(&b)?;
        Ok(Self { b })
    }

    pub fn len(&self) -> usize {
        self.b.len()
    }

    pub fn is_empty(&self) -> bool {
        self.b.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.b
    }

    pub fn sum(&self) -> f64 {
        self.b.iter().sum()
    }
}

/// The weighted simplex `Ω_B(K) = {X ≥ 0 : Σ bᵢXᵢ ≤ K}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexBound {
    costs: CostVector,
    budget: f64,
}

impl SimplexBound {
    pub fn new(costs: CostVector, budget: f64) -> Result<Self, FrameworkError> {
        if !(budget > 0.0 && budget.is_finite()) {
            return Err(FrameworkError::NonPositiveBudget { value: budget });
        }
        Ok(Self { costs, budget })
    }

    /// Unit costs `b = (1,…,1)` with budget `k`, the common two-user case.
    pub fn unit(dim: usize, budget: f64) -> Result<Self, FrameworkError> {
        Self::new(CostVector::new(vec![1.0; dim])?, budget)
    }

    pub fn costs(&self) -> &CostVector {
        &self.costs
    }

    pub fn budget(&self) -> f64 {
        self.budget
    }

    pub fn dim(&self) -> usize {
        self.costs.len()
    }
}

/// Black-box membership predicate, shareable across threads.
pub type MembershipFn = dyn Fn(&[f64]) -> bool + Send + Sync;

/// A feasible region: a black-box membership predicate on `ℝ₊ⁿ` together
/// with a [`SimplexBound`] claimed to contain it.
///
/// The predicate is exact per its own definition; whether the declared bound
/// really contains the region is checked by sampling, see
/// [`certify_region_bound`].
#[derive(Clone)]
pub struct FeasibleRegion {
    bound: SimplexBound,
    contains: Arc<MembershipFn>,
}

impl FeasibleRegion {
    pub fn new<F>(bound: SimplexBound, contains: F) -> Self
    where
        F: Fn(&[f64]) -> bool + Send + Sync + 'static,
    {
        Self {
            bound,
            contains: Arc::new(contains),
        }
    }

    /// The region that is the bounding simplex itself (`Θ = Ω_B(K)`).
    pub fn simplex(bound: SimplexBound) -> Self {
        let inner = bound.clone();
        Self::new(bound, move |x| {
            omega_contains(x, &inner).unwrap_or(false)
        })
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        (self.contains)(x)
    }

    pub fn bound(&self) -> &SimplexBound {
        &self.bound
    }
}

impl fmt::Debug for FeasibleRegion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FeasibleRegion")
            .field("bound", &self.bound)
            .field("contains", &"<predicate>")
            .finish()
    }
}

/// Result envelope for the closed-form solvers.
///
/// `objective` is recomputable from `point`; `feasible` records whether the
/// candidate point passed the region's membership oracle. Only when
/// `feasible` is true does the theory guarantee global optimality.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameworkSolution {
    pub point: Vec<f64>,
    pub objective: f64,
    pub feasible: bool,
}

/// Exact membership in `Ω_B(K)`: all coordinates nonnegative and
/// `Σ bᵢxᵢ ≤ K`, no tolerance.
pub fn omega_contains(x: &[f64], bound: &SimplexBound) -> Result<bool, FrameworkError> {
    if x.len() != bound.dim() {
        return Err(FrameworkError::DimensionMismatch {
            expected: bound.dim(),
            got: x.len(),
        });
    }
    if x.iter().any(|&v| v < 0.0) {
        return Ok(false);
    }
    let weighted_sum: f64 = x
        .iter()
        .zip(bound.costs().as_slice())
        .map(|(&xi, &bi)| bi * xi)
        .sum();
    Ok(weighted_sum <= bound.budget())
}

/// The candidate optimizer of the weighted product over `Ω_B(K)`:
/// `ϑᵢ = aᵢK / (bᵢ Σⱼ aⱼ)`. By construction `Σ bᵢϑᵢ = K`, so `ϑ` always
/// lies on the simplex boundary.
pub fn theta_point(a: &WeightVector, bound: &SimplexBound) -> Result<Vec<f64>, FrameworkError> {
    if a.len() != bound.dim() {
        return Err(FrameworkError::DimensionMismatch {
            expected: bound.dim(),
            got: a.len(),
        });
    }
    let weight_sum = a.sum();
    let k = bound.budget();
    Ok(a.as_slice()
        .iter()
        .zip(bound.costs().as_slice())
        .map(|(&ai, &bi)| ai * k / (bi * weight_sum))
        .collect())
}

/// `Σ aᵢ ln xᵢ`, the log of the weighted geometric objective. All ordering
/// comparisons between candidate points should happen in this domain.
pub fn log_weighted_geometric_objective(
    x: &[f64],
    a: &WeightVector,
) -> Result<f64, FrameworkError> {
    if x.len() != a.len() {
        return Err(FrameworkError::DimensionMismatch {
            expected: a.len(),
            got: x.len(),
        });
    }
    for (index, &value) in x.iter().enumerate() {
        if value <= 0.0 || value.is_nan() {
            return Err(FrameworkError::NonPositiveCoordinate { index, value });
        }
    }
    Ok(x.iter()
        .zip(a.as_slice())
        .map(|(&xi, &ai)| ai * xi.ln())
        .sum())
}

/// `Π xᵢ^{aᵢ}`, computed as `exp(Σ aᵢ ln xᵢ)`.
pub fn weighted_geometric_objective(x: &[f64], a: &WeightVector) -> Result<f64, FrameworkError> {
    log_weighted_geometric_objective(x, a).map(f64::exp)
}

/// Closed-form maximizer of `Π Xᵢ^{aᵢ}` over the region.
///
/// Returns the ϑ-point with its objective and the membership verdict. When
/// `feasible` is true the point is the global maximizer over the region;
/// when false it is returned as-is with no optimality claim.
pub fn solve_weighted_product(
    region: &FeasibleRegion,
    a: &WeightVector,
) -> Result<FrameworkSolution, FrameworkError> {
    let point = theta_point(a, region.bound())?;
    let objective = weighted_geometric_objective(&point, a)?;
    let feasible = region.contains(&point);
    Ok(FrameworkSolution {
        point,
        objective,
        feasible,
    })
}

/// Closed-form maximizer of `minᵢ Xᵢ` over the region: the balanced point
/// with every coordinate `K / Σ bᵢ`, optimal exactly when it lies in the
/// region.
pub fn solve_max_min(region: &FeasibleRegion) -> FrameworkSolution {
    let bound = region.bound();
    let level = bound.budget() / bound.costs().sum();
    let point = vec![level; bound.dim()];
    let feasible = region.contains(&point);
    FrameworkSolution {
        point,
        objective: level,
        feasible,
    }
}

/// Sampled certification of the hypothesis `Θ ⊂ Ω_B(K)`.
///
/// Draws `trials` points from the sampler; any point the region claims as a
/// member must satisfy the simplex budget within [`BOUND_CERT_REL_TOL`]
/// relative slack. Points the region rejects are skipped. Zero trials
/// certify vacuously.
pub fn certify_region_bound<S>(region: &FeasibleRegion, mut sampler: S, trials: usize) -> bool
where
    S: FnMut() -> Vec<f64>,
{
    let bound = region.bound();
    let slack = bound.budget() * (1.0 + BOUND_CERT_REL_TOL);
    for _ in 0..trials {
        let x = sampler();
        if !region.contains(&x) {
            continue;
        }
        let weighted_sum: f64 = x
            .iter()
            .zip(bound.costs().as_slice())
            .map(|(&xi, &bi)| bi * xi)
            .sum();
        if weighted_sum > slack {
            return false;
        }
    }
    true
}
