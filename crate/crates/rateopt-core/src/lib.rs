//! Closed-form weighted sum-rate and common-rate (max-min SNR) optimization
//! over feasible regions bounded by a weighted simplex, applied to a two-way
//! multi-antenna relay network, with independent brute-force and Monte Carlo
//! verification.
//!
//! The crate is split along those three lines:
//!
//! * [`framework`]: the abstract optimizers, namely the weighted simplex
//!   `Ω_B(K)`, the ϑ-point maximizing weighted products, the balanced point
//!   maximizing the minimum coordinate, and sampled certification that a
//!   black-box region really sits inside its declared simplex.
//! * [`relay`]: the two-way relay application, with closed-form end-user SNRs,
//!   the sum-SNR budget that turns power allocation into a simplex problem,
//!   optimal power splits for both objectives, and numeric power recovery
//!   from target SNRs.
//! * [`oracle`]: everything that double-checks the closed forms without
//!   using them: exhaustive `(α, β)` grid search, the uniform-allocation
//!   baseline, seeded Rayleigh channel draws, signal-level SNR estimation,
//!   finite-difference stationarity checks, and deterministic Monte Carlo
//!   sweeps.

pub mod framework;
pub mod oracle;
pub mod relay;

pub use framework::{
    certify_region_bound, omega_contains, solve_max_min, solve_weighted_product, theta_point,
    weighted_geometric_objective, CostVector, FeasibleRegion, FrameworkError, FrameworkSolution,
    SimplexBound, WeightVector,
};
pub use relay::{
    common_rate, common_rate_powers, effective_gains, recover_powers, relay_feasible_region,
    relay_shifted_region, snr_pair, snr_sum_budget, weighted_optimal_snrs, weighted_sum_rate,
    ChannelState, EffectiveGains, PowerAllocation, RelayError, SnrPair,
};
