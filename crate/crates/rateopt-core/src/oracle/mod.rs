//! Independent verification machinery: brute-force grid search over the
//! power square, the uniform-allocation baseline, seeded Rayleigh channel
//! draws, signal-level SNR estimation, finite-difference stationarity
//! checks, and deterministic Monte Carlo rate sweeps.
//!
//! Everything here is a pure function of its inputs and a 64-bit seed.
//! Parallel paths (grid rows, sweep trials) share no mutable state and
//! aggregate in a fixed order, so results are identical regardless of the
//! rayon thread count.

mod fading;
mod grid;
mod signal;
mod sweep;

pub use fading::{draw_channel, trial_seed, FadingModel};
pub use grid::{
    grid_search, grid_values, stationarity_check, sum_budget_via_grid, upa_allocation,
    GridObjective, GridSearchResult, StationarityResidual, DEFAULT_FD_STEP, DEFAULT_GRID_STEP,
};
pub use signal::{signal_snr_estimate, SIGNAL_ESTIMATE_CALIBRATION};
pub use sweep::{monte_carlo_sweep, policy_rate, Policy, PolicyCurve, RateObjective, SweepConfig, SweepResult};

use std::fmt;

/// Errors from oracle configuration.
#[derive(Debug, Clone, PartialEq)]
pub enum OracleError {
    /// A fading-model parameter violated its domain.
    InvalidModel { name: &'static str, value: f64 },
    /// The sweep was asked to run over an empty budget grid.
    EmptyBudgetGrid,
    /// The sweep needs at least one trial per budget.
    ZeroTrials,
    /// The sweep needs at least one policy.
    NoPolicies,
    /// A grid step outside (0, 1].
    InvalidStep { value: f64 },
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::InvalidModel { name, value } => write!(f, "invalid fading model {name}: {value}"),
            Self::EmptyBudgetGrid => write!(f, "budget grid is empty"),
            Self::ZeroTrials => write!(f, "at least one trial per budget is required"),
            Self::NoPolicies => write!(f, "at least one policy is required"),
            Self::InvalidStep { value } => write!(f, "grid step must be in (0, 1], got {value}"),
        }
    }
}

impl std::error::Error for OracleError {}
