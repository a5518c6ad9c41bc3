//! Seeded Rayleigh fading draws.
//!
//! PRNG contract: all randomness flows from `ChaCha8Rng::seed_from_u64`.
//! Complex Gaussians use the Box–Muller transform over two consecutive
//! uniforms: `u1 ∈ (0,1]`, `u2 ∈ [0,1)`, `r = sqrt(-2 ln u1)`,
//! `θ = 2π·u2`, entry `= (r cos θ + i·r sin θ)·sqrt(var/2)`. A channel draw
//! consumes one Box–Muller pair per `h1` entry, then one per `h2` entry, in
//! antenna order. Reproducibility is within this implementation; no
//! cross-language bit-exactness is promised.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use num_complex::Complex64;

use super::OracleError;
use crate::relay::ChannelState;

/// Per-antenna fading variances for the two links plus the common AWGN
/// variance. Entries of `h1` are i.i.d. circularly-symmetric complex
/// Gaussian with variance `var1` (real and imaginary parts each `var1/2`),
/// likewise `h2` with `var2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FadingModel {
    pub nr: usize,
    pub var1: f64,
    pub var2: f64,
    pub noise_var: f64,
}

impl FadingModel {
    pub fn new(nr: usize, var1: f64, var2: f64, noise_var: f64) -> Result<Self, OracleError> {
        if nr == 0 {
            return Err(OracleError::InvalidModel {
                name: "nr",
                value: 0.0,
            });
        }
        for (name, value) in [("var1", var1), ("var2", var2), ("noise_var", noise_var)] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(OracleError::InvalidModel { name, value });
            }
        }
        Ok(Self {
            nr,
            var1,
            var2,
            noise_var,
        })
    }
}

/// One standard complex Gaussian (unit variance) via Box–Muller.
pub(crate) fn standard_complex_gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    // 1 - gen() maps [0,1) onto (0,1], keeping ln() finite.
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    let radius = (-2.0 * u1.ln()).sqrt();
    let angle = 2.0 * std::f64::consts::PI * u2;
    // Scale by 1/sqrt(2) so |z|^2 has unit mean.
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    Complex64::new(radius * angle.cos() * scale, radius * angle.sin() * scale)
}

/// Draw a reciprocal channel pair, fully determined by the seed.
pub fn draw_channel(model: &FadingModel, seed: u64) -> ChannelState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s1 = model.var1.sqrt();
    let s2 = model.var2.sqrt();
    let h1: Vec<Complex64> = (0..model.nr)
        .map(|_| standard_complex_gaussian(&mut rng) * s1)
        .collect();
    let h2: Vec<Complex64> = (0..model.nr)
        .map(|_| standard_complex_gaussian(&mut rng) * s2)
        .collect();
    ChannelState::new(h1, h2, model.noise_var)
        .expect("Gaussian draws are finite and almost surely nonzero")
}

/// Deterministic per-trial seed: SplitMix64 finalizer over the master seed
/// mixed with distinct odd multipliers per index. Trials can run in any
/// order or in parallel and still see the same streams.
pub fn trial_seed(master_seed: u64, budget_index: u64, trial_index: u64) -> u64 {
    let mut z = master_seed
        ^ budget_index.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ trial_index.wrapping_mul(0xD1B5_4A32_D192_ED03);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_validation() {
        assert!(FadingModel::new(0, 0.25, 1.0, 1.0).is_err());
        assert!(FadingModel::new(4, 0.0, 1.0, 1.0).is_err());
        assert!(FadingModel::new(4, 0.25, -1.0, 1.0).is_err());
        assert!(FadingModel::new(4, 0.25, 1.0, f64::NAN).is_err());
        assert!(FadingModel::new(4, 0.25, 1.0, 1.0).is_ok());
    }

    #[test]
    fn same_seed_same_channel() {
        let model = FadingModel::new(16, 0.25, 1.0, 1.0).unwrap();
        let a = draw_channel(&model, 1234);
        let b = draw_channel(&model, 1234);
        assert_eq!(a, b);
        let c = draw_channel(&model, 1235);
        assert_ne!(a, c);
    }

    #[test]
    fn norm_moment_matches_model() {
        // E[|h1|^2] = nr * var1; the sample mean over many draws must land
        // within three standard errors.
        let model = FadingModel::new(100, 0.25, 1.0, 1.0).unwrap();
        let draws = 10_000;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for i in 0..draws {
            let ch = draw_channel(&model, i);
            sum += ch.h1_norm_sq();
            sum_sq += ch.h1_norm_sq() * ch.h1_norm_sq();
        }
        let n = draws as f64;
        let mean = sum / n;
        let var = (sum_sq / n - mean * mean).max(0.0);
        let std_err = (var / n).sqrt();
        let expected = 100.0 * 0.25;
        assert!(
            (mean - expected).abs() <= 3.0 * std_err,
            "mean {mean} vs expected {expected} (se {std_err})"
        );
    }

    #[test]
    fn trial_seed_mixes_indices() {
        let base = trial_seed(42, 0, 0);
        assert_ne!(base, trial_seed(42, 0, 1));
        assert_ne!(base, trial_seed(42, 1, 0));
        assert_ne!(base, trial_seed(43, 0, 0));
        assert_eq!(trial_seed(42, 3, 7), trial_seed(42, 3, 7));
    }
}
