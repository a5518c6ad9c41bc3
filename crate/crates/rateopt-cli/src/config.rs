//! Scenario configuration: JSON file schema, flag overlay, validation.
//!
//! A scenario names the objective mode, a channel (either explicit effective
//! gains or a fading model), and the numeric knobs. Command-line flags
//! override file fields; defaults fill the rest. `pt_db` converts as
//! `pt = 10^(pt_db/10)`, so 0 dB is 1 W.

use serde::{Deserialize, Serialize};

use rateopt_core::oracle::Policy;

pub const DEFAULT_STEP: f64 = 0.001;
pub const DEFAULT_TRIALS: usize = 1000;
pub const DEFAULT_PT_DB_GRID: [f64; 7] = [0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0];
/// Antenna count used to materialize an explicit-gain channel.
pub const DEFAULT_NR: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn err(message: impl Into<String>) -> ConfigError {
    ConfigError(message.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    #[serde(rename = "common-rate")]
    CommonRate,
    #[serde(rename = "weighted-sum")]
    WeightedSum,
    #[serde(rename = "framework")]
    Framework,
}

impl Mode {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        match text {
            "common-rate" => Ok(Self::CommonRate),
            "weighted-sum" => Ok(Self::WeightedSum),
            "framework" => Ok(Self::Framework),
            other => Err(err(format!(
                "mode: expected common-rate | weighted-sum | framework, got {other:?}"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::CommonRate => "common-rate",
            Self::WeightedSum => "weighted-sum",
            Self::Framework => "framework",
        }
    }
}

/// Channel description, exactly one form per scenario.
#[derive(Debug, Clone, PartialEq)]
pub enum ChannelSpec {
    /// Effective gains pinned directly; `nr` only sizes the materialized
    /// vectors.
    Explicit { gamma1r: f64, gamma2r: f64, nr: usize },
    /// Per-antenna Rayleigh variances; channels are drawn from the seed.
    Fading { nr: usize, var1: f64, var2: f64 },
}

/// Raw scenario file shape: everything optional except `mode`, unknown
/// fields rejected.
#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub mode: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma1r: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma2r: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nr: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub var1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub var2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pt: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pt_db: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prelog: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pt_db_grid: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub policies: Option<Vec<String>>,
}

/// Flag values that overlay the file; `None` leaves the file field alone.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub mode: Option<String>,
    pub a1: Option<f64>,
    pub a2: Option<f64>,
    pub gamma1r: Option<f64>,
    pub gamma2r: Option<f64>,
    pub nr: Option<usize>,
    pub var1: Option<f64>,
    pub var2: Option<f64>,
    pub sigma2: Option<f64>,
    pub pt_db: Option<f64>,
    pub step: Option<f64>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub prelog: Option<f64>,
}

/// Fully resolved, validated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub mode: Mode,
    pub a1: f64,
    pub a2: f64,
    pub channel: ChannelSpec,
    pub sigma2: f64,
    /// Total power, linear watts.
    pub pt: f64,
    pub step: f64,
    pub trials: usize,
    pub seed: u64,
    pub prelog: f64,
    pub pt_db_grid: Vec<f64>,
    pub policies: Vec<Policy>,
}

fn parse_policy(name: &str) -> Result<Policy, ConfigError> {
    match name.to_ascii_lowercase().as_str() {
        "closed-form" => Ok(Policy::ClosedForm),
        "grid-search" => Ok(Policy::GridSearch),
        "upa" => Ok(Policy::Upa),
        other => Err(err(format!(
            "policies: expected closed-form | grid-search | upa, got {other:?}"
        ))),
    }
}

fn require_positive(name: &str, value: f64) -> Result<f64, ConfigError> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(err(format!("{name}: must be positive and finite, got {value}")))
    }
}

impl ScenarioConfig {
    /// Overlay flags onto the (possibly empty) file, then validate.
    pub fn resolve(file: ScenarioFile, flags: &Overrides) -> Result<Self, ConfigError> {
        let mut merged = file;
        if flags.mode.is_some() {
            merged.mode = flags.mode.clone();
        }
        if flags.a1.is_some() {
            merged.a1 = flags.a1;
        }
        if flags.a2.is_some() {
            merged.a2 = flags.a2;
        }
        if flags.gamma1r.is_some() {
            merged.gamma1r = flags.gamma1r;
        }
        if flags.gamma2r.is_some() {
            merged.gamma2r = flags.gamma2r;
        }
        if flags.nr.is_some() {
            merged.nr = flags.nr;
        }
        if flags.var1.is_some() {
            merged.var1 = flags.var1;
        }
        if flags.var2.is_some() {
            merged.var2 = flags.var2;
        }
        if flags.sigma2.is_some() {
            merged.sigma2 = flags.sigma2;
        }
        if flags.pt_db.is_some() {
            merged.pt_db = flags.pt_db;
            merged.pt = None;
        }
        if flags.step.is_some() {
            merged.step = flags.step;
        }
        if flags.trials.is_some() {
            merged.trials = flags.trials;
        }
        if flags.seed.is_some() {
            merged.seed = flags.seed;
        }
        if flags.prelog.is_some() {
            merged.prelog = flags.prelog;
        }

        let mode = Mode::parse(
            merged
                .mode
                .as_deref()
                .ok_or_else(|| err("mode: required (common-rate | weighted-sum | framework)"))?,
        )?;

        let a1 = require_positive("a1", merged.a1.unwrap_or(1.0))?;
        let a2 = require_positive("a2", merged.a2.unwrap_or(1.0))?;
        let sigma2 = require_positive("sigma2", merged.sigma2.unwrap_or(1.0))?;

        let pt = match (merged.pt, merged.pt_db) {
            (Some(_), Some(_)) => {
                return Err(err("pt, pt_db: give one or the other, not both"));
            }
            (Some(pt), None) => require_positive("pt", pt)?,
            (None, Some(db)) => 10f64.powf(db / 10.0),
            (None, None) => 1.0,
        };

        let explicit = merged.gamma1r.is_some() || merged.gamma2r.is_some();
        let fading = merged.var1.is_some() || merged.var2.is_some();
        let channel = match (explicit, fading) {
            (true, true) => {
                return Err(err(
                    "channel: gamma1r/gamma2r and var1/var2 are mutually exclusive",
                ));
            }
            (true, false) => {
                let gamma1r = require_positive(
                    "gamma1r",
                    merged.gamma1r.ok_or_else(|| err("gamma1r: required with gamma2r"))?,
                )?;
                let gamma2r = require_positive(
                    "gamma2r",
                    merged.gamma2r.ok_or_else(|| err("gamma2r: required with gamma1r"))?,
                )?;
                ChannelSpec::Explicit {
                    gamma1r,
                    gamma2r,
                    nr: merged.nr.unwrap_or(DEFAULT_NR),
                }
            }
            (false, true) => ChannelSpec::Fading {
                nr: merged.nr.ok_or_else(|| err("nr: required with var1/var2"))?,
                var1: require_positive(
                    "var1",
                    merged.var1.ok_or_else(|| err("var1: required with var2"))?,
                )?,
                var2: require_positive(
                    "var2",
                    merged.var2.ok_or_else(|| err("var2: required with var1"))?,
                )?,
            },
            (false, false) => {
                return Err(err(
                    "channel: give either gamma1r+gamma2r or nr+var1+var2",
                ));
            }
        };
        let (ChannelSpec::Explicit { nr, .. } | ChannelSpec::Fading { nr, .. }) = &channel;
        if *nr == 0 {
            return Err(err("nr: must be at least 1"));
        }

        let step = merged.step.unwrap_or(DEFAULT_STEP);
        if !(step > 0.0 && step <= 1.0) {
            return Err(err(format!("step: must be in (0, 1], got {step}")));
        }
        let trials = merged.trials.unwrap_or(DEFAULT_TRIALS);
        if trials == 0 {
            return Err(err("trials: must be at least 1"));
        }
        let prelog = require_positive("prelog", merged.prelog.unwrap_or(0.5))?;

        let pt_db_grid = merged
            .pt_db_grid
            .unwrap_or_else(|| DEFAULT_PT_DB_GRID.to_vec());
        if pt_db_grid.is_empty() {
            return Err(err("pt_db_grid: must not be empty"));
        }

        let policies = match merged.policies {
            Some(names) => {
                let parsed: Result<Vec<_>, _> = names.iter().map(|n| parse_policy(n)).collect();
                let parsed = parsed?;
                if parsed.is_empty() {
                    return Err(err("policies: must not be empty"));
                }
                parsed
            }
            None => vec![Policy::ClosedForm, Policy::GridSearch, Policy::Upa],
        };

        Ok(Self {
            mode,
            a1,
            a2,
            channel,
            sigma2,
            pt,
            step,
            trials,
            seed: merged.seed.unwrap_or(0),
            prelog,
            pt_db_grid,
            policies,
        })
    }

    /// Canonical file form of a resolved scenario; `resolve` of this is the
    /// identity.
    pub fn to_file(&self) -> ScenarioFile {
        let (gamma1r, gamma2r, nr, var1, var2) = match self.channel {
            ChannelSpec::Explicit {
                gamma1r,
                gamma2r,
                nr,
            } => (Some(gamma1r), Some(gamma2r), Some(nr), None, None),
            ChannelSpec::Fading { nr, var1, var2 } => {
                (None, None, Some(nr), Some(var1), Some(var2))
            }
        };
        ScenarioFile {
            mode: Some(self.mode.name().to_string()),
            a1: Some(self.a1),
            a2: Some(self.a2),
            gamma1r,
            gamma2r,
            nr,
            var1,
            var2,
            sigma2: Some(self.sigma2),
            pt: Some(self.pt),
            pt_db: None,
            step: Some(self.step),
            trials: Some(self.trials),
            seed: Some(self.seed),
            prelog: Some(self.prelog),
            pt_db_grid: Some(self.pt_db_grid.clone()),
            policies: Some(self.policies.iter().map(|p| p.name().to_string()).collect()),
        }
    }
}

pub fn parse_scenario_file(text: &str) -> Result<ScenarioFile, ConfigError> {
    serde_json::from_str(text).map_err(|e| err(format!("scenario file: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flags() -> Overrides {
        Overrides::default()
    }

    #[test]
    fn minimal_explicit_scenario() {
        let file = parse_scenario_file(
            r#"{"mode": "weighted-sum", "a1": 2, "a2": 1, "gamma1r": 24, "gamma2r": 96}"#,
        )
        .unwrap();
        let config = ScenarioConfig::resolve(file, &flags()).unwrap();
        assert_eq!(config.mode, Mode::WeightedSum);
        assert_eq!(config.pt, 1.0);
        assert_eq!(config.step, DEFAULT_STEP);
        assert!(matches!(
            config.channel,
            ChannelSpec::Explicit { nr: 100, .. }
        ));
    }

    #[test]
    fn pt_db_conversion() {
        let file = parse_scenario_file(
            r#"{"mode": "common-rate", "gamma1r": 4, "gamma2r": 4, "pt_db": 10}"#,
        )
        .unwrap();
        let config = ScenarioConfig::resolve(file, &flags()).unwrap();
        assert!((config.pt - 10.0).abs() < 1e-12);
    }

    #[test]
    fn pt_and_pt_db_conflict() {
        let file = parse_scenario_file(
            r#"{"mode": "common-rate", "gamma1r": 4, "gamma2r": 4, "pt": 1, "pt_db": 0}"#,
        )
        .unwrap();
        assert!(ScenarioConfig::resolve(file, &flags()).is_err());
    }

    #[test]
    fn channel_spec_forms_are_exclusive() {
        let file = parse_scenario_file(
            r#"{"mode": "common-rate", "gamma1r": 4, "gamma2r": 4, "var1": 0.25, "var2": 1}"#,
        )
        .unwrap();
        assert!(ScenarioConfig::resolve(file, &flags()).is_err());

        let file =
            parse_scenario_file(r#"{"mode": "common-rate", "nr": 16, "var1": 0.25, "var2": 1}"#)
                .unwrap();
        assert!(matches!(
            ScenarioConfig::resolve(file, &flags()).unwrap().channel,
            ChannelSpec::Fading { nr: 16, .. }
        ));
    }

    #[test]
    fn unknown_fields_rejected() {
        assert!(parse_scenario_file(r#"{"mode": "common-rate", "bogus": 1}"#).is_err());
    }

    #[test]
    fn flag_overlay_wins() {
        let file = parse_scenario_file(
            r#"{"mode": "common-rate", "gamma1r": 4, "gamma2r": 4, "pt": 2.0, "seed": 9}"#,
        )
        .unwrap();
        let overrides = Overrides {
            pt_db: Some(0.0),
            seed: Some(11),
            mode: Some("weighted-sum".into()),
            ..Default::default()
        };
        let config = ScenarioConfig::resolve(file, &overrides).unwrap();
        assert_eq!(config.mode, Mode::WeightedSum);
        assert_eq!(config.pt, 1.0); // pt_db flag displaces the file's pt
        assert_eq!(config.seed, 11);
    }

    #[test]
    fn round_trip_is_identity() {
        let file = parse_scenario_file(
            r#"{"mode": "weighted-sum", "a1": 2, "a2": 1, "nr": 16, "var1": 0.25,
                "var2": 1.0, "sigma2": 1.0, "pt_db": 5, "step": 0.01, "trials": 50,
                "seed": 3, "prelog": 0.5, "pt_db_grid": [0, 10],
                "policies": ["upa", "closed-form"]}"#,
        )
        .unwrap();
        let config = ScenarioConfig::resolve(file, &flags()).unwrap();
        let text = serde_json::to_string(&config.to_file()).unwrap();
        let reparsed = ScenarioConfig::resolve(parse_scenario_file(&text).unwrap(), &flags())
            .unwrap();
        assert_eq!(config, reparsed);
    }

    #[test]
    fn invalid_values_rejected() {
        for body in [
            r#"{"mode": "common-rate", "gamma1r": -4, "gamma2r": 4}"#,
            r#"{"mode": "common-rate", "gamma1r": 4, "gamma2r": 4, "step": 0}"#,
            r#"{"mode": "common-rate", "gamma1r": 4, "gamma2r": 4, "trials": 0}"#,
            r#"{"mode": "common-rate", "gamma1r": 4, "gamma2r": 4, "policies": ["simplex"]}"#,
            r#"{"mode": "nonsense", "gamma1r": 4, "gamma2r": 4}"#,
            r#"{"gamma1r": 4, "gamma2r": 4}"#,
        ] {
            let file = parse_scenario_file(body).unwrap();
            assert!(
                ScenarioConfig::resolve(file, &flags()).is_err(),
                "accepted: {body}"
            );
        }
    }
}
