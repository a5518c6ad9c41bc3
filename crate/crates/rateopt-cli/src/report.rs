//! Report shapes emitted by the commands: JSON for `solve`/`verify`, CSV for
//! `sweep`. Number formatting is pinned (9 significant digits, '.' decimal
//! separator) so reruns diff cleanly.

use serde::Serialize;

use rateopt_core::oracle::SweepResult;
use rateopt_core::relay::{PowerAllocation, SnrPair};

use crate::config::ScenarioFile;

#[derive(Debug, Clone, Serialize)]
pub struct PowersReport {
    pub p1: f64,
    pub p2: f64,
    pub pr: f64,
    pub pt: f64,
}

impl From<&PowerAllocation> for PowersReport {
    fn from(p: &PowerAllocation) -> Self {
        Self {
            p1: p.p1(),
            p2: p.p2(),
            pr: p.pr(),
            pt: p.pt(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SnrReport {
    pub gamma1: f64,
    pub gamma2: f64,
}

impl From<&SnrPair> for SnrReport {
    fn from(s: &SnrPair) -> Self {
        Self {
            gamma1: s.gamma1,
            gamma2: s.gamma2,
        }
    }
}

/// Closed-form side of a solve or verify.
#[derive(Debug, Clone, Serialize)]
pub struct ClosedFormReport {
    pub snrs: SnrReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub powers: Option<PowersReport>,
    pub rate: f64,
    /// Minimum SNR in common-rate mode, the weighted rate otherwise.
    pub objective: f64,
    pub feasible: bool,
}

/// Grid-search side of a verify.
#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    pub objective: f64,
    pub alpha: f64,
    pub beta: f64,
    pub powers: PowersReport,
    pub snrs: SnrReport,
    pub step: f64,
}

/// Closed-form minus oracle, recomputable from the two sides.
#[derive(Debug, Clone, Serialize)]
pub struct DeltaReport {
    pub objective: f64,
    pub p1: f64,
    pub p2: f64,
    pub pr: f64,
}

/// Framework-mode solve: the two abstract solutions over the relay region.
#[derive(Debug, Clone, Serialize)]
pub struct FrameworkReport {
    pub budget: f64,
    pub shifted_budget: f64,
    pub weighted_product_point: Vec<f64>,
    pub weighted_product_objective: f64,
    pub weighted_product_feasible: bool,
    pub max_min_point: Vec<f64>,
    pub max_min_objective: f64,
    pub max_min_feasible: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub config: ScenarioFile,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closed_form: Option<ClosedFormReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub framework: Option<FrameworkReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deltas: Option<DeltaReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    /// "ok" for solves, "PASS"/"FAIL" for verifies.
    pub status: String,
    pub timing_ms: f64,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// 9 significant digits, locale-independent.
pub fn format_rate(value: f64) -> String {
    format!("{value:.8e}")
}

/// CSV body for a sweep: header plus one row per (budget, policy), budgets
/// outer, policies in config order. Byte-identical for identical inputs.
pub fn sweep_csv(pt_db_grid: &[f64], result: &SweepResult) -> String {
    let mut out = String::from("pt_db,policy,mean_rate,stderr,trials,seed\n");
    for (i, pt_db) in pt_db_grid.iter().enumerate() {
        for curve in &result.curves {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                pt_db,
                curve.policy.name(),
                format_rate(curve.mean_rate[i]),
                format_rate(curve.std_err[i]),
                result.trials,
                result.master_seed,
            ));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rate_formatting_is_stable() {
        assert_eq!(format_rate(0.0), "0.00000000e0");
        assert_eq!(format_rate(5.224760440453101), "5.22476044e0");
        assert_eq!(format_rate(0.0012345678949), "1.23456789e-3");
        assert_eq!(format_rate(-1.5), "-1.50000000e0");
    }
}
