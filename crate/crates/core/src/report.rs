//! Aggregated run report: configuration echo, one entry per check, overall
//! verdict and provenance.

use serde::Serialize;

use crate::estimates::{EstimateReport, GridMeta, HypothesisCheck, Outcome};
use crate::stability::StabilityVerdict;

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "entry", rename_all = "snake_case")]
pub enum ReportEntry {
    Estimate(EstimateReport),
    Stability {
        check: String,
        verdict: StabilityVerdict,
        hypotheses: Vec<HypothesisCheck>,
    },
    /// A named boolean check with the measured quantity behind it.
    Check {
        check: String,
        passed: bool,
        value: f64,
        threshold: f64,
        detail: String,
    },
}

impl ReportEntry {
    /// Whether the entry counts against the overall verdict.
    pub fn failed(&self) -> bool {
        match self {
            ReportEntry::Estimate(e) => e.outcome == Outcome::Fail,
            ReportEntry::Stability { verdict, .. } => !verdict.semistable,
            ReportEntry::Check { passed, .. } => !passed,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Provenance {
    pub version: &'static str,
    pub seed: u64,
    pub grid: GridMeta,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub config: serde_json::Value,
    pub entries: Vec<ReportEntry>,
    pub overall_pass: bool,
    pub provenance: Provenance,
}

impl VerificationReport {
    pub fn new(config: serde_json::Value, entries: Vec<ReportEntry>, seed: u64, grid: GridMeta) -> Self {
        let overall_pass = !entries.iter().any(ReportEntry::failed);
        Self {
            config,
            entries,
            overall_pass,
            provenance: Provenance {
                version: env!("CARGO_PKG_VERSION"),
                seed,
                grid,
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overall_reflects_failed_checks() {
        let grid = GridMeta { nodes: 10, r_min: 1e-3 };
        let ok = ReportEntry::Check {
            check: "a".into(),
            passed: true,
            value: 1.0,
            threshold: 2.0,
            detail: String::new(),
        };
        let bad = ReportEntry::Check {
            check: "b".into(),
            passed: false,
            value: 3.0,
            threshold: 2.0,
            detail: String::new(),
        };
        assert!(VerificationReport::new(serde_json::Value::Null, vec![ok.clone()], 0, grid).overall_pass);
        let r = VerificationReport::new(serde_json::Value::Null, vec![ok, bad], 0, grid);
        assert!(!r.overall_pass);
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["entries"][1]["entry"], "check");
    }
}
