//! Empirical constants for the pointwise and energy estimates satisfied by
//! semi-stable radial solutions.
//!
//! Every constant is reported as a sup of a ratio over the grid together with
//! where the sup is attained, whether the ratio plateaus toward the inner
//! cutoff, and the log-log slope of the ratio there. Conclusions are only
//! asserted when every hypothesis of the corresponding statement was checked.

mod checks;
mod sup;

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::radial::profile::fmt_f64;
use crate::radial::{Dimension, Flags, RadialProfile, Regime};
use crate::stability::{first_eigenvalue, EigenConfig, LinearizedOperator, StabilityVerdict};

pub use checks::{
    check_lemma_essential, check_monotonias, check_rand2r, check_thm_estimas, check_thm_extremal,
    check_thm_principal, weighted_energy,
};
pub use sup::TracePoint;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TheoremId {
    LemmaEssential,
    PropRand2r,
    ThmPrincipal,
    ThmExtremal,
    ThmEstimas,
    LemmaMonotonias,
}

impl TheoremId {
    pub const ALL: [TheoremId; 6] = [
        TheoremId::LemmaEssential,
        TheoremId::PropRand2r,
        TheoremId::ThmPrincipal,
        TheoremId::ThmExtremal,
        TheoremId::ThmEstimas,
        TheoremId::LemmaMonotonias,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TheoremId::LemmaEssential => "lemma_essential",
            TheoremId::PropRand2r => "prop_rand2r",
            TheoremId::ThmPrincipal => "thm_principal",
            TheoremId::ThmExtremal => "thm_extremal",
            TheoremId::ThmEstimas => "thm_estimas",
            TheoremId::LemmaMonotonias => "lemma_monotonias",
        }
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TheoremId::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown theorem id '{s}'")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    Fail,
    /// A hypothesis failed or could not be checked; nothing is asserted.
    Skipped,
    /// The normalizing quantity vanishes, so the estimate holds trivially.
    Vacuous,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HypothesisStatus {
    Satisfied,
    Violated,
    Unchecked,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HypothesisCheck {
    pub name: String,
    pub status: HypothesisStatus,
    pub detail: String,
}

impl HypothesisCheck {
    fn new(name: &str, status: HypothesisStatus, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            status,
            detail: detail.into(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridMeta {
    pub nodes: usize,
    pub r_min: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub theorem_id: TheoremId,
    /// Sub-item, e.g. `"iii"` or `"iv.k=2"`.
    pub item: Option<String>,
    pub regime: Option<Regime>,
    pub empirical_constant: f64,
    pub sup_location: f64,
    pub holds_uniformly: bool,
    pub slope_at_origin: Option<f64>,
    pub refinement_trend: String,
    pub outcome: Outcome,
    pub hypotheses: Vec<HypothesisCheck>,
    /// Auxiliary numbers (normalizers, limits, violation counts).
    pub quantities: BTreeMap<String, f64>,
    pub notes: Vec<String>,
    pub grid_meta: GridMeta,
    #[serde(skip)]
    pub trace: Vec<TracePoint>,
}

impl EstimateReport {
    /// Ratio trace as CSV `r,lhs,rhs,ratio`.
    pub fn write_trace_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["r", "lhs", "rhs", "ratio"])?;
        for t in &self.trace {
            w.write_record([fmt_f64(t.r), fmt_f64(t.lhs), fmt_f64(t.rhs), fmt_f64(t.ratio)])?;
        }
        w.flush()?;
        Ok(())
    }

    /// File-name friendly label, e.g. `thm_extremal_iv_k2`.
    pub fn label(&self) -> String {
        match &self.item {
            Some(item) => {
                let clean: String = item
                    .chars()
                    .filter_map(|c| match c {
                        '.' | '-' => Some('_'),
                        c if c.is_ascii_alphanumeric() => Some(c),
                        _ => None,
                    })
                    .collect();
                format!("{}_{clean}", self.theorem_id)
            }
            None => self.theorem_id.to_string(),
        }
    }
}

/// Evidence for the hypotheses of the checked statements.
#[derive(Clone, Debug, Default)]
pub struct CheckContext {
    pub verdict: Option<StabilityVerdict>,
    /// Structural flags of `g` in `-Δu = g(u)`.
    pub g_flags: Option<Flags>,
    /// Set when the profile approximates an extremal solution.
    pub extremal_low_confidence: Option<bool>,
    /// Skip the coarse-grid rerun that fills `refinement_trend`.
    pub skip_refinement: bool,
}

impl CheckContext {
    /// Attaches a spectral verdict for the potential read off the profile.
    pub fn spectral(u: &RadialProfile, dim: Dimension) -> Result<Self> {
        let op = LinearizedOperator::from_profile(u, dim)?;
        Ok(Self {
            verdict: Some(first_eigenvalue(&op, &EigenConfig::default())?),
            ..Self::default()
        })
    }

    pub fn with_verdict(mut self, v: StabilityVerdict) -> Self {
        self.verdict = Some(v);
        self
    }

    pub fn with_g_flags(mut self, f: Flags) -> Self {
        self.g_flags = Some(f);
        self
    }

    fn semistable(&self) -> HypothesisCheck {
        match &self.verdict {
            Some(v) if v.semistable => HypothesisCheck::new(
                "semi-stable",
                HypothesisStatus::Satisfied,
                format!("mu1 = {:.6e}", v.first_eigenvalue),
            ),
            Some(v) => HypothesisCheck::new(
                "semi-stable",
                HypothesisStatus::Violated,
                format!("mu1 = {:.6e} < -{:.1e}", v.first_eigenvalue, v.tolerance),
            ),
            None => HypothesisCheck::new("semi-stable", HypothesisStatus::Unchecked, "no stability verdict attached"),
        }
    }

    fn g_flag(&self, name: &str, pick: impl Fn(&Flags) -> bool) -> HypothesisCheck {
        match &self.g_flags {
            Some(f) if pick(f) => HypothesisCheck::new(name, HypothesisStatus::Satisfied, "declared/sampled flag"),
            Some(_) => HypothesisCheck::new(name, HypothesisStatus::Violated, "flag fails on sampled g"),
            None => HypothesisCheck::new(name, HypothesisStatus::Unchecked, "no flags for g attached"),
        }
    }
}

fn outcome(hypotheses: &[HypothesisCheck], holds: bool) -> Outcome {
    if hypotheses.iter().any(|h| h.status != HypothesisStatus::Satisfied) {
        Outcome::Skipped
    } else if holds {
        Outcome::Pass
    } else {
        Outcome::Fail
    }
}
