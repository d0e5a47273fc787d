//! Separability tests and entanglement measures.

mod ppt;
mod separability;
mod tripartite;
mod variance;

use serde::{Deserialize, Serialize};

pub use ppt::{
    analyze_cut, is_ppt, log_negativity, log_negativity_from, negativity, negativity_from,
    partial_time_reversal, reverse_momenta, Bipartition, CutReport,
};
pub use separability::{
    dual_certificate, fully_separable, fully_separable_3mode, project_physical_block,
    SeparabilityOptions, SeparabilitySummary, SeparabilityVerdict,
};
pub use tripartite::{
    classify_tripartite, classify_tripartite_with, ClassConvention, TripartiteClass,
    TripartiteReport,
};
pub use variance::{duan, variance_inequality, Splitting, VarianceCriterion, VarianceReport};

use crate::error::Result;
use crate::state::GaussianState;

/// Everything known about a state's entanglement, ready for JSON output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntanglementVerdict {
    /// True when every listed cut is PPT.
    pub ppt: bool,
    pub cuts: Vec<CutReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variance: Option<VarianceReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tripartite: Option<TripartiteReport>,
}

impl EntanglementVerdict {
    pub fn for_cuts(state: &GaussianState, cuts: &[Bipartition]) -> Result<Self> {
        let cuts = cuts
            .iter()
            .map(|c| analyze_cut(state, c))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            ppt: cuts.iter().all(|c| c.ppt),
            cuts,
            variance: None,
            tripartite: None,
        })
    }

    /// Single cut `1|2` plus the Duan test with weight `λ`.
    pub fn bipartite(state: &GaussianState, lambda: f64) -> Result<Self> {
        let mut v = Self::for_cuts(state, &[Bipartition::new(&[0], 2)?])?;
        v.variance = Some(duan(state, lambda)?);
        Ok(v)
    }

    pub fn tripartite(state: &GaussianState) -> Result<Self> {
        let report = classify_tripartite(state)?;
        Ok(Self {
            ppt: report.pattern.iter().all(|&p| p),
            cuts: report.cuts.clone(),
            variance: None,
            tripartite: Some(report),
        })
    }

    pub fn variance_margin(&self) -> Option<f64> {
        self.variance.map(|v| v.margin)
    }
}
