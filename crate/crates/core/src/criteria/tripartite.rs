use serde::{Deserialize, Serialize};

use super::ppt::{analyze_cut, Bipartition, CutReport};
use super::separability::{
    fully_separable, SeparabilityOptions, SeparabilitySummary, SeparabilityVerdict,
};
use crate::error::{Error, Result};
use crate::linalg::min_sym_eigenvalue;
use crate::state::GaussianState;

/// How the one-PPT and two-PPT patterns are numbered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassConvention {
    /// 2 = PPT across exactly one cut, 3 = PPT across exactly two cuts.
    #[default]
    Standard,
    /// The two middle labels swapped.
    Alternate,
}

/// Tripartite class. Classes 4 and 5 need the separability solver and may be
/// left undecided.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TripartiteClass {
    /// NPT across every cut.
    AllNpt,
    /// PPT across exactly one cut.
    OnePpt,
    /// PPT across exactly two cuts.
    TwoPpt,
    /// PPT across every cut but not fully separable.
    PptEntangled,
    FullySeparable,
    /// PPT across every cut; the solver hit its iteration cap.
    Undecided,
}

impl TripartiteClass {
    /// Numeric label; 0 for undecided.
    pub fn code(self, convention: ClassConvention) -> u8 {
        match (self, convention) {
            (TripartiteClass::AllNpt, _) => 1,
            (TripartiteClass::OnePpt, ClassConvention::Standard) => 2,
            (TripartiteClass::OnePpt, ClassConvention::Alternate) => 3,
            (TripartiteClass::TwoPpt, ClassConvention::Standard) => 3,
            (TripartiteClass::TwoPpt, ClassConvention::Alternate) => 2,
            (TripartiteClass::PptEntangled, _) => 4,
            (TripartiteClass::FullySeparable, _) => 5,
            (TripartiteClass::Undecided, _) => 0,
        }
    }

    /// Position along the entangled-to-separable ordering, for monotonicity
    /// checks. Undecided sits between 4 and 5.
    pub fn rank(self) -> f64 {
        match self {
            TripartiteClass::AllNpt => 1.0,
            TripartiteClass::OnePpt => 2.0,
            TripartiteClass::TwoPpt => 3.0,
            TripartiteClass::PptEntangled => 4.0,
            TripartiteClass::Undecided => 4.5,
            TripartiteClass::FullySeparable => 5.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TripartiteReport {
    /// Cuts `1|23`, `2|13`, `3|12` in that order.
    pub cuts: Vec<CutReport>,
    /// PPT flag per cut, same order.
    pub pattern: [bool; 3],
    pub class: TripartiteClass,
    pub class_standard: u8,
    pub class_alternate: u8,
    pub separability: Option<SeparabilitySummary>,
}

impl TripartiteReport {
    pub fn margins(&self) -> [f64; 3] {
        [
            self.cuts[0].margin,
            self.cuts[1].margin,
            self.cuts[2].margin,
        ]
    }

    pub fn code(&self, convention: ClassConvention) -> u8 {
        self.class.code(convention)
    }
}

pub fn classify_tripartite(state: &GaussianState) -> Result<TripartiteReport> {
    classify_tripartite_with(state, &SeparabilityOptions::default())
}

pub fn classify_tripartite_with(
    state: &GaussianState,
    opts: &SeparabilityOptions,
) -> Result<TripartiteReport> {
    if state.n_modes() != 3 {
        return Err(Error::NotThreeModes(state.n_modes()));
    }
    let cuts = Bipartition::one_vs_rest(3)?
        .iter()
        .map(|c| analyze_cut(state, c))
        .collect::<Result<Vec<_>>>()?;
    let pattern = [cuts[0].ppt, cuts[1].ppt, cuts[2].ppt];
    let n_ppt = pattern.iter().filter(|&&p| p).count();
    let mut separability = None;
    let class = match n_ppt {
        0 => TripartiteClass::AllNpt,
        1 => TripartiteClass::OnePpt,
        2 => TripartiteClass::TwoPpt,
        _ => match fully_separable(state, opts) {
            Ok(v) => {
                let margin = match &v {
                    SeparabilityVerdict::Separable { witness, .. } => {
                        min_sym_eigenvalue(&(state.cm() - witness))
                    }
                    SeparabilityVerdict::Entangled { certificate, .. } => *certificate,
                };
                separability = Some(SeparabilitySummary {
                    separable: v.is_separable(),
                    iterations: v.iterations(),
                    margin,
                });
                if v.is_separable() {
                    TripartiteClass::FullySeparable
                } else {
                    TripartiteClass::PptEntangled
                }
            }
            Err(Error::NoConvergence { .. }) => TripartiteClass::Undecided,
            Err(e) => return Err(e),
        },
    };
    Ok(TripartiteReport {
        cuts,
        pattern,
        class,
        class_standard: class.code(ClassConvention::Standard),
        class_alternate: class.code(ClassConvention::Alternate),
        separability,
    })
}
