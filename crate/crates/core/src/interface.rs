//! Faraday (QND) interaction between one light beam and a sequence of atomic
//! ensembles.
//!
//! A pass of the beam through ensemble `i` at angle `α` with coupling `κ`
//! acts on the quadratures as
//!
//! ```text
//! x_A += -κ p_L cos α
//! p_A +=  κ p_L sin α
//! x_L += -κ (p_A cos α + x_A sin α)
//! p_L unchanged
//! ```
//!
//! The symplectic matrix below is written for the `Sᵀ γ S` action, so its
//! light column holds the atomic response and its light row the light
//! response.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector, Matrix2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::{GaussianState, MeasurementRecord};
use crate::symplectic::SymplecticTransform;
use crate::tolerance::TAU_PSD;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pass {
    pub ensemble: usize,
    pub angle: f64,
    pub kappa: f64,
}

/// Ordered passes of one beam. Ensembles are distinct within a beam.
#[derive(Debug, Clone, PartialEq)]
pub struct PassGeometry {
    passes: Vec<Pass>,
}

impl PassGeometry {
    pub fn new(passes: Vec<Pass>) -> Result<Self> {
        for (i, p) in passes.iter().enumerate() {
            if !p.angle.is_finite() {
                return Err(Error::BadGeometry(format!(
                    "angle {} is not finite",
                    p.angle
                )));
            }
            if !p.kappa.is_finite() || p.kappa < 0.0 {
                return Err(Error::BadGeometry(format!(
                    "coupling {} must be finite and >= 0",
                    p.kappa
                )));
            }
            if passes[..i].iter().any(|q| q.ensemble == p.ensemble) {
                return Err(Error::BadGeometry(format!(
                    "ensemble {} visited twice",
                    p.ensemble
                )));
            }
        }
        Ok(Self { passes })
    }

    /// Same coupling on every pass.
    pub fn uniform(angles: &[(usize, f64)], kappa: f64) -> Result<Self> {
        Self::new(
            angles
                .iter()
                .map(|&(ensemble, angle)| Pass {
                    ensemble,
                    angle,
                    kappa,
                })
                .collect(),
        )
    }

    pub fn passes(&self) -> &[Pass] {
        &self.passes
    }

    pub fn with_kappa(&self, kappa: f64) -> Result<Self> {
        Self::new(self.passes.iter().map(|p| Pass { kappa, ..*p }).collect())
    }
}

/// Input light mode: `diag(var_x, var_p)` and a displacement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamSpec {
    pub var_x: f64,
    pub var_p: f64,
    #[serde(default)]
    pub displacement: [f64; 2],
}

impl BeamSpec {
    pub fn new(var_x: f64, var_p: f64) -> Result<Self> {
        let beam = Self {
            var_x,
            var_p,
            displacement: [0.0; 2],
        };
        beam.validate()?;
        Ok(beam)
    }

    pub fn vacuum() -> Self {
        Self {
            var_x: 1.0,
            var_p: 1.0,
            displacement: [0.0; 2],
        }
    }

    pub fn with_displacement(mut self, x: f64, p: f64) -> Self {
        self.displacement = [x, p];
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.var_x > 0.0 && self.var_p > 0.0)
            || !self.var_x.is_finite()
            || !self.var_p.is_finite()
        {
            return Err(Error::InvalidParameter(format!(
                "beam variances must be positive, got ({}, {})",
                self.var_x, self.var_p
            )));
        }
        let product = self.var_x * self.var_p;
        if product < 1.0 - TAU_PSD {
            return Err(Error::NonPhysicalBeam { product });
        }
        Ok(())
    }

    fn state(&self, label: String) -> Result<GaussianState> {
        self.validate()?;
        GaussianState::from_blocks(
            &[Matrix2::new(self.var_x, 0.0, 0.0, self.var_p)],
            Some(DVector::from_column_slice(&self.displacement)),
        )?
        .with_labels(vec![label])
    }
}

/// What happens to the beam after its last pass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Disposal {
    MeasureX(f64),
    MeasureP(f64),
    Discard,
    Keep,
}

/// Symplectic matrix of one beam acting on `n_ensembles` modes plus the beam,
/// which is the last mode.
pub fn interaction_symplectic(
    n_ensembles: usize,
    geometry: &PassGeometry,
) -> Result<SymplecticTransform> {
    let dim = 2 * n_ensembles + 2;
    let (lx, lp) = (dim - 2, dim - 1);
    let mut s = DMatrix::identity(dim, dim);
    for pass in geometry.passes() {
        if pass.ensemble >= n_ensembles {
            return Err(Error::BadGeometry(format!(
                "ensemble {} out of range for {n_ensembles} ensembles",
                pass.ensemble
            )));
        }
        let (sin, cos) = pass.angle.sin_cos();
        let (k, ax, ap) = (pass.kappa, 2 * pass.ensemble, 2 * pass.ensemble + 1);
        s[(ax, lx)] = -k * sin;
        s[(ap, lx)] = -k * cos;
        s[(lp, ax)] = -k * cos;
        s[(lp, ap)] = k * sin;
    }
    SymplecticTransform::new(s)
}

/// Appends the beam, lets it interact, then disposes of it.
pub fn run_beam(
    state: &GaussianState,
    geometry: &PassGeometry,
    beam: &BeamSpec,
    disposal: Disposal,
) -> Result<GaussianState> {
    let light = beam.state(format!("light{}", state.n_modes() + 1))?;
    let n = state.n_modes();
    let joint = state
        .direct_sum(&light)
        .apply(&interaction_symplectic(n, geometry)?)?;
    match disposal {
        Disposal::MeasureX(outcome) => {
            joint.condition_on_homodyne(&MeasurementRecord::x(n, outcome))
        }
        Disposal::MeasureP(outcome) => {
            joint.condition_on_homodyne(&MeasurementRecord::p(n, outcome))
        }
        Disposal::Discard => joint.discard(n),
        Disposal::Keep => Ok(joint),
    }
}

/// One beam of a multi-beam protocol.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamStep {
    pub geometry: PassGeometry,
    pub beam: BeamSpec,
    pub disposal: Disposal,
}

pub fn run_steps(state: &GaussianState, steps: &[BeamStep]) -> Result<GaussianState> {
    steps.iter().try_fold(state.clone(), |s, step| {
        run_beam(&s, &step.geometry, &step.beam, step.disposal)
    })
}

/// Built-in angle tables. Indices are zero-based ensemble positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Schedule {
    /// Squeezes `p_1 + p_2` once the beam's x quadrature is measured.
    OneStep,
    /// Squeezes `x_1 - x_2`.
    SecondStep,
    /// Squeezes `x_1 + x_2`.
    Erasure,
    /// `OneStep` followed by `SecondStep`.
    TwoStep,
    Linear,
    Triangular,
    /// Random displacements that turn two EPR pairs into a Smolin-like state.
    Smolin,
    /// The Smolin angles with the second beam as `(π/2, π/2, -π/2, -π/2)`.
    /// Kept for comparison; it does not give the intended correlations.
    SmolinVariant,
}

impl Schedule {
    pub const ALL: [Schedule; 8] = [
        Schedule::OneStep,
        Schedule::SecondStep,
        Schedule::Erasure,
        Schedule::TwoStep,
        Schedule::Linear,
        Schedule::Triangular,
        Schedule::Smolin,
        Schedule::SmolinVariant,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Schedule::OneStep => "one-step",
            Schedule::SecondStep => "second-step",
            Schedule::Erasure => "erasure",
            Schedule::TwoStep => "two-step",
            Schedule::Linear => "linear",
            Schedule::Triangular => "triangular",
            Schedule::Smolin => "smolin",
            Schedule::SmolinVariant => "smolin-variant",
        }
    }

    pub fn n_ensembles(self) -> usize {
        match self {
            Schedule::OneStep | Schedule::SecondStep | Schedule::Erasure | Schedule::TwoStep => 2,
            Schedule::Linear | Schedule::Triangular => 3,
            Schedule::Smolin | Schedule::SmolinVariant => 4,
        }
    }

    pub fn angles(self) -> Vec<Vec<(usize, f64)>> {
        const H: f64 = FRAC_PI_2;
        match self {
            Schedule::OneStep => vec![vec![(0, PI), (1, PI)]],
            Schedule::SecondStep => vec![vec![(0, H), (1, -H)]],
            Schedule::Erasure => vec![vec![(0, H), (1, H)]],
            Schedule::TwoStep => {
                [Schedule::OneStep.angles(), Schedule::SecondStep.angles()].concat()
            }
            Schedule::Linear => vec![
                vec![(0, 0.0), (1, H)],
                vec![(0, H), (1, 0.0), (2, H)],
                vec![(1, H), (2, 0.0)],
            ],
            Schedule::Triangular => vec![
                vec![(0, 0.0), (1, H), (2, H)],
                vec![(0, H), (1, 0.0), (2, H)],
                vec![(0, H), (1, H), (2, 0.0)],
            ],
            Schedule::Smolin => vec![
                vec![(0, 0.0), (1, 0.0), (2, PI), (3, PI)],
                vec![(0, H), (1, -H), (2, -H), (3, H)],
            ],
            Schedule::SmolinVariant => vec![
                vec![(0, 0.0), (1, 0.0), (2, PI), (3, PI)],
                vec![(0, H), (1, H), (2, -H), (3, -H)],
            ],
        }
    }

    pub fn geometries(self, kappa: f64) -> Result<Vec<PassGeometry>> {
        self.angles()
            .iter()
            .map(|a| PassGeometry::uniform(a, kappa))
            .collect()
    }
}

impl FromStr for Schedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('_', "-");
        Schedule::ALL
            .into_iter()
            .find(|sch| sch.name() == key)
            .ok_or_else(|| Error::UnknownSchedule(s.to_string()))
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `{"beams":[{"angles":{"1":0.0},"kappa":1.0,"beam":{...},"disposal":"measureX"}]}`.
///
/// Ensemble keys are one-based.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeometryFile {
    pub beams: Vec<BeamEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BeamEntry {
    pub angles: BTreeMap<String, f64>,
    #[serde(default = "one")]
    pub kappa: f64,
    #[serde(default = "BeamSpec::vacuum")]
    pub beam: BeamSpec,
    #[serde(default = "discard")]
    pub disposal: String,
    #[serde(default)]
    pub outcome: f64,
}

fn one() -> f64 {
    1.0
}

fn discard() -> String {
    "discard".into()
}

impl BeamEntry {
    pub fn to_step(&self) -> Result<BeamStep> {
        let mut passes = Vec::with_capacity(self.angles.len());
        for (key, &angle) in &self.angles {
            let index: usize = key.trim().parse().map_err(|_| {
                Error::BadGeometry(format!("ensemble key `{key}` is not an integer"))
            })?;
            if index == 0 {
                return Err(Error::BadGeometry("ensemble keys are one-based".into()));
            }
            passes.push(Pass {
                ensemble: index - 1,
                angle,
                kappa: self.kappa,
            });
        }
        passes.sort_by_key(|p| p.ensemble);
        let disposal = match self.disposal.to_ascii_lowercase().as_str() {
            "measurex" | "x" => Disposal::MeasureX(self.outcome),
            "measurep" | "p" => Disposal::MeasureP(self.outcome),
            "discard" => Disposal::Discard,
            "keep" => Disposal::Keep,
            other => return Err(Error::BadGeometry(format!("unknown disposal `{other}`"))),
        };
        Ok(BeamStep {
            geometry: PassGeometry::new(passes)?,
            beam: self.beam,
            disposal,
        })
    }
}

impl GeometryFile {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn steps(&self) -> Result<Vec<BeamStep>> {
        self.beams.iter().map(BeamEntry::to_step).collect()
    }
}
