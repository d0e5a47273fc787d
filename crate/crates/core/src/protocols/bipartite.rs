//! Two thermal ensembles entangled by measured light, and erasure of that
//! entanglement with a second, tailored beam.

use serde::{Deserialize, Serialize};

use crate::criteria::EntanglementVerdict;
use crate::error::{Error, Result};
use crate::interface::{run_beam, BeamSpec, Disposal, Schedule};
use crate::state::GaussianState;

/// Thermal occupations `n_i = 1/tanh(β_i ω/2)`, each at least one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThermalParams {
    n: Vec<f64>,
}

impl ThermalParams {
    pub fn new(n: Vec<f64>) -> Result<Self> {
        if let Some(&bad) = n.iter().find(|&&v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "occupation {bad} is not finite"
            )));
        }
        Ok(Self { n })
    }

    pub fn from_inverse_temperatures(betas: &[f64], omega: f64) -> Result<Self> {
        Self::new(betas.iter().map(|&b| occupation(b, omega)).collect())
    }

    pub fn n(&self) -> &[f64] {
        &self.n
    }

    pub fn state(&self) -> Result<GaussianState> {
        GaussianState::thermal(&self.n)
    }
}

/// `1/tanh(β ω / 2)`; one at zero temperature.
pub fn occupation(beta: f64, omega: f64) -> f64 {
    let x = 0.5 * beta * omega;
    if x.is_infinite() {
        1.0
    } else {
        1.0 / x.tanh()
    }
}

/// Occupation at temperature `T`: `1/tanh(ω / 2T)`.
pub fn occupation_at_temperature(t: f64, omega: f64) -> f64 {
    if t <= 0.0 {
        1.0
    } else {
        occupation(1.0 / t, omega)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Steps {
    /// One beam squeezing `p_1 + p_2`.
    One,
    /// Then a second beam squeezing `x_1 - x_2`.
    Two,
}

impl std::str::FromStr for Steps {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "one" | "1" | "one-step" => Ok(Steps::One),
            "two" | "2" | "two-step" => Ok(Steps::Two),
            other => Err(Error::InvalidParameter(format!(
                "unknown step count `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct BipartiteResult {
    pub state: GaussianState,
    pub verdict: EntanglementVerdict,
}

/// Runs the entangling beams on two thermal ensembles, measuring each
/// beam's x quadrature. `outcomes` supplies one value per beam and defaults
/// to zero.
pub fn bipartite_thermal(
    params: &ThermalParams,
    kappa: f64,
    steps: Steps,
    outcomes: &[f64],
) -> Result<BipartiteResult> {
    if params.n().len() != 2 {
        return Err(Error::InvalidParameter(format!(
            "need two ensembles, got {}",
            params.n().len()
        )));
    }
    let schedule = match steps {
        Steps::One => Schedule::OneStep,
        Steps::Two => Schedule::TwoStep,
    };
    let mut state = params.state()?;
    for (k, geometry) in schedule.geometries(kappa)?.iter().enumerate() {
        let outcome = outcomes.get(k).copied().unwrap_or(0.0);
        state = run_beam(
            &state,
            geometry,
            &BeamSpec::vacuum(),
            Disposal::MeasureX(outcome),
        )?;
    }
    let verdict = EntanglementVerdict::bipartite(&state, 1.0)?;
    Ok(BipartiteResult { state, verdict })
}

/// Light mode that undoes the one-step entanglement:
/// `diag(κ²(n₁+n₂) + n₁n₂, n₁n₂ / (κ²(n₁+n₂) + 1))`.
pub fn erasure_beam(n1: f64, n2: f64, kappa: f64) -> Result<BeamSpec> {
    let k2s = kappa * kappa * (n1 + n2);
    let var_x = k2s + n1 * n2;
    let var_p = n1 * n2 / (k2s + 1.0);
    let beam = BeamSpec {
        var_x,
        var_p,
        displacement: [0.0; 2],
    };
    let product = var_x * var_p;
    if !(var_x > 0.0 && var_p > 0.0) || product < 1.0 - crate::tolerance::TAU_PSD {
        return Err(Error::NonPhysicalBeam { product });
    }
    Ok(beam)
}

/// Sends the erasure beam through both ensembles at `π/2` and measures its
/// x quadrature.
pub fn erase_entanglement(
    state: &GaussianState,
    n1: f64,
    n2: f64,
    kappa: f64,
    outcome: f64,
) -> Result<GaussianState> {
    if state.n_modes() != 2 {
        return Err(Error::InvalidParameter(format!(
            "erasure acts on two ensembles, got {}",
            state.n_modes()
        )));
    }
    let beam = erasure_beam(n1, n2, kappa)?;
    let geometry = &Schedule::Erasure.geometries(kappa)?[0];
    run_beam(state, geometry, &beam, Disposal::MeasureX(outcome))
}
