//! Smolin-like bound entangled state of four ensembles built from two EPR
//! pairs and two unmeasured beams, and its unlocking by two probe beams on
//! modes 3 and 4.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::criteria::{analyze_cut, Bipartition, CutReport};
use crate::error::{Error, Result};
use crate::interface::{run_beam, BeamSpec, Disposal, PassGeometry, Schedule};
use crate::state::GaussianState;
use crate::symplectic::SymplecticTransform;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmolinParams {
    /// Squeezing of each EPR pair.
    pub r: f64,
    pub kappa: f64,
    /// Momentum variance of both displacement beams.
    pub var_p: f64,
    /// x variance of the probe beams used for unlocking.
    pub var_x_probe: f64,
    /// Prepare the EPR pairs with measured beams instead of analytically.
    #[serde(default)]
    pub epr_via_interface: bool,
}

/// `κ² = (1 + e^{2r}) / 2`.
pub fn tied_kappa(r: f64) -> f64 {
    (0.5 * (1.0 + (2.0 * r).exp())).sqrt()
}

/// Probe squeezed like the EPR pairs: `e^{-2r}`.
pub fn tied_probe(r: f64) -> f64 {
    (-2.0 * r).exp()
}

impl SmolinParams {
    pub fn new(r: f64, kappa: f64, var_p: f64, var_x_probe: f64) -> Result<Self> {
        let p = Self {
            r,
            kappa,
            var_p,
            var_x_probe,
            epr_via_interface: false,
        };
        p.validate()?;
        Ok(p)
    }

    /// Coupling and probe tied to `r`.
    pub fn tied(r: f64, var_p: f64) -> Result<Self> {
        Self::new(r, tied_kappa(r), var_p, tied_probe(r))
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.r, self.kappa, self.var_p, self.var_x_probe]
            .iter()
            .all(|v| v.is_finite());
        if !finite
            || self.r < 0.0
            || self.kappa < 0.0
            || self.var_p <= 0.0
            || self.var_x_probe <= 0.0
        {
            return Err(Error::InvalidParameter(format!(
                "invalid Smolin parameters {self:?}"
            )));
        }
        Ok(())
    }

    /// `f = 2κ²⟨Δp_L²⟩`.
    pub fn f(&self) -> f64 {
        2.0 * self.kappa * self.kappa * self.var_p
    }

    fn displacement_beam(&self) -> BeamSpec {
        let var_x = self.var_p.max(1.0 / self.var_p);
        BeamSpec {
            var_x,
            var_p: self.var_p,
            displacement: [0.0; 2],
        }
    }

    fn probe_beam(&self) -> BeamSpec {
        BeamSpec {
            var_x: self.var_x_probe,
            var_p: 1.0 / self.var_x_probe,
            displacement: [0.0; 2],
        }
    }
}

/// Two-mode EPR pair from vacuum: a beam at `(π/2, π/2)` and one at
/// `(0, π)`, both X-measured with outcome zero, each with `2κ² = e^{2r} − 1`.
pub fn epr_via_interface(r: f64) -> Result<GaussianState> {
    let kappa = (0.5 * ((2.0 * r).exp() - 1.0)).sqrt();
    let mut s = GaussianState::vacuum(2);
    for angles in [[(0, FRAC_PI_2), (1, FRAC_PI_2)], [(0, 0.0), (1, PI)]] {
        s = run_beam(
            &s,
            &PassGeometry::uniform(&angles, kappa)?,
            &BeamSpec::vacuum(),
            Disposal::MeasureX(0.0),
        )?;
    }
    Ok(s)
}

pub fn epr_pairs(params: &SmolinParams) -> Result<GaussianState> {
    let pair = if params.epr_via_interface {
        epr_via_interface(params.r)?
    } else {
        GaussianState::two_mode_squeezed(params.r)
    };
    Ok(pair.direct_sum(&pair))
}

fn displacement_geometries(params: &SmolinParams) -> Result<Vec<PassGeometry>> {
    Schedule::Smolin.geometries(params.kappa)
}

/// Both displacement beams traced out.
pub fn smolin_generate(params: &SmolinParams) -> Result<GaussianState> {
    params.validate()?;
    let beam = params.displacement_beam();
    displacement_geometries(params)?
        .iter()
        .try_fold(epr_pairs(params)?, |s, g| {
            run_beam(&s, g, &beam, Disposal::Discard)
        })
}

/// One realisation of the random displacements.
#[derive(Debug, Clone)]
pub struct SmolinTrajectory {
    pub state: GaussianState,
    /// Sampled momenta of the two displacement beams.
    pub p_bar: [f64; 2],
}

pub fn smolin_trajectory(params: &SmolinParams, seed: u64) -> Result<SmolinTrajectory> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let beam = params.displacement_beam();
    let mut state = epr_pairs(params)?;
    let mut p_bar = [0.0; 2];
    for (k, g) in displacement_geometries(params)?.iter().enumerate() {
        let joint = run_beam(&state, g, &beam, Disposal::Keep)?;
        let t = joint.sample_discard_with(4, &mut rng)?;
        p_bar[k] = t.momentum;
        state = t.state;
    }
    Ok(SmolinTrajectory { state, p_bar })
}

/// Orthogonal symplectic change to `(x₁+x₂, p₁+p₂, x₁−x₂, p₁−p₂)/√2` for
/// each consecutive pair of modes.
pub fn epr_basis_transform(n_pairs: usize) -> SymplecticTransform {
    let h = FRAC_1_SQRT_2;
    #[rustfmt::skip]
    let t = DMatrix::from_row_slice(4, 4, &[
        h, 0.0, h, 0.0,
        0.0, h, 0.0, h,
        h, 0.0, -h, 0.0,
        0.0, h, 0.0, -h,
    ]);
    // new coordinates are T R, so under the Sᵀ γ S action S = Tᵀ
    let block = SymplecticTransform::from_matrix_unchecked(t.transpose());
    (1..n_pairs).fold(block.clone(), |acc, _| acc.direct_sum(&block))
}

pub fn to_epr_basis(state: &GaussianState) -> Result<GaussianState> {
    if !state.n_modes().is_multiple_of(2) {
        return Err(Error::ShapeMismatch(format!(
            "{} modes do not form pairs",
            state.n_modes()
        )));
    }
    state.apply(&epr_basis_transform(state.n_modes() / 2))
}

#[derive(Debug, Clone)]
pub struct UnlockResult {
    /// Modes 1 and 2 after both probes are measured.
    pub state: GaussianState,
    /// The same state in the EPR basis.
    pub epr_state: GaussianState,
    /// Noise added to the squeezed EPR variances.
    pub delta: f64,
    /// Displacement per unit outcome per `√2 κ`.
    pub gain: f64,
    pub cut: CutReport,
}

impl UnlockResult {
    /// EPR-basis displacement once the random shifts are estimated from the
    /// outcomes, `2κ p̄₁ = −x₊`, `2κ p̄₂ = −p₋`.
    pub fn known_displacement(&self, x_plus: f64, p_minus: f64) -> [f64; 4] {
        let d = self.epr_state.disp();
        [
            d[0] + x_plus * FRAC_1_SQRT_2,
            d[1],
            d[2],
            d[3] - p_minus * FRAC_1_SQRT_2,
        ]
    }
}

fn probe_geometries(kappa: f64) -> Result<[PassGeometry; 2]> {
    Ok([
        PassGeometry::uniform(&[(2, FRAC_PI_2), (3, FRAC_PI_2)], kappa)?,
        PassGeometry::uniform(&[(2, 0.0), (3, PI)], kappa)?,
    ])
}

fn measure_probes(
    state: &GaussianState,
    params: &SmolinParams,
    x_plus: f64,
    p_minus: f64,
) -> Result<GaussianState> {
    let probe = params.probe_beam();
    let [g1, g2] = probe_geometries(params.kappa)?;
    let s = run_beam(state, &g1, &probe, Disposal::MeasureX(x_plus))?;
    run_beam(&s, &g2, &probe, Disposal::MeasureX(p_minus))?.partial_trace(&[0, 1])
}

/// Measures `x₃ + x₄` and `p₃ − p₄` with the probes and keeps modes 1-2.
pub fn smolin_unlock(
    state: &GaussianState,
    params: &SmolinParams,
    x_plus: f64,
    p_minus: f64,
) -> Result<UnlockResult> {
    if state.n_modes() != 4 {
        return Err(Error::ShapeMismatch(format!(
            "unlocking needs 4 modes, got {}",
            state.n_modes()
        )));
    }
    params.validate()?;
    let out = measure_probes(state, params, x_plus, p_minus)?;
    let epr_state = to_epr_basis(&out)?;
    let delta = epr_state.cm()[(0, 0)] - (-2.0 * params.r).exp();
    let centred = state.clone().with_displacement(DVector::zeros(8))?;
    let unit = to_epr_basis(&measure_probes(&centred, params, 1.0, 0.0)?)?;
    let scale = std::f64::consts::SQRT_2 * params.kappa;
    let gain = if scale > 0.0 {
        unit.disp()[0] / scale
    } else {
        0.0
    };
    let cut = analyze_cut(&out, &Bipartition::new(&[0], 2)?)?;
    Ok(UnlockResult {
        state: out,
        epr_state,
        delta,
        gain,
        cut,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnlockRow {
    pub r: f64,
    pub var_p: f64,
    pub logneg_unlocked: f64,
    pub logneg_epr: f64,
    pub ratio: f64,
    pub negativity_unlocked: f64,
    pub negativity_epr: f64,
    pub negativity_ratio: f64,
    /// The generated state is PPT across `14|23`.
    pub admissible: bool,
}

pub fn unlock_point(params: &SmolinParams) -> Result<UnlockRow> {
    let generated = smolin_generate(params)?;
    let admissible = analyze_cut(&generated, &Bipartition::parse("14|23", 4)?)?.ppt;
    let unlocked = smolin_unlock(&generated, params, 0.0, 0.0)?;
    let epr = analyze_cut(
        &GaussianState::two_mode_squeezed(params.r),
        &Bipartition::new(&[0], 2)?,
    )?;
    let ratio = |a: f64, b: f64| if b > 0.0 { a / b } else { 0.0 };
    Ok(UnlockRow {
        r: params.r,
        var_p: params.var_p,
        logneg_unlocked: unlocked.cut.log_negativity,
        logneg_epr: epr.log_negativity,
        ratio: ratio(unlocked.cut.log_negativity, epr.log_negativity),
        negativity_unlocked: unlocked.cut.negativity,
        negativity_epr: epr.negativity,
        negativity_ratio: ratio(unlocked.cut.negativity, epr.negativity),
        admissible,
    })
}

/// `r`-major grid with tied coupling and probe, in grid order.
pub fn unlock_sweep(rs: &[f64], var_ps: &[f64]) -> Result<Vec<UnlockRow>> {
    if rs.is_empty() || var_ps.is_empty() {
        return Err(Error::InvalidParameter(
            "sweep grids must be nonempty".into(),
        ));
    }
    let points: Vec<(f64, f64)> = rs
        .iter()
        .flat_map(|&r| var_ps.iter().map(move |&v| (r, v)))
        .collect();
    points
        .par_iter()
        .map(|&(r, v)| unlock_point(&SmolinParams::tied(r, v)?))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_change_is_orthogonal() {
        let s = epr_basis_transform(2);
        assert!(s.deviation() < 1e-15);
        let m = s.matrix();
        assert!((m.transpose() * m - DMatrix::identity(8, 8)).abs().max() < 1e-15);
        let v = GaussianState::vacuum(4);
        assert!((v.apply(&s).unwrap().cm() - v.cm()).abs().max() < 1e-15);
    }

    #[test]
    fn interface_epr_matches_analytic() {
        let r = 0.6;
        let a = epr_via_interface(r).unwrap();
        let b = GaussianState::two_mode_squeezed(r);
        assert!((a.cm() - b.cm()).abs().max() < 1e-12, "{}", a.cm());
    }

    #[test]
    fn no_coupling_keeps_the_pairs() {
        let p = SmolinParams::new(0.5, 0.0, 1.0, 0.5).unwrap();
        let s = smolin_generate(&p).unwrap();
        let pair = GaussianState::two_mode_squeezed(0.5);
        assert!((s.cm() - pair.direct_sum(&pair).cm()).abs().max() < 1e-15);
        assert!(
            !analyze_cut(&s, &Bipartition::parse("14|23", 4).unwrap())
                .unwrap()
                .ppt
        );
    }

    #[test]
    fn trajectory_is_reproducible() {
        let p = SmolinParams::tied(0.4, 1.0).unwrap();
        let a = smolin_trajectory(&p, 9).unwrap();
        let b = smolin_trajectory(&p, 9).unwrap();
        assert_eq!(a.p_bar, b.p_bar);
        assert_eq!(a.state, b.state);
    }

    #[test]
    fn bad_params() {
        assert!(SmolinParams::new(0.5, 1.0, -1.0, 1.0).is_err());
        assert!(SmolinParams::new(f64::NAN, 1.0, 1.0, 1.0).is_err());
    }
}
