//! Gaussian states: covariance matrix, displacement and mode labels.
//!
//! Coordinates are ordered `(x_1, p_1, ..., x_N, p_N)` and the covariance
//! matrix is normalised so that the vacuum is the identity. The variance of
//! a linear combination `h · R` is `(ħ/2) hᵀ γ h`.

use nalgebra::{DMatrix, DVector, Matrix2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    block_diagonal, check_symmetric, coordinate_indices, min_eig_cm_plus_ij, select, select_vec,
    symplectic_eigenvalues,
};
use crate::symplectic::SymplecticTransform;
use crate::tolerance::{TAU_PSD, TAU_SYM};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Quadrature {
    X,
    P,
}

impl Quadrature {
    fn offset(self) -> usize {
        match self {
            Quadrature::X => 0,
            Quadrature::P => 1,
        }
    }
}

/// Outcome of a homodyne measurement of one quadrature of one mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementRecord {
    pub mode: usize,
    pub quadrature: Quadrature,
    pub outcome: f64,
}

impl MeasurementRecord {
    pub fn x(mode: usize, outcome: f64) -> Self {
        Self {
            mode,
            quadrature: Quadrature::X,
            outcome,
        }
    }

    pub fn p(mode: usize, outcome: f64) -> Self {
        Self {
            mode,
            quadrature: Quadrature::P,
            outcome,
        }
    }
}

/// One sampled trajectory of an unmeasured mode: the state conditioned on a
/// random value of the mode's momentum, and that value.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub state: GaussianState,
    /// Sampled momentum of the discarded mode.
    pub momentum: f64,
    /// Displacement of the remaining modes relative to the traced-out state.
    pub shift: DVector<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    cm: DMatrix<f64>,
    disp: DVector<f64>,
    hbar: f64,
    labels: Vec<String>,
}

fn default_labels(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("mode{i}")).collect()
}

impl GaussianState {
    /// Validated constructor. `labels` defaults to `mode1, mode2, ...`.
    pub fn new(cm: DMatrix<f64>, disp: DVector<f64>, labels: Option<Vec<String>>) -> Result<Self> {
        let dim = cm.nrows();
        if dim == 0 || !dim.is_multiple_of(2) || cm.ncols() != dim {
            return Err(Error::ShapeMismatch(format!(
                "covariance matrix must be 2N x 2N with N >= 1, got {}x{}",
                cm.nrows(),
                cm.ncols()
            )));
        }
        if disp.len() != dim {
            return Err(Error::ShapeMismatch(format!(
                "displacement has length {}, expected {dim}",
                disp.len()
            )));
        }
        check_symmetric(&cm, TAU_SYM)?;
        let labels = labels.unwrap_or_else(|| default_labels(dim / 2));
        if labels.len() != dim / 2 {
            return Err(Error::ShapeMismatch(format!(
                "{} labels for {} modes",
                labels.len(),
                dim / 2
            )));
        }
        let min_eigenvalue = min_eig_cm_plus_ij(&cm);
        if min_eigenvalue < -TAU_PSD {
            return Err(Error::NonPhysical { min_eigenvalue });
        }
        Ok(Self {
            cm,
            disp,
            hbar: 1.0,
            labels,
        })
    }

    /// Direct sum of single-mode blocks. `disp` defaults to zero.
    pub fn from_blocks(blocks: &[Matrix2<f64>], disp: Option<DVector<f64>>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::ShapeMismatch("no mode blocks given".into()));
        }
        let blocks: Vec<DMatrix<f64>> = blocks
            .iter()
            .map(|b| DMatrix::from_iterator(2, 2, b.iter().copied()))
            .collect();
        let cm = block_diagonal(&blocks);
        let disp = disp.unwrap_or_else(|| DVector::zeros(cm.nrows()));
        Self::new(cm, disp, None)
    }

    pub fn vacuum(n_modes: usize) -> Self {
        Self {
            cm: DMatrix::identity(2 * n_modes, 2 * n_modes),
            disp: DVector::zeros(2 * n_modes),
            hbar: 1.0,
            labels: default_labels(n_modes),
        }
    }

    /// Product of thermal modes `n_1 1 ⊕ ... ⊕ n_N 1`.
    pub fn thermal(occupations: &[f64]) -> Result<Self> {
        let blocks: Vec<Matrix2<f64>> = occupations
            .iter()
            .map(|&n| Matrix2::identity() * n)
            .collect();
        Self::from_blocks(&blocks, None)
    }

    /// Two-mode squeezed vacuum with reduced fluctuations in `x_1 + x_2` and
    /// `p_1 - p_2`.
    pub fn two_mode_squeezed(r: f64) -> Self {
        let (c, s) = ((2.0 * r).cosh(), (2.0 * r).sinh());
        #[rustfmt::skip]
        let cm = DMatrix::from_row_slice(4, 4, &[
            c, 0.0, -s, 0.0,
            0.0, c, 0.0, s,
            -s, 0.0, c, 0.0,
            0.0, s, 0.0, c,
        ]);
        Self {
            cm,
            disp: DVector::zeros(4),
            hbar: 1.0,
            labels: default_labels(2),
        }
    }

    #[cfg(test)]
    pub(crate) fn from_parts_unchecked(
        cm: DMatrix<f64>,
        disp: DVector<f64>,
        labels: Vec<String>,
    ) -> Self {
        Self {
            cm,
            disp,
            hbar: 1.0,
            labels,
        }
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n_modes() {
            return Err(Error::ShapeMismatch(format!(
                "{} labels for {} modes",
                labels.len(),
                self.n_modes()
            )));
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn with_displacement(mut self, disp: DVector<f64>) -> Result<Self> {
        if disp.len() != self.disp.len() {
            return Err(Error::ShapeMismatch(format!(
                "displacement has length {}, expected {}",
                disp.len(),
                self.disp.len()
            )));
        }
        self.disp = disp;
        Ok(self)
    }

    pub fn n_modes(&self) -> usize {
        self.cm.nrows() / 2
    }

    pub fn cm(&self) -> &DMatrix<f64> {
        &self.cm
    }

    pub fn disp(&self) -> &DVector<f64> {
        &self.disp
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    fn check_mode(&self, index: usize) -> Result<()> {
        if index >= self.n_modes() {
            return Err(Error::BadIndex {
                index,
                n_modes: self.n_modes(),
            });
        }
        Ok(())
    }

    /// `self ⊗ other`.
    pub fn direct_sum(&self, other: &GaussianState) -> GaussianState {
        let cm = block_diagonal(&[self.cm.clone(), other.cm.clone()]);
        let disp = DVector::from_iterator(
            self.disp.len() + other.disp.len(),
            self.disp.iter().chain(other.disp.iter()).copied(),
        );
        let labels = self
            .labels
            .iter()
            .chain(other.labels.iter())
            .cloned()
            .collect();
        GaussianState {
            cm,
            disp,
            hbar: self.hbar,
            labels,
        }
    }

    /// `γ → Sᵀ γ S`, `d → Sᵀ d`.
    pub fn apply(&self, s: &SymplecticTransform) -> Result<GaussianState> {
        if s.n_modes() != self.n_modes() {
            return Err(Error::ShapeMismatch(format!(
                "{}-mode transform on a {}-mode state",
                s.n_modes(),
                self.n_modes()
            )));
        }
        let deviation = s.deviation();
        if deviation > TAU_SYM {
            return Err(Error::NotSymplectic { deviation });
        }
        let st = s.matrix().transpose();
        let cm = &st * &self.cm * s.matrix();
        let cm = (&cm + cm.transpose()) * 0.5;
        let disp = &st * &self.disp;
        Ok(GaussianState {
            cm,
            disp,
            hbar: self.hbar,
            labels: self.labels.clone(),
        })
    }

    /// Reduced state on `keep`, in the order given.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<GaussianState> {
        if keep.is_empty() {
            return Err(Error::BadPartition(
                "cannot keep an empty set of modes".into(),
            ));
        }
        for (i, &m) in keep.iter().enumerate() {
            self.check_mode(m)?;
            if keep[..i].contains(&m) {
                return Err(Error::BadPartition(format!("mode {m} listed twice")));
            }
        }
        let idx = coordinate_indices(keep);
        Ok(GaussianState {
            cm: select(&self.cm, &idx, &idx),
            disp: select_vec(&self.disp, &idx),
            hbar: self.hbar,
            labels: keep.iter().map(|&m| self.labels[m].clone()).collect(),
        })
    }

    /// Homodyne measurement of one quadrature; the measured mode is removed.
    ///
    /// With `γ = [[γ_A, C], [Cᵀ, γ_L]]` the remaining state has
    /// `γ_A - C (Xγ_L X)⁻¹ Cᵀ` and displacement
    /// `d_A + C (Xγ_L X)⁻¹ (outcome - d_L)`, the inverse taken on the support
    /// of the projector onto the measured quadrature. The covariance matrix
    /// never depends on the outcome.
    pub fn condition_on_homodyne(&self, meas: &MeasurementRecord) -> Result<GaussianState> {
        self.check_mode(meas.mode)?;
        let q = 2 * meas.mode + meas.quadrature.offset();
        let variance = self.cm[(q, q)];
        if variance <= TAU_PSD {
            return Err(Error::DegenerateQuadrature { variance });
        }
        let rest: Vec<usize> = (0..self.n_modes()).filter(|&m| m != meas.mode).collect();
        let ri = coordinate_indices(&rest);
        let a = select(&self.cm, &ri, &ri);
        let c = DVector::from_iterator(ri.len(), ri.iter().map(|&i| self.cm[(i, q)]));
        let cm = a - (&c * c.transpose()) / variance;
        let cm = (&cm + cm.transpose()) * 0.5;
        let disp = select_vec(&self.disp, &ri) + &c * ((meas.outcome - self.disp[q]) / variance);
        Ok(GaussianState {
            cm,
            disp,
            hbar: self.hbar,
            labels: rest.iter().map(|&m| self.labels[m].clone()).collect(),
        })
    }

    /// Traces out an unmeasured mode.
    pub fn discard(&self, mode: usize) -> Result<GaussianState> {
        self.check_mode(mode)?;
        let keep: Vec<usize> = (0..self.n_modes()).filter(|&m| m != mode).collect();
        self.partial_trace(&keep)
    }

    /// One trajectory of an unmeasured mode.
    ///
    /// The mode's momentum is drawn from its marginal distribution and the
    /// rest of the system is conditioned on it. Averaging the conditional
    /// covariance plus the spread of the shifts over many draws gives back
    /// [`GaussianState::discard`].
    pub fn sample_discard(&self, mode: usize, seed: u64) -> Result<Trajectory> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.sample_discard_with(mode, &mut rng)
    }

    pub fn sample_discard_with<R: rand::Rng + ?Sized>(
        &self,
        mode: usize,
        rng: &mut R,
    ) -> Result<Trajectory> {
        self.check_mode(mode)?;
        let q = 2 * mode + 1;
        // Wigner marginal of p has variance ħ γ_pp / 2
        let sd = (0.5 * self.hbar * self.cm[(q, q)]).sqrt();
        let momentum = Normal::new(self.disp[q], sd)
            .map_err(|e| Error::InvalidParameter(e.to_string()))?
            .sample(rng);
        let state = self.condition_on_homodyne(&MeasurementRecord::p(mode, momentum))?;
        let traced = self.discard(mode)?;
        let shift = state.disp() - traced.disp();
        Ok(Trajectory {
            state,
            momentum,
            shift,
        })
    }

    /// Symplectic eigenvalues in descending order.
    pub fn symplectic_eigenvalues(&self) -> Result<Vec<f64>> {
        symplectic_eigenvalues(&self.cm)
    }

    /// Smallest eigenvalue of `γ + iJ`; non-negative for physical states.
    pub fn physicality_margin(&self) -> f64 {
        min_eig_cm_plus_ij(&self.cm)
    }

    /// `(ħ/2) vᵀ γ v` for a coefficient vector over all `2N` coordinates.
    pub fn variance_of(&self, coefficients: &DVector<f64>) -> Result<f64> {
        if coefficients.len() != self.cm.nrows() {
            return Err(Error::ShapeMismatch(format!(
                "coefficient vector has length {}, expected {}",
                coefficients.len(),
                self.cm.nrows()
            )));
        }
        Ok(0.5 * self.hbar * (coefficients.transpose() * &self.cm * coefficients)[(0, 0)])
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&StateFile::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: StateFile = serde_json::from_str(text)?;
        file.try_into()
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// On-disk layout: `{"hbar":1,"modes":N,"labels":[...],"cm":[[...]],"disp":[...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateFile {
    pub hbar: f64,
    pub modes: usize,
    #[serde(default)]
    pub labels: Vec<String>,
    pub cm: Vec<Vec<f64>>,
    #[serde(default)]
    pub disp: Vec<f64>,
}

impl From<&GaussianState> for StateFile {
    fn from(s: &GaussianState) -> Self {
        let dim = s.cm.nrows();
        StateFile {
            hbar: s.hbar,
            modes: s.n_modes(),
            labels: s.labels.clone(),
            cm: (0..dim)
                .map(|i| (0..dim).map(|j| s.cm[(i, j)]).collect())
                .collect(),
            disp: s.disp.iter().copied().collect(),
        }
    }
}

impl TryFrom<StateFile> for GaussianState {
    type Error = Error;

    fn try_from(f: StateFile) -> Result<Self> {
        let dim = 2 * f.modes;
        if f.cm.len() != dim || f.cm.iter().any(|row| row.len() != dim) {
            return Err(Error::ShapeMismatch(format!(
                "cm must be {dim}x{dim} for {} modes",
                f.modes
            )));
        }
        if f.hbar.is_nan() || f.hbar <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "hbar must be positive, got {}",
                f.hbar
            )));
        }
        let cm = DMatrix::from_fn(dim, dim, |i, j| f.cm[i][j]);
        let disp = if f.disp.is_empty() {
            DVector::zeros(dim)
        } else {
            DVector::from_vec(f.disp)
        };
        let labels = if f.labels.is_empty() {
            None
        } else {
            Some(f.labels)
        };
        let mut state = GaussianState::new(cm, disp, labels)?;
        state.hbar = f.hbar;
        Ok(state)
    }
}
