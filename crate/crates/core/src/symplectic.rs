use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{block_diagonal, max_abs};
use crate::tolerance::TAU_SYM;

/// The block-diagonal symplectic form `J_N = ⊕ [[0, 1], [-1, 0]]` in the
/// `(x_1, p_1, ..., x_N, p_N)` ordering.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SymplecticForm {
    n_modes: usize,
}

impl SymplecticForm {
    pub fn new(n_modes: usize) -> Self {
        Self { n_modes }
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        let dim = 2 * self.n_modes;
        let mut j = DMatrix::zeros(dim, dim);
        for m in 0..self.n_modes {
            j[(2 * m, 2 * m + 1)] = 1.0;
            j[(2 * m + 1, 2 * m)] = -1.0;
        }
        j
    }
}

/// A real `2N x 2N` matrix acting on covariance matrices as `S^T γ S` and
/// on displacements as `S^T d`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticTransform {
    matrix: DMatrix<f64>,
}

impl SymplecticTransform {
    /// Wraps `matrix` after checking `S^T J S = J` to within `TAU_SYM`.
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        let deviation = symplectic_deviation(&matrix)?;
        if deviation > TAU_SYM {
            return Err(Error::NotSymplectic { deviation });
        }
        Ok(Self { matrix })
    }

    pub fn identity(n_modes: usize) -> Self {
        Self {
            matrix: DMatrix::identity(2 * n_modes, 2 * n_modes),
        }
    }

    pub(crate) fn from_matrix_unchecked(matrix: DMatrix<f64>) -> Self {
        Self { matrix }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn n_modes(&self) -> usize {
        self.matrix.nrows() / 2
    }

    /// `max |S^T J S - J|`.
    pub fn deviation(&self) -> f64 {
        symplectic_deviation(&self.matrix).unwrap_or(f64::INFINITY)
    }

    /// The transform applying `self` first and then `next`.
    ///
    /// With the `S^T γ S` action, applying `S1` then `S2` is the single
    /// transform `S1 S2`.
    pub fn then(&self, next: &SymplecticTransform) -> Result<SymplecticTransform> {
        if self.n_modes() != next.n_modes() {
            return Err(Error::ShapeMismatch(format!(
                "cannot compose {}-mode and {}-mode transforms",
                self.n_modes(),
                next.n_modes()
            )));
        }
        Ok(Self {
            matrix: &self.matrix * &next.matrix,
        })
    }

    /// Direct sum `S_1 ⊕ S_2`, acting on disjoint blocks of modes.
    pub fn direct_sum(&self, other: &SymplecticTransform) -> SymplecticTransform {
        Self {
            matrix: block_diagonal(&[self.matrix.clone(), other.matrix.clone()]),
        }
    }

    /// Single-mode phase rotation by `theta`.
    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self {
            matrix: DMatrix::from_row_slice(2, 2, &[c, s, -s, c]),
        }
    }

    /// Single-mode squeezer `diag(e^{-r}, e^{r})` on the `S^T γ S` action.
    pub fn squeezer(r: f64) -> Self {
        Self {
            matrix: DMatrix::from_row_slice(2, 2, &[(-r).exp(), 0.0, 0.0, r.exp()]),
        }
    }
}

fn symplectic_deviation(s: &DMatrix<f64>) -> Result<f64> {
    if s.nrows() != s.ncols() || !s.nrows().is_multiple_of(2) {
        return Err(Error::ShapeMismatch(format!(
            "symplectic matrix must be 2N x 2N, got {}x{}",
            s.nrows(),
            s.ncols()
        )));
    }
    let j = SymplecticForm::new(s.nrows() / 2).matrix();
    Ok(max_abs(&(s.transpose() * &j * s - &j)))
}
