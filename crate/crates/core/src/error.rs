use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("covariance matrix is not physical: min eigenvalue of cm + iJ is {min_eigenvalue:e}")]
    NonPhysical { min_eigenvalue: f64 },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("matrix is not symmetric (max asymmetry {asymmetry:e})")]
    NonSymmetric { asymmetry: f64 },

    #[error("transform is not symplectic: max |S^T J S - J| = {deviation:e}")]
    NotSymplectic { deviation: f64 },

    #[error("mode index {index} out of range for {n_modes} modes")]
    BadIndex { index: usize, n_modes: usize },

    #[error("measured quadrature has variance {variance:e}, cannot condition")]
    DegenerateQuadrature { variance: f64 },

    #[error("invalid geometry: {0}")]
    BadGeometry(String),

    #[error("unknown schedule `{0}`")]
    UnknownSchedule(String),

    #[error("invalid partition: {0}")]
    BadPartition(String),

    #[error("expected a three-mode state, got {0} modes")]
    NotThreeModes(usize),

    #[error("beam is not physical: var_x * var_p = {product:e} < 1")]
    NonPhysicalBeam { product: f64 },

    #[error("separability solver did not converge after {iterations} iterations (gap {gap:e})")]
    NoConvergence { iterations: usize, gap: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by a state, beam or transform that violates a
    /// physical constraint.
    pub fn is_physics_violation(&self) -> bool {
        matches!(
            self,
            Error::NonPhysical { .. }
                | Error::NotSymplectic { .. }
                | Error::DegenerateQuadrature { .. }
                | Error::NonPhysicalBeam { .. }
        )
    }
}
