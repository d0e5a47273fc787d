//! Covariance-matrix simulator for Gaussian light-atom interfaces.
//!
//! States are [`GaussianState`] values (covariance matrix, displacement,
//! labels) with the vacuum normalised to the identity. Beams interact with
//! atomic ensembles through [`interface::run_beam`], and the [`criteria`]
//! module decides separability.

pub mod criteria;
pub mod error;
pub mod interface;
pub mod linalg;
pub mod protocols;
pub mod state;
pub mod symplectic;
pub mod tolerance;

pub use nalgebra;

pub use error::{Error, Result};
pub use interface::{BeamSpec, Disposal, Pass, PassGeometry, Schedule};
pub use state::{GaussianState, MeasurementRecord, Quadrature};
pub use symplectic::{SymplecticForm, SymplecticTransform};
