//! Numerical tolerances shared across the crate.

/// Symmetry of covariance matrices and the symplectic identity `S^T J S = J`.
pub const TAU_SYM: f64 = 1e-10;

/// Margin allowed below zero when testing `cm + iJ ⪰ 0`, and below one for
/// symplectic eigenvalues.
pub const TAU_PSD: f64 = 1e-9;

/// Gap tolerance of the full-separability feasibility solver.
pub const TAU_SEP: f64 = 1e-7;

/// Iteration cap of the full-separability feasibility solver.
pub const SEP_MAX_ITERATIONS: usize = 10_000;
