//! Full separability of a Gaussian state.
//!
//! `γ` is fully separable iff some `σ = σ_1 ⊕ ... ⊕ σ_N` with every
//! `σ_a + iJ ⪰ 0` satisfies `γ − σ ⪰ 0`. Both constraint sets are convex, so
//! alternating projections either find a common point or converge to a gap
//! whose direction certifies that none exists.

use nalgebra::{DMatrix, Matrix2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{min_sym_eigenvalue, psd_split, symmetrize};
use crate::state::GaussianState;
use crate::tolerance::{SEP_MAX_ITERATIONS, TAU_SEP};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparabilityOptions {
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for SeparabilityOptions {
    fn default() -> Self {
        Self {
            tolerance: TAU_SEP,
            max_iterations: SEP_MAX_ITERATIONS,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SeparabilityVerdict {
    /// `witness` is block diagonal with physical blocks and `γ − witness`
    /// has no eigenvalue below `−tolerance`.
    Separable {
        witness: DMatrix<f64>,
        iterations: usize,
    },
    /// `certificate > 0` rules out every block-diagonal `σ`.
    Entangled { certificate: f64, iterations: usize },
}

impl SeparabilityVerdict {
    pub fn is_separable(&self) -> bool {
        matches!(self, SeparabilityVerdict::Separable { .. })
    }

    pub fn iterations(&self) -> usize {
        match self {
            SeparabilityVerdict::Separable { iterations, .. }
            | SeparabilityVerdict::Entangled { iterations, .. } => *iterations,
        }
    }
}

/// Summary for JSON output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeparabilitySummary {
    pub separable: bool,
    pub iterations: usize,
    /// Smallest eigenvalue of `γ − σ` for separable states, the certificate
    /// value otherwise.
    pub margin: f64,
}

/// Nearest point with `det σ ≥ 1`, `tr σ > 0` to a symmetric 2×2 block.
///
/// With `u = (a+c)/2`, `v = (a−c)/2`, `w = b` the set is `u ≥ √(1 + v² + w²)`
/// and the Frobenius norm is isotropic in `(u, v, w)`, so the projection
/// stays in the plane of `u` and the direction of `(v, w)`.
pub fn project_physical_block(block: &Matrix2<f64>) -> Matrix2<f64> {
    let (a, b, c) = (
        block[(0, 0)],
        0.5 * (block[(0, 1)] + block[(1, 0)]),
        block[(1, 1)],
    );
    let (u, v, w) = (0.5 * (a + c), 0.5 * (a - c), b);
    let rho = v.hypot(w);
    if u >= (1.0 + rho * rho).sqrt() {
        return Matrix2::new(a, b, b, c);
    }
    // distance to the vertical projection bounds where the minimiser lies
    let d0 = (1.0 + rho * rho).sqrt() - u;
    let (lo, hi) = ((rho - d0).max(0.0).asinh(), (rho + d0).asinh());
    let dist = |t: f64| (t.cosh() - u).powi(2) + (t.sinh() - rho).powi(2);
    let t = minimize_scalar(dist, lo, hi);
    let (nu, nr) = (t.cosh(), t.sinh());
    let (dv, dw) = if rho > 0.0 {
        (v / rho, w / rho)
    } else {
        (1.0, 0.0)
    };
    let (nv, nw) = (nr * dv, nr * dw);
    Matrix2::new(nu + nv, nw, nw, nu - nv)
}

/// Coarse scan followed by golden-section refinement.
fn minimize_scalar(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    const SCAN: usize = 32;
    if hi <= lo {
        return lo;
    }
    let step = (hi - lo) / SCAN as f64;
    let (mut best, mut best_val) = (lo, f(lo));
    for k in 1..=SCAN {
        let t = lo + step * k as f64;
        let val = f(t);
        if val < best_val {
            best = t;
            best_val = val;
        }
    }
    let (mut a, mut b) = ((best - step).max(lo), (best + step).min(hi));
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let (mut x1, mut x2) = (b - phi * (b - a), a + phi * (b - a));
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..80 {
        if b - a <= 1e-15 * (1.0 + a.abs()) {
            break;
        }
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = f(x2);
        }
    }
    let mid = 0.5 * (a + b);
    if f(mid) <= best_val {
        mid
    } else {
        best
    }
}

fn block(m: &DMatrix<f64>, a: usize) -> Matrix2<f64> {
    Matrix2::new(
        m[(2 * a, 2 * a)],
        m[(2 * a, 2 * a + 1)],
        m[(2 * a + 1, 2 * a)],
        m[(2 * a + 1, 2 * a + 1)],
    )
}

fn project_block_diagonal(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows() / 2;
    let mut out = DMatrix::zeros(2 * n, 2 * n);
    for a in 0..n {
        let p = project_physical_block(&block(m, a));
        out.view_mut((2 * a, 2 * a), (2, 2)).copy_from(&p);
    }
    out
}

/// `(Σ_a 2√det W_aa − tr(Wγ)) / tr W` for a PSD `W`.
///
/// For physical `σ_a`, `tr(W_aa σ_a) ≥ 2√det W_aa`, and `γ − σ ⪰ 0` forces
/// `tr(Wγ) ≥ tr(Wσ)`. A positive value therefore excludes every separable
/// decomposition.
pub fn dual_certificate(gamma: &DMatrix<f64>, w: &DMatrix<f64>) -> f64 {
    let trace = w.trace();
    if trace <= 0.0 {
        return f64::NEG_INFINITY;
    }
    let n = gamma.nrows() / 2;
    let lower: f64 = (0..n)
        .map(|a| 2.0 * block(w, a).determinant().max(0.0).sqrt())
        .sum();
    let tr_wg = (w.component_mul(gamma)).sum();
    (lower - tr_wg) / trace
}

/// Decides full separability across all single modes.
pub fn fully_separable(
    state: &GaussianState,
    opts: &SeparabilityOptions,
) -> Result<SeparabilityVerdict> {
    let gamma = symmetrize(state.cm());
    let mut sigma_b = project_block_diagonal(&gamma);
    let mut gap = f64::INFINITY;
    for it in 0..=opts.max_iterations {
        let residual = &gamma - &sigma_b;
        let min_eig = min_sym_eigenvalue(&residual);
        if min_eig >= -opts.tolerance {
            return Ok(SeparabilityVerdict::Separable {
                witness: sigma_b,
                iterations: it,
            });
        }
        let (plus, minus) = psd_split(&residual);
        let certificate = dual_certificate(&gamma, &minus);
        if certificate > opts.tolerance {
            return Ok(SeparabilityVerdict::Entangled {
                certificate,
                iterations: it,
            });
        }
        gap = -min_eig;
        let sigma_a = &gamma - plus;
        sigma_b = project_block_diagonal(&sigma_a);
    }
    Err(Error::NoConvergence {
        iterations: opts.max_iterations,
        gap,
    })
}

/// Three-mode entry point.
pub fn fully_separable_3mode(state: &GaussianState) -> Result<SeparabilityVerdict> {
    if state.n_modes() != 3 {
        return Err(Error::NotThreeModes(state.n_modes()));
    }
    fully_separable(state, &SeparabilityOptions::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::min_eig_cm_plus_ij;

    #[test]
    fn physical_block_is_fixed() {
        let b = Matrix2::new(2.0, 0.3, 0.3, 1.0);
        assert_eq!(project_physical_block(&b), b);
    }

    #[test]
    fn projection_lands_on_the_boundary() {
        for b in [
            Matrix2::new(0.5, 0.0, 0.0, 0.5),
            Matrix2::new(0.2, 0.4, 0.4, 3.0),
            Matrix2::new(-1.0, 0.0, 0.0, -2.0),
            Matrix2::new(5.0, 5.0, 5.0, 5.0),
        ] {
            let p = project_physical_block(&b);
            assert!((p.determinant() - 1.0).abs() < 1e-9, "{b} -> {p}");
            assert!(p.trace() > 0.0);
        }
    }

    #[test]
    fn projection_is_nearest_among_samples() {
        let b = Matrix2::new(0.2, 0.4, 0.4, 3.0);
        let p = project_physical_block(&b);
        let d = (p - b).norm();
        for k in 0..2000 {
            let t = k as f64 * 0.003;
            for j in 0..36 {
                let th = j as f64 * std::f64::consts::PI / 18.0;
                let (v, w) = (t.sinh() * th.cos(), t.sinh() * th.sin());
                let q = Matrix2::new(t.cosh() + v, w, w, t.cosh() - v);
                assert!((q - b).norm() >= d - 1e-9);
            }
        }
    }

    #[test]
    fn thermal_product_is_separable_with_itself() {
        let s = GaussianState::thermal(&[1.0, 2.0, 3.0]).unwrap();
        match fully_separable_3mode(&s).unwrap() {
            SeparabilityVerdict::Separable {
                witness,
                iterations,
            } => {
                assert_eq!(iterations, 0);
                assert_eq!(&witness, s.cm());
            }
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn entangled_pair_plus_vacuum_is_rejected() {
        let s = GaussianState::two_mode_squeezed(0.4).direct_sum(&GaussianState::vacuum(1));
        let v = fully_separable_3mode(&s).unwrap();
        assert!(!v.is_separable(), "{v:?}");
    }

    #[test]
    fn witness_is_made_of_physical_blocks() {
        // weakly correlated mixed state
        let mut s = GaussianState::two_mode_squeezed(0.3).direct_sum(&GaussianState::vacuum(1));
        let noisy = s.cm() + DMatrix::identity(6, 6) * 1.5;
        s = GaussianState::new(noisy, s.disp().clone(), None).unwrap();
        match fully_separable_3mode(&s).unwrap() {
            SeparabilityVerdict::Separable { witness, .. } => {
                for a in 0..3 {
                    let blk = DMatrix::from_iterator(2, 2, block(&witness, a).iter().copied());
                    assert!(min_eig_cm_plus_ij(&blk) >= -1e-9);
                }
                assert!(min_sym_eigenvalue(&(s.cm() - &witness)) >= -TAU_SEP);
            }
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn wrong_mode_count() {
        assert!(matches!(
            fully_separable_3mode(&GaussianState::vacuum(2)),
            Err(Error::NotThreeModes(2))
        ));
    }
}
