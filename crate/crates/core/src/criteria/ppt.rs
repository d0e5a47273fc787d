use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::symplectic_eigenvalues;
use crate::state::GaussianState;
use crate::tolerance::TAU_PSD;

/// A split of `n_modes` modes into two nonempty complementary sides.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Bipartition {
    side_a: Vec<usize>,
    side_b: Vec<usize>,
}

impl Bipartition {
    /// `side_a` in zero-based indices; the other side is the complement.
    pub fn new(side_a: &[usize], n_modes: usize) -> Result<Self> {
        let mut a: Vec<usize> = side_a.to_vec();
        a.sort_unstable();
        a.dedup();
        if a.len() != side_a.len() {
            return Err(Error::BadPartition("mode listed twice".into()));
        }
        if let Some(&bad) = a.iter().find(|&&m| m >= n_modes) {
            return Err(Error::BadIndex {
                index: bad,
                n_modes,
            });
        }
        let b: Vec<usize> = (0..n_modes).filter(|m| !a.contains(m)).collect();
        if a.is_empty() || b.is_empty() {
            return Err(Error::BadPartition("both sides must be nonempty".into()));
        }
        Ok(Self {
            side_a: a,
            side_b: b,
        })
    }

    /// Parses one-based notation such as `12|34` or `1,2|3,4`.
    pub fn parse(text: &str, n_modes: usize) -> Result<Self> {
        let (left, right) = text
            .split_once('|')
            .ok_or_else(|| Error::BadPartition(format!("`{text}` has no `|`")))?;
        let side = |s: &str| -> Result<Vec<usize>> {
            let s = s.trim();
            let items: Vec<&str> = if s.contains(',') {
                s.split(',').map(str::trim).collect()
            } else {
                s.split("").filter(|c| !c.trim().is_empty()).collect()
            };
            items
                .into_iter()
                .map(|t| match t.parse::<usize>() {
                    Ok(0) | Err(_) => {
                        Err(Error::BadPartition(format!("bad mode `{t}` in `{text}`")))
                    }
                    Ok(k) => Ok(k - 1),
                })
                .collect()
        };
        let (a, b) = (side(left)?, side(right)?);
        let cut = Self::new(&a, n_modes)?;
        let mut b_sorted = b.clone();
        b_sorted.sort_unstable();
        if b_sorted != cut.side_b {
            return Err(Error::BadPartition(format!(
                "`{text}` does not cover all {n_modes} modes exactly once"
            )));
        }
        Ok(cut)
    }

    pub fn side_a(&self) -> &[usize] {
        &self.side_a
    }

    pub fn side_b(&self) -> &[usize] {
        &self.side_b
    }

    pub fn n_modes(&self) -> usize {
        self.side_a.len() + self.side_b.len()
    }

    /// All `1 | N-1` cuts, ordered by the singled-out mode.
    pub fn one_vs_rest(n_modes: usize) -> Result<Vec<Bipartition>> {
        (0..n_modes).map(|m| Self::new(&[m], n_modes)).collect()
    }
}

impl fmt::Display for Bipartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sep = if self.n_modes() > 9 { "," } else { "" };
        let join = |s: &[usize]| {
            s.iter()
                .map(|m| (m + 1).to_string())
                .collect::<Vec<_>>()
                .join(sep)
        };
        write!(f, "{}|{}", join(&self.side_a), join(&self.side_b))
    }
}

impl FromStr for Bipartition {
    type Err = Error;

    /// Infers the mode count from the largest index.
    fn from_str(s: &str) -> Result<Self> {
        let n = if s.contains(',') {
            s.split(['|', ','])
                .filter_map(|t| t.trim().parse::<usize>().ok())
                .max()
        } else {
            s.chars()
                .filter_map(|c| c.to_digit(10))
                .map(|d| d as usize)
                .max()
        };
        Self::parse(
            s,
            n.ok_or_else(|| Error::BadPartition(format!("`{s}` names no modes")))?,
        )
    }
}

/// Covariance matrix with the momenta of `modes` sign-flipped.
pub fn partial_time_reversal(state: &GaussianState, modes: &[usize]) -> Result<DMatrix<f64>> {
    reverse_momenta(state.cm(), modes)
}

/// Congruence of `cm` by `diag(1, -1)` on each listed mode.
pub fn reverse_momenta(cm: &DMatrix<f64>, modes: &[usize]) -> Result<DMatrix<f64>> {
    let n = cm.nrows() / 2;
    let mut sign = vec![1.0; 2 * n];
    for &m in modes {
        if m >= n {
            return Err(Error::BadIndex {
                index: m,
                n_modes: n,
            });
        }
        sign[2 * m + 1] = -1.0;
    }
    Ok(DMatrix::from_fn(2 * n, 2 * n, |i, j| {
        sign[i] * sign[j] * cm[(i, j)]
    }))
}

/// PPT test and negativities across one cut.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutReport {
    pub cut: String,
    pub ppt: bool,
    /// Smallest symplectic eigenvalue of the partially reversed matrix.
    pub min_symplectic_eig: f64,
    /// `min_symplectic_eig - 1`; negative means NPT.
    pub margin: f64,
    pub symplectic_eigs: Vec<f64>,
    pub log_negativity: f64,
    pub negativity: f64,
}

/// Eigenvalues within `TAU_PSD` below one count as one, so that a positive
/// log-negativity always coincides with an NPT verdict.
fn clamp_to_ppt(nu: f64) -> f64 {
    if nu >= 1.0 - TAU_PSD {
        nu.max(1.0)
    } else {
        nu
    }
}

pub fn log_negativity_from(eigs: &[f64]) -> f64 {
    eigs.iter().map(|&v| (-clamp_to_ppt(v).ln()).max(0.0)).sum()
}

pub fn negativity_from(eigs: &[f64]) -> f64 {
    let prod: f64 = eigs
        .iter()
        .map(|&v| (1.0 / clamp_to_ppt(v)).max(1.0))
        .product();
    0.5 * (prod - 1.0)
}

pub fn analyze_cut(state: &GaussianState, cut: &Bipartition) -> Result<CutReport> {
    if cut.n_modes() != state.n_modes() {
        return Err(Error::BadPartition(format!(
            "cut {cut} is for {} modes, state has {}",
            cut.n_modes(),
            state.n_modes()
        )));
    }
    let reversed = partial_time_reversal(state, cut.side_b())?;
    let eigs = symplectic_eigenvalues(&reversed)?;
    let min = eigs.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(CutReport {
        cut: cut.to_string(),
        ppt: min >= 1.0 - TAU_PSD,
        min_symplectic_eig: min,
        margin: min - 1.0,
        log_negativity: log_negativity_from(&eigs),
        negativity: negativity_from(&eigs),
        symplectic_eigs: eigs,
    })
}

/// `(ppt, margin)` with margin = min symplectic eigenvalue − 1.
pub fn is_ppt(state: &GaussianState, cut: &Bipartition) -> Result<(bool, f64)> {
    let r = analyze_cut(state, cut)?;
    Ok((r.ppt, r.margin))
}

/// `Σ max(0, −ln ν̃)` over the partially reversed spectrum.
pub fn log_negativity(state: &GaussianState, cut: &Bipartition) -> Result<f64> {
    Ok(analyze_cut(state, cut)?.log_negativity)
}

/// `(Π max(1, 1/ν̃) − 1) / 2`.
pub fn negativity(state: &GaussianState, cut: &Bipartition) -> Result<f64> {
    Ok(analyze_cut(state, cut)?.negativity)
}
