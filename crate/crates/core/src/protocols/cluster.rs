//! Three thermal ensembles turned into cluster-like states by three
//! measured beams, and the temperature dependence of their entanglement.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bipartite::occupation_at_temperature;
use crate::criteria::{classify_tripartite, TripartiteClass, TripartiteReport};
use crate::error::{Error, Result};
use crate::interface::{run_beam, BeamSpec, Disposal, Schedule};
use crate::state::GaussianState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClusterShape {
    Linear,
    Triangular,
}

impl ClusterShape {
    pub fn schedule(self) -> Schedule {
        match self {
            ClusterShape::Linear => Schedule::Linear,
            ClusterShape::Triangular => Schedule::Triangular,
        }
    }
}

impl std::str::FromStr for ClusterShape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "linear" => Ok(ClusterShape::Linear),
            "triangular" | "triangle" => Ok(ClusterShape::Triangular),
            other => Err(Error::UnknownSchedule(other.to_string())),
        }
    }
}

/// `n 1₆` through the three beams of `shape`, every beam X-measured with
/// outcome zero.
pub fn cluster_state(shape: ClusterShape, kappa: f64, n: f64) -> Result<GaussianState> {
    let mut state = GaussianState::thermal(&[n; 3])?;
    for g in shape.schedule().geometries(kappa)? {
        state = run_beam(&state, &g, &BeamSpec::vacuum(), Disposal::MeasureX(0.0))?;
    }
    Ok(state)
}

pub fn cluster_point(
    shape: ClusterShape,
    kappa: f64,
    temperature: f64,
    omega: f64,
) -> Result<TripartiteReport> {
    classify_tripartite(&cluster_state(
        shape,
        kappa,
        occupation_at_temperature(temperature, omega),
    )?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterRow {
    pub kappa: f64,
    pub temperature: f64,
    pub class: TripartiteClass,
    pub margins: [f64; 3],
}

/// Every `(κ, T)` pair, κ-major, evaluated in parallel and returned in grid
/// order.
pub fn cluster_sweep(
    shape: ClusterShape,
    kappas: &[f64],
    temperatures: &[f64],
    omega: f64,
) -> Result<Vec<ClusterRow>> {
    if kappas.is_empty() || temperatures.is_empty() {
        return Err(Error::InvalidParameter(
            "sweep grids must be nonempty".into(),
        ));
    }
    let points: Vec<(f64, f64)> = kappas
        .iter()
        .flat_map(|&k| temperatures.iter().map(move |&t| (k, t)))
        .collect();
    points
        .par_iter()
        .map(|&(kappa, temperature)| {
            let r = cluster_point(shape, kappa, temperature, omega)?;
            Ok(ClusterRow {
                kappa,
                temperature,
                class: r.class,
                margins: r.margins(),
            })
        })
        .collect()
}

/// Temperatures where the state first leaves the all-NPT class (`t_a`),
/// becomes PPT across every cut (`t_b`), and becomes fully separable
/// (`t_c`). `None` when the transition is not reached below the search
/// limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClusterBoundaries {
    pub t_a: Option<f64>,
    pub t_b: Option<f64>,
    pub t_c: Option<f64>,
}

/// Smallest `T` in `[lo, hi]` with `pred(T)`, assuming `pred` switches from
/// false to true once. `None` if `pred(hi)` is false.
pub fn bisect_threshold(
    mut pred: impl FnMut(f64) -> Result<bool>,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<Option<f64>> {
    if !pred(hi)? {
        return Ok(None);
    }
    if pred(lo)? {
        return Ok(Some(lo));
    }
    let (mut a, mut b) = (lo, hi);
    while b - a > tol {
        let mid = 0.5 * (a + b);
        if pred(mid)? {
            b = mid;
        } else {
            a = mid;
        }
    }
    Ok(Some(0.5 * (a + b)))
}

pub fn cluster_boundaries(
    shape: ClusterShape,
    kappa: f64,
    omega: f64,
    t_max: f64,
    tol: f64,
) -> Result<ClusterBoundaries> {
    let t_min = 1e-6;
    let rank = |t: f64| cluster_point(shape, kappa, t, omega).map(|r| r.class.rank());
    Ok(ClusterBoundaries {
        t_a: bisect_threshold(|t| rank(t).map(|c| c > 1.0), t_min, t_max, tol)?,
        t_b: bisect_threshold(|t| rank(t).map(|c| c >= 4.0), t_min, t_max, tol)?,
        t_c: bisect_threshold(|t| rank(t).map(|c| c >= 5.0), t_min, t_max, tol)?,
    })
}
