use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::GaussianState;

/// `u = Σ h_i x_i`, `v = Σ g_i p_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarianceCriterion {
    pub h: Vec<f64>,
    pub g: Vec<f64>,
}

impl VarianceCriterion {
    pub fn new(h: Vec<f64>, g: Vec<f64>) -> Result<Self> {
        if h.len() != g.len() || h.is_empty() {
            return Err(Error::ShapeMismatch(format!(
                "h has {} entries, g has {}",
                h.len(),
                g.len()
            )));
        }
        if h.iter().chain(g.iter()).all(|&c| c == 0.0) {
            return Err(Error::InvalidParameter("h and g are both zero".into()));
        }
        Ok(Self { h, g })
    }

    /// `u = |λ| x_1 − x_2/λ`, `v = |λ| p_1 + p_2/λ`.
    pub fn duan(lambda: f64) -> Result<Self> {
        if lambda == 0.0 || !lambda.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "lambda must be finite and nonzero, got {lambda}"
            )));
        }
        Self::new(
            vec![lambda.abs(), -1.0 / lambda],
            vec![lambda.abs(), 1.0 / lambda],
        )
    }

    fn n_modes(&self) -> usize {
        self.h.len()
    }

    fn u_coefficients(&self) -> DVector<f64> {
        let mut v = DVector::zeros(2 * self.n_modes());
        for (i, &c) in self.h.iter().enumerate() {
            v[2 * i] = c;
        }
        v
    }

    fn v_coefficients(&self) -> DVector<f64> {
        let mut v = DVector::zeros(2 * self.n_modes());
        for (i, &c) in self.g.iter().enumerate() {
            v[2 * i + 1] = c;
        }
        v
    }

    /// `|h_l g_l + Σ_I h g| + |h_m g_m + Σ_I' h g|`.
    pub fn bound(&self, split: &Splitting) -> f64 {
        let part = |lead: usize, rest: &[usize]| {
            (self.h[lead] * self.g[lead] + rest.iter().map(|&r| self.h[r] * self.g[r]).sum::<f64>())
                .abs()
        };
        part(split.l, &split.i) + part(split.m, &split.i_prime)
    }
}

/// Two distinguished modes `l`, `m` and the groups `I`, `I'` joined to them.
/// The bound holds for every state separable across `{l} ∪ I | {m} ∪ I'`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Splitting {
    pub l: usize,
    pub m: usize,
    pub i: Vec<usize>,
    pub i_prime: Vec<usize>,
}

impl Splitting {
    pub fn new(
        l: usize,
        m: usize,
        i: Vec<usize>,
        i_prime: Vec<usize>,
        n_modes: usize,
    ) -> Result<Self> {
        let mut seen = vec![false; n_modes];
        for &k in [l, m].iter().chain(i.iter()).chain(i_prime.iter()) {
            if k >= n_modes {
                return Err(Error::BadPartition(format!(
                    "mode {k} out of range for {n_modes} modes"
                )));
            }
            if seen[k] {
                return Err(Error::BadPartition(format!("mode {k} appears twice")));
            }
            seen[k] = true;
        }
        if seen.iter().any(|&s| !s) {
            return Err(Error::BadPartition(
                "splitting does not cover every mode".into(),
            ));
        }
        Ok(Self { l, m, i, i_prime })
    }

    pub fn two_mode() -> Self {
        Self {
            l: 0,
            m: 1,
            i: vec![],
            i_prime: vec![],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarianceReport {
    pub var_u: f64,
    pub var_v: f64,
    /// `f ħ`.
    pub bound: f64,
    /// `Δ²u + Δ²v − f ħ`; negative certifies entanglement.
    pub margin: f64,
}

impl VarianceReport {
    pub fn violated(&self) -> bool {
        self.margin < 0.0
    }
}

/// Second moments only; the displacement never enters.
pub fn variance_inequality(
    state: &GaussianState,
    crit: &VarianceCriterion,
    split: &Splitting,
) -> Result<VarianceReport> {
    if crit.n_modes() != state.n_modes() {
        return Err(Error::ShapeMismatch(format!(
            "criterion for {} modes on a {}-mode state",
            crit.n_modes(),
            state.n_modes()
        )));
    }
    Splitting::new(
        split.l,
        split.m,
        split.i.clone(),
        split.i_prime.clone(),
        state.n_modes(),
    )?;
    let var_u = state.variance_of(&crit.u_coefficients())?;
    let var_v = state.variance_of(&crit.v_coefficients())?;
    let bound = crit.bound(split) * state.hbar();
    Ok(VarianceReport {
        var_u,
        var_v,
        bound,
        margin: var_u + var_v - bound,
    })
}

/// Two-mode Duan test with weight `λ`.
pub fn duan(state: &GaussianState, lambda: f64) -> Result<VarianceReport> {
    variance_inequality(
        state,
        &VarianceCriterion::duan(lambda)?,
        &Splitting::two_mode(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vacuum_saturates_the_bound() {
        let r = duan(&GaussianState::vacuum(2), 1.0).unwrap();
        assert_eq!(r.var_u, 1.0);
        assert_eq!(r.var_v, 1.0);
        assert_eq!(r.bound, 2.0);
        assert_eq!(r.margin, 0.0);
    }

    #[test]
    fn duan_bound_for_general_lambda() {
        let c = VarianceCriterion::duan(0.5).unwrap();
        assert!((c.bound(&Splitting::two_mode()) - (0.25 + 4.0)).abs() < 1e-15);
    }

    #[test]
    fn epr_pair_violates() {
        // var(x1 - x2) large, so use the squeezed pair x1 + x2, p1 - p2
        let s = GaussianState::two_mode_squeezed(0.5);
        let c = VarianceCriterion::new(vec![1.0, 1.0], vec![1.0, -1.0]).unwrap();
        let r = variance_inequality(&s, &c, &Splitting::two_mode()).unwrap();
        assert!((r.var_u - (-1.0f64).exp()).abs() < 1e-12);
        assert!(r.violated());
    }

    #[test]
    fn thermal_product_margin() {
        let s = GaussianState::thermal(&[2.0, 3.0]).unwrap();
        let r = duan(&s, 1.0).unwrap();
        assert!((r.margin - 3.0).abs() < 1e-14);
    }

    #[test]
    fn splitting_validation() {
        assert!(matches!(
            Splitting::new(0, 0, vec![], vec![1], 2),
            Err(Error::BadPartition(_))
        ));
        assert!(matches!(
            Splitting::new(0, 1, vec![], vec![], 3),
            Err(Error::BadPartition(_))
        ));
        assert!(Splitting::new(0, 2, vec![1], vec![], 3).is_ok());
    }

    #[test]
    fn zero_criterion_rejected() {
        assert!(VarianceCriterion::new(vec![0.0], vec![0.0]).is_err());
        assert!(VarianceCriterion::duan(0.0).is_err());
    }
}
