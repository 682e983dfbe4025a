//! The piecewise-polytope class `C_{d,ε}`: level ladders, inscribed-polytope
//! approximation of log-concave densities, and numerical checks of the
//! tail and volume-sandwich claims.

mod build;
mod checks;
mod piecewise;

use serde::{Deserialize, Serialize};

pub use build::{build_approximation, BuildDiagnostics, LevelDiagnostic, SkipReason, SkippedLevel};
pub use checks::{l1_error, tail_mass, volume_sandwich_check, SandwichReport};
pub use piecewise::{Level, LevelUnion, PiecewisePolytopeDensity};

use crate::error::{Error, Result};

/// Relative slack absorbed before rounding up, so that quantities equal to
/// an integer up to floating-point noise are not bumped to the next one.
pub(crate) fn ceil_slack(v: f64) -> f64 {
    (v * (1.0 - 1e-12)).ceil()
}

/// Constants of the approximation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ApproxConfig {
    pub epsilon: f64,
    /// Multiplier in the number of levels `L`.
    pub c_l: f64,
    /// Multiplier inside the facet budget `H`.
    pub c_h: f64,
    /// Base constant of `δ = ε² / (c_δ d)^{2d}`.
    pub c_delta: f64,
    /// Monte Carlo samples for volumes without closed forms.
    pub mc_budget: usize,
    /// Boundary bisection and degeneracy tolerance.
    pub tol: f64,
}

impl Default for ApproxConfig {
    fn default() -> Self {
        Self {
            epsilon: 0.1,
            c_l: 6.0,
            c_h: 4.0,
            c_delta: 2.0,
            mc_budget: 200_000,
            tol: 1e-10,
        }
    }
}

impl ApproxConfig {
    pub fn with_epsilon(epsilon: f64) -> Self {
        Self { epsilon, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        check_epsilon(self.epsilon)?;
        if !(self.c_l >= 1.0 && self.c_h >= 1.0) {
            return Err(Error::InvalidParameter(format!("c_L = {}, c_H = {} must be >= 1", self.c_l, self.c_h)));
        }
        if !(self.c_delta > 0.0 && self.tol > 0.0) {
            return Err(Error::InvalidParameter("c_delta and tol must be positive".into()));
        }
        if self.mc_budget == 0 {
            return Err(Error::InvalidParameter("mc_budget must be positive".into()));
        }
        Ok(())
    }

    /// `δ = ε² / (c_δ d)^{2d}`.
    pub fn delta(&self, dim: usize) -> f64 {
        let d = dim as f64;
        self.epsilon * self.epsilon / (self.c_delta * d).powf(2.0 * d)
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon <= 0.5) {
        return Err(Error::InvalidParameter(format!("epsilon = {epsilon} outside (0, 1/2]")));
    }
    Ok(())
}

/// `L = ⌈c_L((1/ε)ln(1/ε) + d ln max(d, 2))⌉` and `H = ⌈(c_H d/ε)^{(d-1)/2}⌉`.
pub fn class_params(dim: usize, epsilon: f64, c_l: f64, c_h: f64) -> Result<(usize, usize)> {
    check_epsilon(epsilon)?;
    if dim == 0 {
        return Err(Error::InvalidParameter("dimension must be at least 1".into()));
    }
    let d = dim as f64;
    let l = ceil_slack(c_l * ((1.0 / epsilon) * (1.0 / epsilon).ln() + d * d.max(2.0).ln()));
    let h = ceil_slack((c_h * d / epsilon).powf(0.5 * (d - 1.0)));
    Ok((l.max(1.0) as usize, h.max(1.0) as usize))
}

/// `y_i = M (1-ε)^i` for `i = 1..=L`.
pub fn ladder(max_value: f64, epsilon: f64, levels: usize) -> Result<Vec<f64>> {
    if !(max_value > 0.0 && max_value.is_finite()) {
        return Err(Error::InvalidParameter(format!("M_f = {max_value}")));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) || levels == 0 {
        return Err(Error::InvalidParameter(format!("ladder with ε = {epsilon}, L = {levels}")));
    }
    let r = 1.0 - epsilon;
    let mut out = Vec::with_capacity(levels);
    let mut y = max_value;
    for _ in 0..levels {
        let next = y * r;
        if !(next > 0.0 && next < y) {
            return Err(Error::InvalidParameter("ladder underflows before reaching L levels".into()));
        }
        y = next;
        out.push(y);
    }
    Ok(out)
}

#[cfg(test)]
mod tests;
