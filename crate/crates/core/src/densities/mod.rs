//! Log-concave density families, contamination mixtures and the JSON
//! density specification consumed by the CLI.

mod contaminated;
mod family;
mod spec;

use std::fmt;

pub use contaminated::ContaminatedDensity;
pub use family::{FamilyTag, LogConcaveDensity, SampleStats, DEFAULT_ACCEPTANCE_FLOOR};
pub use spec::{BodySpec, ContaminationSpec, DensitySpec, FamilySpec};

use crate::error::{check_dim, Error, Result};
use crate::rng::{self, Rng};

/// Anything that can be evaluated pointwise as a (possibly sub-normalized)
/// density on `R^d`.
pub trait Density: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;

    /// Pointwise value; `x.len()` must equal `dim()`.
    fn eval(&self, x: &[f64]) -> f64;

    /// Axis box outside of which the mass is negligible (below 1e-10).
    fn support_box(&self) -> (Vec<f64>, Vec<f64>);

    /// Exact draws from the normalized density.
    fn sample(&self, _rng: &mut Rng, _n: usize) -> Result<Vec<Vec<f64>>> {
        Err(Error::Unsupported(format!("no exact sampler for {self:?}")))
    }

    fn can_sample(&self) -> bool {
        false
    }

    /// Whether `eval` integrates to one.
    fn is_normalized(&self) -> bool {
        true
    }

    /// 1-D points where the density jumps or kinks.
    fn breakpoints_1d(&self) -> Vec<f64> {
        Vec::new()
    }

    /// True when a 1-D density is constant between its breakpoints.
    fn is_piecewise_constant_1d(&self) -> bool {
        false
    }

    /// Exact mass of `[a, b]` for 1-D densities with a closed-form CDF.
    fn interval_mass(&self, _a: f64, _b: f64) -> Option<f64> {
        None
    }

    /// `sup_x eval(x)` when known.
    fn max_value_hint(&self) -> Option<f64> {
        None
    }
}

/// Dimension-checked evaluation.
pub fn eval(f: &dyn Density, x: &[f64]) -> Result<f64> {
    check_dim(f.dim(), x.len())?;
    Ok(f.eval(x))
}

/// `n` exact samples drawn from the seeded stream `(seed, 0)`.
pub fn sample(f: &dyn Density, seed: u64, n: usize) -> Result<Vec<Vec<f64>>> {
    if n == 0 {
        return Err(Error::InvalidParameter("sample size must be at least 1".into()));
    }
    let mut rng = rng::stream(seed, 0);
    f.sample(&mut rng, n)
}

#[cfg(test)]
mod tests;
