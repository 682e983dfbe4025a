use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{FamilyKind, SetFamilyHandle};
use crate::densities::Density;
use crate::error::{Error, Result};
use crate::fit::log_log_fit;
use crate::metrics::ecdf_deviations;
use crate::rng;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatePoint {
    pub n: usize,
    pub mean: f64,
    pub stderr: f64,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub reps: usize,
    pub seed: u64,
    pub points: Vec<RatePoint>,
    /// Least-squares slope of `ln mean` against `ln n`.
    pub slope: f64,
    pub slope_stderr: f64,
    /// `exp(intercept)`, so that `mean ≈ constant · n^slope`.
    pub constant: f64,
}

/// `sup_I |F(I) - F_n(I)|` over closed intervals `I`, for sorted samples and a
/// continuous CDF.
pub fn interval_discrepancy(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let (plus, minus) = ecdf_deviations(sorted, cdf);
    plus + minus
}

/// Average interval discrepancy between `f` and its empirical distribution
/// for each `n` in `n_grid`, with a log-log slope fit.
pub fn vc_rate_experiment(
    f: &dyn Density,
    family: &SetFamilyHandle,
    n_grid: &[usize],
    reps: usize,
    seed: u64,
) -> Result<RateReport> {
    if family.kind() != FamilyKind::Intervals1d || f.dim() != 1 {
        return Err(Error::InvalidParameter("rate experiment needs a 1-D density and the interval family".into()));
    }
    if f.interval_mass(f64::NEG_INFINITY, 0.0).is_none() {
        return Err(Error::Unsupported("density has no closed-form CDF".into()));
    }
    if n_grid.len() < 2 || n_grid.contains(&0) || reps == 0 {
        return Err(Error::InvalidParameter("need at least two positive sample sizes and one replicate".into()));
    }
    let cdf = |x: f64| f.interval_mass(f64::NEG_INFINITY, x).unwrap_or(0.0);
    let mut points = Vec::with_capacity(n_grid.len());
    for (g, &n) in n_grid.iter().enumerate() {
        let base = rng::derive_seed(seed, g as u64);
        let values = (0..reps)
            .into_par_iter()
            .map(|r| {
                let mut xs: Vec<f64> =
                    crate::densities::sample(f, rng::derive_seed(base, r as u64), n)?.into_iter().map(|p| p[0]).collect();
                xs.sort_by(f64::total_cmp);
                Ok(interval_discrepancy(&xs, cdf))
            })
            .collect::<Result<Vec<f64>>>()?;
        let sum: f64 = values.iter().sum();
        let sq: f64 = values.iter().map(|v| v * v).sum();
        let (mean, stderr) = rng::mean_stderr(sum, sq, reps);
        points.push(RatePoint { n, mean, stderr, values });
    }
    let ns: Vec<f64> = points.iter().map(|p| p.n as f64).collect();
    let means: Vec<f64> = points.iter().map(|p| p.mean).collect();
    let fit = log_log_fit(&ns, &means)?;
    Ok(RateReport { reps, seed, points, slope: fit.slope, slope_stderr: fit.slope_stderr, constant: fit.intercept.exp() })
}
