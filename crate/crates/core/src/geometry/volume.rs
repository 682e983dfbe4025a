use rand::Rng as _;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use super::body::{shoelace, BoundedRegion};
use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VolumeMethod {
    /// Length of a 1-D interval.
    Exact1d,
    /// Shoelace formula on a planar vertex cycle.
    Exact2d,
    /// Analytic volume of a ball, ellipsoid or box.
    ClosedForm,
    /// Hit fraction times bounding-box volume.
    MonteCarlo,
    /// First applicable exact method, falling back to Monte Carlo.
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VolumeEstimate {
    pub value: f64,
    pub stderr: f64,
    pub method: VolumeMethod,
    pub sample_count: usize,
}

impl VolumeEstimate {
    fn exact(value: f64, method: VolumeMethod) -> Self {
        Self {
            value,
            stderr: 0.0,
            method,
            sample_count: 0,
        }
    }
}

/// Volume of the Euclidean unit ball in `R^dim`.
pub fn unit_ball_volume(dim: usize) -> f64 {
    let d = dim as f64;
    (0.5 * d * std::f64::consts::PI.ln() - ln_gamma(0.5 * d + 1.0)).exp()
}

/// Lebesgue volume of a bounded region.
pub fn volume(region: &dyn BoundedRegion, method: VolumeMethod, samples: usize, seed: u64) -> Result<VolumeEstimate> {
    let dim = region.dim();
    match method {
        VolumeMethod::Exact1d => {
            if dim != 1 {
                return Err(Error::InvalidParameter(format!("exact-1d volume requested for d = {dim}")));
            }
            let (lo, hi) = region.bounding_box()?;
            Ok(VolumeEstimate::exact(hi[0] - lo[0], method))
        }
        VolumeMethod::Exact2d => {
            if dim != 2 {
                return Err(Error::InvalidParameter(format!("exact-2d volume requested for d = {dim}")));
            }
            let cycle = region
                .vertex_cycle_2d()
                .ok_or_else(|| Error::Unsupported("exact-2d volume needs a vertex cache".into()))?;
            Ok(VolumeEstimate::exact(shoelace(&cycle), method))
        }
        VolumeMethod::ClosedForm => region
            .exact_volume()
            .map(|v| VolumeEstimate::exact(v, method))
            .ok_or_else(|| Error::Unsupported("no closed-form volume for this region".into())),
        VolumeMethod::MonteCarlo => monte_carlo(region, samples, seed),
        VolumeMethod::Auto => {
            if dim == 1 {
                volume(region, VolumeMethod::Exact1d, samples, seed)
            } else if dim == 2 && region.vertex_cycle_2d().is_some() {
                volume(region, VolumeMethod::Exact2d, samples, seed)
            } else if let Some(v) = region.exact_volume() {
                Ok(VolumeEstimate::exact(v, VolumeMethod::ClosedForm))
            } else {
                monte_carlo(region, samples, seed)
            }
        }
    }
}

fn monte_carlo(region: &dyn BoundedRegion, samples: usize, seed: u64) -> Result<VolumeEstimate> {
    if samples == 0 {
        return Err(Error::BudgetExhausted("Monte Carlo volume needs at least one sample".into()));
    }
    let (lo, hi) = region.bounding_box()?;
    if lo.iter().chain(&hi).any(|v| !v.is_finite()) {
        return Err(Error::Unbounded("bounding box is not finite".into()));
    }
    let box_vol: f64 = lo.iter().zip(&hi).map(|(a, b)| b - a).product();
    let hits: usize = rng::par_chunks(seed, samples, |rng, len| {
        let mut x = vec![0.0; lo.len()];
        let mut count = 0usize;
        for _ in 0..len {
            for k in 0..x.len() {
                x[k] = lo[k] + (hi[k] - lo[k]) * rng.random::<f64>();
            }
            if region.contains_point(&x) {
                count += 1;
            }
        }
        count
    })
    .into_iter()
    .sum();
    let p = hits as f64 / samples as f64;
    Ok(VolumeEstimate {
        value: box_vol * p,
        stderr: box_vol * (p * (1.0 - p) / samples as f64).sqrt(),
        method: VolumeMethod::MonteCarlo,
        sample_count: samples,
    })
}
