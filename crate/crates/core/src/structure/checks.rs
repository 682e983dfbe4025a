use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::PiecewisePolytopeDensity;
use crate::densities::{Density, LogConcaveDensity};
use crate::error::{Error, Result};
use crate::geometry::{volume, BoundedRegion, VolumeMethod};
use crate::metrics::{DistanceEstimate, Method};
use crate::rng::{derive_seed, mean_stderr, merge_moments, par_chunks};

/// `∫_0^{y_cut} vol(L_f(y)) dy`, computed through the layer-cake identity as
/// `P_f(f(X) <= y_cut)`. Returns `(value, stderr)`.
pub fn tail_mass(f: &dyn Density, y_cut: f64, samples: usize, seed: u64) -> Result<(f64, f64)> {
    let top = f
        .max_value_hint()
        .ok_or_else(|| Error::Unsupported("tail mass needs the maximum of f".into()))?;
    if !(y_cut > 0.0 && y_cut <= top * (1.0 + 1e-12)) {
        return Err(Error::InvalidParameter(format!("y_cut = {y_cut} outside (0, {top}]")));
    }
    if samples == 0 {
        return Err(Error::BudgetExhausted("no samples for the tail mass".into()));
    }
    if f.can_sample() && f.is_normalized() {
        let parts = par_chunks(seed, samples, |rng, len| -> Result<(f64, f64)> {
            let hits = f.sample(rng, len)?.iter().filter(|x| f.eval(x) <= y_cut).count() as f64;
            Ok((hits, hits))
        });
        let parts = parts.into_iter().collect::<Result<Vec<_>>>()?;
        let (s, q) = merge_moments(&parts);
        return Ok(mean_stderr(s, q, samples));
    }
    let (lo, hi) = f.support_box();
    let vol: f64 = lo.iter().zip(&hi).map(|(a, b)| b - a).product();
    let parts = par_chunks(seed, samples, |rng, len| {
        let mut x = vec![0.0; lo.len()];
        let (mut s, mut q) = (0.0, 0.0);
        for _ in 0..len {
            for k in 0..x.len() {
                x[k] = lo[k] + (hi[k] - lo[k]) * rng.random::<f64>();
            }
            let fx = f.eval(&x);
            let v = if fx <= y_cut { vol * fx } else { 0.0 };
            s += v;
            q += v * v;
        }
        (s, q)
    });
    let (s, q) = merge_moments(&parts);
    Ok(mean_stderr(s, q, samples))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SandwichReport {
    pub y: f64,
    /// `vol(L_g(y))`.
    pub lhs: f64,
    pub lhs_stderr: f64,
    /// `(1 - ε) vol(L_f(y / (1 - ε)))`.
    pub rhs: f64,
    pub rhs_stderr: f64,
    pub pass: bool,
}

fn region_volume(region: &dyn BoundedRegion, samples: usize, seed: u64) -> Result<(f64, f64)> {
    let v = volume(region, VolumeMethod::Auto, samples, seed)?;
    Ok((v.value, v.stderr))
}

/// Checks `vol(L_g(y)) >= (1 - ε) vol(L_f(y / (1 - ε)))` within three
/// combined standard errors, for `y` in `[y_L, y_1]`.
pub fn volume_sandwich_check(
    f: &LogConcaveDensity,
    g: &PiecewisePolytopeDensity,
    y: f64,
    samples: usize,
    seed: u64,
) -> Result<SandwichReport> {
    let (Some(first), Some(last)) = (g.levels().first(), g.levels().last()) else {
        return Err(Error::Degenerate("g has no levels".into()));
    };
    let slack = 1e-12 * first.y;
    if !(y >= last.y - slack && y <= first.y + slack) {
        return Err(Error::InvalidParameter(format!("y = {y} outside [{}, {}]", last.y, first.y)));
    }
    let eps = g.epsilon();
    let (lhs, lhs_stderr) = region_volume(&g.level_set_of_g(y)?, samples, derive_seed(seed, 1))?;
    let (rhs, rhs_stderr) = match f.level_set(y / (1.0 - eps))? {
        Some(body) => {
            let (v, s) = region_volume(&body, samples, derive_seed(seed, 2))?;
            ((1.0 - eps) * v, (1.0 - eps) * s)
        }
        None => (0.0, 0.0),
    };
    let combined = (lhs_stderr * lhs_stderr + rhs_stderr * rhs_stderr).sqrt();
    let pass = lhs >= rhs - 3.0 * combined - 1e-12 * rhs.abs();
    Ok(SandwichReport { y, lhs, lhs_stderr, rhs, rhs_stderr, pass })
}

/// `‖f - g‖₁` by importance sampling from `f`, plus the mass of `g` where
/// `f` vanishes (box Monte Carlo over the support of `g`).
pub fn l1_error(f: &LogConcaveDensity, g: &PiecewisePolytopeDensity, samples: usize, seed: u64) -> Result<DistanceEstimate> {
    if samples < 2 {
        return Err(Error::BudgetExhausted("l1 error needs samples".into()));
    }
    crate::error::check_dim(f.dim(), g.dim())?;
    let parts = par_chunks(derive_seed(seed, 1), samples, |rng, len| -> Result<(f64, f64)> {
        let (mut s, mut q) = (0.0, 0.0);
        for x in f.sample(rng, len)? {
            let fx = f.eval(&x);
            let v = if fx > 0.0 { (1.0 - g.eval(&x) / fx).abs() } else { 0.0 };
            s += v;
            q += v * v;
        }
        Ok((s, q))
    });
    let parts = parts.into_iter().collect::<Result<Vec<_>>>()?;
    let (s, q) = merge_moments(&parts);
    let (inside, inside_se) = mean_stderr(s, q, samples);

    let (lo, hi) = g.support_box();
    let vol: f64 = lo.iter().zip(&hi).map(|(a, b)| b - a).product();
    let parts = par_chunks(derive_seed(seed, 2), samples, |rng, len| {
        let mut x = vec![0.0; lo.len()];
        let (mut s, mut q) = (0.0, 0.0);
        for _ in 0..len {
            for k in 0..x.len() {
                x[k] = lo[k] + (hi[k] - lo[k]) * rng.random::<f64>();
            }
            if f.eval(&x) == 0.0 {
                let v = vol * g.eval(&x);
                s += v;
                q += v * v;
            }
        }
        (s, q)
    });
    let (s, q) = merge_moments(&parts);
    let (outside, outside_se) = mean_stderr(s, q, samples);
    Ok(DistanceEstimate {
        value: inside + outside,
        stderr: (inside_se * inside_se + outside_se * outside_se).sqrt(),
        method: Method::MonteCarlo,
    })
}
