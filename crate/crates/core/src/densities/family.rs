use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use rand::Rng as _;
use rand_distr::{Open01, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use super::Density;
use crate::error::{check_dim, Error, Result};
use crate::geometry::{BoundedRegion, ConvexBody, CustomBody, Ellipsoid, Halfspace, Polytope};
use crate::rng::Rng;

/// Rejection samplers fail when fewer than this fraction of proposals land.
pub const DEFAULT_ACCEPTANCE_FLOOR: f64 = 1e-3;

/// Proposals drawn before the acceptance floor is enforced.
const MIN_PROPOSALS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyTag {
    Gaussian,
    UniformConvex,
    ProductExponential,
    ProductLaplace,
    Generic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleStats {
    pub proposals: usize,
    pub accepted: usize,
}

impl SampleStats {
    pub fn acceptance_rate(&self) -> f64 {
        if self.proposals == 0 {
            1.0
        } else {
            self.accepted as f64 / self.proposals as f64
        }
    }
}

type Potential = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Family {
    Gaussian {
        mean: Vec<f64>,
        cov: DMatrix<f64>,
        /// Cholesky factor, row-major lower triangle.
        chol: Vec<Vec<f64>>,
        /// Inverse of the Cholesky factor, row-major lower triangle.
        chol_inv: Vec<Vec<f64>>,
        log_norm: f64,
    },
    Uniform {
        body: ConvexBody,
        log_volume: f64,
    },
    ProductExponential {
        rates: Vec<f64>,
    },
    ProductLaplace {
        locations: Vec<f64>,
        scales: Vec<f64>,
    },
    Generic {
        potential: Potential,
        scale: f64,
    },
}

impl fmt::Debug for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Gaussian { mean, cov, .. } => f.debug_struct("Gaussian").field("mean", mean).field("cov", cov).finish(),
            Self::Uniform { body, .. } => f.debug_struct("Uniform").field("body", body).finish(),
            Self::ProductExponential { rates } => f.debug_struct("ProductExponential").field("rates", rates).finish(),
            Self::ProductLaplace { locations, scales } => f
                .debug_struct("ProductLaplace")
                .field("locations", locations)
                .field("scales", scales)
                .finish(),
            Self::Generic { scale, .. } => f.debug_struct("Generic").field("scale", scale).finish_non_exhaustive(),
        }
    }
}

/// A log-concave density `f = exp(potential)` with analytic mode, maximum
/// value and level sets.
#[derive(Debug, Clone)]
pub struct LogConcaveDensity {
    dim: usize,
    family: Family,
    mode: Vec<f64>,
    max_value: f64,
}

fn positive_finite(name: &str, v: &[f64]) -> Result<()> {
    if v.is_empty() {
        return Err(Error::InvalidParameter(format!("{name} is empty")));
    }
    if v.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
        return Err(Error::InvalidParameter(format!("{name} must be positive and finite")));
    }
    Ok(())
}

impl LogConcaveDensity {
    /// `N(mean, cov)`; `cov` must be symmetric positive definite.
    pub fn gaussian(mean: Vec<f64>, cov: Vec<Vec<f64>>) -> Result<Self> {
        let d = mean.len();
        if d == 0 {
            return Err(Error::InvalidParameter("Gaussian mean is empty".into()));
        }
        if cov.len() != d || cov.iter().any(|r| r.len() != d) {
            return Err(Error::DimensionMismatch { expected: d, got: cov.len() });
        }
        if mean.iter().chain(cov.iter().flatten()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("Gaussian parameters must be finite".into()));
        }
        let cov = DMatrix::from_fn(d, d, |i, j| cov[i][j]);
        if (0..d).any(|i| (0..d).any(|j| (cov[(i, j)] - cov[(j, i)]).abs() > 1e-12 * (1.0 + cov[(i, j)].abs()))) {
            return Err(Error::InvalidParameter("covariance must be symmetric".into()));
        }
        let chol = cov
            .clone()
            .cholesky()
            .ok_or_else(|| Error::Degenerate("covariance is not positive definite".into()))?;
        let l = chol.l();
        let l_inv = l
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Degenerate("covariance factor is singular".into()))?;
        let log_det_half: f64 = l.diagonal().iter().map(|v| v.ln()).sum();
        let log_norm = -0.5 * d as f64 * (2.0 * PI).ln() - log_det_half;
        let lower = |m: &DMatrix<f64>| (0..d).map(|i| (0..=i).map(|j| m[(i, j)]).collect()).collect();
        Ok(Self {
            dim: d,
            mode: mean.clone(),
            max_value: log_norm.exp(),
            family: Family::Gaussian {
                chol: lower(&l),
                chol_inv: lower(&l_inv),
                mean,
                cov,
                log_norm,
            },
        })
    }

    /// `N(0, I_d)`.
    pub fn standard_gaussian(dim: usize) -> Result<Self> {
        let cov = (0..dim).map(|i| (0..dim).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
        Self::gaussian(vec![0.0; dim], cov)
    }

    /// Uniform density on a convex body with a closed-form volume.
    pub fn uniform(body: ConvexBody) -> Result<Self> {
        let volume = body
            .exact_volume()
            .ok_or_else(|| Error::Unsupported("uniform density needs a body with exact volume".into()))?;
        if body.is_degenerate(1e-12) || !(volume > 0.0) {
            return Err(Error::Degenerate("uniform density on a body of zero volume".into()));
        }
        Ok(Self {
            dim: body.dim(),
            mode: body.interior_point(),
            max_value: 1.0 / volume,
            family: Family::Uniform {
                body,
                log_volume: volume.ln(),
            },
        })
    }

    /// `prod_k rate_k exp(-rate_k x_k)` on the positive orthant.
    pub fn product_exponential(rates: Vec<f64>) -> Result<Self> {
        positive_finite("exponential rates", &rates)?;
        Ok(Self {
            dim: rates.len(),
            mode: vec![0.0; rates.len()],
            max_value: rates.iter().product(),
            family: Family::ProductExponential { rates },
        })
    }

    /// `prod_k exp(-|x_k - loc_k| / scale_k) / (2 scale_k)`.
    pub fn product_laplace(locations: Vec<f64>, scales: Vec<f64>) -> Result<Self> {
        positive_finite("Laplace scales", &scales)?;
        check_dim(scales.len(), locations.len())?;
        if locations.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("Laplace locations must be finite".into()));
        }
        Ok(Self {
            dim: scales.len(),
            mode: locations.clone(),
            max_value: scales.iter().map(|b| 0.5 / b).product(),
            family: Family::ProductLaplace { locations, scales },
        })
    }

    /// A user-supplied concave potential with a caller-provided mode.
    ///
    /// `scale` must bound the radius of the level set at height `max / e`
    /// around the mode. Local maximality of the mode is verified along the
    /// coordinate axes. There is no exact sampler for this family.
    pub fn generic(dim: usize, potential: Potential, mode: Vec<f64>, scale: f64) -> Result<Self> {
        check_dim(dim, mode.len())?;
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::InvalidParameter(format!("generic scale {scale}")));
        }
        let top = potential(&mode);
        if !top.is_finite() {
            return Err(Error::InvalidParameter("potential is not finite at the mode".into()));
        }
        for h in [1e-4 * scale, 1e-2 * scale, 0.5 * scale] {
            for k in 0..dim {
                for s in [-1.0, 1.0] {
                    let mut x = mode.clone();
                    x[k] += s * h;
                    if potential(&x) > top + 1e-12 * (1.0 + top.abs()) {
                        return Err(Error::InvalidParameter(format!(
                            "supplied mode is not a maximum: potential increases along axis {k}"
                        )));
                    }
                }
            }
        }
        Ok(Self {
            dim,
            mode,
            max_value: top.exp(),
            family: Family::Generic { potential, scale },
        })
    }

    pub fn family_tag(&self) -> FamilyTag {
        match self.family {
            Family::Gaussian { .. } => FamilyTag::Gaussian,
            Family::Uniform { .. } => FamilyTag::UniformConvex,
            Family::ProductExponential { .. } => FamilyTag::ProductExponential,
            Family::ProductLaplace { .. } => FamilyTag::ProductLaplace,
            Family::Generic { .. } => FamilyTag::Generic,
        }
    }

    pub fn mode(&self) -> &[f64] {
        &self.mode
    }

    /// `M_f`, the maximum of the density.
    pub fn max_value(&self) -> f64 {
        self.max_value
    }

    /// The support body of a uniform density.
    pub fn uniform_body(&self) -> Option<&ConvexBody> {
        match &self.family {
            Family::Uniform { body, .. } => Some(body),
            _ => None,
        }
    }

    /// `log f(x)`, `-inf` off the support.
    pub fn potential(&self, x: &[f64]) -> f64 {
        match &self.family {
            Family::Gaussian { mean, chol_inv, log_norm, .. } => {
                let mut q = 0.0;
                for row in chol_inv {
                    let z: f64 = row.iter().enumerate().map(|(j, l)| l * (x[j] - mean[j])).sum();
                    q += z * z;
                }
                log_norm - 0.5 * q
            }
            Family::Uniform { body, log_volume } => {
                if body.contains_point(x) {
                    -log_volume
                } else {
                    f64::NEG_INFINITY
                }
            }
            Family::ProductExponential { rates } => {
                if x.iter().any(|v| *v < 0.0) {
                    f64::NEG_INFINITY
                } else {
                    rates.iter().zip(x).map(|(r, v)| r.ln() - r * v).sum()
                }
            }
            Family::ProductLaplace { locations, scales } => locations
                .iter()
                .zip(scales)
                .zip(x)
                .map(|((m, b), v)| -(2.0 * b).ln() - (v - m).abs() / b)
                .sum(),
            Family::Generic { potential, .. } => potential(x),
        }
    }

    /// Superlevel set `{x : f(x) >= y}`; `None` when `y` exceeds the maximum.
    pub fn level_set(&self, y: f64) -> Result<Option<ConvexBody>> {
        if !(y > 0.0 && y.is_finite()) {
            return Err(Error::InvalidParameter(format!("level must be positive, got {y}")));
        }
        if y > self.max_value * (1.0 + 1e-12) {
            return Ok(None);
        }
        // height below the top, in nats
        let depth = (self.max_value / y).ln().max(0.0);
        let body = match &self.family {
            Family::Gaussian { mean, cov, .. } => {
                ConvexBody::Ellipsoid(Ellipsoid::new(mean.clone(), cov.clone(), 2.0 * depth)?)
            }
            Family::Uniform { body, .. } => body.clone(),
            Family::ProductExponential { rates } => {
                let d = self.dim;
                let mut halfspaces = Vec::with_capacity(d + 1);
                for k in 0..d {
                    let mut e = vec![0.0; d];
                    e[k] = -1.0;
                    halfspaces.push(Halfspace::new(e, 0.0)?);
                }
                halfspaces.push(Halfspace::new(rates.clone(), depth)?);
                let mut vertices = vec![vec![0.0; d]];
                for k in 0..d {
                    let mut v = vec![0.0; d];
                    v[k] = depth / rates[k];
                    vertices.push(v);
                }
                ConvexBody::Polytope(Polytope::from_parts(d, halfspaces, vertices))
            }
            Family::ProductLaplace { locations, scales } => {
                let d = self.dim;
                let mut halfspaces = Vec::with_capacity(1 << d);
                for mask in 0..1usize << d {
                    let sign = |k: usize| if mask >> k & 1 == 1 { -1.0 } else { 1.0 };
                    let normal: Vec<f64> = (0..d).map(|k| sign(k) / scales[k]).collect();
                    let offset = depth + (0..d).map(|k| sign(k) * locations[k] / scales[k]).sum::<f64>();
                    halfspaces.push(Halfspace::new(normal, offset)?);
                }
                let mut vertices = Vec::with_capacity(2 * d);
                for k in 0..d {
                    for s in [1.0, -1.0] {
                        let mut v = locations.clone();
                        v[k] += s * depth * scales[k];
                        vertices.push(v);
                    }
                }
                ConvexBody::Polytope(Polytope::from_parts(d, halfspaces, vertices))
            }
            Family::Generic { potential, scale } => {
                let log_y = y.ln();
                let slack = 1e-12 * (1.0 + log_y.abs());
                let p = potential.clone();
                let radius = scale * (2.0 * depth).max(1.0);
                let lo = self.mode.iter().map(|m| m - radius).collect();
                let hi = self.mode.iter().map(|m| m + radius).collect();
                ConvexBody::Custom(CustomBody::new(
                    Arc::new(move |x: &[f64]| p(x) >= log_y - slack),
                    self.mode.clone(),
                    lo,
                    hi,
                    None,
                )?)
            }
        };
        Ok(Some(body))
    }

    /// Exact samples plus rejection statistics.
    pub fn sample_with_stats(&self, rng: &mut Rng, n: usize, acceptance_floor: f64) -> Result<(Vec<Vec<f64>>, SampleStats)> {
        let d = self.dim;
        let mut out = Vec::with_capacity(n);
        let mut stats = SampleStats { proposals: 0, accepted: 0 };
        match &self.family {
            Family::Gaussian { mean, chol, .. } => {
                for _ in 0..n {
                    let z: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
                    out.push(
                        (0..d)
                            .map(|i| mean[i] + chol[i].iter().zip(&z).map(|(l, zj)| l * zj).sum::<f64>())
                            .collect(),
                    );
                }
            }
            Family::ProductExponential { rates } => {
                for _ in 0..n {
                    out.push(
                        rates
                            .iter()
                            .map(|r| {
                                let u: f64 = rng.sample(Open01);
                                -u.ln() / r
                            })
                            .collect(),
                    );
                }
            }
            Family::ProductLaplace { locations, scales } => {
                for _ in 0..n {
                    out.push(
                        locations
                            .iter()
                            .zip(scales)
                            .map(|(m, b)| {
                                let u: f64 = rng.sample::<f64, _>(Open01) - 0.5;
                                m - b * u.signum() * (1.0 - 2.0 * u.abs()).ln()
                            })
                            .collect(),
                    );
                }
            }
            Family::Uniform { body, .. } => {
                let (lo, hi) = body.bounding_box()?;
                while out.len() < n {
                    let x: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| a + (b - a) * rng.random::<f64>()).collect();
                    stats.proposals += 1;
                    if body.contains_point(&x) {
                        out.push(x);
                    }
                    if stats.proposals >= MIN_PROPOSALS
                        && (out.len() as f64) < acceptance_floor * stats.proposals as f64
                    {
                        return Err(Error::LowAcceptance {
                            rate: out.len() as f64 / stats.proposals as f64,
                            floor: acceptance_floor,
                        });
                    }
                }
                log::debug!(
                    "uniform rejection sampler: acceptance {:.4} over {} proposals",
                    out.len() as f64 / stats.proposals as f64,
                    stats.proposals
                );
            }
            Family::Generic { .. } => {
                return Err(Error::Unsupported("generic log-concave densities have no exact sampler".into()))
            }
        }
        stats.accepted = out.len();
        if stats.proposals == 0 {
            stats.proposals = out.len();
        }
        Ok((out, stats))
    }

    /// Marginal CDF of a 1-D density.
    fn cdf_1d(&self, x: f64) -> Option<f64> {
        if self.dim != 1 {
            return None;
        }
        Some(match &self.family {
            Family::Gaussian { mean, cov, .. } => Normal::new(mean[0], cov[(0, 0)].sqrt()).ok()?.cdf(x),
            Family::Uniform { body, .. } => {
                let (lo, hi) = body.bounding_box().ok()?;
                ((x - lo[0]) / (hi[0] - lo[0])).clamp(0.0, 1.0)
            }
            Family::ProductExponential { rates } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-rates[0] * x).exp_m1()
                }
            }
            Family::ProductLaplace { locations, scales } => {
                let z = (x - locations[0]) / scales[0];
                if z < 0.0 {
                    0.5 * z.exp()
                } else {
                    1.0 - 0.5 * (-z).exp()
                }
            }
            Family::Generic { .. } => return None,
        })
    }

    /// Axis box holding all but a negligible fraction of the mass.
    fn spread(&self) -> (Vec<f64>, Vec<f64>) {
        match &self.family {
            Family::Gaussian { mean, cov, .. } => {
                let lo = (0..self.dim).map(|k| mean[k] - 7.0 * cov[(k, k)].sqrt()).collect();
                let hi = (0..self.dim).map(|k| mean[k] + 7.0 * cov[(k, k)].sqrt()).collect();
                (lo, hi)
            }
            Family::Uniform { body, .. } => body.bounding_box().expect("uniform body is bounded"),
            Family::ProductExponential { rates } => (vec![0.0; self.dim], rates.iter().map(|r| 28.0 / r).collect()),
            Family::ProductLaplace { locations, scales } => (
                locations.iter().zip(scales).map(|(m, b)| m - 28.0 * b).collect(),
                locations.iter().zip(scales).map(|(m, b)| m + 28.0 * b).collect(),
            ),
            Family::Generic { scale, .. } => (
                self.mode.iter().map(|m| m - 28.0 * scale).collect(),
                self.mode.iter().map(|m| m + 28.0 * scale).collect(),
            ),
        }
    }
}

impl Density for LogConcaveDensity {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, x: &[f64]) -> f64 {
        self.potential(x).exp()
    }

    fn support_box(&self) -> (Vec<f64>, Vec<f64>) {
        self.spread()
    }

    fn sample(&self, rng: &mut Rng, n: usize) -> Result<Vec<Vec<f64>>> {
        self.sample_with_stats(rng, n, DEFAULT_ACCEPTANCE_FLOOR).map(|(s, _)| s)
    }

    fn can_sample(&self) -> bool {
        !matches!(self.family, Family::Generic { .. })
    }

    fn breakpoints_1d(&self) -> Vec<f64> {
        if self.dim != 1 {
            return Vec::new();
        }
        match &self.family {
            Family::Uniform { body, .. } => body
                .bounding_box()
                .map(|(lo, hi)| vec![lo[0], hi[0]])
                .unwrap_or_default(),
            Family::ProductExponential { .. } => vec![0.0],
            Family::ProductLaplace { locations, .. } => vec![locations[0]],
            _ => Vec::new(),
        }
    }

    fn is_piecewise_constant_1d(&self) -> bool {
        self.dim == 1 && matches!(self.family, Family::Uniform { .. })
    }

    fn interval_mass(&self, a: f64, b: f64) -> Option<f64> {
        if b <= a {
            return Some(0.0);
        }
        Some((self.cdf_1d(b)? - self.cdf_1d(a)?).max(0.0))
    }

    fn max_value_hint(&self) -> Option<f64> {
        Some(self.max_value)
    }
}
