//! Total variation and Hellinger distances, set integrals, empirical
//! measures and the A-norm.

mod empirical;
mod quadrature;
mod region;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

pub use empirical::{ecdf_deviations, empirical_measure, EmpiricalDistribution};
pub use region::{EmptySet, Interval, IntervalUnion, Predicate, PredicateSet, Region, WholeSpace};

pub(crate) use quadrature::integrate_split;

use crate::densities::Density;
use crate::error::{check_dim, Error, Result};
use crate::rng::{derive_seed, mean_stderr, merge_moments, par_chunks};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Grid1d,
    MonteCarlo,
}

/// Integration settings shared by every estimator in this module.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IntegrationConfig {
    /// `None` picks `Grid1d` in one dimension and `MonteCarlo` otherwise.
    pub method: Option<Method>,
    /// Monte Carlo sample count.
    pub samples: usize,
    /// Maximum integrand evaluations for 1-D quadrature.
    pub evals: usize,
    /// Absolute tolerance for 1-D quadrature.
    pub tol: f64,
    pub seed: u64,
}

impl Default for IntegrationConfig {
    fn default() -> Self {
        Self {
            method: None,
            samples: 200_000,
            evals: 5_000_000,
            tol: 1e-9,
            seed: 0,
        }
    }
}

impl IntegrationConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }

    fn method_for(&self, dim: usize) -> Result<Method> {
        match (self.method, dim) {
            (Some(Method::Grid1d), d) if d != 1 => Err(Error::Unsupported("grid integration is 1-D only".into())),
            (Some(m), _) => Ok(m),
            (None, 1) => Ok(Method::Grid1d),
            (None, _) => Ok(Method::MonteCarlo),
        }
    }
}

/// A distance value with a one-standard-error bar (Monte Carlo) or a
/// discretization bound (grid).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceEstimate {
    pub value: f64,
    pub stderr: f64,
    pub method: Method,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HellingerEstimate {
    pub h: DistanceEstimate,
    pub h_squared: DistanceEstimate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IntegralMethod {
    /// Closed-form interval masses over the gaps of a 1-D set.
    Exact1d,
    Quadrature1d,
    /// Fraction of the density's own samples landing in the set.
    OwnSamples,
    /// Uniform sampling over the density's support box.
    BoxMonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegralEstimate {
    pub value: f64,
    pub stderr: f64,
    pub method: IntegralMethod,
}

#[derive(Debug, Clone, Copy)]
enum Pair {
    L1,
    HellingerSq,
}

impl Pair {
    fn integrand(self, f: f64, g: f64) -> f64 {
        match self {
            Self::L1 => (f - g).abs(),
            Self::HellingerSq => {
                let d = f.sqrt() - g.sqrt();
                d * d
            }
        }
    }

    /// Integrand divided by the mixture `(f + g) / 2`.
    fn mixture_weight(self, f: f64, g: f64) -> f64 {
        let s = f + g;
        if s <= 0.0 {
            0.0
        } else {
            2.0 * self.integrand(f, g) / s
        }
    }
}

fn union_box(f: &dyn Density, g: &dyn Density) -> (Vec<f64>, Vec<f64>) {
    let (mut lo, mut hi) = f.support_box();
    let (glo, ghi) = g.support_box();
    for k in 0..lo.len() {
        lo[k] = lo[k].min(glo[k]);
        hi[k] = hi[k].max(ghi[k]);
    }
    (lo, hi)
}

fn splits_1d(densities: &[&dyn Density]) -> Vec<f64> {
    let mut s = Vec::new();
    for f in densities {
        let (lo, hi) = f.support_box();
        s.push(lo[0]);
        s.push(hi[0]);
        s.extend(f.breakpoints_1d());
    }
    s
}

fn box_mc(dim_box: &(Vec<f64>, Vec<f64>), samples: usize, seed: u64, value: impl Fn(&[f64]) -> f64 + Sync) -> (f64, f64) {
    let (lo, hi) = dim_box;
    let vol: f64 = lo.iter().zip(hi).map(|(a, b)| b - a).product();
    let parts = par_chunks(seed, samples, |rng, len| {
        let mut x = vec![0.0; lo.len()];
        let (mut s, mut q) = (0.0, 0.0);
        for _ in 0..len {
            for k in 0..x.len() {
                x[k] = lo[k] + (hi[k] - lo[k]) * rng.random::<f64>();
            }
            let v = vol * value(&x);
            s += v;
            q += v * v;
        }
        (s, q)
    });
    let (s, q) = merge_moments(&parts);
    mean_stderr(s, q, samples)
}

fn mean_over_samples(
    source: &dyn Density,
    samples: usize,
    seed: u64,
    value: impl Fn(&[f64]) -> f64 + Sync,
) -> Result<(f64, f64)> {
    let parts = par_chunks(seed, samples, |rng, len| -> Result<(f64, f64)> {
        let (mut s, mut q) = (0.0, 0.0);
        for x in source.sample(rng, len)? {
            let v = value(&x);
            s += v;
            q += v * v;
        }
        Ok((s, q))
    });
    let parts = parts.into_iter().collect::<Result<Vec<_>>>()?;
    let (s, q) = merge_moments(&parts);
    Ok(mean_stderr(s, q, samples))
}

fn pair_integral(f: &dyn Density, g: &dyn Density, pair: Pair, cfg: &IntegrationConfig) -> Result<DistanceEstimate> {
    check_dim(f.dim(), g.dim())?;
    let method = cfg.method_for(f.dim())?;
    let (value, stderr) = match method {
        Method::Grid1d => {
            let integrand = |x: f64| pair.integrand(f.eval(&[x]), g.eval(&[x]));
            integrate_split(&integrand, &mut splits_1d(&[f, g]), cfg.tol, cfg.evals)?
        }
        Method::MonteCarlo => {
            if cfg.samples < 4 {
                return Err(Error::BudgetExhausted(format!("{} Monte Carlo samples", cfg.samples)));
            }
            let mixture = f.is_normalized() && g.is_normalized() && f.can_sample() && g.can_sample();
            if mixture {
                // stratified: half the draws from each mixture component
                let w = |x: &[f64]| pair.mixture_weight(f.eval(x), g.eval(x));
                let half = cfg.samples / 2;
                let (mf, sf) = mean_over_samples(f, half, derive_seed(cfg.seed, 1), w)?;
                let (mg, sg) = mean_over_samples(g, cfg.samples - half, derive_seed(cfg.seed, 2), w)?;
                (0.5 * (mf + mg), 0.5 * (sf * sf + sg * sg).sqrt())
            } else {
                box_mc(&union_box(f, g), cfg.samples, derive_seed(cfg.seed, 3), |x| {
                    pair.integrand(f.eval(x), g.eval(x))
                })
            }
        }
    };
    Ok(DistanceEstimate { value, stderr, method })
}

/// `||f - g||_1`.
pub fn l1_distance(f: &dyn Density, g: &dyn Density, cfg: &IntegrationConfig) -> Result<DistanceEstimate> {
    pair_integral(f, g, Pair::L1, cfg)
}

/// `d_TV(f, g) = ||f - g||_1 / 2`.
pub fn tv_distance(f: &dyn Density, g: &dyn Density, cfg: &IntegrationConfig) -> Result<DistanceEstimate> {
    let e = l1_distance(f, g, cfg)?;
    Ok(DistanceEstimate {
        value: 0.5 * e.value,
        stderr: 0.5 * e.stderr,
        method: e.method,
    })
}

/// Hellinger distance `h` with `h^2 = int (sqrt f - sqrt g)^2`.
pub fn hellinger(f: &dyn Density, g: &dyn Density, cfg: &IntegrationConfig) -> Result<HellingerEstimate> {
    let sq = pair_integral(f, g, Pair::HellingerSq, cfg)?;
    let h = sq.value.max(0.0).sqrt();
    // delta method away from zero, sqrt of the bar at zero
    let stderr = if h > 0.0 { (sq.stderr / (2.0 * h)).min(sq.stderr.sqrt()) } else { sq.stderr.sqrt() };
    Ok(HellingerEstimate {
        h: DistanceEstimate { value: h, stderr, method: sq.method },
        h_squared: sq,
    })
}

/// `g(A) = int_A g`.
pub fn set_integral(g: &dyn Density, region: &dyn Region, cfg: &IntegrationConfig) -> Result<IntegralEstimate> {
    check_dim(g.dim(), region.dim())?;
    if g.dim() == 1 && cfg.method != Some(Method::MonteCarlo) {
        if let Some(bp) = region.breakpoints_1d() {
            return integral_1d(g, region, bp, cfg);
        }
    }
    if cfg.samples == 0 {
        return Err(Error::BudgetExhausted("no Monte Carlo samples for set integral".into()));
    }
    if g.is_normalized() && g.can_sample() {
        let (value, stderr) = mean_over_samples(g, cfg.samples, derive_seed(cfg.seed, 4), |x| {
            f64::from(u8::from(region.contains(x)))
        })?;
        return Ok(IntegralEstimate { value, stderr, method: IntegralMethod::OwnSamples });
    }
    let (value, stderr) = box_mc(&g.support_box(), cfg.samples, derive_seed(cfg.seed, 5), |x| {
        if region.contains(x) {
            g.eval(x)
        } else {
            0.0
        }
    });
    Ok(IntegralEstimate { value, stderr, method: IntegralMethod::BoxMonteCarlo })
}

/// Membership is constant on each open gap between breakpoints, so the set is
/// (up to a null set) the union of the member gaps.
fn integral_1d(g: &dyn Density, region: &dyn Region, mut bp: Vec<f64>, cfg: &IntegrationConfig) -> Result<IntegralEstimate> {
    bp.retain(|v| v.is_finite());
    bp.sort_by(f64::total_cmp);
    bp.dedup();
    let mut cuts = Vec::with_capacity(bp.len() + 2);
    cuts.push(f64::NEG_INFINITY);
    cuts.extend(bp);
    cuts.push(f64::INFINITY);
    let exact = g.interval_mass(0.0, 1.0).is_some();
    let (glo, ghi) = g.support_box();
    let (mut value, mut err) = (0.0, 0.0);
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let rep = match (a.is_finite(), b.is_finite()) {
            (true, true) => 0.5 * (a + b),
            (false, true) => b - 1.0,
            (true, false) => a + 1.0,
            (false, false) => 0.0,
        };
        if !region.contains(&[rep]) {
            continue;
        }
        if exact {
            value += g.interval_mass(a, b).expect("closed-form interval mass");
        } else {
            let (lo, hi) = (a.max(glo[0]), b.min(ghi[0]));
            if hi > lo {
                let mut splits = vec![lo, hi];
                splits.extend(g.breakpoints_1d().into_iter().filter(|v| *v > lo && *v < hi));
                let (v, e) = integrate_split(&|x| g.eval(&[x]), &mut splits, cfg.tol, cfg.evals)?;
                value += v;
                err += e;
            }
        }
    }
    Ok(IntegralEstimate {
        value,
        stderr: err,
        method: if exact { IntegralMethod::Exact1d } else { IntegralMethod::Quadrature1d },
    })
}

/// Either side of an A-norm comparison.
#[derive(Debug, Clone, Copy)]
pub enum Measure<'a> {
    Density(&'a dyn Density),
    Empirical(&'a EmpiricalDistribution),
}

impl Measure<'_> {
    fn dim(&self) -> usize {
        match self {
            Self::Density(f) => f.dim(),
            Self::Empirical(e) => e.dim(),
        }
    }

    fn mass(&self, region: &dyn Region, cfg: &IntegrationConfig) -> Result<(f64, f64)> {
        match self {
            Self::Density(f) => set_integral(*f, region, cfg).map(|e| (e.value, e.stderr)),
            Self::Empirical(e) => empirical_measure(e, region).map(|v| (v, 0.0)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnormEstimate {
    pub value: f64,
    /// Combined error bar of the maximizing term.
    pub stderr: f64,
    pub argmax: usize,
}

/// `sup_{A in family} |p(A) - q(A)|` over a finite family.
pub fn anorm(p: Measure<'_>, q: Measure<'_>, family: &[&dyn Region], cfg: &IntegrationConfig) -> Result<AnormEstimate> {
    if family.is_empty() {
        return Err(Error::InvalidParameter("A-norm over an empty family".into()));
    }
    check_dim(p.dim(), q.dim())?;
    let mut best = AnormEstimate { value: -1.0, stderr: 0.0, argmax: 0 };
    for (i, a) in family.iter().enumerate() {
        let local = IntegrationConfig { seed: derive_seed(cfg.seed, i as u64), ..cfg.clone() };
        let (pv, ps) = p.mass(*a, &local)?;
        let (qv, qs) = q.mass(*a, &local)?;
        let v = (pv - qv).abs();
        if v > best.value {
            best = AnormEstimate { value: v, stderr: (ps * ps + qs * qs).sqrt(), argmax: i };
        }
    }
    Ok(best)
}
