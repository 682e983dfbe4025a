use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::BuildDiagnostics;
use crate::densities::Density;
use crate::error::{check_dim, Error, Result};
use crate::geometry::{vertex_scale, BoundedRegion, Halfspace, Polytope, DEFAULT_TOL};
use crate::metrics::Region;
use crate::rng::{mean_stderr, merge_moments, par_chunks, Rng};

const ACCEPTANCE_FLOOR: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct Level {
    pub y: f64,
    pub polytope: Polytope,
}

/// `g(x) = max{y_i : x ∈ P_i}` (0 outside every `P_i`), with strictly
/// decreasing heights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "Wire", try_from = "Wire")]
pub struct PiecewisePolytopeDensity {
    epsilon: f64,
    dim: usize,
    levels: Vec<Level>,
    normalized: bool,
    /// `P_i ⊆ P_{i+1}` for every consecutive pair.
    nested: bool,
    diagnostics: Option<BuildDiagnostics>,
    steps: Option<Steps1d>,
}

/// Step-function view of a 1-D member: `values[k]` is the height on the open
/// gap `(cuts[k], cuts[k+1])` and `cum[k]` the mass to the left of `cuts[k]`.
#[derive(Debug, Clone, PartialEq)]
struct Steps1d {
    cuts: Vec<f64>,
    values: Vec<f64>,
    cum: Vec<f64>,
}

impl Steps1d {
    fn cdf(&self, x: f64) -> f64 {
        let k = self.cuts.partition_point(|c| *c <= x);
        if k == 0 {
            return 0.0;
        }
        if k == self.cuts.len() {
            return self.cum[k - 1];
        }
        self.cum[k - 1] + (x - self.cuts[k - 1]) * self.values[k - 1]
    }
}

#[derive(Serialize, Deserialize)]
struct Wire {
    epsilon: f64,
    d: usize,
    levels: Vec<WireLevel>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    normalized: bool,
}

#[derive(Serialize, Deserialize)]
struct WireLevel {
    y: f64,
    halfspaces: Vec<Halfspace>,
}

impl From<PiecewisePolytopeDensity> for Wire {
    fn from(g: PiecewisePolytopeDensity) -> Self {
        Wire {
            epsilon: g.epsilon,
            d: g.dim,
            normalized: g.normalized,
            levels: g
                .levels
                .into_iter()
                .map(|l| WireLevel { y: l.y, halfspaces: l.polytope.halfspaces().to_vec() })
                .collect(),
        }
    }
}

impl TryFrom<Wire> for PiecewisePolytopeDensity {
    type Error = Error;

    fn try_from(w: Wire) -> Result<Self> {
        let levels = w
            .levels
            .into_iter()
            .map(|l| {
                // vertices are recomputed, the stored halfspaces are kept verbatim
                let probe = Polytope::from_halfspaces(w.d, l.halfspaces.clone())?;
                let vertices = probe
                    .vertices()
                    .filter(|_| probe.is_bounded())
                    .ok_or_else(|| Error::Unbounded("level polytope is unbounded".into()))?
                    .to_vec();
                Ok(Level { y: l.y, polytope: Polytope::from_parts(w.d, l.halfspaces, vertices) })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut g = Self::new(w.epsilon, w.d, levels)?;
        g.normalized = w.normalized;
        Ok(g)
    }
}

fn subset(inner: &Polytope, outer: &Polytope) -> bool {
    match inner.vertices() {
        Some(vs) => {
            let scale = vertex_scale(vs);
            vs.iter().all(|v| outer.contains_unchecked(v, 1e-9 * scale.max(1.0)))
        }
        None => false,
    }
}

impl PiecewisePolytopeDensity {
    pub fn new(epsilon: f64, dim: usize, levels: Vec<Level>) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::InvalidParameter(format!("epsilon = {epsilon}")));
        }
        for (i, l) in levels.iter().enumerate() {
            check_dim(dim, l.polytope.dim())?;
            if !(l.y > 0.0 && l.y.is_finite()) {
                return Err(Error::InvalidParameter(format!("level {i} has height {}", l.y)));
            }
            if i > 0 && !(l.y < levels[i - 1].y) {
                return Err(Error::InvalidParameter("level heights must be strictly decreasing".into()));
            }
            if !l.polytope.is_bounded() || l.polytope.vertices().is_none() {
                return Err(Error::Unbounded(format!("level {i} polytope is unbounded")));
            }
        }
        let nested = levels.windows(2).all(|w| subset(&w[0].polytope, &w[1].polytope));
        let mut g = Self { epsilon, dim, levels, normalized: false, nested, diagnostics: None, steps: None };
        g.refresh_steps();
        Ok(g)
    }

    fn refresh_steps(&mut self) {
        if self.dim != 1 {
            return;
        }
        let mut cuts: Vec<f64> = self
            .levels
            .iter()
            .filter_map(|l| l.polytope.bounding_box().ok())
            .flat_map(|(lo, hi)| [lo[0], hi[0]])
            .collect();
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let values: Vec<f64> = cuts.windows(2).map(|w| self.eval_eq2(&[0.5 * (w[0] + w[1])])).collect();
        let mut cum = Vec::with_capacity(cuts.len());
        let mut acc = 0.0;
        cum.push(acc);
        for (w, v) in cuts.windows(2).zip(&values) {
            acc += (w[1] - w[0]) * v;
            cum.push(acc);
        }
        self.steps = Some(Steps1d { cuts, values, cum });
    }

    pub(crate) fn with_diagnostics(mut self, diagnostics: BuildDiagnostics) -> Self {
        self.diagnostics = Some(diagnostics);
        self
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn diagnostics(&self) -> Option<&BuildDiagnostics> {
        self.diagnostics.as_ref()
    }

    pub fn is_nested(&self) -> bool {
        self.nested
    }

    pub fn max_facets(&self) -> usize {
        self.levels.iter().map(|l| l.polytope.facet_count()).max().unwrap_or(0)
    }

    fn in_level(&self, i: usize, x: &[f64]) -> bool {
        self.levels[i].polytope.contains_unchecked(x, DEFAULT_TOL)
    }

    /// Max rule: `max{y_i : x ∈ P_i}`, 0 outside every polytope.
    pub fn eval_eq1(&self, x: &[f64]) -> f64 {
        (0..self.levels.len())
            .filter(|&i| self.in_level(i, x))
            .map(|i| self.levels[i].y)
            .fold(0.0, f64::max)
    }

    /// Min-index rule: `y_j` with `j = min{j : x ∈ P_j}`, 0 if none.
    pub fn eval_eq2(&self, x: &[f64]) -> f64 {
        (0..self.levels.len()).find(|&i| self.in_level(i, x)).map_or(0.0, |i| self.levels[i].y)
    }

    /// `L_g(y) = ∪ {P_j : y_j >= y}`.
    pub fn level_set_of_g(&self, y: f64) -> Result<LevelUnion> {
        if !(y > 0.0) {
            return Err(Error::InvalidParameter(format!("level must be positive, got {y}")));
        }
        let polytopes: Vec<Polytope> =
            self.levels.iter().filter(|l| l.y >= y).map(|l| l.polytope.clone()).collect();
        Ok(LevelUnion { dim: self.dim, nested: self.nested, polytopes })
    }

    fn exact_volumes(&self) -> Option<Vec<f64>> {
        self.levels.iter().map(|l| BoundedRegion::exact_volume(&l.polytope)).collect()
    }

    /// `∫ g`. Exact for nested levels (`Σ (y_i - y_{i+1}) vol(P_i)`), Monte
    /// Carlo over the support box otherwise. Returns `(value, stderr)`.
    pub fn mass(&self, samples: usize, seed: u64) -> Result<(f64, f64)> {
        if self.levels.is_empty() {
            return Ok((0.0, 0.0));
        }
        if self.nested {
            if let Some(vols) = self.exact_volumes() {
                let v = (0..self.levels.len())
                    .map(|i| {
                        let next = self.levels.get(i + 1).map_or(0.0, |l| l.y);
                        (self.levels[i].y - next) * vols[i]
                    })
                    .sum();
                return Ok((v, 0.0));
            }
        }
        if samples == 0 {
            return Err(Error::BudgetExhausted("no samples for the mass of g".into()));
        }
        Ok(self.mass_mc(samples, seed))
    }

    /// Monte Carlo `∫ g` over the support box, `(value, stderr)`.
    pub fn mass_mc(&self, samples: usize, seed: u64) -> (f64, f64) {
        let (lo, hi) = self.support_box();
        let vol: f64 = lo.iter().zip(&hi).map(|(a, b)| b - a).product();
        let parts = par_chunks(seed, samples, |rng, len| {
            let mut x = vec![0.0; self.dim];
            let (mut s, mut q) = (0.0, 0.0);
            for _ in 0..len {
                for k in 0..self.dim {
                    x[k] = lo[k] + (hi[k] - lo[k]) * rng.random::<f64>();
                }
                let v = vol * self.eval_eq2(&x);
                s += v;
                q += v * v;
            }
            (s, q)
        });
        let (s, q) = merge_moments(&parts);
        mean_stderr(s, q, samples)
    }

    /// All heights multiplied by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(Error::InvalidParameter(format!("scale factor {factor}")));
        }
        let mut g = self.clone();
        for l in &mut g.levels {
            l.y *= factor;
        }
        g.normalized = false;
        g.refresh_steps();
        Ok(g)
    }

    /// `g / ∫g`, flagged as a probability density.
    pub fn normalized(&self, samples: usize, seed: u64) -> Result<Self> {
        let (m, _) = self.mass(samples, seed)?;
        if !(m > 0.0) {
            return Err(Error::Degenerate("cannot normalize a density of zero mass".into()));
        }
        let mut g = self.scaled(1.0 / m)?;
        g.normalized = true;
        Ok(g)
    }

    fn uniform_in(&self, p: &Polytope, rng: &mut Rng) -> Result<Vec<f64>> {
        let (lo, hi) = p.bounding_box()?;
        let mut tries = 0usize;
        loop {
            let x: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| a + (b - a) * rng.random::<f64>()).collect();
            if p.contains_unchecked(&x, DEFAULT_TOL) {
                return Ok(x);
            }
            tries += 1;
            if tries >= 1_000_000 {
                return Err(Error::LowAcceptance { rate: 0.0, floor: ACCEPTANCE_FLOOR });
            }
        }
    }
}

impl Density for PiecewisePolytopeDensity {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, x: &[f64]) -> f64 {
        if let (Some(steps), [t]) = (&self.steps, x) {
            let k = steps.cuts.partition_point(|c| c < t);
            let on_cut = steps.cuts.get(k) == Some(t);
            if !on_cut {
                return if k == 0 || k == steps.cuts.len() { 0.0 } else { steps.values[k - 1] };
            }
        }
        self.eval_eq2(x)
    }

    fn support_box(&self) -> (Vec<f64>, Vec<f64>) {
        let mut lo = vec![f64::INFINITY; self.dim];
        let mut hi = vec![f64::NEG_INFINITY; self.dim];
        for l in &self.levels {
            if let Ok((a, b)) = l.polytope.bounding_box() {
                for k in 0..self.dim {
                    lo[k] = lo[k].min(a[k]);
                    hi[k] = hi[k].max(b[k]);
                }
            }
        }
        if self.levels.is_empty() {
            return (vec![0.0; self.dim], vec![0.0; self.dim]);
        }
        (lo, hi)
    }

    /// Layer sampling when levels are nested, rejection from the support box
    /// under the envelope `y_1` otherwise.
    fn sample(&self, rng: &mut Rng, n: usize) -> Result<Vec<Vec<f64>>> {
        if self.levels.is_empty() {
            return Err(Error::Degenerate("sampling from a density with no levels".into()));
        }
        if let (true, Some(vols)) = (self.nested, self.exact_volumes()) {
            let weights: Vec<f64> = (0..self.levels.len())
                .map(|i| (self.levels[i].y - self.levels.get(i + 1).map_or(0.0, |l| l.y)) * vols[i])
                .collect();
            let total: f64 = weights.iter().sum();
            let mut out = Vec::with_capacity(n);
            for _ in 0..n {
                let mut u = rng.random::<f64>() * total;
                let mut pick = weights.len() - 1;
                for (i, w) in weights.iter().enumerate() {
                    if u < *w {
                        pick = i;
                        break;
                    }
                    u -= w;
                }
                out.push(self.uniform_in(&self.levels[pick].polytope, rng)?);
            }
            return Ok(out);
        }
        let (lo, hi) = self.support_box();
        let top = self.levels[0].y;
        let mut out = Vec::with_capacity(n);
        let mut proposals = 0usize;
        while out.len() < n {
            let x: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| a + (b - a) * rng.random::<f64>()).collect();
            proposals += 1;
            if rng.random::<f64>() * top < self.eval_eq2(&x) {
                out.push(x);
            }
            if proposals >= 10_000 && (out.len() as f64) < ACCEPTANCE_FLOOR * proposals as f64 {
                return Err(Error::LowAcceptance {
                    rate: out.len() as f64 / proposals as f64,
                    floor: ACCEPTANCE_FLOOR,
                });
            }
        }
        Ok(out)
    }

    fn can_sample(&self) -> bool {
        !self.levels.is_empty()
    }

    fn is_normalized(&self) -> bool {
        self.normalized
    }

    fn breakpoints_1d(&self) -> Vec<f64> {
        self.steps.as_ref().map_or_else(Vec::new, |s| s.cuts.clone())
    }

    fn is_piecewise_constant_1d(&self) -> bool {
        self.dim == 1
    }

    fn interval_mass(&self, a: f64, b: f64) -> Option<f64> {
        let steps = self.steps.as_ref()?;
        if b <= a {
            return Some(0.0);
        }
        Some((steps.cdf(b) - steps.cdf(a)).max(0.0))
    }

    fn max_value_hint(&self) -> Option<f64> {
        Some(self.levels.first().map_or(0.0, |l| l.y))
    }
}

/// Union of level polytopes, the superlevel set of a piecewise density.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelUnion {
    dim: usize,
    nested: bool,
    polytopes: Vec<Polytope>,
}

impl LevelUnion {
    pub fn polytopes(&self) -> &[Polytope] {
        &self.polytopes
    }

    pub fn is_empty(&self) -> bool {
        self.polytopes.is_empty()
    }

    /// The largest member when the union is a nested chain.
    pub fn outermost(&self) -> Option<&Polytope> {
        if self.nested {
            self.polytopes.last()
        } else {
            None
        }
    }
}

impl Region for LevelUnion {
    fn dim(&self) -> usize {
        self.dim
    }

    fn contains(&self, x: &[f64]) -> bool {
        self.polytopes.iter().any(|p| p.contains_unchecked(x, DEFAULT_TOL))
    }

    fn breakpoints_1d(&self) -> Option<Vec<f64>> {
        (self.dim == 1).then(|| {
            self.polytopes
                .iter()
                .filter_map(|p| p.bounding_box().ok())
                .flat_map(|(lo, hi)| [lo[0], hi[0]])
                .collect()
        })
    }
}

impl BoundedRegion for LevelUnion {
    fn dim(&self) -> usize {
        self.dim
    }

    fn contains_point(&self, x: &[f64]) -> bool {
        Region::contains(self, x)
    }

    fn bounding_box(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        let mut lo = vec![f64::INFINITY; self.dim];
        let mut hi = vec![f64::NEG_INFINITY; self.dim];
        for p in &self.polytopes {
            let (a, b) = p.bounding_box()?;
            for k in 0..self.dim {
                lo[k] = lo[k].min(a[k]);
                hi[k] = hi[k].max(b[k]);
            }
        }
        if self.polytopes.is_empty() {
            return Ok((vec![0.0; self.dim], vec![0.0; self.dim]));
        }
        Ok((lo, hi))
    }

    fn exact_volume(&self) -> Option<f64> {
        if self.polytopes.is_empty() {
            return Some(0.0);
        }
        self.outermost().and_then(BoundedRegion::exact_volume)
    }
}
