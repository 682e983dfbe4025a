//! Minimum-distance selection over finite candidate classes using the
//! Yatracos family of pairwise difference sets.

mod levels;
mod select;

use std::fmt;
use std::sync::Arc;

pub use levels::{union_formula_sets, yatracos_membership_via_levels, LevelMembership};
pub use select::{
    guarantee_harness, select, select_with_table, ClassIntegrals, HarnessConfig, HarnessReport, SelectionResult,
};

use crate::densities::Density;
use crate::error::{Error, Result};
use crate::metrics::Region;
use crate::structure::ceil_slack;

/// Grid resolution for locating 1-D crossings of two densities.
const CROSSING_GRID: usize = 4096;

/// A finite, ordered list of candidate densities of equal dimension.
#[derive(Clone)]
pub struct CandidateClass {
    members: Vec<Arc<dyn Density>>,
    dim: usize,
}

impl fmt::Debug for CandidateClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CandidateClass").field("dim", &self.dim).field("members", &self.members.len()).finish()
    }
}

impl CandidateClass {
    pub fn new(members: Vec<Arc<dyn Density>>) -> Result<Self> {
        let Some(first) = members.first() else {
            return Err(Error::InvalidParameter("candidate class is empty".into()));
        };
        let dim = first.dim();
        for m in &members {
            crate::error::check_dim(dim, m.dim())?;
        }
        Ok(Self { members, dim })
    }

    pub fn members(&self) -> &[Arc<dyn Density>] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

/// `{x : g_i(x) >= g_j(x)}`.
#[derive(Clone)]
pub struct YatracosSet {
    pub i: usize,
    pub j: usize,
    gi: Arc<dyn Density>,
    gj: Arc<dyn Density>,
    breakpoints: Option<Vec<f64>>,
}

impl fmt::Debug for YatracosSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("YatracosSet").field("i", &self.i).field("j", &self.j).finish_non_exhaustive()
    }
}

impl YatracosSet {
    pub fn new(i: usize, j: usize, gi: Arc<dyn Density>, gj: Arc<dyn Density>) -> Result<Self> {
        crate::error::check_dim(gi.dim(), gj.dim())?;
        let mut set = Self { i, j, gi, gj, breakpoints: None };
        if set.gi.dim() == 1 {
            set.breakpoints = Some(set.crossings_1d());
        }
        Ok(set)
    }

    /// Jumps of either density plus every sign change of `g_i - g_j`,
    /// located by a grid scan over the joint support and refined by bisection.
    /// Two step functions can only change order at their jumps.
    fn crossings_1d(&self) -> Vec<f64> {
        let mut out = self.gi.breakpoints_1d();
        out.extend(self.gj.breakpoints_1d());
        if self.gi.is_piecewise_constant_1d() && self.gj.is_piecewise_constant_1d() {
            out.sort_by(f64::total_cmp);
            out.dedup();
            return out;
        }
        let (alo, ahi) = self.gi.support_box();
        let (blo, bhi) = self.gj.support_box();
        let (lo, hi) = (alo[0].min(blo[0]), ahi[0].max(bhi[0]));
        if !(hi > lo) {
            return out;
        }
        let mut cuts = vec![lo, hi];
        cuts.extend(out.iter().copied().filter(|v| *v > lo && *v < hi));
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let step = (hi - lo) / CROSSING_GRID as f64;
        for w in cuts.windows(2) {
            // open segment between jumps: sample strictly inside
            let (a, b) = (w[0], w[1]);
            let k = (((b - a) / step).ceil() as usize).max(2);
            let at = |t: f64| self.contains(&[t]);
            let pts: Vec<f64> = (0..=k).map(|m| a + (b - a) * (m as f64 + 0.5) / (k as f64 + 1.0)).collect();
            for p in pts.windows(2) {
                let (mut l, mut r) = (p[0], p[1]);
                let side = at(l);
                if at(r) == side {
                    continue;
                }
                while r - l > 1e-13 * (1.0 + l.abs().max(r.abs())) {
                    let m = 0.5 * (l + r);
                    if at(m) == side {
                        l = m;
                    } else {
                        r = m;
                    }
                }
                out.push(0.5 * (l + r));
            }
        }
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }
}

impl Region for YatracosSet {
    fn dim(&self) -> usize {
        self.gi.dim()
    }

    fn contains(&self, x: &[f64]) -> bool {
        self.gi.eval(x) >= self.gj.eval(x)
    }

    fn breakpoints_1d(&self) -> Option<Vec<f64>> {
        self.breakpoints.clone()
    }
}

/// All ordered pairs `(i, j)`, `i != j`; empty for a singleton class.
pub fn yatracos_family(class: &CandidateClass) -> Result<Vec<YatracosSet>> {
    let m = class.members();
    let mut out = Vec::with_capacity(m.len() * m.len().saturating_sub(1));
    for i in 0..m.len() {
        for j in 0..m.len() {
            if i != j {
                out.push(YatracosSet::new(i, j, m[i].clone(), m[j].clone())?);
            }
        }
    }
    Ok(out)
}

/// `n = ⌈c V / ε²⌉`.
pub fn required_samples(v: usize, epsilon: f64, c: f64) -> Result<usize> {
    if v == 0 || !(epsilon > 0.0 && epsilon < 1.0) || !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidParameter(format!("required_samples(V = {v}, ε = {epsilon}, c = {c})")));
    }
    Ok(ceil_slack(c * v as f64 / (epsilon * epsilon)) as usize)
}
