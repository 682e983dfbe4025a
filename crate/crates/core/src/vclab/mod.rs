//! Empirical VC-dimension and growth-function experiments.
//!
//! Labelings of a point set are bitmasks: bit `k` is set when point `k` lies
//! in the set.

mod rate;
mod shatter;

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use rate::{interval_discrepancy, vc_rate_experiment, RatePoint, RateReport};
pub use shatter::{
    fit_growth_constant, growth_bound, growth_count, search_grid, shatters, vc_estimate, GrowthObservation, ShatterReport,
};

use crate::error::{Error, Result};
use crate::metrics::Region;
use crate::structure::PiecewisePolytopeDensity;

/// Largest point set accepted by the dichotomy enumerators.
pub const MAX_POINTS: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    Intervals1d,
    Halfspaces,
    FiniteList,
    PiecewiseDifference,
}

/// Serializable summary of a set family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyDescriptor {
    pub kind: FamilyKind,
    pub dim: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub members: Option<usize>,
    pub exact_enumerator: bool,
}

#[derive(Clone)]
enum Params {
    Intervals,
    Halfspaces,
    List(Vec<Arc<dyn Region>>),
    Difference { left: Vec<Arc<PiecewisePolytopeDensity>>, right: Vec<Arc<PiecewisePolytopeDensity>> },
}

/// A family of subsets of `R^d` whose labelings of finite point sets can be
/// enumerated.
#[derive(Clone)]
pub struct SetFamilyHandle {
    kind: FamilyKind,
    dim: usize,
    params: Params,
}

impl fmt::Debug for SetFamilyHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SetFamilyHandle").field("kind", &self.kind).field("dim", &self.dim).finish()
    }
}

impl SetFamilyHandle {
    /// Closed intervals `[a, b]` on the line, including the empty set.
    pub fn intervals_1d() -> Self {
        Self { kind: FamilyKind::Intervals1d, dim: 1, params: Params::Intervals }
    }

    /// Closed halfspaces `{x : a·x >= b}` together with the empty set and `R^d`.
    pub fn halfspaces(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        Ok(Self { kind: FamilyKind::Halfspaces, dim, params: Params::Halfspaces })
    }

    pub fn finite_list(dim: usize, sets: Vec<Arc<dyn Region>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        for s in &sets {
            crate::error::check_dim(dim, s.dim())?;
        }
        Ok(Self { kind: FamilyKind::FiniteList, dim, params: Params::List(sets) })
    }

    /// Difference sets `{x : g(x) >= g'(x)}` for every `g` in `left` and `g'`
    /// in `right`.
    pub fn piecewise_difference(
        left: Vec<Arc<PiecewisePolytopeDensity>>,
        right: Vec<Arc<PiecewisePolytopeDensity>>,
    ) -> Result<Self> {
        let Some(first) = left.first().or(right.first()) else {
            return Err(Error::InvalidParameter("difference family needs members".into()));
        };
        if left.is_empty() || right.is_empty() {
            return Err(Error::InvalidParameter("difference family needs members on both sides".into()));
        }
        let dim = crate::densities::Density::dim(first.as_ref());
        for g in left.iter().chain(&right) {
            crate::error::check_dim(dim, crate::densities::Density::dim(g.as_ref()))?;
        }
        Ok(Self { kind: FamilyKind::PiecewiseDifference, dim, params: Params::Difference { left, right } })
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Whether labelings can be enumerated exactly by [`shatters`].
    pub fn has_exact_enumerator(&self) -> bool {
        match self.params {
            Params::Intervals | Params::List(_) => true,
            Params::Halfspaces => self.dim <= 2,
            Params::Difference { .. } => false,
        }
    }

    pub fn descriptor(&self) -> FamilyDescriptor {
        let members = match &self.params {
            Params::List(s) => Some(s.len()),
            Params::Difference { left, right } => Some(left.len() * right.len()),
            _ => None,
        };
        FamilyDescriptor { kind: self.kind, dim: self.dim, members, exact_enumerator: self.has_exact_enumerator() }
    }

    /// Number of sets enumerated by [`labelings`](Self::labelings) for a
    /// difference family.
    pub(crate) fn pair_count(&self) -> Option<usize> {
        match &self.params {
            Params::Difference { left, right } => Some(left.len() * right.len()),
            _ => None,
        }
    }

    pub(crate) fn pieces(&self) -> Vec<&PiecewisePolytopeDensity> {
        match &self.params {
            Params::Difference { left, right } => left.iter().chain(right).map(|g| g.as_ref()).collect(),
            _ => Vec::new(),
        }
    }

    /// Distinct labelings the family induces on `points`.
    pub fn labelings(&self, points: &[Vec<f64>]) -> Result<HashSet<u32>> {
        if points.len() > MAX_POINTS {
            return Err(Error::InvalidParameter(format!("at most {MAX_POINTS} points, got {}", points.len())));
        }
        for p in points {
            crate::error::check_dim(self.dim, p.len())?;
        }
        Ok(match &self.params {
            Params::Intervals => interval_labelings(points),
            Params::Halfspaces => match self.dim {
                1 => halfline_labelings(points),
                2 => halfplane_labelings(points),
                d => return Err(Error::Unsupported(format!("no exact halfspace enumerator in dimension {d}"))),
            },
            Params::List(sets) => sets.iter().map(|s| mask(points, |x| s.contains(x))).collect(),
            Params::Difference { left, right } => {
                let mut out = HashSet::new();
                for g in left {
                    for gp in right {
                        out.insert(mask(points, |x| g.eval_eq1(x) >= gp.eval_eq1(x)));
                    }
                }
                out
            }
        })
    }
}

fn mask(points: &[Vec<f64>], inside: impl Fn(&[f64]) -> bool) -> u32 {
    points.iter().enumerate().filter(|(_, p)| inside(p)).fold(0, |m, (k, _)| m | 1 << k)
}

/// Point indices grouped by coordinate value, in increasing order.
fn sorted_groups(points: &[Vec<f64>]) -> Vec<u32> {
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&a, &b| points[a][0].total_cmp(&points[b][0]));
    let mut groups: Vec<u32> = Vec::new();
    let mut last = None;
    for k in idx {
        let x = points[k][0];
        if last == Some(x) {
            *groups.last_mut().expect("group exists") |= 1 << k;
        } else {
            groups.push(1 << k);
            last = Some(x);
        }
    }
    groups
}

fn interval_labelings(points: &[Vec<f64>]) -> HashSet<u32> {
    let groups = sorted_groups(points);
    let mut out = HashSet::from([0]);
    for i in 0..groups.len() {
        let mut m = 0;
        for g in &groups[i..] {
            m |= g;
            out.insert(m);
        }
    }
    out
}

fn halfline_labelings(points: &[Vec<f64>]) -> HashSet<u32> {
    let groups = sorted_groups(points);
    let all = groups.iter().fold(0, |m, g| m | g);
    let mut out = HashSet::from([0, all]);
    let mut prefix = 0;
    for g in &groups {
        prefix |= g;
        out.insert(prefix);
        out.insert(all & !prefix);
    }
    out
}

/// Closed half-plane labelings.
///
/// Every realizable labeling with both classes non-empty is realized by a line
/// through two distinct points, with the points on that line split into a
/// prefix and a suffix along the line.
fn halfplane_labelings(points: &[Vec<f64>]) -> HashSet<u32> {
    let n = points.len();
    let all = if n == 0 { 0 } else { u32::MAX >> (32 - n) };
    let mut out = HashSet::from([0, all]);
    for i in 0..n {
        for j in i + 1..n {
            let (p, q) = (&points[i], &points[j]);
            if p == q {
                continue;
            }
            let dir = [q[0] - p[0], q[1] - p[1]];
            let (mut pos, mut neg) = (0u32, 0u32);
            let mut on: Vec<(f64, u32)> = Vec::new();
            for (k, x) in points.iter().enumerate() {
                let cross = dir[0] * (x[1] - p[1]) - dir[1] * (x[0] - p[0]);
                if cross > 0.0 {
                    pos |= 1 << k;
                } else if cross < 0.0 {
                    neg |= 1 << k;
                } else {
                    on.push((dir[0] * (x[0] - p[0]) + dir[1] * (x[1] - p[1]), 1 << k));
                }
            }
            on.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut cuts = vec![0u32];
            let mut acc = 0;
            for (t, (s, bit)) in on.iter().enumerate() {
                acc |= bit;
                if on.get(t + 1).is_none_or(|next| next.0 != *s) {
                    cuts.push(acc);
                }
            }
            let line = acc;
            for side in [pos, neg] {
                for c in &cuts {
                    out.insert(side | c);
                    out.insert(side | (line & !c));
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests;
