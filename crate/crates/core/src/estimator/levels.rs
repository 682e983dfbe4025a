use crate::densities::Density;
use crate::error::{check_dim, Result};
use crate::geometry::DEFAULT_TOL;
use crate::structure::PiecewisePolytopeDensity;

/// `g(x) >= g'(x)` decided from level memberships and the ordering of the
/// heights only: `x ∈ ∪_i (P_i \ ∪_{i': y'_{i'} > y_i} P'_{i'})`, with points
/// outside every polytope of both (0 >= 0) counted as members.
pub fn yatracos_membership_via_levels(g: &PiecewisePolytopeDensity, gp: &PiecewisePolytopeDensity, x: &[f64]) -> Result<bool> {
    check_dim(g.dim(), gp.dim())?;
    check_dim(g.dim(), x.len())?;
    let inside = |p: &crate::geometry::Polytope| p.contains_unchecked(x, DEFAULT_TOL);
    let in_g: Vec<bool> = g.levels().iter().map(|l| inside(&l.polytope)).collect();
    let in_gp: Vec<bool> = gp.levels().iter().map(|l| inside(&l.polytope)).collect();
    let formula = g.levels().iter().zip(&in_g).any(|(l, &member)| {
        member && !gp.levels().iter().zip(&in_gp).any(|(lp, &m)| m && lp.y > l.y)
    });
    let zero_zero = !in_g.iter().any(|b| *b) && !in_gp.iter().any(|b| *b);
    Ok(formula || zero_zero)
}

/// Halfspace-level membership sets of one piecewise density over a finite
/// universe: `sets[i][j][u]` says whether point `u` lies in halfspace `j` of
/// level `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelMembership {
    pub ys: Vec<f64>,
    pub sets: Vec<Vec<Vec<bool>>>,
}

impl LevelMembership {
    pub fn of(g: &PiecewisePolytopeDensity, points: &[Vec<f64>]) -> Self {
        Self {
            ys: g.levels().iter().map(|l| l.y).collect(),
            sets: g
                .levels()
                .iter()
                .map(|l| {
                    l.polytope
                        .halfspaces()
                        .iter()
                        .map(|h| points.iter().map(|x| h.contains_unchecked(x, DEFAULT_TOL)).collect())
                        .collect()
                })
                .collect(),
        }
    }

    /// Every membership set intersected with `keep`.
    pub fn restricted(&self, keep: &[bool]) -> Self {
        Self {
            ys: self.ys.clone(),
            sets: self
                .sets
                .iter()
                .map(|lvl| lvl.iter().map(|s| s.iter().zip(keep).map(|(a, b)| *a && *b).collect()).collect())
                .collect(),
        }
    }
}

fn intersect_all(sets: &[Vec<bool>], universe: usize) -> Vec<bool> {
    (0..universe).map(|u| sets.iter().all(|s| s[u])).collect()
}

/// The union formula as a set function of the halfspace sets,
/// `∪_i (∩_j S_{i,j} \ ∪_{i': y'_{i'} > y_i} ∩_j S'_{i',j})`, evaluated
/// over a universe of `universe` points.
pub fn union_formula_sets(g: &LevelMembership, gp: &LevelMembership, universe: usize) -> Vec<bool> {
    let polys: Vec<Vec<bool>> = g.sets.iter().map(|s| intersect_all(s, universe)).collect();
    let polys_p: Vec<Vec<bool>> = gp.sets.iter().map(|s| intersect_all(s, universe)).collect();
    let mut out = vec![false; universe];
    for (i, p) in polys.iter().enumerate() {
        for u in 0..universe {
            if p[u] && !polys_p.iter().zip(&gp.ys).any(|(q, y)| *y > g.ys[i] && q[u]) {
                out[u] = true;
            }
        }
    }
    out
}
