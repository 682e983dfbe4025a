use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{class_params, ladder, ApproxConfig, Level, PiecewisePolytopeDensity};
use crate::densities::{Density, LogConcaveDensity};
use crate::error::{Error, Result};
use crate::geometry::{
    inscribed_polytope_with_directions, sphere_directions, volume, BoundedRegion, ConvexBody, DirectionScheme,
    Polytope, VolumeMethod,
};
use crate::rng::derive_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SkipReason {
    Empty,
    Degenerate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedLevel {
    pub index: usize,
    pub y: f64,
    pub reason: SkipReason,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelDiagnostic {
    /// 1-based ladder index.
    pub index: usize,
    pub y: f64,
    /// Ray directions used; 0 when the level set was itself a polytope.
    pub directions: usize,
    pub facets: usize,
    /// Relative volume deficit `1 - vol(P_i) / vol(L_f(y_i))`.
    pub deficit: f64,
    pub deficit_stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BuildDiagnostics {
    pub levels_requested: usize,
    pub facet_budget: usize,
    pub delta: f64,
    pub levels: Vec<LevelDiagnostic>,
    pub skipped: Vec<SkippedLevel>,
}

impl BuildDiagnostics {
    pub fn max_deficit(&self) -> f64 {
        self.levels.iter().map(|l| l.deficit).fold(0.0, f64::max)
    }
}

enum Outcome {
    Built(Level, LevelDiagnostic),
    Skipped(SkippedLevel),
}

/// Inscribed-polytope approximation `g ∈ C_{d,ε}` of a log-concave `f`.
///
/// For each ladder height the level set of `f` is approximated by the hull of
/// boundary points along `m` directions, with `m` grown from `d + 1` until the
/// relative volume deficit is at most `ε` or one more direction would exceed
/// the facet budget. Level sets that are already polytopes within budget are
/// used as they are. In one dimension the budget is two halfspaces, the
/// smallest that bounds an interval.
pub fn build_approximation(f: &LogConcaveDensity, cfg: &ApproxConfig, seed: u64) -> Result<PiecewisePolytopeDensity> {
    cfg.validate()?;
    let d = f.dim();
    if d > 3 {
        return Err(Error::Unsupported(format!("approximation needs d <= 3, got {d}")));
    }
    let (l, h) = class_params(d, cfg.epsilon, cfg.c_l, cfg.c_h)?;
    let budget = if d == 1 { h.max(2) } else { h };
    if budget < d + 1 {
        return Err(Error::InvalidParameter(format!("facet budget H = {h} < d + 1 = {}", d + 1)));
    }
    let ys = ladder(f.max_value(), cfg.epsilon, l)?;
    let outcomes = ys
        .par_iter()
        .enumerate()
        .map(|(i, &y)| build_level(f, i + 1, y, cfg, budget, seed))
        .collect::<Result<Vec<_>>>()?;
    let mut levels = Vec::new();
    let mut diagnostics = BuildDiagnostics {
        levels_requested: l,
        facet_budget: budget,
        delta: cfg.delta(d),
        levels: Vec::new(),
        skipped: Vec::new(),
    };
    for o in outcomes {
        match o {
            Outcome::Built(level, diag) => {
                levels.push(level);
                diagnostics.levels.push(diag);
            }
            Outcome::Skipped(s) => {
                log::info!("level {} (y = {:.3e}) skipped: {:?}", s.index, s.y, s.reason);
                diagnostics.skipped.push(s);
            }
        }
    }
    Ok(PiecewisePolytopeDensity::new(cfg.epsilon, d, levels)?.with_diagnostics(diagnostics))
}

fn body_volume(body: &ConvexBody, cfg: &ApproxConfig, seed: u64) -> Result<(f64, f64)> {
    let v = volume(body, VolumeMethod::Auto, cfg.mc_budget, seed)?;
    Ok((v.value, v.stderr))
}

fn build_level(f: &LogConcaveDensity, index: usize, y: f64, cfg: &ApproxConfig, budget: usize, seed: u64) -> Result<Outcome> {
    let d = f.dim();
    let Some(body) = f.level_set(y)? else {
        return Ok(Outcome::Skipped(SkippedLevel { index, y, reason: SkipReason::Empty }));
    };
    if body.is_degenerate(cfg.tol) {
        return Ok(Outcome::Skipped(SkippedLevel { index, y, reason: SkipReason::Degenerate }));
    }
    let exact = match &body {
        ConvexBody::Polytope(p) => Some(p.clone()),
        ConvexBody::Box { lo, hi } => Some(Polytope::from_box(lo, hi)?),
        _ => None,
    };
    if let Some(p) = exact.filter(|p| p.facet_count() <= budget) {
        let diag = LevelDiagnostic { index, y, directions: 0, facets: p.facet_count(), deficit: 0.0, deficit_stderr: 0.0 };
        return Ok(Outcome::Built(Level { y, polytope: p }, diag));
    }
    let (target, target_se) = body_volume(&body, cfg, derive_seed(seed, index as u64))?;
    let scheme = DirectionScheme::for_dimension(d);
    let mut best: Option<(Polytope, LevelDiagnostic)> = None;
    let max_m = if d == 1 { 2 } else { budget + d + 1 };
    for m in d + 1..=max_m {
        let dirs = sphere_directions(d, m, scheme, seed)?;
        let p = match inscribed_polytope_with_directions(&body, &dirs, cfg.tol) {
            Ok(p) => p,
            Err(Error::Degenerate(_)) => continue,
            Err(e) => return Err(e),
        };
        if p.facet_count() > budget {
            break;
        }
        let vol = BoundedRegion::exact_volume(&p).ok_or_else(|| Error::Unsupported("polytope volume".into()))?;
        let deficit = 1.0 - vol / target;
        let diag = LevelDiagnostic {
            index,
            y,
            directions: m,
            facets: p.facet_count(),
            deficit,
            deficit_stderr: vol * target_se / (target * target),
        };
        let done = deficit <= cfg.epsilon;
        best = Some((p, diag));
        if done {
            break;
        }
    }
    let (polytope, diag) = best.ok_or_else(|| {
        Error::Degenerate(format!("no inscribed polytope within {budget} facets at level {index}"))
    })?;
    if diag.deficit > cfg.epsilon {
        log::warn!(
            "level {index}: deficit {:.4} exceeds epsilon {} at the facet budget {budget}",
            diag.deficit,
            cfg.epsilon
        );
    }
    Ok(Outcome::Built(Level { y, polytope }, diag))
}
