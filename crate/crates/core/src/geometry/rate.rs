use serde::{Deserialize, Serialize};

use super::body::BoundedRegion;
use super::{
    inscribed_polytope_with_directions, norm, sphere_directions, sub, volume, ConvexBody, DirectionScheme, Polytope,
    VolumeMethod,
};
use crate::error::{Error, Result};
use crate::fit::{log_log_fit, LinearFit};
use crate::rng;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeficitRow {
    pub m: usize,
    pub facets: usize,
    pub volume: f64,
    pub volume_stderr: f64,
    /// `1 - vol(P) / vol(K)`.
    pub deficit: f64,
    pub stderr: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolytopeRate {
    pub body_volume: f64,
    pub rows: Vec<DeficitRow>,
    /// Log-log fit of deficit against `m`; absent when some deficit is not
    /// positive.
    pub fit: Option<LinearFit>,
}

/// The default scheme's `m` directions, except that polyhedral bodies aim
/// their first directions at their vertices once `m` covers them all.
fn rate_directions(body: &ConvexBody, m: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    let dim = body.dim();
    let scheme = DirectionScheme::for_dimension(dim);
    let corners = match body {
        ConvexBody::Box { lo, hi } => Polytope::from_box(lo, hi)?.vertices().map(<[_]>::to_vec),
        ConvexBody::Polytope(p) => p.vertices().map(<[_]>::to_vec),
        _ => None,
    };
    match corners {
        Some(vs) if m >= vs.len() => {
            let origin = body.interior_point();
            let mut dirs: Vec<Vec<f64>> = vs
                .iter()
                .map(|v| {
                    let u = sub(v, &origin);
                    let r = norm(&u);
                    u.iter().map(|c| c / r).collect()
                })
                .collect();
            if m > dirs.len() {
                dirs.extend(sphere_directions(dim, m - dirs.len(), scheme, seed)?);
            }
            Ok(dirs)
        }
        _ => sphere_directions(dim, m, scheme, seed),
    }
}

/// Relative volume deficit of inscribed polytopes built from `m` boundary
/// points, for each `m` in `m_grid`.
pub fn polytope_rate(
    body: &ConvexBody,
    m_grid: &[usize],
    method: VolumeMethod,
    mc_samples: usize,
    seed: u64,
    tol: f64,
) -> Result<PolytopeRate> {
    if m_grid.is_empty() {
        return Err(Error::InvalidParameter("empty m grid".into()));
    }
    let body_volume = body
        .exact_volume()
        .ok_or_else(|| Error::Unsupported("rate experiment needs a body with exact volume".into()))?;
    let rows = m_grid
        .iter()
        .map(|&m| {
            let p = inscribed_polytope_with_directions(body, &rate_directions(body, m, seed)?, tol)?;
            let v = volume(&p, method, mc_samples, rng::derive_seed(seed, m as u64))?;
            Ok(DeficitRow {
                m,
                facets: p.facet_count(),
                volume: v.value,
                volume_stderr: v.stderr,
                deficit: 1.0 - v.value / body_volume,
                stderr: v.stderr / body_volume,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let fit = if rows.len() >= 2 && rows.iter().all(|r| r.deficit > 0.0) {
        let ms: Vec<f64> = rows.iter().map(|r| r.m as f64).collect();
        let ds: Vec<f64> = rows.iter().map(|r| r.deficit).collect();
        Some(log_log_fit(&ms, &ds)?)
    } else {
        None
    };
    Ok(PolytopeRate { body_volume, rows, fit })
}
