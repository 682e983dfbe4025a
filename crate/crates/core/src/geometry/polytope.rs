use serde::{Deserialize, Serialize};

use super::{dot, norm, sub};
use crate::error::{check_dim, Error, Result};

/// Default relative membership tolerance.
pub const DEFAULT_TOL: f64 = 1e-12;

/// Closed halfspace `{x : normal · x <= offset}` with `|normal| = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawHalfspace")]
pub struct Halfspace {
    normal: Vec<f64>,
    offset: f64,
}

#[derive(Deserialize)]
struct RawHalfspace {
    normal: Vec<f64>,
    offset: f64,
}

impl TryFrom<RawHalfspace> for Halfspace {
    type Error = Error;

    fn try_from(raw: RawHalfspace) -> Result<Self> {
        Halfspace::new(raw.normal, raw.offset)
    }
}

impl Halfspace {
    /// Normalizes `normal` to unit length, scaling `offset` with it.
    pub fn new(normal: Vec<f64>, offset: f64) -> Result<Self> {
        if normal.is_empty() {
            return Err(Error::InvalidParameter("halfspace normal is empty".into()));
        }
        if normal.iter().any(|v| !v.is_finite()) || !offset.is_finite() {
            return Err(Error::InvalidParameter("halfspace has non-finite entries".into()));
        }
        let len = norm(&normal);
        if len <= f64::MIN_POSITIVE {
            return Err(Error::InvalidParameter("halfspace normal has zero length".into()));
        }
        if (len - 1.0).abs() <= 1e-15 {
            return Ok(Self { normal, offset });
        }
        Ok(Self {
            normal: normal.iter().map(|v| v / len).collect(),
            offset: offset / len,
        })
    }

    pub fn normal(&self) -> &[f64] {
        &self.normal
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn dim(&self) -> usize {
        self.normal.len()
    }

    /// Signed distance of `x` past the boundary (positive means outside).
    pub fn excess(&self, x: &[f64]) -> f64 {
        dot(&self.normal, x) - self.offset
    }

    /// `normal · x <= offset + tol * (1 + |offset|)`.
    pub fn contains_tol(&self, x: &[f64], tol: f64) -> Result<bool> {
        check_dim(self.dim(), x.len())?;
        Ok(self.contains_unchecked(x, tol))
    }

    pub fn contains(&self, x: &[f64]) -> Result<bool> {
        self.contains_tol(x, DEFAULT_TOL)
    }

    #[inline]
    pub(crate) fn contains_unchecked(&self, x: &[f64], tol: f64) -> bool {
        dot(&self.normal, x) <= self.offset + tol * (1.0 + self.offset.abs())
    }

    fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        (self.offset - other.offset).abs() <= tol * (1.0 + self.offset.abs())
            && self
                .normal
                .iter()
                .zip(&other.normal)
                .all(|(a, b)| (a - b).abs() <= tol)
    }
}

/// Intersection of halfspaces, optionally carrying its vertex list.
///
/// A vertex cache is present exactly when the polytope is bounded, nonempty
/// and of dimension at most 3.
#[derive(Debug, Clone, PartialEq)]
pub struct Polytope {
    dim: usize,
    halfspaces: Vec<Halfspace>,
    vertices: Option<Vec<Vec<f64>>>,
    bounded: bool,
}

impl Polytope {
    /// The whole space `R^dim` (empty conjunction).
    pub fn whole_space(dim: usize) -> Self {
        Self {
            dim,
            halfspaces: Vec::new(),
            vertices: None,
            bounded: false,
        }
    }

    /// Axis-aligned box `[lo, hi]`.
    pub fn from_box(lo: &[f64], hi: &[f64]) -> Result<Self> {
        check_dim(lo.len(), hi.len())?;
        let dim = lo.len();
        if lo.iter().zip(hi).any(|(a, b)| !(a < b)) {
            return Err(Error::Degenerate("box has an empty side".into()));
        }
        let mut halfspaces = Vec::with_capacity(2 * dim);
        for k in 0..dim {
            let mut e = vec![0.0; dim];
            e[k] = 1.0;
            halfspaces.push(Halfspace::new(e.clone(), hi[k])?);
            e[k] = -1.0;
            halfspaces.push(Halfspace::new(e, -lo[k])?);
        }
        let vertices = if dim <= 3 {
            Some(
                (0..1usize << dim)
                    .map(|mask| {
                        (0..dim)
                            .map(|k| if mask >> k & 1 == 1 { hi[k] } else { lo[k] })
                            .collect()
                    })
                    .collect(),
            )
        } else {
            None
        };
        Ok(Self {
            dim,
            halfspaces,
            vertices,
            bounded: true,
        })
    }

    /// Builds a polytope from halfspaces. For `dim <= 3` the vertices are
    /// enumerated, redundant halfspaces are dropped and boundedness is decided.
    pub fn from_halfspaces(dim: usize, halfspaces: Vec<Halfspace>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be at least 1".into()));
        }
        for h in &halfspaces {
            check_dim(dim, h.dim())?;
        }
        let mut unique: Vec<Halfspace> = Vec::with_capacity(halfspaces.len());
        for h in halfspaces {
            if !unique.iter().any(|u| u.approx_eq(&h, 1e-12)) {
                unique.push(h);
            }
        }
        if dim > 3 {
            return Ok(Self {
                dim,
                halfspaces: unique,
                vertices: None,
                bounded: false,
            });
        }
        let bounded = normals_bounded(dim, &unique);
        if !bounded {
            return Ok(Self {
                dim,
                halfspaces: unique,
                vertices: None,
                bounded: false,
            });
        }
        let vertices = enumerate_vertices(dim, &unique);
        if vertices.is_empty() {
            // infeasible system: the empty set
            return Ok(Self {
                dim,
                halfspaces: unique,
                vertices: Some(vertices),
                bounded: true,
            });
        }
        let scale = vertex_scale(&vertices);
        let facets: Vec<Halfspace> = unique
            .into_iter()
            .filter(|h| {
                vertices
                    .iter()
                    .filter(|v| h.excess(v).abs() <= 1e-9 * scale)
                    .count()
                    >= dim
            })
            .collect();
        Ok(Self {
            dim,
            halfspaces: facets,
            vertices: Some(vertices),
            bounded: true,
        })
    }

    /// Assembles a polytope whose facets and vertices are already known
    /// (hull output, analytic simplices). Inputs are trusted.
    pub(crate) fn from_parts(dim: usize, halfspaces: Vec<Halfspace>, vertices: Vec<Vec<f64>>) -> Self {
        Self {
            dim,
            halfspaces,
            vertices: Some(vertices),
            bounded: true,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn halfspaces(&self) -> &[Halfspace] {
        &self.halfspaces
    }

    pub fn facet_count(&self) -> usize {
        self.halfspaces.len()
    }

    pub fn vertices(&self) -> Option<&[Vec<f64>]> {
        self.vertices.as_deref()
    }

    pub fn is_bounded(&self) -> bool {
        self.bounded
    }

    pub fn is_empty(&self) -> bool {
        matches!(&self.vertices, Some(v) if v.is_empty())
    }

    pub fn contains_tol(&self, x: &[f64], tol: f64) -> Result<bool> {
        check_dim(self.dim, x.len())?;
        Ok(self.contains_unchecked(x, tol))
    }

    pub fn contains(&self, x: &[f64]) -> Result<bool> {
        self.contains_tol(x, DEFAULT_TOL)
    }

    #[inline]
    pub(crate) fn contains_unchecked(&self, x: &[f64], tol: f64) -> bool {
        self.halfspaces.iter().all(|h| h.contains_unchecked(x, tol))
    }

    /// Bounding box of the vertex cache.
    pub fn bounding_box(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        let vertices = match &self.vertices {
            Some(v) if !v.is_empty() => v,
            Some(_) => return Err(Error::Degenerate("polytope is empty".into())),
            None => {
                return Err(Error::Unbounded(
                    "polytope has no vertex cache (unbounded or dimension > 3)".into(),
                ))
            }
        };
        let mut lo = vec![f64::INFINITY; self.dim];
        let mut hi = vec![f64::NEG_INFINITY; self.dim];
        for v in vertices {
            for k in 0..self.dim {
                lo[k] = lo[k].min(v[k]);
                hi[k] = hi[k].max(v[k]);
            }
        }
        Ok((lo, hi))
    }

    /// Mean of the vertices; an interior point for full-dimensional polytopes.
    pub fn vertex_centroid(&self) -> Option<Vec<f64>> {
        let vertices = self.vertices.as_ref().filter(|v| !v.is_empty())?;
        let n = vertices.len() as f64;
        Some(
            (0..self.dim)
                .map(|k| vertices.iter().map(|v| v[k]).sum::<f64>() / n)
                .collect(),
        )
    }

    /// Exact volume of a bounded 3-D polytope: pyramids from the vertex
    /// centroid over each facet polygon.
    pub fn volume_3d(&self) -> Option<f64> {
        if self.dim != 3 || !self.bounded {
            return None;
        }
        let verts = self.vertices.as_ref()?;
        if verts.len() < 4 {
            return Some(0.0);
        }
        let c = self.vertex_centroid()?;
        let scale = vertex_scale(verts);
        let mut vol = 0.0;
        for h in &self.halfspaces {
            let on: Vec<&Vec<f64>> = verts.iter().filter(|v| h.excess(v).abs() <= 1e-9 * scale).collect();
            if on.len() < 3 {
                continue;
            }
            let fc: Vec<f64> = (0..3).map(|k| on.iter().map(|v| v[k]).sum::<f64>() / on.len() as f64).collect();
            let n = h.normal();
            let Some(u) = on.iter().map(|v| sub(v, &fc)).find(|r| norm(r) > 1e-12 * scale) else {
                continue;
            };
            let w = cross(n, &u);
            let mut ring: Vec<Vec<f64>> = on.iter().map(|v| sub(v, &fc)).collect();
            ring.sort_by(|a, b| dot(a, &w).atan2(dot(a, &u)).total_cmp(&dot(b, &w).atan2(dot(b, &u))));
            let area: f64 = (0..ring.len())
                .map(|k| 0.5 * dot(&cross(&ring[k], &ring[(k + 1) % ring.len()]), n))
                .sum();
            vol += area * (h.offset() - dot(n, &c)) / 3.0;
        }
        Some(vol)
    }

    /// Vertices of a 2-D polytope in counter-clockwise order.
    pub fn vertex_cycle_2d(&self) -> Option<Vec<[f64; 2]>> {
        if self.dim != 2 {
            return None;
        }
        let c = self.vertex_centroid()?;
        let mut cycle: Vec<[f64; 2]> = self.vertices.as_ref()?.iter().map(|v| [v[0], v[1]]).collect();
        cycle.sort_by(|a, b| {
            let ta = (a[1] - c[1]).atan2(a[0] - c[0]);
            let tb = (b[1] - c[1]).atan2(b[0] - c[0]);
            ta.total_cmp(&tb)
        });
        Some(cycle)
    }

    /// Multiplies the polytope about `center` by `factor > 0`.
    pub fn scaled_about(&self, center: &[f64], factor: f64) -> Result<Self> {
        check_dim(self.dim, center.len())?;
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(Error::InvalidParameter(format!("scale factor {factor}")));
        }
        let halfspaces = self
            .halfspaces
            .iter()
            .map(|h| Halfspace {
                normal: h.normal.clone(),
                offset: dot(&h.normal, center) + factor * (h.offset - dot(&h.normal, center)),
            })
            .collect();
        let vertices = self.vertices.as_ref().map(|vs| {
            vs.iter()
                .map(|v| v.iter().zip(center).map(|(x, c)| c + factor * (x - c)).collect())
                .collect()
        });
        Ok(Self {
            dim: self.dim,
            halfspaces,
            vertices,
            bounded: self.bounded,
        })
    }
}

pub(crate) fn vertex_scale(vertices: &[Vec<f64>]) -> f64 {
    vertices
        .iter()
        .flat_map(|v| v.iter())
        .fold(1.0_f64, |m, x| m.max(x.abs()))
}

/// The recession cone `{u : a_i · u <= 0}` is trivial iff the polytope is
/// bounded (given it is nonempty). Checked through the candidate extreme rays
/// of the cone, which lie on `d - 1` of the hyperplanes `a_i · u = 0`.
fn normals_bounded(dim: usize, hs: &[Halfspace]) -> bool {
    let recedes = |u: &[f64]| hs.iter().all(|h| dot(&h.normal, u) <= 1e-12);
    match dim {
        1 => {
            let pos = hs.iter().any(|h| h.normal[0] > 0.0);
            let neg = hs.iter().any(|h| h.normal[0] < 0.0);
            pos && neg
        }
        2 => {
            if hs.len() < 3 {
                return false;
            }
            for h in hs {
                let p = [-h.normal[1], h.normal[0]];
                if recedes(&p) || recedes(&[-p[0], -p[1]]) {
                    return false;
                }
            }
            true
        }
        3 => {
            if hs.len() < 4 {
                return false;
            }
            let mut found_pair = false;
            for i in 0..hs.len() {
                for j in i + 1..hs.len() {
                    let u = cross(&hs[i].normal, &hs[j].normal);
                    let len = norm(&u);
                    if len < 1e-12 {
                        continue;
                    }
                    found_pair = true;
                    let u: Vec<f64> = u.iter().map(|v| v / len).collect();
                    let neg: Vec<f64> = u.iter().map(|v| -v).collect();
                    if recedes(&u) || recedes(&neg) {
                        return false;
                    }
                }
            }
            found_pair && rank3(hs)
        }
        _ => false,
    }
}

fn rank3(hs: &[Halfspace]) -> bool {
    for i in 0..hs.len() {
        for j in i + 1..hs.len() {
            let c = cross(&hs[i].normal, &hs[j].normal);
            if hs[j + 1..].iter().any(|h| dot(&c, &h.normal).abs() > 1e-10) {
                return true;
            }
        }
    }
    false
}

pub(crate) fn cross(a: &[f64], b: &[f64]) -> Vec<f64> {
    vec![
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Brute-force vertex enumeration: every `dim`-subset of tight constraints.
fn enumerate_vertices(dim: usize, hs: &[Halfspace]) -> Vec<Vec<f64>> {
    let feasible = |x: &[f64]| hs.iter().all(|h| h.contains_unchecked(x, 1e-9));
    let mut out: Vec<Vec<f64>> = Vec::new();
    let push = |x: Vec<f64>, out: &mut Vec<Vec<f64>>| {
        if x.iter().all(|v| v.is_finite()) && feasible(&x) {
            let s = 1.0 + x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            if !out
                .iter()
                .any(|y| y.iter().zip(&x).all(|(a, b)| (a - b).abs() <= 1e-9 * s))
            {
                out.push(x);
            }
        }
    };
    let n = hs.len();
    match dim {
        1 => {
            for h in hs {
                push(vec![h.offset / h.normal[0]], &mut out);
            }
        }
        2 => {
            for i in 0..n {
                for j in i + 1..n {
                    let (a, b) = (&hs[i], &hs[j]);
                    let det = a.normal[0] * b.normal[1] - a.normal[1] * b.normal[0];
                    if det.abs() < 1e-12 {
                        continue;
                    }
                    let x = (a.offset * b.normal[1] - a.normal[1] * b.offset) / det;
                    let y = (a.normal[0] * b.offset - a.offset * b.normal[0]) / det;
                    push(vec![x, y], &mut out);
                }
            }
        }
        3 => {
            for i in 0..n {
                for j in i + 1..n {
                    let cij = cross(&hs[i].normal, &hs[j].normal);
                    for k in j + 1..n {
                        let det = dot(&cij, &hs[k].normal);
                        if det.abs() < 1e-12 {
                            continue;
                        }
                        // Cramer's rule via cross products
                        let cjk = cross(&hs[j].normal, &hs[k].normal);
                        let cki = cross(&hs[k].normal, &hs[i].normal);
                        let x: Vec<f64> = (0..3)
                            .map(|c| {
                                (hs[i].offset * cjk[c] + hs[j].offset * cki[c] + hs[k].offset * cij[c])
                                    / det
                            })
                            .collect();
                        push(x, &mut out);
                    }
                }
            }
        }
        _ => {}
    }
    out
}
