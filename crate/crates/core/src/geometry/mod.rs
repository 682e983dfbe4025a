//! Convex bodies, halfspace polytopes, inscribed-polytope construction and
//! volume computation.
//!
//! Points are plain `&[f64]` slices. Halfspaces are stored with unit normals,
//! and membership tests are closed: boundary points count as members up to a
//! relative tolerance.

mod body;
mod directions;
mod hull;
mod inscribed;
mod polytope;
mod rate;
mod volume;

pub use body::{BoundedRegion, ConvexBody, CustomBody, Ellipsoid};
pub use directions::{sphere_directions, DirectionScheme};
pub use hull::convex_hull;
pub use inscribed::{inscribed_polytope, inscribed_polytope_with_directions, ray_boundary};
pub use polytope::{Halfspace, Polytope, DEFAULT_TOL};
pub(crate) use polytope::vertex_scale;
pub use rate::{polytope_rate, DeficitRow, PolytopeRate};
pub use volume::{unit_ball_volume, volume, VolumeEstimate, VolumeMethod};

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub(crate) fn axpy(origin: &[f64], t: f64, dir: &[f64]) -> Vec<f64> {
    origin.iter().zip(dir).map(|(o, u)| o + t * u).collect()
}
