use super::body::{BoundedRegion, ConvexBody};
use super::directions::{sphere_directions, DirectionScheme};
use super::hull::convex_hull;
use super::polytope::Polytope;
use super::{axpy, norm};
use crate::error::{check_dim, Error, Result};

/// Boundary point of `body` along the ray `origin + t u`, t >= 0.
///
/// Bisects between the origin and the exit point of the bounding box. The
/// returned point is a member, and the point `tol` further along is not.
pub fn ray_boundary(body: &dyn BoundedRegion, origin: &[f64], u: &[f64], tol: f64) -> Result<Vec<f64>> {
    let dim = body.dim();
    check_dim(dim, origin.len())?;
    check_dim(dim, u.len())?;
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance {tol}")));
    }
    let len = norm(u);
    if len <= f64::MIN_POSITIVE {
        return Err(Error::InvalidParameter("ray direction has zero length".into()));
    }
    let u: Vec<f64> = u.iter().map(|v| v / len).collect();
    if !body.contains_point(origin) {
        return Err(Error::NotInterior);
    }
    let (lo, hi) = body.bounding_box()?;
    let mut t_exit = f64::INFINITY;
    for k in 0..dim {
        if u[k] > 0.0 {
            t_exit = t_exit.min((hi[k] - origin[k]) / u[k]);
        } else if u[k] < 0.0 {
            t_exit = t_exit.min((lo[k] - origin[k]) / u[k]);
        }
    }
    if !t_exit.is_finite() {
        return Err(Error::Unbounded("ray never leaves the bounding box".into()));
    }
    let t_exit = t_exit.max(0.0);
    let mut t_out = t_exit + tol.max(1e-9 * (1.0 + t_exit));
    if body.contains_point(&axpy(origin, t_out, &u)) {
        // the box may be tight; allow one widening before declaring the body unbounded
        t_out = 2.0 * t_out + 1.0;
        if body.contains_point(&axpy(origin, t_out, &u)) {
            return Err(Error::Unbounded("body extends past its bounding box".into()));
        }
    }
    let mut t_in = 0.0;
    while t_out - t_in > tol {
        let mid = 0.5 * (t_in + t_out);
        if mid <= t_in || mid >= t_out {
            break;
        }
        if body.contains_point(&axpy(origin, mid, &u)) {
            t_in = mid;
        } else {
            t_out = mid;
        }
    }
    Ok(axpy(origin, t_in, &u))
}

/// Inscribed polytope from `m` boundary points along the default direction
/// scheme for the body's dimension.
pub fn inscribed_polytope(body: &ConvexBody, m: usize, seed: u64, tol: f64) -> Result<Polytope> {
    let dim = body.dim();
    let dirs = sphere_directions(dim, m, DirectionScheme::for_dimension(dim), seed)?;
    inscribed_polytope_with_directions(body, &dirs, tol)
}

/// Convex hull of the boundary points hit by rays from the body's interior
/// point. Every vertex is a member of the body, so the hull lies inside it.
pub fn inscribed_polytope_with_directions(body: &ConvexBody, dirs: &[Vec<f64>], tol: f64) -> Result<Polytope> {
    let origin = body.interior_point();
    let points = dirs
        .iter()
        .map(|u| ray_boundary(body, &origin, u, tol))
        .collect::<Result<Vec<_>>>()?;
    convex_hull(&points)
}
