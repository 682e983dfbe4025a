use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::polytope::{Polytope, DEFAULT_TOL};
use super::volume::unit_ball_volume;
use crate::error::{check_dim, Error, Result};

/// A bounded subset of `R^d` with a membership test.
///
/// This is the common surface used by volume estimation, ray casting and
/// set-measure routines.
pub trait BoundedRegion: Sync {
    fn dim(&self) -> usize;

    /// Closed membership. `x.len()` must equal `dim()`.
    fn contains_point(&self, x: &[f64]) -> bool;

    fn bounding_box(&self) -> Result<(Vec<f64>, Vec<f64>)>;

    /// Closed-form volume when one is known.
    fn exact_volume(&self) -> Option<f64> {
        None
    }

    /// Vertex cycle for planar polytopes.
    fn vertex_cycle_2d(&self) -> Option<Vec<[f64; 2]>> {
        None
    }
}

impl BoundedRegion for Polytope {
    fn dim(&self) -> usize {
        Polytope::dim(self)
    }

    fn contains_point(&self, x: &[f64]) -> bool {
        self.contains_unchecked(x, DEFAULT_TOL)
    }

    fn bounding_box(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        Polytope::bounding_box(self)
    }

    fn exact_volume(&self) -> Option<f64> {
        match self.dim() {
            1 => self.bounding_box().ok().map(|(lo, hi)| hi[0] - lo[0]),
            2 => self.vertex_cycle_2d().map(|c| shoelace(&c)),
            3 => self.volume_3d(),
            _ => None,
        }
    }

    fn vertex_cycle_2d(&self) -> Option<Vec<[f64; 2]>> {
        Polytope::vertex_cycle_2d(self)
    }
}

pub(crate) fn shoelace(cycle: &[[f64; 2]]) -> f64 {
    let n = cycle.len();
    if n < 3 {
        return 0.0;
    }
    let twice: f64 = (0..n)
        .map(|i| {
            let (a, b) = (cycle[i], cycle[(i + 1) % n]);
            a[0] * b[1] - a[1] * b[0]
        })
        .sum();
    twice.abs() / 2.0
}

/// `{x : (x - c)^T S^{-1} (x - c) <= r^2}` for a symmetric positive definite
/// shape matrix `S`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ellipsoid {
    center: Vec<f64>,
    shape: DMatrix<f64>,
    precision: DMatrix<f64>,
    radius_sq: f64,
    sqrt_det_shape: f64,
}

impl Ellipsoid {
    pub fn new(center: Vec<f64>, shape: DMatrix<f64>, radius_sq: f64) -> Result<Self> {
        let d = center.len();
        if shape.nrows() != d || shape.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: shape.nrows(),
            });
        }
        if !(radius_sq >= 0.0 && radius_sq.is_finite()) {
            return Err(Error::InvalidParameter(format!("ellipsoid radius^2 = {radius_sq}")));
        }
        let chol = shape
            .clone()
            .cholesky()
            .ok_or_else(|| Error::Degenerate("ellipsoid shape is not positive definite".into()))?;
        let precision = chol.inverse();
        let sqrt_det_shape = chol.l().diagonal().iter().product::<f64>();
        Ok(Self {
            center,
            shape,
            precision,
            radius_sq,
            sqrt_det_shape,
        })
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn radius_sq(&self) -> f64 {
        self.radius_sq
    }

    pub fn shape(&self) -> &DMatrix<f64> {
        &self.shape
    }

    /// Squared Mahalanobis distance of `x` from the center.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        let diff = DVector::from_iterator(x.len(), x.iter().zip(&self.center).map(|(a, c)| a - c));
        (diff.transpose() * &self.precision * &diff)[(0, 0)]
    }

    fn half_widths(&self) -> Vec<f64> {
        let r = self.radius_sq.sqrt();
        (0..self.center.len())
            .map(|k| r * self.shape[(k, k)].sqrt())
            .collect()
    }
}

type Membership = Arc<dyn Fn(&[f64]) -> bool + Send + Sync>;

/// A convex body known only through a membership oracle.
#[derive(Clone)]
pub struct CustomBody {
    dim: usize,
    membership: Membership,
    interior_point: Vec<f64>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    exact_volume: Option<f64>,
}

impl CustomBody {
    pub fn new(
        membership: Membership,
        interior_point: Vec<f64>,
        lo: Vec<f64>,
        hi: Vec<f64>,
        exact_volume: Option<f64>,
    ) -> Result<Self> {
        let dim = interior_point.len();
        check_dim(dim, lo.len())?;
        check_dim(dim, hi.len())?;
        if !membership(&interior_point) {
            return Err(Error::NotInterior);
        }
        if lo.iter().zip(&hi).any(|(a, b)| !(a <= b) || !a.is_finite() || !b.is_finite()) {
            return Err(Error::Unbounded("custom body needs a finite bounding box".into()));
        }
        Ok(Self {
            dim,
            membership,
            interior_point,
            lo,
            hi,
            exact_volume,
        })
    }
}

impl fmt::Debug for CustomBody {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomBody")
            .field("dim", &self.dim)
            .field("interior_point", &self.interior_point)
            .field("lo", &self.lo)
            .field("hi", &self.hi)
            .field("exact_volume", &self.exact_volume)
            .finish_non_exhaustive()
    }
}

/// Convex bodies used as level sets and as supports of uniform densities.
#[derive(Debug, Clone)]
pub enum ConvexBody {
    Ball { center: Vec<f64>, radius: f64 },
    Ellipsoid(Ellipsoid),
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Polytope(Polytope),
    Custom(CustomBody),
}

impl ConvexBody {
    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        if center.is_empty() || !(radius >= 0.0 && radius.is_finite()) {
            return Err(Error::InvalidParameter(format!("ball radius {radius}")));
        }
        Ok(Self::Ball { center, radius })
    }

    pub fn unit_ball(dim: usize) -> Self {
        Self::Ball {
            center: vec![0.0; dim],
            radius: 1.0,
        }
    }

    pub fn axis_box(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        check_dim(lo.len(), hi.len())?;
        if lo.is_empty() || lo.iter().zip(&hi).any(|(a, b)| !(a <= b) || !a.is_finite() || !b.is_finite()) {
            return Err(Error::InvalidParameter("box corners must satisfy lo <= hi".into()));
        }
        Ok(Self::Box { lo, hi })
    }

    /// Wraps a polytope; it must be bounded and carry vertices.
    pub fn polytope(p: Polytope) -> Result<Self> {
        if !p.is_bounded() || p.vertices().is_none() {
            return Err(Error::Unbounded("polytope body must be bounded with d <= 3".into()));
        }
        if p.is_empty() {
            return Err(Error::Degenerate("polytope is empty".into()));
        }
        Ok(Self::Polytope(p))
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Ball { center, .. } => center.len(),
            Self::Ellipsoid(e) => e.center.len(),
            Self::Box { lo, .. } => lo.len(),
            Self::Polytope(p) => p.dim(),
            Self::Custom(c) => c.dim,
        }
    }

    pub fn contains(&self, x: &[f64]) -> Result<bool> {
        check_dim(self.dim(), x.len())?;
        Ok(self.contains_point(x))
    }

    pub fn interior_point(&self) -> Vec<f64> {
        match self {
            Self::Ball { center, .. } => center.clone(),
            Self::Ellipsoid(e) => e.center.clone(),
            Self::Box { lo, hi } => lo.iter().zip(hi).map(|(a, b)| 0.5 * (a + b)).collect(),
            Self::Polytope(p) => p.vertex_centroid().expect("bounded polytope has vertices"),
            Self::Custom(c) => c.interior_point.clone(),
        }
    }

    /// A body is degenerate when its extent falls below `tol` in some direction.
    pub fn is_degenerate(&self, tol: f64) -> bool {
        match self {
            Self::Ball { radius, .. } => *radius <= tol,
            Self::Ellipsoid(e) => e.half_widths().iter().any(|w| *w <= tol),
            Self::Box { lo, hi } => lo.iter().zip(hi).any(|(a, b)| b - a <= tol),
            Self::Polytope(p) => match p.bounding_box() {
                Ok((lo, hi)) => {
                    lo.iter().zip(&hi).any(|(a, b)| b - a <= tol)
                        || self.exact_volume().is_some_and(|v| v <= tol.powi(p.dim() as i32))
                }
                Err(_) => true,
            },
            Self::Custom(c) => c.lo.iter().zip(&c.hi).any(|(a, b)| b - a <= tol),
        }
    }
}

impl BoundedRegion for ConvexBody {
    fn dim(&self) -> usize {
        ConvexBody::dim(self)
    }

    fn contains_point(&self, x: &[f64]) -> bool {
        match self {
            Self::Ball { center, radius } => {
                let d2: f64 = x.iter().zip(center).map(|(a, c)| (a - c) * (a - c)).sum();
                d2 <= radius * radius * (1.0 + DEFAULT_TOL) + DEFAULT_TOL
            }
            Self::Ellipsoid(e) => {
                e.quadratic_form(x) <= e.radius_sq * (1.0 + DEFAULT_TOL) + DEFAULT_TOL
            }
            Self::Box { lo, hi } => x.iter().zip(lo.iter().zip(hi)).all(|(v, (a, b))| {
                let slack = DEFAULT_TOL * (1.0 + a.abs().max(b.abs()));
                *v >= a - slack && *v <= b + slack
            }),
            Self::Polytope(p) => p.contains_unchecked(x, DEFAULT_TOL),
            Self::Custom(c) => (c.membership)(x),
        }
    }

    fn bounding_box(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        Ok(match self {
            Self::Ball { center, radius } => (
                center.iter().map(|c| c - radius).collect(),
                center.iter().map(|c| c + radius).collect(),
            ),
            Self::Ellipsoid(e) => {
                let w = e.half_widths();
                (
                    e.center.iter().zip(&w).map(|(c, w)| c - w).collect(),
                    e.center.iter().zip(&w).map(|(c, w)| c + w).collect(),
                )
            }
            Self::Box { lo, hi } => (lo.clone(), hi.clone()),
            Self::Polytope(p) => p.bounding_box()?,
            Self::Custom(c) => (c.lo.clone(), c.hi.clone()),
        })
    }

    fn exact_volume(&self) -> Option<f64> {
        match self {
            Self::Ball { center, radius } => {
                Some(unit_ball_volume(center.len()) * radius.powi(center.len() as i32))
            }
            Self::Ellipsoid(e) => {
                let d = e.center.len();
                Some(unit_ball_volume(d) * e.radius_sq.sqrt().powi(d as i32) * e.sqrt_det_shape)
            }
            Self::Box { lo, hi } => Some(lo.iter().zip(hi).map(|(a, b)| b - a).product()),
            Self::Polytope(p) => BoundedRegion::exact_volume(p),
            Self::Custom(c) => c.exact_volume,
        }
    }

    fn vertex_cycle_2d(&self) -> Option<Vec<[f64; 2]>> {
        match self {
            Self::Polytope(p) => p.vertex_cycle_2d(),
            Self::Box { lo, hi } if lo.len() == 2 => Some(vec![
                [lo[0], lo[1]],
                [hi[0], lo[1]],
                [hi[0], hi[1]],
                [lo[0], hi[1]],
            ]),
            _ => None,
        }
    }
}
