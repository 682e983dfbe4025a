use std::fmt;
use std::sync::Arc;

use crate::geometry::{BoundedRegion, ConvexBody, Polytope, DEFAULT_TOL};

/// A measurable set given by a membership predicate. Boundary points are
/// members.
pub trait Region: Send + Sync {
    fn dim(&self) -> usize;

    fn contains(&self, x: &[f64]) -> bool;

    /// For 1-D sets: finitely many points outside of which membership is
    /// constant on each open gap. `None` when unknown.
    fn breakpoints_1d(&self) -> Option<Vec<f64>> {
        None
    }
}

/// Closed interval `[lo, hi]`; either end may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }
}

impl Region for Interval {
    fn dim(&self) -> usize {
        1
    }

    fn contains(&self, x: &[f64]) -> bool {
        self.lo <= x[0] && x[0] <= self.hi
    }

    fn breakpoints_1d(&self) -> Option<Vec<f64>> {
        Some([self.lo, self.hi].into_iter().filter(|v| v.is_finite()).collect())
    }
}

/// Finite union of closed intervals.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct IntervalUnion(pub Vec<Interval>);

impl Region for IntervalUnion {
    fn dim(&self) -> usize {
        1
    }

    fn contains(&self, x: &[f64]) -> bool {
        self.0.iter().any(|i| i.contains(x))
    }

    fn breakpoints_1d(&self) -> Option<Vec<f64>> {
        Some(self.0.iter().flat_map(|i| i.breakpoints_1d().unwrap_or_default()).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WholeSpace(pub usize);

impl Region for WholeSpace {
    fn dim(&self) -> usize {
        self.0
    }

    fn contains(&self, _x: &[f64]) -> bool {
        true
    }

    fn breakpoints_1d(&self) -> Option<Vec<f64>> {
        Some(Vec::new())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EmptySet(pub usize);

impl Region for EmptySet {
    fn dim(&self) -> usize {
        self.0
    }

    fn contains(&self, _x: &[f64]) -> bool {
        false
    }

    fn breakpoints_1d(&self) -> Option<Vec<f64>> {
        Some(Vec::new())
    }
}

pub type Predicate = Arc<dyn Fn(&[f64]) -> bool + Send + Sync>;

/// A region defined by an arbitrary closure.
#[derive(Clone)]
pub struct PredicateSet {
    dim: usize,
    predicate: Predicate,
    breakpoints: Option<Vec<f64>>,
}

impl PredicateSet {
    pub fn new(dim: usize, predicate: Predicate) -> Self {
        Self { dim, predicate, breakpoints: None }
    }

    /// Declares 1-D breakpoints so that integrals can be computed exactly.
    pub fn with_breakpoints(mut self, breakpoints: Vec<f64>) -> Self {
        self.breakpoints = Some(breakpoints);
        self
    }
}

impl fmt::Debug for PredicateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PredicateSet").field("dim", &self.dim).finish_non_exhaustive()
    }
}

impl Region for PredicateSet {
    fn dim(&self) -> usize {
        self.dim
    }

    fn contains(&self, x: &[f64]) -> bool {
        (self.predicate)(x)
    }

    fn breakpoints_1d(&self) -> Option<Vec<f64>> {
        self.breakpoints.clone()
    }
}

impl Region for ConvexBody {
    fn dim(&self) -> usize {
        ConvexBody::dim(self)
    }

    fn contains(&self, x: &[f64]) -> bool {
        self.contains_point(x)
    }

    fn breakpoints_1d(&self) -> Option<Vec<f64>> {
        if ConvexBody::dim(self) != 1 {
            return None;
        }
        self.bounding_box().ok().map(|(lo, hi)| vec![lo[0], hi[0]])
    }
}

impl Region for Polytope {
    fn dim(&self) -> usize {
        Polytope::dim(self)
    }

    fn contains(&self, x: &[f64]) -> bool {
        self.contains_unchecked(x, DEFAULT_TOL)
    }

    fn breakpoints_1d(&self) -> Option<Vec<f64>> {
        if Polytope::dim(self) != 1 {
            return None;
        }
        Some(self.halfspaces().iter().map(|h| h.offset() / h.normal()[0]).collect())
    }
}
