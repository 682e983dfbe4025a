//! Executable constructions for log-concave density estimation.
//!
//! - [`geometry`]: halfspace polytopes, convex bodies, inscribed polytopes, volumes.
//! - [`densities`]: log-concave families with exact samplers and level-set oracles.
//! - [`metrics`]: total variation, Hellinger, empirical measures and the A-norm.
//! - [`structure`]: the piecewise-polytope class and level-set approximation.
//! - [`estimator`]: Yatracos sets and minimum-distance selection.
//! - [`vclab`]: shattering, growth counts and the VC-inequality rate.

pub mod densities;
pub mod error;
pub mod estimator;
pub mod fit;
pub mod geometry;
pub mod metrics;
pub mod rng;
pub mod structure;
pub mod vclab;

pub use error::{Error, Result};
