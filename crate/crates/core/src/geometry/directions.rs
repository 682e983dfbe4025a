use std::f64::consts::PI;

use rand::Rng as _;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::rng;

/// How unit directions are laid out on the sphere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DirectionScheme {
    /// Angles `2 pi j / m` on the circle (d = 2).
    UniformAngle,
    /// Golden-angle spiral on the 2-sphere (d = 3).
    FibonacciSphere,
    /// Normalized Gaussian images of a randomly shifted Halton sequence.
    QuasiRandom,
}

impl DirectionScheme {
    pub fn for_dimension(dim: usize) -> Self {
        match dim {
            2 => Self::UniformAngle,
            3 => Self::FibonacciSphere,
            _ => Self::QuasiRandom,
        }
    }
}

const PRIMES: [u64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut out = 0.0;
    let mut scale = inv;
    while i > 0 {
        out += (i % base) as f64 * scale;
        i /= base;
        scale *= inv;
    }
    out
}

/// `m` unit vectors in `R^dim`. Only the quasi-random scheme consumes `seed`.
pub fn sphere_directions(dim: usize, m: usize, scheme: DirectionScheme, seed: u64) -> Result<Vec<Vec<f64>>> {
    if dim == 0 {
        return Err(Error::InvalidParameter("dimension must be at least 1".into()));
    }
    if m < dim + 1 {
        return Err(Error::InvalidParameter(format!(
            "{m} directions cannot positively span R^{dim} (need at least {})",
            dim + 1
        )));
    }
    if dim == 1 {
        return Ok((0..m).map(|j| vec![if j % 2 == 0 { 1.0 } else { -1.0 }]).collect());
    }
    match scheme {
        DirectionScheme::UniformAngle => {
            if dim != 2 {
                return Err(Error::InvalidParameter("uniform-angle directions need d = 2".into()));
            }
            Ok((0..m)
                .map(|j| {
                    let t = 2.0 * PI * j as f64 / m as f64;
                    vec![t.cos(), t.sin()]
                })
                .collect())
        }
        DirectionScheme::FibonacciSphere => {
            if dim != 3 {
                return Err(Error::InvalidParameter("fibonacci-sphere directions need d = 3".into()));
            }
            let golden = PI * (3.0 - 5.0_f64.sqrt());
            Ok((0..m)
                .map(|i| {
                    let z = 1.0 - (2.0 * i as f64 + 1.0) / m as f64;
                    let r = (1.0 - z * z).max(0.0).sqrt();
                    let phi = golden * i as f64;
                    let v = [r * phi.cos(), r * phi.sin(), z];
                    let len = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
                    v.iter().map(|c| c / len).collect()
                })
                .collect())
        }
        DirectionScheme::QuasiRandom => {
            if dim > PRIMES.len() {
                return Err(Error::Unsupported(format!("quasi-random directions for d > {}", PRIMES.len())));
            }
            let normal = Normal::standard();
            let mut shift_rng = rng::stream(seed, 0);
            let shift: Vec<f64> = (0..dim).map(|_| shift_rng.random::<f64>()).collect();
            Ok((1..=m as u64)
                .map(|i| {
                    let g: Vec<f64> = (0..dim)
                        .map(|k| {
                            let u = (radical_inverse(i, PRIMES[k]) + shift[k]).fract();
                            normal.inverse_cdf(u.clamp(1e-12, 1.0 - 1e-12))
                        })
                        .collect();
                    let len = g.iter().map(|v| v * v).sum::<f64>().sqrt();
                    g.iter().map(|v| v / len).collect()
                })
                .collect())
        }
    }
}
