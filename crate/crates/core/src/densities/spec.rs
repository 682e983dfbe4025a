use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{ContaminatedDensity, Density, LogConcaveDensity};
use crate::error::{check_dim, Error, Result};
use crate::geometry::{convex_hull, ConvexBody, Ellipsoid};

/// JSON density description:
///
/// ```json
/// {"family": "gaussian", "dimension": 1,
///  "params": {"mean": [0.0], "cov": [[1.0]]},
///  "contamination": {"weight": 0.1,
///    "contaminant": {"family": "uniform-convex", "dimension": 1,
///                    "params": {"body": {"kind": "box", "lo": [10.0], "hi": [11.0]}}}}}
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensitySpec {
    #[serde(flatten)]
    pub family: FamilySpec,
    pub dimension: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contamination: Option<ContaminationSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "kebab-case")]
pub enum FamilySpec {
    Gaussian {
        mean: Vec<f64>,
        /// Identity when omitted.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cov: Option<Vec<Vec<f64>>>,
    },
    UniformConvex {
        body: BodySpec,
    },
    ProductExponential {
        rates: Vec<f64>,
    },
    ProductLaplace {
        locations: Vec<f64>,
        scales: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BodySpec {
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Ball { center: Vec<f64>, radius: f64 },
    Ellipsoid { center: Vec<f64>, shape: Vec<Vec<f64>>, radius_sq: f64 },
    /// Convex hull of the listed points.
    Hull { points: Vec<Vec<f64>> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContaminationSpec {
    pub weight: f64,
    pub contaminant: Box<DensitySpec>,
}

impl BodySpec {
    pub fn build(&self) -> Result<ConvexBody> {
        match self {
            Self::Box { lo, hi } => ConvexBody::axis_box(lo.clone(), hi.clone()),
            Self::Ball { center, radius } => ConvexBody::ball(center.clone(), *radius),
            Self::Ellipsoid { center, shape, radius_sq } => {
                let d = center.len();
                if shape.len() != d || shape.iter().any(|r| r.len() != d) {
                    return Err(Error::DimensionMismatch { expected: d, got: shape.len() });
                }
                let m = DMatrix::from_fn(d, d, |i, j| shape[i][j]);
                Ok(ConvexBody::Ellipsoid(Ellipsoid::new(center.clone(), m, *radius_sq)?))
            }
            Self::Hull { points } => ConvexBody::polytope(convex_hull(points)?),
        }
    }
}

impl DensitySpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidParameter(format!("density spec: {e}")))
    }

    /// The uncontaminated log-concave part.
    pub fn build_base(&self) -> Result<LogConcaveDensity> {
        let f = match &self.family {
            FamilySpec::Gaussian { mean, cov } => match cov {
                Some(c) => LogConcaveDensity::gaussian(mean.clone(), c.clone())?,
                None => {
                    let d = mean.len();
                    let id = (0..d).map(|i| (0..d).map(|j| f64::from(u8::from(i == j))).collect()).collect();
                    LogConcaveDensity::gaussian(mean.clone(), id)?
                }
            },
            FamilySpec::UniformConvex { body } => LogConcaveDensity::uniform(body.build()?)?,
            FamilySpec::ProductExponential { rates } => LogConcaveDensity::product_exponential(rates.clone())?,
            FamilySpec::ProductLaplace { locations, scales } => {
                LogConcaveDensity::product_laplace(locations.clone(), scales.clone())?
            }
        };
        check_dim(self.dimension, f.dim())?;
        Ok(f)
    }

    /// The full density, wrapped in a contamination mixture when requested.
    pub fn build(&self) -> Result<Arc<dyn Density>> {
        let base = self.build_base()?;
        match &self.contamination {
            None => Ok(Arc::new(base)),
            Some(c) => {
                if c.contaminant.contamination.is_some() {
                    return Err(Error::InvalidParameter("nested contamination is not supported".into()));
                }
                let other = c.contaminant.build_base()?;
                Ok(Arc::new(ContaminatedDensity::new(base, other, c.weight)?))
            }
        }
    }
}
