use serde::{Deserialize, Serialize};

use super::Region;
use crate::error::{Error, Result};

/// The empirical distribution of a finite sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalDistribution {
    samples: Vec<Vec<f64>>,
    #[serde(skip)]
    sorted: Option<Vec<f64>>,
}

impl EmpiricalDistribution {
    pub fn new(samples: Vec<Vec<f64>>) -> Result<Self> {
        let Some(first) = samples.first() else {
            return Err(Error::InvalidParameter("empirical distribution needs at least one sample".into()));
        };
        let d = first.len();
        if d == 0 {
            return Err(Error::InvalidParameter("samples have dimension 0".into()));
        }
        if let Some(bad) = samples.iter().find(|s| s.len() != d) {
            return Err(Error::DimensionMismatch { expected: d, got: bad.len() });
        }
        let sorted = (d == 1).then(|| {
            let mut v: Vec<f64> = samples.iter().map(|s| s[0]).collect();
            v.sort_by(f64::total_cmp);
            v
        });
        Ok(Self { samples, sorted })
    }

    pub fn n(&self) -> usize {
        self.samples.len()
    }

    pub fn dim(&self) -> usize {
        self.samples[0].len()
    }

    pub fn samples(&self) -> &[Vec<f64>] {
        &self.samples
    }

    /// Sorted sample values when `dim() == 1`.
    pub fn sorted_1d(&self) -> Option<&[f64]> {
        self.sorted.as_deref()
    }

    /// Number of samples inside `region`. In one dimension a region with
    /// breakpoints is tested once per gap between them, plus once per sample
    /// sitting exactly on a breakpoint.
    pub fn count(&self, region: &dyn Region) -> usize {
        if let (Some(sorted), Some(mut cuts)) = (self.sorted.as_deref(), region.breakpoints_1d()) {
            cuts.sort_by(f64::total_cmp);
            cuts.dedup();
            let mut total = 0;
            let mut start = 0;
            for k in 0..=cuts.len() {
                let hi = cuts.get(k).copied().unwrap_or(f64::INFINITY);
                let end = start + sorted[start..].partition_point(|x| *x < hi);
                if end > start && region.contains(&[sorted[start]]) {
                    total += end - start;
                }
                let on = sorted[end..].partition_point(|x| *x <= hi);
                if on > 0 && region.contains(&[hi]) {
                    total += on;
                }
                start = end + on;
            }
            return total;
        }
        self.samples.iter().filter(|x| region.contains(x)).count()
    }
}

/// `(1/n) * #{i : X_i in A}`.
pub fn empirical_measure(e: &EmpiricalDistribution, region: &dyn Region) -> Result<f64> {
    crate::error::check_dim(e.dim(), region.dim())?;
    Ok(e.count(region) as f64 / e.n() as f64)
}

/// One-sided Kolmogorov deviations `(D+, D-)` of sorted samples against a CDF.
///
/// `D+ = sup_x (F_n(x) - F(x))` and `D- = sup_x (F(x) - F_n(x))`. For a
/// continuous `F` their sum (the Kuiper statistic) is the supremum of
/// `|F_n(I) - F(I)|` over intervals `I`.
pub fn ecdf_deviations(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> (f64, f64) {
    let n = sorted.len() as f64;
    let (mut plus, mut minus) = (0.0f64, 0.0f64);
    for (i, x) in sorted.iter().enumerate() {
        let c = cdf(*x);
        plus = plus.max((i + 1) as f64 / n - c);
        minus = minus.max(c - i as f64 / n);
    }
    (plus, minus)
}
