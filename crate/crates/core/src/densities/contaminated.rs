use rand::Rng as _;

use super::{Density, LogConcaveDensity};
use crate::error::{check_dim, Error, Result};
use crate::rng::Rng;

/// `(1 - weight) * base + weight * contaminant`.
#[derive(Debug, Clone)]
pub struct ContaminatedDensity {
    base: LogConcaveDensity,
    contaminant: LogConcaveDensity,
    weight: f64,
}

impl ContaminatedDensity {
    pub fn new(base: LogConcaveDensity, contaminant: LogConcaveDensity, weight: f64) -> Result<Self> {
        check_dim(base.dim(), contaminant.dim())?;
        if !(0.0..1.0).contains(&weight) {
            return Err(Error::InvalidParameter(format!("contamination weight {weight} outside [0, 1)")));
        }
        Ok(Self { base, contaminant, weight })
    }

    pub fn base(&self) -> &LogConcaveDensity {
        &self.base
    }

    pub fn contaminant(&self) -> &LogConcaveDensity {
        &self.contaminant
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }
}

impl Density for ContaminatedDensity {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn eval(&self, x: &[f64]) -> f64 {
        let b = self.base.eval(x);
        if self.weight == 0.0 {
            return b;
        }
        (1.0 - self.weight) * b + self.weight * self.contaminant.eval(x)
    }

    fn support_box(&self) -> (Vec<f64>, Vec<f64>) {
        let (mut lo, mut hi) = self.base.support_box();
        if self.weight > 0.0 {
            let (clo, chi) = self.contaminant.support_box();
            for k in 0..lo.len() {
                lo[k] = lo[k].min(clo[k]);
                hi[k] = hi[k].max(chi[k]);
            }
        }
        (lo, hi)
    }

    fn sample(&self, rng: &mut Rng, n: usize) -> Result<Vec<Vec<f64>>> {
        let flags: Vec<bool> = (0..n).map(|_| rng.random::<f64>() < self.weight).collect();
        let k = flags.iter().filter(|c| **c).count();
        let mut base = self.base.sample(rng, n - k)?.into_iter();
        let mut extra = if k > 0 { self.contaminant.sample(rng, k)? } else { Vec::new() }.into_iter();
        Ok(flags
            .into_iter()
            .map(|c| if c { extra.next() } else { base.next() }.expect("draw count matches flags"))
            .collect())
    }

    fn can_sample(&self) -> bool {
        self.base.can_sample() && (self.weight == 0.0 || self.contaminant.can_sample())
    }

    fn breakpoints_1d(&self) -> Vec<f64> {
        let mut b = self.base.breakpoints_1d();
        if self.weight > 0.0 {
            b.extend(self.contaminant.breakpoints_1d());
        }
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }

    fn interval_mass(&self, a: f64, b: f64) -> Option<f64> {
        let m = self.base.interval_mass(a, b)?;
        if self.weight == 0.0 {
            return Some(m);
        }
        Some((1.0 - self.weight) * m + self.weight * self.contaminant.interval_mass(a, b)?)
    }
}
