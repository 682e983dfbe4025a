//! End-to-end learning curve in one dimension: select among level-set
//! approximations of a grid of Gaussians and track the TV error against `n`.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use logcave::densities::{Density, DensitySpec, FamilySpec, LogConcaveDensity};
use logcave::estimator::{select_with_table, yatracos_family, CandidateClass, ClassIntegrals};
use logcave::fit::log_log_fit;
use logcave::metrics::{tv_distance, EmpiricalDistribution, IntegrationConfig};
use logcave::rng::{derive_seed, stream};
use logcave::structure::{build_approximation, ApproxConfig};

use super::{to_value, Output};
use crate::record::{num, Metric, Table};
use crate::{parse_params, CliError, CliResult};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Params {
    pub truth: DensitySpec,
    pub approx: ApproxConfig,
    /// Candidate means and standard deviations; every pair is a candidate.
    pub locations: Vec<f64>,
    pub scales: Vec<f64>,
    pub n_grid: Vec<usize>,
    pub trials: usize,
    /// Samples used to normalize each candidate.
    pub normalize_samples: usize,
    pub integration: IntegrationConfig,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            truth: DensitySpec {
                family: FamilySpec::Gaussian { mean: vec![0.0], cov: None },
                dimension: 1,
                contamination: None,
            },
            approx: ApproxConfig::with_epsilon(0.1),
            locations: (0..=20).map(|k| -1.0 + 0.1 * k as f64).collect(),
            scales: vec![0.8, 0.9, 1.0, 1.1, 1.25],
            n_grid: vec![50, 100, 200, 400, 800, 1600],
            trials: 20,
            normalize_samples: 0,
            integration: IntegrationConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub n: usize,
    pub mean_tv: Metric,
}

pub fn run(params: &serde_json::Value, seed: u64) -> CliResult<Output> {
    let p: Params = parse_params(params)?;
    let truth = p.truth.build()?;
    if truth.dim() != 1 {
        return Err(CliError::Config("the learning curve is one-dimensional".into()));
    }
    if p.locations.is_empty() || p.scales.is_empty() || p.n_grid.is_empty() || p.trials == 0 {
        return Err(CliError::Config("need candidates, sample sizes and trials".into()));
    }
    let mut members: Vec<Arc<dyn Density>> = Vec::new();
    for (k, (&mu, &sigma)) in p.locations.iter().flat_map(|m| p.scales.iter().map(move |s| (m, s))).enumerate() {
        let f = LogConcaveDensity::gaussian(vec![mu], vec![vec![sigma * sigma]])?;
        let g = build_approximation(&f, &p.approx, derive_seed(seed, k as u64))?;
        members.push(Arc::new(g.normalized(p.normalize_samples, derive_seed(seed, k as u64))?));
    }
    let class = CandidateClass::new(members)?;
    let family = yatracos_family(&class)?;
    let table_cfg = IntegrationConfig { seed: derive_seed(seed, 1 << 32), ..p.integration.clone() };
    let integrals = ClassIntegrals::compute(&class, &family, &table_cfg)?;
    let member_tv = class
        .members()
        .par_iter()
        .map(|g| tv_distance(g.as_ref(), truth.as_ref(), &p.integration).map(|t| t.value))
        .collect::<logcave::Result<Vec<f64>>>()?;
    let opt = member_tv.iter().copied().fold(f64::INFINITY, f64::min);

    let jobs: Vec<(usize, usize)> = p.n_grid.iter().flat_map(|&n| (0..p.trials).map(move |t| (n, t))).collect();
    let chosen = jobs
        .par_iter()
        .map(|&(n, t)| -> logcave::Result<usize> {
            let s = derive_seed(derive_seed(seed, n as u64), t as u64);
            let xs = truth.sample(&mut stream(s, 0), n)?;
            let emp = EmpiricalDistribution::new(xs)?;
            Ok(select_with_table(&class, &family, &integrals, &emp, s)?.chosen_index)
        })
        .collect::<logcave::Result<Vec<usize>>>()?;

    let mut table = Table::new(&["n [samples]", "trial", "chosen [index]", "tv_error"]);
    for (&(n, t), &c) in jobs.iter().zip(&chosen) {
        table.push(vec![n.to_string(), t.to_string(), c.to_string(), num(member_tv[c])]);
    }
    let mut curve = Vec::new();
    for (k, &n) in p.n_grid.iter().enumerate() {
        let errs: Vec<f64> = chosen[k * p.trials..(k + 1) * p.trials].iter().map(|&c| member_tv[c]).collect();
        let mean = errs.iter().sum::<f64>() / errs.len() as f64;
        let se = if errs.len() > 1 {
            let var = errs.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (errs.len() - 1) as f64;
            (var / errs.len() as f64).sqrt()
        } else {
            0.0
        };
        table.summarize(format!("mean_tv[{n}]"), Metric::new(mean, se));
        curve.push(CurvePoint { n, mean_tv: Metric::new(mean, se) });
    }
    table.summarize("opt", Metric::exact(opt));
    let ns: Vec<f64> = curve.iter().map(|c| c.n as f64).collect();
    let ms: Vec<f64> = curve.iter().map(|c| c.mean_tv.value).collect();
    let alpha = if curve.len() >= 2 && ms.iter().all(|m| *m > 0.0) {
        let fit = log_log_fit(&ns, &ms)?;
        table.summarize("alpha", Metric::new(-fit.slope, fit.slope_stderr));
        Some(-fit.slope)
    } else {
        None
    };
    let data = serde_json::json!({
        "candidates": class.len(),
        "member_tv": member_tv,
        "opt": opt,
        "curve": curve,
        "alpha": alpha,
    });
    Ok((to_value(&p), table, data))
}
