use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{required_samples, yatracos_family, CandidateClass, YatracosSet};
use crate::densities::Density;
use crate::error::{Error, Result};
use crate::metrics::{empirical_measure, set_integral, tv_distance, EmpiricalDistribution, IntegrationConfig, Region};
use crate::rng::{self, derive_seed, par_chunks};

/// `g_i(A_k)` for every member `i` and Yatracos set `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassIntegrals {
    pub values: Vec<Vec<f64>>,
    pub stderr: Vec<Vec<f64>>,
    pub integral_budget: usize,
    pub seed: u64,
}

impl ClassIntegrals {
    /// In one dimension every set is a finite union of intervals and the
    /// integrals go through `set_integral`. Otherwise each member draws one
    /// pool of points that is reused for every set.
    pub fn compute(class: &CandidateClass, family: &[YatracosSet], cfg: &IntegrationConfig) -> Result<Self> {
        let rows = class
            .members()
            .par_iter()
            .enumerate()
            .map(|(i, g)| -> Result<(Vec<f64>, Vec<f64>)> {
                let local = IntegrationConfig { seed: derive_seed(cfg.seed, i as u64), ..cfg.clone() };
                if class.dim() == 1 {
                    let mut v = Vec::with_capacity(family.len());
                    let mut s = Vec::with_capacity(family.len());
                    for a in family {
                        let e = set_integral(g.as_ref(), a, &local)?;
                        v.push(e.value);
                        s.push(e.stderr);
                    }
                    Ok((v, s))
                } else {
                    shared_pool_integrals(g.as_ref(), family, &local)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let (values, stderr) = rows.into_iter().unzip();
        Ok(Self { values, stderr, integral_budget: cfg.samples, seed: cfg.seed })
    }
}

fn shared_pool_integrals(g: &dyn Density, family: &[YatracosSet], cfg: &IntegrationConfig) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = cfg.samples;
    if n < 2 {
        return Err(Error::BudgetExhausted("set integrals need at least two samples".into()));
    }
    let own = g.is_normalized() && g.can_sample();
    let (lo, hi) = g.support_box();
    let vol: f64 = lo.iter().zip(&hi).map(|(a, b)| b - a).product();
    let parts = par_chunks(cfg.seed, n, |r, len| -> Result<Vec<(f64, f64)>> {
        let mut acc = vec![(0.0, 0.0); family.len()];
        let pool: Vec<(Vec<f64>, f64)> = if own {
            g.sample(r, len)?.into_iter().map(|x| (x, 1.0)).collect()
        } else {
            (0..len)
                .map(|_| {
                    let x: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| a + (b - a) * r.random::<f64>()).collect();
                    let w = vol * g.eval(&x);
                    (x, w)
                })
                .collect()
        };
        for (x, w) in &pool {
            for (k, a) in family.iter().enumerate() {
                if a.contains(x) {
                    acc[k].0 += w;
                    acc[k].1 += w * w;
                }
            }
        }
        Ok(acc)
    });
    let parts = parts.into_iter().collect::<Result<Vec<_>>>()?;
    let mut values = Vec::with_capacity(family.len());
    let mut stderr = Vec::with_capacity(family.len());
    for k in 0..family.len() {
        let (s, q) = parts.iter().fold((0.0, 0.0), |(s, q), p| (s + p[k].0, q + p[k].1));
        let (m, e) = rng::mean_stderr(s, q, n);
        values.push(m);
        stderr.push(e);
    }
    Ok((values, stderr))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    pub chosen_index: usize,
    /// `|g_i(A_k) - f̂_n(A_k)|`, one row per member.
    pub score_matrix: Vec<Vec<f64>>,
    /// Row maxima, `‖g_i - f̂_n‖_A`.
    pub objective: Vec<f64>,
    pub n: usize,
    pub seed: u64,
    pub integral_budget: usize,
}

impl SelectionResult {
    /// The chosen row maximum is no larger than any other, and no earlier
    /// member ties it.
    pub fn certify(&self) -> bool {
        let row_max = |r: &Vec<f64>| r.iter().copied().fold(0.0, f64::max);
        let maxes: Vec<f64> = self.score_matrix.iter().map(row_max).collect();
        let c = self.chosen_index;
        maxes.iter().all(|m| maxes[c] <= *m) && maxes[..c].iter().all(|m| *m > maxes[c])
    }
}

/// Minimum-distance selection against precomputed set integrals.
pub fn select_with_table(
    class: &CandidateClass,
    family: &[YatracosSet],
    table: &ClassIntegrals,
    samples: &EmpiricalDistribution,
    seed: u64,
) -> Result<SelectionResult> {
    crate::error::check_dim(class.dim(), samples.dim())?;
    if table.values.len() != class.len() || table.values.iter().any(|r| r.len() != family.len()) {
        return Err(Error::InvalidParameter("integral table does not match the class".into()));
    }
    let empirical = family.iter().map(|a| empirical_measure(samples, a)).collect::<Result<Vec<_>>>()?;
    let score_matrix: Vec<Vec<f64>> = table
        .values
        .iter()
        .map(|row| row.iter().zip(&empirical).map(|(g, e)| (g - e).abs()).collect())
        .collect();
    let objective: Vec<f64> = score_matrix.iter().map(|r| r.iter().copied().fold(0.0, f64::max)).collect();
    let mut chosen_index = 0;
    for (i, v) in objective.iter().enumerate() {
        if *v < objective[chosen_index] {
            chosen_index = i;
        }
    }
    let result = SelectionResult {
        chosen_index,
        score_matrix,
        objective,
        n: samples.n(),
        seed,
        integral_budget: table.integral_budget,
    };
    assert!(result.certify(), "argmin certificate violated");
    Ok(result)
}

/// Builds the Yatracos family and the integral table, then selects.
pub fn select(
    class: &CandidateClass,
    samples: &EmpiricalDistribution,
    cfg: &IntegrationConfig,
) -> Result<SelectionResult> {
    let family = yatracos_family(class)?;
    let table = ClassIntegrals::compute(class, &family, cfg)?;
    select_with_table(class, &family, &table, samples, cfg.seed)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarnessConfig {
    /// VC dimension `V` in `n = ⌈c V / ε²⌉`.
    pub v: usize,
    pub c: f64,
    pub trials: usize,
    pub integration: IntegrationConfig,
    /// Settings for the TV distance of each member to the truth.
    pub tv: IntegrationConfig,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        Self {
            v: 2,
            c: 5.0,
            trials: 100,
            integration: IntegrationConfig::default(),
            tv: IntegrationConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarnessReport {
    pub n: usize,
    pub trials: usize,
    pub successes: usize,
    pub success_rate: f64,
    pub chosen: Vec<usize>,
    /// TV distance of the chosen member to the truth, per trial.
    pub tv_errors: Vec<f64>,
    /// `tv_errors[t] <= threshold` within three combined standard errors.
    pub success: Vec<bool>,
    pub member_tv: Vec<f64>,
    pub member_tv_stderr: Vec<f64>,
    /// `min_i d_TV(g_i, f)`.
    pub opt_estimate: f64,
    pub opt_stderr: f64,
    /// `3 OPT + ε`, before error bars.
    pub threshold: f64,
}

/// Repeated selection from fresh samples of `f_true`; a trial succeeds when
/// the chosen member is within `3 OPT + ε` of `f_true` in total variation,
/// widened by three combined integration error bars.
pub fn guarantee_harness(
    f_true: &dyn Density,
    class: &CandidateClass,
    epsilon: f64,
    cfg: &HarnessConfig,
    seed: u64,
) -> Result<HarnessReport> {
    crate::error::check_dim(class.dim(), f_true.dim())?;
    if cfg.trials == 0 {
        return Err(Error::InvalidParameter("harness needs at least one trial".into()));
    }
    let n = required_samples(cfg.v, epsilon, cfg.c)?;
    let tvs = class
        .members()
        .iter()
        .map(|g| tv_distance(g.as_ref(), f_true, &cfg.tv))
        .collect::<Result<Vec<_>>>()?;
    let member_tv: Vec<f64> = tvs.iter().map(|t| t.value).collect();
    let member_tv_stderr: Vec<f64> = tvs.iter().map(|t| t.stderr).collect();
    let best = (0..member_tv.len()).fold(0, |b, i| if member_tv[i] < member_tv[b] { i } else { b });
    let (opt, opt_se) = (member_tv[best], member_tv_stderr[best]);
    let threshold = 3.0 * opt + epsilon;

    let family = yatracos_family(class)?;
    let table = ClassIntegrals::compute(class, &family, &cfg.integration)?;
    let outcomes = (0..cfg.trials)
        .into_par_iter()
        .map(|t| -> Result<usize> {
            let trial_seed = derive_seed(seed, t as u64);
            let mut r = rng::stream(trial_seed, 0);
            let xs = f_true.sample(&mut r, n)?;
            let emp = EmpiricalDistribution::new(xs)?;
            Ok(select_with_table(class, &family, &table, &emp, trial_seed)?.chosen_index)
        })
        .collect::<Result<Vec<_>>>()?;
    let tv_errors: Vec<f64> = outcomes.iter().map(|&c| member_tv[c]).collect();
    let success: Vec<bool> = outcomes
        .iter()
        .map(|&c| {
            let bar = 3.0 * ((3.0 * opt_se).powi(2) + member_tv_stderr[c].powi(2)).sqrt();
            member_tv[c] <= threshold + bar
        })
        .collect();
    let successes = success.iter().filter(|s| **s).count();
    Ok(HarnessReport {
        n,
        trials: cfg.trials,
        successes,
        success_rate: successes as f64 / cfg.trials as f64,
        chosen: outcomes,
        tv_errors,
        success,
        member_tv,
        member_tv_stderr,
        opt_estimate: opt,
        opt_stderr: opt_se,
        threshold,
    })
}
