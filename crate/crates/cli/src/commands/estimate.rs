//! Minimum-distance selection over a finite class, repeated over trials.

use serde::{Deserialize, Serialize};

use logcave::densities::{DensitySpec, FamilySpec};
use logcave::estimator::{guarantee_harness, select, CandidateClass, HarnessConfig};
use logcave::metrics::{EmpiricalDistribution, IntegrationConfig};
use logcave::rng::{derive_seed, stream};

use super::{to_value, Output};
use crate::record::{num, Metric, Table};
use crate::{parse_params, CliError, CliResult};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Params {
    pub truth: DensitySpec,
    pub class: Vec<DensitySpec>,
    pub epsilon: f64,
    /// VC dimension in `n = ⌈c V / ε²⌉`.
    pub v: usize,
    pub c: f64,
    pub trials: usize,
    pub integration: IntegrationConfig,
    pub tv: IntegrationConfig,
}

fn normal(mu: f64) -> DensitySpec {
    DensitySpec { family: FamilySpec::Gaussian { mean: vec![mu], cov: None }, dimension: 1, contamination: None }
}

impl Default for Params {
    fn default() -> Self {
        let h = HarnessConfig::default();
        Self {
            truth: normal(0.0),
            class: [-1.0, -0.5, 0.0, 0.5, 1.0].into_iter().map(normal).collect(),
            epsilon: 0.1,
            v: h.v,
            c: h.c,
            trials: h.trials,
            integration: h.integration,
            tv: h.tv,
        }
    }
}

pub fn run(params: &serde_json::Value, seed: u64) -> CliResult<Output> {
    let p: Params = parse_params(params)?;
    if p.class.is_empty() {
        return Err(CliError::Config("candidate class is empty".into()));
    }
    let truth = p.truth.build()?;
    let members = p.class.iter().map(DensitySpec::build).collect::<logcave::Result<Vec<_>>>()?;
    let class = CandidateClass::new(members)?;
    let cfg = HarnessConfig {
        v: p.v,
        c: p.c,
        trials: p.trials,
        integration: p.integration.clone(),
        tv: p.tv.clone(),
    };
    let report = guarantee_harness(truth.as_ref(), &class, p.epsilon, &cfg, seed)?;

    // the first trial's draw, selected again to expose its score matrix
    let mut r = stream(derive_seed(seed, 0), 0);
    let first = EmpiricalDistribution::new(truth.sample(&mut r, report.n)?)?;
    let selection = select(&class, &first, &IntegrationConfig { seed: derive_seed(seed, 0), ..p.integration.clone() })?;

    let mut table = Table::new(&["trial", "chosen [index]", "tv_error", "success [bool]"]);
    for t in 0..report.trials {
        table.push(vec![
            t.to_string(),
            report.chosen[t].to_string(),
            num(report.tv_errors[t]),
            u8::from(report.success[t]).to_string(),
        ]);
    }
    table.summarize("n", Metric::exact(report.n as f64));
    table.summarize("success_rate", Metric::exact(report.success_rate));
    table.summarize("opt", Metric::new(report.opt_estimate, report.opt_stderr));
    table.summarize("threshold", Metric::exact(report.threshold));
    let data = serde_json::json!({ "report": report, "first_trial_selection": selection });
    Ok((to_value(&p), table, data))
}
