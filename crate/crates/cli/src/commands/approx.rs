//! Level-set approximation of a log-concave density over a grid of ε.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use logcave::densities::{DensitySpec, FamilySpec};
use logcave::rng::{derive_seed, stream};
use logcave::structure::{
    build_approximation, class_params, l1_error, ladder, tail_mass, volume_sandwich_check, ApproxConfig,
};

use super::{to_value, Output};
use crate::record::{num, Metric, Table};
use crate::{parse_params, CliError, CliResult};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Params {
    pub density: DensitySpec,
    pub epsilons: Vec<f64>,
    /// Constants of the construction; its `epsilon` is replaced per row.
    pub approx: ApproxConfig,
    /// Monte Carlo samples for mass, L1 error and tail estimates.
    pub samples: usize,
    /// Random heights checked by the volume sandwich per ε.
    pub sandwich_points: usize,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            density: DensitySpec {
                family: FamilySpec::Gaussian { mean: vec![0.0; 2], cov: None },
                dimension: 2,
                contamination: None,
            },
            epsilons: vec![0.4, 0.2, 0.1],
            approx: ApproxConfig::default(),
            samples: 200_000,
            sandwich_points: 10,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApproxRow {
    pub epsilon: f64,
    pub l: usize,
    pub h: usize,
    pub levels_built: usize,
    pub max_facets: usize,
    pub mass: Metric,
    pub l1_error: Metric,
    pub tail_mass: Option<Metric>,
    pub sandwich_passed: usize,
    pub sandwich_checked: usize,
}

pub fn run(params: &serde_json::Value, seed: u64) -> CliResult<Output> {
    let p: Params = parse_params(params)?;
    if p.density.contamination.is_some() {
        return Err(CliError::Config("approx needs an uncontaminated log-concave density".into()));
    }
    if p.epsilons.is_empty() {
        return Err(CliError::Config("no epsilons given".into()));
    }
    let f = p.density.build_base()?;
    let d = logcave::densities::Density::dim(&f);
    let mut table = Table::new(&[
        "epsilon",
        "L [levels]",
        "H [facets]",
        "levels_built [count]",
        "max_facets [count]",
        "mass [probability]",
        "l1_error",
        "l1_stderr",
        "tail_mass [probability]",
        "tail_stderr",
        "sandwich_pass_rate [fraction]",
    ]);
    let mut rows = Vec::new();
    for (k, &eps) in p.epsilons.iter().enumerate() {
        let s = derive_seed(seed, k as u64);
        let cfg = ApproxConfig { epsilon: eps, ..p.approx.clone() };
        cfg.validate()?;
        let (l, h) = class_params(d, eps, cfg.c_l, cfg.c_h)?;
        let g = build_approximation(&f, &cfg, s)?;
        let (mass, mass_se) = g.mass(p.samples, derive_seed(s, 1))?;
        let l1 = l1_error(&f, &g, p.samples, derive_seed(s, 2))?;
        let ys = ladder(f.max_value(), eps, l)?;
        let tail = if l >= 2 {
            let (v, se) = tail_mass(&f, ys[l - 2], p.samples, derive_seed(s, 3))?;
            Some(Metric::new(v, se))
        } else {
            None
        };
        let mut r = stream(derive_seed(s, 4), 0);
        let (lo, hi) = (ys[l - 1], ys[0]);
        let mut passed = 0;
        for t in 0..p.sandwich_points {
            let y = lo + (hi - lo) * r.random::<f64>();
            let rep = volume_sandwich_check(&f, &g, y, p.samples, derive_seed(s, 100 + t as u64))?;
            passed += usize::from(rep.pass);
        }
        let row = ApproxRow {
            epsilon: eps,
            l,
            h,
            levels_built: g.levels().len(),
            max_facets: g.max_facets(),
            mass: Metric::new(mass, mass_se),
            l1_error: Metric::new(l1.value, l1.stderr),
            tail_mass: tail,
            sandwich_passed: passed,
            sandwich_checked: p.sandwich_points,
        };
        let rate = if p.sandwich_points == 0 { f64::NAN } else { passed as f64 / p.sandwich_points as f64 };
        let tail_cells = tail.map_or([String::new(), String::new()], |t| [num(t.value), num(t.stderr)]);
        table.push(vec![
            num(eps),
            l.to_string(),
            h.to_string(),
            row.levels_built.to_string(),
            row.max_facets.to_string(),
            num(mass),
            num(l1.value),
            num(l1.stderr),
            tail_cells[0].clone(),
            tail_cells[1].clone(),
            num(rate),
        ]);
        table.summarize(format!("l1_error[{eps}]"), row.l1_error);
        rows.push(row);
    }
    let mut by_eps: Vec<&ApproxRow> = rows.iter().collect();
    by_eps.sort_by(|a, b| a.epsilon.total_cmp(&b.epsilon));
    let monotone = by_eps.windows(2).all(|w| w[0].l1_error.value <= w[1].l1_error.value);
    table.summarize("l1_monotone_in_epsilon", Metric::exact(f64::from(u8::from(monotone))));
    let max_ratio = rows.iter().map(|r| r.l1_error.value / r.epsilon).fold(0.0, f64::max);
    table.summarize("max_l1_over_epsilon", Metric::exact(max_ratio));
    Ok((to_value(&p), table, to_value(&rows)))
}
