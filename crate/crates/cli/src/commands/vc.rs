//! Shattering, growth counts and the interval-discrepancy rate.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use logcave::densities::LogConcaveDensity;
use logcave::geometry::{ConvexBody, Polytope};
use logcave::structure::{Level, PiecewisePolytopeDensity};
use logcave::vclab::{
    fit_growth_constant, growth_bound, growth_count, vc_estimate, vc_rate_experiment, GrowthObservation,
    SetFamilyHandle,
};

use super::{to_value, Output};
use crate::record::{num, Metric, Table};
use crate::{parse_params, CliError, CliResult};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Params {
    pub k_max: usize,
    pub search_budget: usize,
    pub halfspace_dims: Vec<usize>,
    /// Growth counts run for `n = 1..=growth_max_points` collinear points.
    pub growth_max_points: usize,
    pub n_grid: Vec<usize>,
    pub reps: usize,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            k_max: 6,
            search_budget: 1_000_000,
            halfspace_dims: vec![1, 2],
            growth_max_points: 8,
            n_grid: vec![100, 1000, 10_000, 100_000],
            reps: 50,
        }
    }
}

/// Single-level members `y · 1[a, b]` with `a < b` at half-integers around
/// `0..n` and `y ∈ {1, 2}`.
fn interval_members(n: usize) -> logcave::Result<Vec<Arc<PiecewisePolytopeDensity>>> {
    let mut out = Vec::new();
    for y in [1.0, 2.0] {
        for a in -1..n as i64 {
            for b in a + 1..n as i64 {
                let p = Polytope::from_box(&[a as f64 + 0.5], &[b as f64 + 0.5])?;
                out.push(Arc::new(PiecewisePolytopeDensity::new(0.1, 1, vec![Level { y, polytope: p }])?));
            }
        }
    }
    Ok(out)
}

pub fn run(params: &serde_json::Value, seed: u64) -> CliResult<Output> {
    let p: Params = parse_params(params)?;
    if p.growth_max_points > 12 {
        return Err(CliError::Config("growth counting is limited to 12 points".into()));
    }
    let mut table = Table::new(&["experiment", "parameter", "n [points or samples]", "value", "stderr"]);
    let mut shatter = Vec::new();
    let mut families = vec![("intervals-1d".to_string(), SetFamilyHandle::intervals_1d())];
    for &d in &p.halfspace_dims {
        families.push((format!("halfspaces-d{d}"), SetFamilyHandle::halfspaces(d)?));
    }
    for (name, fam) in &families {
        let d = fam.dim();
        let rep = vc_estimate(fam, (&vec![0.0; d], &vec![1.0; d]), p.k_max, p.search_budget, seed)?;
        table.push(vec![name.clone(), "vc_dimension".into(), rep.shattered_size.to_string(), num(rep.shattered_size as f64), "0".into()]);
        table.push(vec![name.clone(), "exhaustive".into(), rep.subsets_checked.to_string(), u8::from(rep.exhaustive).to_string(), "0".into()]);
        table.summarize(format!("vc[{name}]"), Metric::exact(rep.shattered_size as f64));
        shatter.push(rep);
    }

    let mut growth = Vec::new();
    for n in 1..=p.growth_max_points {
        let members = interval_members(n)?;
        let fam = SetFamilyHandle::piecewise_difference(members.clone(), members)?;
        let points: Vec<Vec<f64>> = (0..n).map(|k| vec![k as f64]).collect();
        let count = growth_count(&fam, &points)?;
        table.push(vec!["growth-1d".into(), "count".into(), n.to_string(), count.to_string(), "0".into()]);
        growth.push(GrowthObservation { l: 1, h: 2, d: 1, n, count });
    }
    let c = if growth.is_empty() { 0.0 } else { fit_growth_constant(&growth) };
    if !growth.is_empty() {
        table.summarize("growth_constant", Metric::exact(c));
        let worst = growth.iter().map(|o| o.count as f64 / growth_bound(o.l, o.h, o.d, o.n, c)).fold(0.0, f64::max);
        table.summarize("growth_bound_ratio", Metric::exact(worst));
    }

    let uniform = LogConcaveDensity::uniform(ConvexBody::axis_box(vec![0.0], vec![1.0])?)?;
    let rate = vc_rate_experiment(&uniform, &SetFamilyHandle::intervals_1d(), &p.n_grid, p.reps, seed)?;
    for pt in &rate.points {
        table.push(vec!["rate-uniform".into(), "mean_discrepancy".into(), pt.n.to_string(), num(pt.mean), num(pt.stderr)]);
    }
    table.summarize("rate_slope", Metric::new(rate.slope, rate.slope_stderr));
    table.summarize("rate_constant", Metric::exact(rate.constant));
    let data = serde_json::json!({ "shatter": shatter, "growth": growth, "growth_constant": c, "rate": rate });
    Ok((to_value(&p), table, data))
}
