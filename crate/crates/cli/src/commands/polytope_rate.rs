//! Volume deficit of inscribed polytopes against the number of boundary
//! points.

use serde::{Deserialize, Serialize};

use logcave::densities::BodySpec;
use logcave::geometry::{polytope_rate, PolytopeRate, VolumeMethod};
use logcave::rng::derive_seed;

use super::{to_value, Output};
use crate::record::{num, Metric, Table};
use crate::{parse_params, CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Body {
    #[serde(rename = "disk")]
    Disk,
    #[serde(rename = "ball-3d")]
    Ball3d,
    #[serde(rename = "ellipse")]
    Ellipse,
    #[serde(rename = "square")]
    Square,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Volumes {
    /// Exact polytope volumes (d <= 3).
    Exact,
    MonteCarlo,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BodyRun {
    pub body: Body,
    #[serde(default)]
    pub m_grid: Option<Vec<usize>>,
    /// Semi-axes of the ellipse.
    #[serde(default)]
    pub axes: Option<[f64; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Params {
    pub bodies: Vec<BodyRun>,
    pub volumes: Volumes,
    pub mc_samples: usize,
    pub tol: f64,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            bodies: [Body::Disk, Body::Ball3d]
                .into_iter()
                .map(|body| BodyRun { body, m_grid: None, axes: None })
                .collect(),
            volumes: Volumes::Exact,
            mc_samples: 1_000_000,
            tol: 1e-12,
        }
    }
}

impl BodyRun {
    fn resolved(&self) -> CliResult<(Self, BodySpec)> {
        let m_grid = self.m_grid.clone().unwrap_or_else(|| match self.body {
            Body::Ball3d => vec![32, 64, 128, 256],
            Body::Square => vec![4, 8, 16],
            _ => vec![8, 16, 32, 64, 128],
        });
        if self.axes.is_some() && self.body != Body::Ellipse {
            return Err(CliError::Config("axes apply to the ellipse only".into()));
        }
        let axes = (self.body == Body::Ellipse).then(|| self.axes.unwrap_or([2.0, 1.0]));
        let spec = match self.body {
            Body::Disk => BodySpec::Ball { center: vec![0.0; 2], radius: 1.0 },
            Body::Ball3d => BodySpec::Ball { center: vec![0.0; 3], radius: 1.0 },
            Body::Ellipse => {
                let [a, b] = axes.expect("ellipse axes resolved");
                BodySpec::Ellipsoid { center: vec![0.0; 2], shape: vec![vec![a * a, 0.0], vec![0.0, b * b]], radius_sq: 1.0 }
            }
            Body::Square => BodySpec::Box { lo: vec![-1.0; 2], hi: vec![1.0; 2] },
        };
        Ok((Self { body: self.body, m_grid: Some(m_grid), axes }, spec))
    }
}

fn label(b: Body) -> &'static str {
    match b {
        Body::Disk => "disk",
        Body::Ball3d => "ball-3d",
        Body::Ellipse => "ellipse",
        Body::Square => "square",
    }
}

pub fn run(params: &serde_json::Value, seed: u64) -> CliResult<Output> {
    let mut p: Params = parse_params(params)?;
    if p.bodies.is_empty() {
        return Err(CliError::Config("no bodies given".into()));
    }
    let method = match p.volumes {
        Volumes::Exact => VolumeMethod::Auto,
        Volumes::MonteCarlo => VolumeMethod::MonteCarlo,
    };
    let mut table = Table::new(&[
        "body",
        "m [directions]",
        "facets [count]",
        "volume [length^d]",
        "deficit [relative]",
        "stderr [relative]",
    ]);
    let mut reports: Vec<PolytopeRate> = Vec::new();
    let mut resolved = Vec::new();
    for (k, run) in p.bodies.iter().enumerate() {
        let (run, spec) = run.resolved()?;
        let body = spec.build()?;
        let grid = run.m_grid.clone().expect("grid resolved");
        let r = polytope_rate(&body, &grid, method, p.mc_samples, derive_seed(seed, k as u64), p.tol)?;
        for row in &r.rows {
            table.push(vec![
                label(run.body).into(),
                row.m.to_string(),
                row.facets.to_string(),
                num(row.volume),
                num(row.deficit),
                num(row.stderr),
            ]);
        }
        if let Some(fit) = r.fit {
            table.summarize(format!("slope[{}]", label(run.body)), Metric::new(fit.slope, fit.slope_stderr));
        }
        let max_deficit = r.rows.iter().map(|row| row.deficit.abs()).fold(0.0, f64::max);
        table.summarize(format!("max_abs_deficit[{}]", label(run.body)), Metric::exact(max_deficit));
        reports.push(r);
        resolved.push(run);
    }
    p.bodies = resolved;
    Ok((to_value(&p), table, to_value(&reports)))
}
