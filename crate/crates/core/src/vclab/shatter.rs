use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{FamilyDescriptor, FamilyKind, SetFamilyHandle, MAX_POINTS};
use crate::error::{Error, Result};
use crate::rng;

/// Largest point set for growth counting.
const GROWTH_MAX_POINTS: usize = 12;
/// Largest number of member pairs enumerated by [`growth_count`].
const GROWTH_MAX_PAIRS: usize = 1 << 20;
/// Candidate point sets checked per parallel batch.
const BATCH: usize = 4096;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShatterReport {
    pub family: FamilyDescriptor,
    pub shattered_size: usize,
    pub witness_points: Vec<Vec<f64>>,
    pub exhaustive: bool,
    pub subsets_checked: usize,
}

/// Whether `family` realizes all `2^n` labelings of `points`, and how many
/// distinct labelings it realizes.
pub fn shatters(family: &SetFamilyHandle, points: &[Vec<f64>]) -> Result<(bool, usize)> {
    if !family.has_exact_enumerator() {
        return Err(Error::Unsupported(format!("{:?} has no exact dichotomy enumerator", family.kind())));
    }
    let count = family.labelings(points)?.len();
    Ok((count == 1usize << points.len(), count))
}

fn is_shattered(family: &SetFamilyHandle, points: &[Vec<f64>]) -> bool {
    family.labelings(points).is_ok_and(|l| l.len() == 1usize << points.len())
}

/// Search grid for exhaustive shattering: `m` equally spaced values per axis,
/// with `m = 16, 5, 3, 2` for `d = 1, 2, 3` and `d >= 4`.
pub fn search_grid(lo: &[f64], hi: &[f64]) -> Result<Vec<Vec<f64>>> {
    crate::error::check_dim(lo.len(), hi.len())?;
    if lo.is_empty() || lo.iter().zip(hi).any(|(a, b)| !(a < b) || !a.is_finite() || !b.is_finite()) {
        return Err(Error::InvalidParameter("domain box must be finite with lo < hi".into()));
    }
    let m = match lo.len() {
        1 => 16,
        2 => 5,
        3 => 3,
        _ => 2,
    };
    let mut pts = vec![Vec::new()];
    for (a, b) in lo.iter().zip(hi) {
        pts = pts
            .into_iter()
            .flat_map(|p| {
                (0..m).map(move |i| {
                    let mut q = p.clone();
                    q.push(a + (b - a) * i as f64 / (m - 1) as f64);
                    q
                })
            })
            .collect();
    }
    Ok(pts)
}

/// Lexicographic successor of a `k`-combination of `0..n`.
fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    for i in (0..k).rev() {
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Largest shattered point set found in `domain`.
///
/// Families with an exact enumerator are searched over every subset of
/// [`search_grid`], growing the size until no subset is shattered; the report
/// is exhaustive when that happens within `search_budget` subset checks.
/// Other families get a randomized search (lower bound only) drawing up to
/// `search_budget` uniform point sets in total.
pub fn vc_estimate(
    family: &SetFamilyHandle,
    domain: (&[f64], &[f64]),
    k_max: usize,
    search_budget: usize,
    seed: u64,
) -> Result<ShatterReport> {
    if k_max == 0 || k_max > 12 {
        return Err(Error::InvalidParameter(format!("k_max must be in 1..=12, got {k_max}")));
    }
    crate::error::check_dim(family.dim(), domain.0.len())?;
    let grid = search_grid(domain.0, domain.1)?;
    let mut report = ShatterReport {
        family: family.descriptor(),
        shattered_size: 0,
        witness_points: Vec::new(),
        exhaustive: false,
        subsets_checked: 0,
    };
    if family.has_exact_enumerator() {
        exhaustive_search(family, &grid, k_max, search_budget, &mut report)?;
    } else {
        random_search(family, domain, k_max, search_budget, seed, &mut report)?;
    }
    Ok(report)
}

fn exhaustive_search(
    family: &SetFamilyHandle,
    grid: &[Vec<f64>],
    k_max: usize,
    budget: usize,
    report: &mut ShatterReport,
) -> Result<()> {
    let n = grid.len();
    for k in 1..=k_max {
        if k > n.min(MAX_POINTS) {
            report.exhaustive = k > n;
            return Ok(());
        }
        let mut comb: Vec<usize> = (0..k).collect();
        let mut more = true;
        let mut found = None;
        while more && found.is_none() {
            let room = budget - report.subsets_checked;
            if room == 0 {
                return if report.shattered_size == 0 {
                    Err(Error::BudgetExhausted(format!("no shattered set certified within {budget} checks")))
                } else {
                    Ok(())
                };
            }
            let mut batch = Vec::with_capacity(BATCH.min(room));
            while more && batch.len() < BATCH.min(room) {
                batch.push(comb.clone());
                more = next_combination(&mut comb, n);
            }
            let hit = batch.par_iter().position_first(|c| {
                let pts: Vec<Vec<f64>> = c.iter().map(|&i| grid[i].clone()).collect();
                is_shattered(family, &pts)
            });
            report.subsets_checked += hit.map_or(batch.len(), |h| h + 1);
            found = hit.map(|h| batch[h].iter().map(|&i| grid[i].clone()).collect::<Vec<_>>());
        }
        match found {
            Some(w) => {
                report.shattered_size = k;
                report.witness_points = w;
            }
            None => {
                report.exhaustive = true;
                return Ok(());
            }
        }
    }
    Ok(())
}

fn random_search(
    family: &SetFamilyHandle,
    domain: (&[f64], &[f64]),
    k_max: usize,
    budget: usize,
    seed: u64,
    report: &mut ShatterReport,
) -> Result<()> {
    let (lo, hi) = domain;
    let draw = |r: &mut rng::Rng, k: usize| -> Vec<Vec<f64>> {
        (0..k).map(|_| lo.iter().zip(hi).map(|(a, b)| a + (b - a) * r.random::<f64>()).collect()).collect()
    };
    for k in 1..=k_max.min(MAX_POINTS) {
        let mut r = rng::stream(seed, k as u64);
        let mut found = None;
        while found.is_none() && report.subsets_checked < budget {
            let size = BATCH.min(budget - report.subsets_checked);
            let batch: Vec<Vec<Vec<f64>>> = (0..size).map(|_| draw(&mut r, k)).collect();
            let hit = batch.par_iter().position_first(|pts| is_shattered(family, pts));
            report.subsets_checked += hit.map_or(size, |h| h + 1);
            found = hit.map(|h| batch[h].clone());
        }
        match found {
            Some(w) => {
                report.shattered_size = k;
                report.witness_points = w;
            }
            None if k == 1 => {
                return Err(Error::BudgetExhausted(format!("no shattered point found within {budget} draws")));
            }
            None => return Ok(()),
        }
    }
    Ok(())
}

/// Number of distinct labelings a piecewise-difference family induces on
/// `points`, for toy members with at most 3 levels of at most 3 facets in
/// dimension at most 2.
pub fn growth_count(family: &SetFamilyHandle, points: &[Vec<f64>]) -> Result<usize> {
    if family.kind() != FamilyKind::PiecewiseDifference {
        return Err(Error::InvalidParameter("growth counting needs a piecewise-difference family".into()));
    }
    if family.dim() > 2 || points.len() > GROWTH_MAX_POINTS {
        return Err(Error::InvalidParameter(format!(
            "growth counting needs d <= 2 and at most {GROWTH_MAX_POINTS} points"
        )));
    }
    for g in family.pieces() {
        if g.levels().len() > 3 || g.max_facets() > 3 {
            return Err(Error::InvalidParameter("growth counting needs L <= 3 and H <= 3".into()));
        }
    }
    let pairs = family.pair_count().unwrap_or(0);
    if pairs > GROWTH_MAX_PAIRS {
        return Err(Error::BudgetExhausted(format!("{pairs} member pairs exceed {GROWTH_MAX_PAIRS}")));
    }
    Ok(family.labelings(points)?.len())
}

/// `(2L)! (c n)^(2dLH)`.
pub fn growth_bound(l: usize, h: usize, d: usize, n: usize, c: f64) -> f64 {
    let fact: f64 = (1..=2 * l).map(|k| k as f64).product();
    fact * (c * n as f64).powi((2 * d * l * h) as i32)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthObservation {
    pub l: usize,
    pub h: usize,
    pub d: usize,
    pub n: usize,
    pub count: usize,
}

/// Smallest `c` with `count <= growth_bound(l, h, d, n, c)` for every
/// observation.
pub fn fit_growth_constant(obs: &[GrowthObservation]) -> f64 {
    obs.iter()
        .map(|o| {
            let fact: f64 = (1..=2 * o.l).map(|k| k as f64).product();
            let e = (2 * o.d * o.l * o.h) as f64;
            (o.count as f64 / fact).powf(1.0 / e) / o.n as f64
        })
        .fold(0.0, f64::max)
}
