use std::collections::HashSet;
use std::sync::Arc;

use proptest::prelude::*;
use rand::Rng as _;

use super::*;
use crate::densities::{sample, LogConcaveDensity};
use crate::geometry::{ConvexBody, Polytope};
use crate::metrics::{Interval, IntervalUnion, PredicateSet};
use crate::rng;
use crate::structure::Level;

fn pts1(xs: &[f64]) -> Vec<Vec<f64>> {
    xs.iter().map(|x| vec![*x]).collect()
}

fn unit_uniform() -> LogConcaveDensity {
    LogConcaveDensity::uniform(ConvexBody::axis_box(vec![0.0], vec![1.0]).unwrap()).unwrap()
}

/// Half-plane labelings found by sweeping thresholds along directions normal
/// to every point pair, nudged both ways.
fn halfplane_oracle(points: &[Vec<f64>]) -> HashSet<u32> {
    let n = points.len();
    let mut out = HashSet::from([0u32, (1u32 << n) - 1]);
    let mut angles = vec![0.0];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let t = (points[j][1] - points[i][1]).atan2(points[j][0] - points[i][0]) + std::f64::consts::FRAC_PI_2;
                angles.extend([t, t - 1e-7, t + 1e-7]);
            }
        }
    }
    for t in angles {
        let (c, s) = (t.cos(), t.sin());
        let proj: Vec<f64> = points.iter().map(|p| c * p[0] + s * p[1]).collect();
        for &cut in &proj {
            let m = proj.iter().enumerate().filter(|(_, v)| **v >= cut).fold(0u32, |m, (k, _)| m | 1 << k);
            out.insert(m);
        }
    }
    out
}

fn random_points(r: &mut rng::Rng, n: usize, d: usize) -> Vec<Vec<f64>> {
    (0..n).map(|_| (0..d).map(|_| r.random::<f64>()).collect()).collect()
}

#[test]
fn interval_shattering_examples() {
    let f = SetFamilyHandle::intervals_1d();
    assert_eq!(shatters(&f, &pts1(&[1.0, 2.0])).unwrap(), (true, 4));
    let three = pts1(&[1.0, 2.0, 3.0]);
    let (ok, count) = shatters(&f, &three).unwrap();
    assert!(!ok);
    assert_eq!(count, 7);
    assert!(!f.labelings(&three).unwrap().contains(&0b101));
    // duplicated coordinates cannot be separated
    assert_eq!(shatters(&f, &pts1(&[1.0, 1.0])).unwrap(), (false, 2));
    assert_eq!(shatters(&f, &pts1(&[])).unwrap(), (true, 1));
}

#[test]
fn halfplane_shattering_examples() {
    let f = SetFamilyHandle::halfspaces(2).unwrap();
    let tri = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]];
    assert_eq!(shatters(&f, &tri).unwrap(), (true, 8));
    let line = vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0]];
    assert_eq!(shatters(&f, &line).unwrap(), (false, 6));
    let square = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]];
    assert_eq!(shatters(&f, &square).unwrap(), (false, 14));
    let mut r = rng::stream(5, 0);
    for _ in 0..500 {
        assert!(!shatters(&f, &random_points(&mut r, 4, 2)).unwrap().0);
    }
    let h1 = SetFamilyHandle::halfspaces(1).unwrap();
    assert_eq!(shatters(&h1, &pts1(&[0.0, 1.0])).unwrap(), (true, 4));
    assert_eq!(shatters(&h1, &pts1(&[0.0, 1.0, 2.0])).unwrap(), (false, 6));
    assert!(shatters(&SetFamilyHandle::halfspaces(3).unwrap(), &[vec![0.0; 3]]).is_err());
}

#[test]
fn halfplane_enumerator_matches_sweep_oracle() {
    let f = SetFamilyHandle::halfspaces(2).unwrap();
    let mut r = rng::stream(6, 0);
    for n in 1..=9 {
        for _ in 0..20 {
            let p = random_points(&mut r, n, 2);
            let got = f.labelings(&p).unwrap();
            assert_eq!(got, halfplane_oracle(&p), "{p:?}");
            // classical count for points in general position
            assert_eq!(got.len(), if n == 1 { 2 } else { n * n - n + 2 });
        }
    }
}

#[test]
fn vc_estimates_on_grids() {
    let r = vc_estimate(&SetFamilyHandle::intervals_1d(), (&[0.0], &[1.0]), 6, 1_000_000, 0).unwrap();
    assert_eq!(r.shattered_size, 2);
    assert!(r.exhaustive);
    let r = vc_estimate(&SetFamilyHandle::halfspaces(1).unwrap(), (&[0.0], &[1.0]), 6, 1_000_000, 0).unwrap();
    assert_eq!((r.shattered_size, r.exhaustive), (2, true));
    let r = vc_estimate(&SetFamilyHandle::halfspaces(2).unwrap(), (&[0.0, 0.0], &[1.0, 1.0]), 6, 1_000_000, 0).unwrap();
    assert_eq!((r.shattered_size, r.exhaustive), (3, true));
    assert_eq!(r.witness_points.len(), 3);
    assert!(shatters(&SetFamilyHandle::halfspaces(2).unwrap(), &r.witness_points).unwrap().0);
    let json = serde_json::to_string(&r).unwrap();
    assert!(json.contains("\"kind\":\"halfspaces\""));

    let sets: Vec<Arc<dyn crate::metrics::Region>> = vec![
        Arc::new(Interval::new(0.0, 0.5)),
        Arc::new(Interval::new(0.3, 1.0)),
        Arc::new(IntervalUnion(vec![Interval::new(0.0, 0.1), Interval::new(0.8, 1.0)])),
        Arc::new(Interval::new(0.45, 0.55)),
    ];
    let fl = SetFamilyHandle::finite_list(1, sets).unwrap();
    let r = vc_estimate(&fl, (&[0.0], &[1.0]), 6, 1_000_000, 0).unwrap();
    assert!(r.shattered_size <= 2 && r.exhaustive);

    // a capped search stops early without claiming exhaustiveness
    let r = vc_estimate(&SetFamilyHandle::halfspaces(2).unwrap(), (&[0.0, 0.0], &[1.0, 1.0]), 6, 3000, 0).unwrap();
    assert!(!r.exhaustive && r.shattered_size == 3);
    assert!(vc_estimate(&SetFamilyHandle::intervals_1d(), (&[0.0], &[1.0]), 6, 0, 0).is_err());
    assert!(vc_estimate(&SetFamilyHandle::intervals_1d(), (&[0.0], &[1.0]), 13, 10, 0).is_err());
}

fn single_level(d: usize, y: f64, p: Polytope) -> Arc<crate::structure::PiecewisePolytopeDensity> {
    Arc::new(crate::structure::PiecewisePolytopeDensity::new(0.1, d, vec![Level { y, polytope: p }]).unwrap())
}

fn interval_members(n: usize, heights: &[f64]) -> Vec<Arc<crate::structure::PiecewisePolytopeDensity>> {
    let mut out = Vec::new();
    for &y in heights {
        for a in -1..n as i64 {
            for b in a + 1..n as i64 {
                let p = Polytope::from_box(&[a as f64 + 0.5], &[b as f64 + 0.5]).unwrap();
                out.push(single_level(1, y, p));
            }
        }
    }
    out
}

/// Subsets `B' \ B` of `0..n` for non-empty blocks `B'` and `B`, complemented.
fn one_interval_oracle(n: usize) -> usize {
    let mut out = HashSet::new();
    let all = (1u32 << n) - 1;
    let block = |p: usize, q: usize| -> u32 { (p..=q).fold(0, |m, k| m | 1 << k) };
    for p in 0..n {
        for q in p..n {
            out.insert(all & !block(p, q));
            for r in 0..n {
                for s in r..n {
                    out.insert(all & !(block(p, q) & !block(r, s)));
                }
            }
        }
    }
    out.len()
}

#[test]
fn growth_of_single_interval_pairs() {
    for n in 1..=8 {
        let members = interval_members(n, &[1.0, 2.0]);
        let fam = SetFamilyHandle::piecewise_difference(members.clone(), members).unwrap();
        let points = pts1(&(0..n).map(|k| k as f64).collect::<Vec<_>>());
        let count = growth_count(&fam, &points).unwrap();
        assert_eq!(count, one_interval_oracle(n), "n = {n}");
        assert!(count <= 1 << n);
    }
}

#[test]
fn growth_examples_and_bounds() {
    let g = single_level(1, 1.0, Polytope::from_box(&[0.0], &[1.0]).unwrap());
    let gp = single_level(1, 0.5, Polytope::from_box(&[0.5], &[2.0]).unwrap());
    let fam = SetFamilyHandle::piecewise_difference(vec![g.clone()], vec![gp]).unwrap();
    let points = pts1(&[-1.0, 0.25, 0.75, 1.5, 3.0]);
    assert_eq!(growth_count(&fam, &points).unwrap(), 1);
    assert!(shatters(&fam, &points).is_err());
    assert!(growth_count(&SetFamilyHandle::intervals_1d(), &points).is_err());
    assert!(growth_count(&fam, &pts1(&[0.0; 13])).is_err());

    let mut obs = Vec::new();
    for n in 1..=12 {
        let members = interval_members(n, &[1.0, 2.0]);
        let fam = SetFamilyHandle::piecewise_difference(members.clone(), members).unwrap();
        let points = pts1(&(0..n).map(|k| k as f64).collect::<Vec<_>>());
        obs.push(GrowthObservation { l: 1, h: 2, d: 1, n, count: growth_count(&fam, &points).unwrap() });
    }
    let c = fit_growth_constant(&obs[..6]);
    assert!(c > 0.0 && c < 2.0, "{c}");
    for o in &obs {
        assert!(o.count as f64 <= growth_bound(o.l, o.h, o.d, o.n, c) + 1e-9, "{o:?} c = {c}");
        assert!(o.count <= 1 << o.n);
    }
}

#[test]
fn growth_of_triangle_pairs_in_the_plane() {
    let corners = [[0.0, 0.0], [3.0, 0.0], [0.0, 3.0], [3.0, 3.0], [1.5, -1.0], [-1.0, 1.5]];
    let mut members = Vec::new();
    for i in 0..corners.len() {
        for j in i + 1..corners.len() {
            for k in j + 1..corners.len() {
                let pts: Vec<Vec<f64>> = [corners[i], corners[j], corners[k]].iter().map(|c| c.to_vec()).collect();
                if let Ok(p) = crate::geometry::convex_hull(&pts) {
                    for y in [1.0, 2.0] {
                        members.push(single_level(2, y, p.clone()));
                    }
                }
            }
        }
    }
    let fam = SetFamilyHandle::piecewise_difference(members.clone(), members.clone()).unwrap();
    let mut r = rng::stream(9, 0);
    for n in [3, 6, 9, 12] {
        let points: Vec<Vec<f64>> = random_points(&mut r, n, 2).into_iter().map(|p| vec![3.0 * p[0], 3.0 * p[1]]).collect();
        let count = growth_count(&fam, &points).unwrap();
        assert!(count <= 1 << n);
        assert!(count as f64 <= (members.len() * members.len()) as f64);
        // agrees with the same sets presented as an explicit list
        let sets: Vec<Arc<dyn crate::metrics::Region>> = members
            .iter()
            .flat_map(|g| {
                members.iter().map(move |gp| {
                    let (g, gp) = (g.clone(), gp.clone());
                    Arc::new(PredicateSet::new(2, Arc::new(move |x: &[f64]| g.eval_eq1(x) >= gp.eval_eq1(x))))
                        as Arc<dyn crate::metrics::Region>
                })
            })
            .collect();
        let (shattered, listed) = shatters(&SetFamilyHandle::finite_list(2, sets).unwrap(), &points).unwrap();
        assert_eq!(listed, count);
        assert_eq!(shattered, count == 1 << n);
    }
}

#[test]
fn random_search_reports_lower_bounds() {
    let members = interval_members(4, &[1.0, 2.0]);
    let fam = SetFamilyHandle::piecewise_difference(members.clone(), members).unwrap();
    let r = vc_estimate(&fam, (&[-1.0], &[5.0]), 4, 20_000, 3).unwrap();
    assert!(!r.exhaustive);
    assert!(r.shattered_size >= 2);
    assert_eq!(fam.labelings(&r.witness_points).unwrap().len(), 1 << r.shattered_size);
    assert_eq!(r, vc_estimate(&fam, (&[-1.0], &[5.0]), 4, 20_000, 3).unwrap());
}

#[test]
fn interval_discrepancy_matches_candidate_intervals() {
    let mut r = rng::stream(10, 0);
    for n in [1, 2, 5, 20, 50] {
        for _ in 0..10 {
            let mut xs: Vec<f64> = (0..n).map(|_| r.random::<f64>()).collect();
            xs.sort_by(f64::total_cmp);
            let stat = interval_discrepancy(&xs, |x| x.clamp(0.0, 1.0));
            let nf = n as f64;
            let mut best = 0.0f64;
            for i in 0..n {
                for j in i..n {
                    best = best.max((j - i + 1) as f64 / nf - (xs[j] - xs[i]));
                }
            }
            let mut ends = vec![0.0];
            ends.extend(&xs);
            ends.push(1.0);
            for i in 0..ends.len() {
                for j in i + 1..ends.len() {
                    best = best.max(ends[j] - ends[i] - (j - i - 1) as f64 / nf);
                }
            }
            assert!((stat - best).abs() < 1e-12, "{stat} vs {best}");
            // closed grid intervals approach the supremum from below
            let m = 2000;
            let mut grid = 0.0f64;
            for a in 0..=m {
                let lo = a as f64 / m as f64;
                let inside = xs.iter().filter(|x| **x < lo).count();
                let mut k = inside;
                for b in a..=m {
                    let hi = b as f64 / m as f64;
                    while k < n && xs[k] <= hi {
                        k += 1;
                    }
                    grid = grid.max(((k - inside) as f64 / nf - (hi - lo)).abs());
                }
            }
            assert!(grid <= stat + 1e-12);
            assert!(grid >= stat - 2.0 / m as f64 - 1e-12, "{grid} vs {stat}");
        }
    }
}

#[test]
fn rate_experiment_on_uniform() {
    let f = unit_uniform();
    let fam = SetFamilyHandle::intervals_1d();
    let rep = vc_rate_experiment(&f, &fam, &[100, 1000, 10_000], 30, 1).unwrap();
    assert!((-0.6..=-0.4).contains(&rep.slope), "{rep:?}");
    assert!(rep.points.windows(2).all(|w| w[1].mean < w[0].mean));
    assert_eq!(rep, vc_rate_experiment(&f, &fam, &[100, 1000, 10_000], 30, 1).unwrap());
    assert!(vc_rate_experiment(&f, &SetFamilyHandle::halfspaces(1).unwrap(), &[10, 20], 2, 0).is_err());
    assert!(vc_rate_experiment(&f, &fam, &[10], 2, 0).is_err());
}

#[test]
fn doubling_reps_shrinks_slope_variance() {
    let f = unit_uniform();
    let fam = SetFamilyHandle::intervals_1d();
    let grid = [50, 100, 200, 400];
    let var = |reps: usize| {
        let slopes: Vec<f64> =
            (0..100).map(|s| vc_rate_experiment(&f, &fam, &grid, reps, 1000 + s).unwrap().slope).collect();
        let m = slopes.iter().sum::<f64>() / slopes.len() as f64;
        slopes.iter().map(|s| (s - m).powi(2)).sum::<f64>() / (slopes.len() - 1) as f64
    };
    let ratio = var(20) / var(10);
    assert!((0.25..=0.85).contains(&ratio), "{ratio}");
}

#[test]
fn samples_feed_the_rate_statistic() {
    let f = LogConcaveDensity::standard_gaussian(1).unwrap();
    let xs = sample(&f, 0, 10).unwrap();
    assert_eq!(xs.len(), 10);
    let rep = vc_rate_experiment(&f, &SetFamilyHandle::intervals_1d(), &[10, 1000], 5, 2).unwrap();
    assert!(rep.points.iter().all(|p| p.values.len() == 5 && p.mean > 0.0 && p.mean <= 1.0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn subsets_of_shattered_sets_are_shattered(seed in 0u64..10_000, n in 1usize..6) {
        let mut r = rng::stream(seed, 0);
        let f = SetFamilyHandle::halfspaces(2).unwrap();
        let pts = random_points(&mut r, n, 2);
        let labels = f.labelings(&pts).unwrap();
        prop_assert!(labels.len() <= 1 << n);
        if shatters(&f, &pts).unwrap().0 {
            for drop in 0..n {
                let sub: Vec<Vec<f64>> = pts.iter().enumerate().filter(|(k, _)| *k != drop).map(|(_, p)| p.clone()).collect();
                prop_assert!(shatters(&f, &sub).unwrap().0);
            }
        }
        let xs: Vec<Vec<f64>> = pts.iter().map(|p| vec![p[0]]).collect();
        let iv = SetFamilyHandle::intervals_1d();
        let (ok, count) = shatters(&iv, &xs).unwrap();
        prop_assert_eq!(ok, n <= 2);
        prop_assert_eq!(count, 1 + n * (n + 1) / 2);
    }
}
