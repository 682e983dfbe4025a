use std::sync::Arc;

use proptest::prelude::*;
use rand::Rng as _;
use statrs::distribution::{ContinuousCDF, Normal};

use super::*;
use crate::geometry::{BoundedRegion, ConvexBody};
use crate::rng::{self, mean_stderr, merge_moments, par_chunks};

fn close(a: f64, b: f64, tol: f64) {
    assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
}

fn gauss(mean: Vec<f64>, var: &[f64]) -> LogConcaveDensity {
    let d = var.len();
    let cov = (0..d).map(|i| (0..d).map(|j| if i == j { var[i] } else { 0.0 }).collect()).collect();
    LogConcaveDensity::gaussian(mean, cov).unwrap()
}

fn families(d: usize) -> Vec<LogConcaveDensity> {
    let cov: Vec<Vec<f64>> = (0..d)
        .map(|i| (0..d).map(|j| if i == j { 1.0 + i as f64 } else { 0.3 }).collect())
        .collect();
    vec![
        LogConcaveDensity::gaussian((0..d).map(|k| k as f64 * 0.5).collect(), cov).unwrap(),
        LogConcaveDensity::uniform(ConvexBody::ball(vec![0.2; d], 1.5).unwrap()).unwrap(),
        LogConcaveDensity::uniform(ConvexBody::axis_box(vec![-1.0; d], (0..d).map(|k| 1.0 + k as f64).collect()).unwrap())
            .unwrap(),
        LogConcaveDensity::product_exponential((0..d).map(|k| 1.0 + 0.5 * k as f64).collect()).unwrap(),
        LogConcaveDensity::product_laplace(vec![0.3; d], (0..d).map(|k| 0.5 + 0.25 * k as f64).collect()).unwrap(),
    ]
}

#[test]
fn eval_examples() {
    let g = LogConcaveDensity::standard_gaussian(1).unwrap();
    close(eval(&g, &[0.0]).unwrap(), 0.398_942_280_401_432_7, 1e-12);
    let sq = LogConcaveDensity::uniform(ConvexBody::axis_box(vec![0.0; 2], vec![1.0; 2]).unwrap()).unwrap();
    close(eval(&sq, &[0.5, 0.5]).unwrap(), 1.0, 1e-12);
    assert_eq!(eval(&sq, &[2.0, 2.0]).unwrap(), 0.0);
    let e = LogConcaveDensity::product_exponential(vec![1.0, 1.0]).unwrap();
    close(eval(&e, &[1.0, 1.0]).unwrap(), (-2.0f64).exp(), 1e-12);
    assert!(matches!(eval(&e, &[1.0]), Err(Error::DimensionMismatch { .. })));
}

#[test]
fn max_value_examples() {
    close(LogConcaveDensity::standard_gaussian(2).unwrap().max_value(), 0.159_154_943_091_895_34, 1e-12);
    let sq = LogConcaveDensity::uniform(ConvexBody::axis_box(vec![0.0; 2], vec![1.0; 2]).unwrap()).unwrap();
    close(sq.max_value(), 1.0, 1e-12);
    let g = gauss(vec![0.0, 0.0], &[4.0, 1.0]);
    close(g.max_value(), 0.25 / std::f64::consts::PI, 1e-12);
    for d in 1..=3 {
        for f in families(d) {
            close(f.eval(f.mode()), f.max_value(), 1e-12 * f.max_value());
            close(f.potential(f.mode()), f.max_value().ln(), 1e-12);
        }
    }
}

#[test]
fn level_set_examples() {
    let g = LogConcaveDensity::standard_gaussian(2).unwrap();
    let top = g.level_set(g.max_value()).unwrap().unwrap();
    assert!(top.is_degenerate(1e-12));
    assert!(top.contains(&[0.0, 0.0]).unwrap());
    assert!(!top.contains(&[1e-5, 0.0]).unwrap());
    let disk = g.level_set(g.max_value() / std::f64::consts::E).unwrap().unwrap();
    match &disk {
        ConvexBody::Ellipsoid(e) => close(e.radius_sq(), 2.0, 1e-12),
        other => panic!("expected an ellipsoid, got {other:?}"),
    }
    assert!(disk.contains(&[1.414, 0.0]).unwrap());
    assert!(!disk.contains(&[1.415, 0.0]).unwrap());
    let sq_body = ConvexBody::axis_box(vec![0.0; 2], vec![1.0; 2]).unwrap();
    let sq = LogConcaveDensity::uniform(sq_body.clone()).unwrap();
    let l = sq.level_set(0.5).unwrap().unwrap();
    assert_eq!(l.bounding_box().unwrap(), sq_body.bounding_box().unwrap());
    assert!(sq.level_set(1.5).unwrap().is_none());
    assert!(g.level_set(0.2).unwrap().is_none());
    assert!(matches!(g.level_set(0.0), Err(Error::InvalidParameter(_))));
    assert!(matches!(g.level_set(-1.0), Err(Error::InvalidParameter(_))));
}

#[test]
fn level_sets_match_superlevel_definition() {
    let mut r = rng::stream(5, 0);
    for d in 1..=3 {
        for f in families(d) {
            let (lo, hi) = f.support_box();
            for frac in [0.9, 0.5, 0.1, 1e-3] {
                let y = f.max_value() * frac;
                let body = f.level_set(y).unwrap().unwrap();
                for _ in 0..400 {
                    // sample near the body, not over the whole (huge) support box
                    let x: Vec<f64> = lo
                        .iter()
                        .zip(&hi)
                        .zip(f.mode())
                        .map(|((a, b), m)| {
                            let w = (b - a).min(12.0);
                            (m + w * (r.random::<f64>() - 0.5)).clamp(*a, *b)
                        })
                        .collect();
                    let v = f.eval(&x);
                    if (v - y).abs() > 1e-9 * y {
                        assert_eq!(body.contains(&x).unwrap(), v >= y, "{:?} y={y} x={x:?}", f.family_tag());
                    }
                }
            }
        }
    }
}

#[test]
fn generic_potential_matches_gaussian() {
    let g = gauss(vec![1.0, -1.0], &[2.0, 0.5]);
    let gc = g.clone();
    let generic = LogConcaveDensity::generic(2, Arc::new(move |x: &[f64]| gc.potential(x)), vec![1.0, -1.0], 2.0).unwrap();
    assert_eq!(generic.family_tag(), FamilyTag::Generic);
    assert!(!generic.can_sample());
    close(generic.max_value(), g.max_value(), 1e-15);
    let y = g.max_value() * 0.05;
    let a = g.level_set(y).unwrap().unwrap();
    let b = generic.level_set(y).unwrap().unwrap();
    let (lo, hi) = b.bounding_box().unwrap();
    let (alo, ahi) = a.bounding_box().unwrap();
    for k in 0..2 {
        assert!(lo[k] <= alo[k] && hi[k] >= ahi[k], "generic box must cover the level set");
    }
    let mut r = rng::stream(1, 0);
    for _ in 0..2000 {
        let x = [alo[0] - 0.5 + r.random::<f64>() * (ahi[0] - alo[0] + 1.0), alo[1] - 0.5 + r.random::<f64>() * (ahi[1] - alo[1] + 1.0)];
        assert_eq!(a.contains(&x).unwrap(), b.contains(&x).unwrap());
    }
    let shifted = LogConcaveDensity::generic(2, Arc::new(move |x: &[f64]| g.potential(x)), vec![0.0, -1.0], 2.0);
    assert!(matches!(shifted, Err(Error::InvalidParameter(_))));
    let mut rng = rng::stream(0, 0);
    assert!(matches!(generic.sample(&mut rng, 3), Err(Error::Unsupported(_))));
}

#[test]
fn construction_errors() {
    assert!(matches!(
        LogConcaveDensity::gaussian(vec![0.0, 0.0], vec![vec![1.0, 1.0], vec![1.0, 1.0]]),
        Err(Error::Degenerate(_))
    ));
    assert!(LogConcaveDensity::gaussian(vec![0.0, 0.0], vec![vec![1.0, 0.5], vec![0.0, 1.0]]).is_err());
    assert!(LogConcaveDensity::product_exponential(vec![1.0, 0.0]).is_err());
    assert!(LogConcaveDensity::product_laplace(vec![0.0], vec![1.0, 1.0]).is_err());
    let flat = ConvexBody::axis_box(vec![0.0, 0.0], vec![1.0, 0.0]);
    assert!(flat.is_err() || LogConcaveDensity::uniform(flat.unwrap()).is_err());
    let base = LogConcaveDensity::standard_gaussian(1).unwrap();
    assert!(ContaminatedDensity::new(base.clone(), base.clone(), 1.0).is_err());
    assert!(ContaminatedDensity::new(base, LogConcaveDensity::standard_gaussian(2).unwrap(), 0.1).is_err());
}

fn mc_integral(f: &dyn Density, n: usize, seed: u64) -> (f64, f64) {
    let (lo, hi) = f.support_box();
    let vol: f64 = lo.iter().zip(&hi).map(|(a, b)| b - a).product();
    let parts = par_chunks(seed, n, |r, len| {
        let mut x = vec![0.0; lo.len()];
        let (mut s, mut q) = (0.0, 0.0);
        for _ in 0..len {
            for k in 0..x.len() {
                x[k] = lo[k] + (hi[k] - lo[k]) * r.random::<f64>();
            }
            let v = vol * f.eval(&x);
            s += v;
            q += v * v;
        }
        (s, q)
    });
    let (s, q) = merge_moments(&parts);
    mean_stderr(s, q, n)
}

#[test]
fn every_family_integrates_to_one() {
    for d in 1..=3 {
        for (i, f) in families(d).into_iter().enumerate() {
            let (m, se) = mc_integral(&f, 1 << 20, 100 + i as u64);
            assert!((m - 1.0).abs() <= 3.0 * se + 1e-12, "{:?} d={d}: {m} +- {se}", f.family_tag());
        }
    }
    let mix = ContaminatedDensity::new(
        LogConcaveDensity::standard_gaussian(2).unwrap(),
        LogConcaveDensity::uniform(ConvexBody::axis_box(vec![3.0, 3.0], vec![4.0, 5.0]).unwrap()).unwrap(),
        0.2,
    )
    .unwrap();
    let (m, se) = mc_integral(&mix, 1 << 20, 7);
    assert!((m - 1.0).abs() <= 3.0 * se, "{m} +- {se}");
}

#[test]
fn contamination_is_within_weight_in_tv() {
    // d_TV(mix, base) = eta * d_TV(contaminant, base) <= eta, checked by integration
    let base = LogConcaveDensity::standard_gaussian(1).unwrap();
    let other = LogConcaveDensity::uniform(ConvexBody::axis_box(vec![10.0], vec![11.0]).unwrap()).unwrap();
    let mix = ContaminatedDensity::new(base.clone(), other, 0.1).unwrap();
    let (lo, hi) = mix.support_box();
    let steps = 400_000;
    let h = (hi[0] - lo[0]) / steps as f64;
    let tv: f64 = (0..steps)
        .map(|i| {
            let x = [lo[0] + (i as f64 + 0.5) * h];
            (mix.eval(&x) - base.eval(&x)).abs() * h
        })
        .sum::<f64>()
        / 2.0;
    assert!(tv <= 0.1 + 1e-4, "{tv}");
    close(tv, 0.1, 1e-3);
    close(mix.interval_mass(-1e3, 1e3).unwrap(), 1.0, 1e-12);
    assert_eq!(mix.breakpoints_1d(), vec![10.0, 11.0]);
}

fn ks(mut xs: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, x)| {
            let c = cdf(*x);
            (c - i as f64 / n).max((i + 1) as f64 / n - c)
        })
        .fold(0.0, f64::max)
}

#[test]
fn samplers_pass_kolmogorov_smirnov() {
    let n = 100_000;
    // asymptotic 1% critical value
    let crit = 1.627_6 / (n as f64).sqrt();
    let cases: Vec<(LogConcaveDensity, Box<dyn Fn(f64) -> f64>)> = vec![
        (gauss(vec![1.5], &[4.0]), Box::new(|x| Normal::new(1.5, 2.0).unwrap().cdf(x))),
        (
            LogConcaveDensity::product_exponential(vec![2.0]).unwrap(),
            Box::new(|x: f64| if x < 0.0 { 0.0 } else { 1.0 - (-2.0 * x).exp() }),
        ),
        (
            LogConcaveDensity::product_laplace(vec![-1.0], vec![0.5]).unwrap(),
            Box::new(|x: f64| {
                let z = (x + 1.0) / 0.5;
                if z < 0.0 { 0.5 * z.exp() } else { 1.0 - 0.5 * (-z).exp() }
            }),
        ),
        (
            LogConcaveDensity::uniform(ConvexBody::axis_box(vec![-2.0], vec![3.0]).unwrap()).unwrap(),
            Box::new(|x: f64| ((x + 2.0) / 5.0).clamp(0.0, 1.0)),
        ),
    ];
    for (i, (f, cdf)) in cases.iter().enumerate() {
        let xs: Vec<f64> = sample(f, 40 + i as u64, n).unwrap().into_iter().map(|v| v[0]).collect();
        let stat = ks(xs.clone(), cdf);
        assert!(stat < crit, "{:?}: KS {stat} >= {crit}", f.family_tag());
        // closed-form interval masses agree with the reference CDF
        close(f.interval_mass(-0.3, 0.7).unwrap(), cdf(0.7) - cdf(-0.3), 1e-12);
    }
    // each coordinate of a product family
    let lap = LogConcaveDensity::product_laplace(vec![0.0, 2.0], vec![1.0, 3.0]).unwrap();
    let draws = sample(&lap, 9, n).unwrap();
    for (k, (m, b)) in [(0.0, 1.0), (2.0, 3.0)].into_iter().enumerate() {
        let stat = ks(draws.iter().map(|v| v[k]).collect(), |x: f64| {
            let z = (x - m) / b;
            if z < 0.0 { 0.5 * z.exp() } else { 1.0 - 0.5 * (-z).exp() }
        });
        assert!(stat < crit, "coordinate {k}: {stat}");
    }
}

#[test]
fn sample_examples() {
    let n = 100_000;
    let g = gauss(vec![3.0, 0.0], &[1.0, 1.0]);
    let xs = sample(&g, 11, n).unwrap();
    for (k, target) in [3.0, 0.0].into_iter().enumerate() {
        let m = xs.iter().map(|x| x[k]).sum::<f64>() / n as f64;
        assert!((m - target).abs() <= 3.0 / (n as f64).sqrt(), "coordinate {k}: {m}");
    }
    let disk = LogConcaveDensity::uniform(ConvexBody::unit_ball(2)).unwrap();
    let mut r = rng::stream(12, 0);
    let (pts, stats) = disk.sample_with_stats(&mut r, n, DEFAULT_ACCEPTANCE_FLOOR).unwrap();
    assert!(pts.iter().all(|p| p[0] * p[0] + p[1] * p[1] <= 1.0));
    let p = std::f64::consts::FRAC_PI_4;
    let se = (p * (1.0 - p) / stats.proposals as f64).sqrt();
    assert!((stats.acceptance_rate() - p).abs() <= 3.0 * se, "{}", stats.acceptance_rate());
    assert_eq!(sample(&g, 5, 100).unwrap(), sample(&g, 5, 100).unwrap());
    assert_ne!(sample(&g, 5, 100).unwrap(), sample(&g, 6, 100).unwrap());
    assert!(matches!(sample(&g, 5, 0), Err(Error::InvalidParameter(_))));
}

#[test]
fn rejection_floor_is_enforced() {
    let thin = LogConcaveDensity::uniform(ConvexBody::ball(vec![0.0; 3], 1.0).unwrap()).unwrap();
    let mut r = rng::stream(3, 0);
    // the ball fills pi/6 of its box, far above any sane floor
    assert!(thin.sample_with_stats(&mut r, 1000, 0.4).is_ok());
    assert!(matches!(thin.sample_with_stats(&mut r, 100_000, 0.6), Err(Error::LowAcceptance { .. })));
}

#[test]
fn contaminated_sampler_mixes() {
    let base = LogConcaveDensity::standard_gaussian(1).unwrap();
    let other = LogConcaveDensity::uniform(ConvexBody::axis_box(vec![10.0], vec![11.0]).unwrap()).unwrap();
    let mix = ContaminatedDensity::new(base, other, 0.1).unwrap();
    let n = 100_000;
    let xs = sample(&mix, 21, n).unwrap();
    let frac = xs.iter().filter(|x| x[0] >= 10.0).count() as f64 / n as f64;
    assert!((frac - 0.1).abs() <= 3.0 * (0.09 / n as f64).sqrt(), "{frac}");
    assert_eq!(xs, sample(&mix, 21, n).unwrap());
}

#[test]
fn json_spec_round_trip_and_build() {
    let text = r#"{"family":"gaussian","dimension":1,"params":{"mean":[0.0],"cov":[[1.0]]},
        "contamination":{"weight":0.1,"contaminant":{"family":"uniform-convex","dimension":1,
        "params":{"body":{"kind":"box","lo":[10.0],"hi":[11.0]}}}}}"#;
    let spec = DensitySpec::from_json(text).unwrap();
    let again = DensitySpec::from_json(&serde_json::to_string(&spec).unwrap()).unwrap();
    assert_eq!(spec, again);
    let f = spec.build().unwrap();
    close(f.eval(&[10.5]), 0.1, 1e-12);
    close(f.eval(&[0.0]), 0.9 * 0.398_942_280_401_432_7, 1e-12);
    let hull = r#"{"family":"uniform-convex","dimension":2,
        "params":{"body":{"kind":"hull","points":[[0,0],[2,0],[0,2],[0.5,0.5]]}}}"#;
    let f = DensitySpec::from_json(hull).unwrap().build_base().unwrap();
    close(f.max_value(), 0.5, 1e-12);
    let wrong_dim = r#"{"family":"product-exponential","dimension":3,"params":{"rates":[1.0,2.0]}}"#;
    assert!(DensitySpec::from_json(wrong_dim).unwrap().build().is_err());
    assert!(DensitySpec::from_json(r#"{"family":"cauchy","dimension":1,"params":{}}"#).is_err());
    let ident = r#"{"family":"gaussian","dimension":2,"params":{"mean":[0,0]}}"#;
    close(DensitySpec::from_json(ident).unwrap().build_base().unwrap().max_value(), 0.159_154_943_091_895_34, 1e-12);
}

fn any_family() -> impl Strategy<Value = LogConcaveDensity> {
    (1usize..=3, 0usize..5).prop_map(|(d, i)| families(d).swap_remove(i))
}

fn unit(v: Vec<f64>) -> Vec<f64> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-9);
    v.into_iter().map(|x| x / n).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn level_sets_are_nested(f in any_family(), a in 0.001f64..1.0, b in 0.001f64..1.0, seed in any::<u64>()) {
        let (lo_y, hi_y) = if a < b { (a, b) } else { (b, a) };
        let outer = f.level_set(lo_y * f.max_value()).unwrap().unwrap();
        let inner = f.level_set(hi_y * f.max_value()).unwrap().unwrap();
        let (blo, bhi) = inner.bounding_box().unwrap();
        let mut r = rng::stream(seed, 0);
        for _ in 0..50 {
            let x: Vec<f64> = blo.iter().zip(&bhi).map(|(l, h)| l + (h - l) * r.random::<f64>()).collect();
            if inner.contains(&x).unwrap() {
                prop_assert!(outer.contains(&x).unwrap());
            }
        }
    }

    #[test]
    fn radially_non_increasing(f in any_family(), dir in prop::collection::vec(-1.0f64..1.0, 3), t in 0.0f64..3.0, dt in 0.0f64..3.0) {
        let u = unit(dir[..f.dim()].to_vec());
        let at = |s: f64| f.eval(&f.mode().iter().zip(&u).map(|(m, v)| m + s * v).collect::<Vec<_>>());
        prop_assert!(at(t + dt) <= at(t) * (1.0 + 1e-12));
    }

    #[test]
    fn midpoint_log_concave(f in any_family(), p in prop::collection::vec(-3.0f64..3.0, 6)) {
        let d = f.dim();
        let x = &p[..d];
        let y = &p[3..3 + d];
        let mid: Vec<f64> = x.iter().zip(y).map(|(a, b)| 0.5 * (a + b)).collect();
        prop_assert!(f.eval(&mid) >= (f.eval(x) * f.eval(y)).sqrt() * (1.0 - 1e-12));
    }
}
