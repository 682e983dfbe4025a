use proptest::prelude::*;
use rand::Rng as _;

use super::*;
use crate::densities::{Density, LogConcaveDensity};
use crate::geometry::{convex_hull, ConvexBody, Polytope};
use crate::metrics::Region;
use crate::rng;

fn close(a: f64, b: f64, tol: f64) {
    assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
}

fn pentagon() -> Polytope {
    let pts: Vec<Vec<f64>> = (0..5)
        .map(|k| {
            let t = 0.3 + 2.0 * std::f64::consts::PI * k as f64 / 5.0;
            vec![1.5 * t.cos() + 0.2, t.sin() - 0.1]
        })
        .collect();
    convex_hull(&pts).unwrap()
}

#[test]
fn class_params_examples() {
    assert_eq!(class_params(1, 0.3, 1.0, 1.0).unwrap().1, 1);
    assert_eq!(class_params(1, 0.01, 5.0, 7.0).unwrap().1, 1);
    let (l, h) = class_params(2, 0.1, 1.0, 1.0).unwrap();
    close(10.0 * 10f64.ln() + 2.0 * 2f64.ln(), 24.41, 0.01);
    assert_eq!((l, h), (25, 5));
    assert_eq!(class_params(3, 0.1, 1.0, 1.0).unwrap().1, 30);
    assert!(class_params(2, 0.0, 1.0, 1.0).is_err());
    assert!(class_params(2, 0.51, 1.0, 1.0).is_err());
    assert!(class_params(0, 0.1, 1.0, 1.0).is_err());
}

#[test]
fn ladder_examples() {
    assert_eq!(ladder(1.0, 0.5, 3).unwrap(), vec![0.5, 0.25, 0.125]);
    let y = ladder(0.37, 0.13, 40).unwrap();
    for w in y.windows(2) {
        assert!(w[1] < w[0]);
        close(w[1] / w[0], 0.87, 1e-15);
    }
    assert!(ladder(0.0, 0.1, 3).is_err());
    assert!(ladder(1.0, 0.1, 0).is_err());
}

#[test]
fn default_ladder_reaches_delta() {
    for d in 1..=3 {
        for k in 1..=50 {
            let cfg = ApproxConfig::with_epsilon(0.01 * k as f64);
            let (l, _) = class_params(d, cfg.epsilon, cfg.c_l, cfg.c_h).unwrap();
            let y = ladder(1.0, cfg.epsilon, l).unwrap();
            assert!(y[l - 2] <= cfg.delta(d), "d={d} eps={} L={l}", cfg.epsilon);
        }
    }
}

#[test]
fn config_validation() {
    assert!(ApproxConfig::default().validate().is_ok());
    assert!(ApproxConfig { c_h: 0.5, ..ApproxConfig::default() }.validate().is_err());
    assert!(ApproxConfig::with_epsilon(0.7).validate().is_err());
    let f = LogConcaveDensity::standard_gaussian(2).unwrap();
    let tight = ApproxConfig { epsilon: 0.5, c_h: 1.0, ..ApproxConfig::default() };
    assert!(matches!(build_approximation(&f, &tight, 0), Err(crate::Error::InvalidParameter(_))));
}

#[test]
fn uniform_polygon_is_reproduced() {
    let q = pentagon();
    let f = LogConcaveDensity::uniform(ConvexBody::polytope(q.clone()).unwrap()).unwrap();
    let cfg = ApproxConfig::with_epsilon(0.1);
    let g = build_approximation(&f, &cfg, 1).unwrap();
    assert!(!g.levels().is_empty());
    for l in g.levels() {
        assert_eq!(l.polytope, q);
    }
    let diag = g.diagnostics().unwrap();
    assert_eq!(diag.max_deficit(), 0.0);
    assert!(diag.levels.iter().all(|l| l.directions == 0));
    // the ladder tops out at (1 - ε) M_f, so g = (1 - ε) f
    let (mass, se) = g.mass(0, 0).unwrap();
    assert_eq!(se, 0.0);
    close(mass, 0.9, 1e-12);
    let l1 = l1_error(&f, &g, 50_000, 2).unwrap();
    close(l1.value, 0.1, 1e-12);
    let mut r = rng::stream(3, 0);
    for _ in 0..10_000 {
        let x = [r.random::<f64>() * 4.0 - 2.0, r.random::<f64>() * 3.0 - 1.5];
        close(g.eval(&x), 0.9 * f.eval(&x), 1e-15);
    }
    let y1 = g.levels()[0].y;
    let s = volume_sandwich_check(&f, &g, y1, 10_000, 0).unwrap();
    close(s.lhs, s.rhs / 0.9, 1e-12);
    assert!(s.pass);
}

fn check_domination(f: &LogConcaveDensity, g: &PiecewisePolytopeDensity, n: usize, seed: u64) {
    let (lo, hi) = g.support_box();
    let mut r = rng::stream(seed, 0);
    let from_f = f.sample(&mut r, n / 2).unwrap();
    for x in from_f.into_iter().chain((0..n / 2).map(|_| {
        lo.iter().zip(&hi).map(|(a, b)| a + (b - a) * r.random::<f64>()).collect::<Vec<f64>>()
    })) {
        let gx = g.eval_eq1(&x);
        assert_eq!(gx, g.eval_eq2(&x), "max and min-index rules disagree at {x:?}");
        assert!(gx <= f.eval(&x), "g > f at {x:?}");
    }
}

#[test]
fn gaussian_2d_build() {
    let f = LogConcaveDensity::standard_gaussian(2).unwrap();
    let cfg = ApproxConfig::with_epsilon(0.2);
    let g = build_approximation(&f, &cfg, 5).unwrap();
    let (l, h) = class_params(2, 0.2, cfg.c_l, cfg.c_h).unwrap();
    assert_eq!(g.levels().len(), l);
    assert!(g.max_facets() <= h);
    assert!(g.is_nested());
    let diag = g.diagnostics().unwrap();
    assert!(diag.max_deficit() <= 0.2, "{}", diag.max_deficit());
    assert!(diag.skipped.is_empty());
    check_domination(&f, &g, 100_000, 6);
    let (mass, _) = g.mass(0, 0).unwrap();
    assert!(mass >= 0.8f64.powi(3), "{mass}");
    assert!(mass <= 1.0);
    // g <= f pointwise, so the L1 error is 1 - ∫g
    let l1 = l1_error(&f, &g, 400_000, 7).unwrap();
    assert!((l1.value - (1.0 - mass)).abs() <= 3.0 * l1.stderr, "{l1:?} vs {}", 1.0 - mass);
}

#[test]
fn gaussian_tail_mass_matches_closed_form() {
    // for N(0, I_2), P(f(X) <= y) = y / M_f
    let f = LogConcaveDensity::standard_gaussian(2).unwrap();
    let m = f.max_value();
    for frac in [0.5, 0.1, 0.01] {
        let (v, se) = tail_mass(&f, frac * m, 200_000, 4).unwrap();
        assert!((v - frac).abs() <= 3.0 * se, "{frac}: {v} +- {se}");
    }
    assert_eq!(tail_mass(&f, m, 1000, 1).unwrap(), (1.0, 0.0));
    let (tiny, _) = tail_mass(&f, 1e-12 * m, 100_000, 1).unwrap();
    assert!(tiny < 1e-4);
    assert!(tail_mass(&f, 2.0 * m, 1000, 1).is_err());
    assert!(tail_mass(&f, 0.0, 1000, 1).is_err());
    let cfg = ApproxConfig::with_epsilon(0.1);
    let (l, _) = class_params(2, 0.1, cfg.c_l, cfg.c_h).unwrap();
    let y = ladder(m, 0.1, l).unwrap();
    let (v, se) = tail_mass(&f, y[l - 2], 200_000, 9).unwrap();
    assert!(v <= 0.1 + 3.0 * se);
}

#[test]
fn level_set_of_g_examples() {
    let f = LogConcaveDensity::standard_gaussian(2).unwrap();
    let g = build_approximation(&f, &ApproxConfig::with_epsilon(0.3), 0).unwrap();
    let ys: Vec<f64> = g.levels().iter().map(|l| l.y).collect();
    assert!(g.level_set_of_g(ys[0] * 1.01).unwrap().is_empty());
    assert_eq!(g.level_set_of_g(*ys.last().unwrap()).unwrap().polytopes().len(), ys.len());
    let two = g.level_set_of_g(ys[1]).unwrap();
    assert_eq!(two.polytopes().len(), 2);
    let (lo, hi) = g.support_box();
    let mut r = rng::stream(2, 0);
    for _ in 0..20_000 {
        let x: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| a + (b - a) * r.random::<f64>()).collect();
        assert_eq!(two.contains(&x), g.eval(&x) >= ys[1]);
        let k = r.random_range(0..ys.len());
        let j = r.random_range(0..ys.len());
        let (hi_y, lo_y) = if ys[k] > ys[j] { (ys[k], ys[j]) } else { (ys[j], ys[k]) };
        if g.level_set_of_g(hi_y).unwrap().contains(&x) {
            assert!(g.level_set_of_g(lo_y).unwrap().contains(&x));
        }
    }
    assert!(g.level_set_of_g(0.0).is_err());
}

#[test]
fn sandwich_on_gaussian_levels() {
    let f = LogConcaveDensity::standard_gaussian(2).unwrap();
    let g = build_approximation(&f, &ApproxConfig::with_epsilon(0.2), 1).unwrap();
    let ys: Vec<f64> = g.levels().iter().map(|l| l.y).collect();
    let first = volume_sandwich_check(&f, &g, ys[0], 10_000, 0).unwrap();
    let p1 = crate::geometry::BoundedRegion::exact_volume(&g.levels()[0].polytope).unwrap();
    close(first.lhs, p1, 1e-12);
    let mut r = rng::stream(8, 0);
    for _ in 0..10 {
        let y = ys[ys.len() - 1] + r.random::<f64>() * (ys[0] - ys[ys.len() - 1]);
        let rep = volume_sandwich_check(&f, &g, y, 10_000, 1).unwrap();
        assert!(rep.pass, "{rep:?}");
    }
    assert!(volume_sandwich_check(&f, &g, ys[0] * 1.1, 100, 0).is_err());
    assert!(volume_sandwich_check(&f, &g, ys[ys.len() - 1] * 0.9, 100, 0).is_err());
}

#[test]
fn l1_error_shrinks_with_epsilon() {
    let f = LogConcaveDensity::standard_gaussian(2).unwrap();
    let mut prev = f64::INFINITY;
    for eps in [0.4, 0.2, 0.1] {
        let g = build_approximation(&f, &ApproxConfig::with_epsilon(eps), 0).unwrap();
        let (mass, _) = g.mass(0, 0).unwrap();
        let l1 = 1.0 - mass;
        assert!(l1 <= prev, "eps {eps}: {l1} > {prev}");
        prev = l1;
    }
}

#[test]
fn one_and_three_dimensional_builds() {
    let f = LogConcaveDensity::gaussian(vec![1.0], vec![vec![4.0]]).unwrap();
    let g = build_approximation(&f, &ApproxConfig::with_epsilon(0.1), 0).unwrap();
    assert!(g.levels().iter().all(|l| l.polytope.facet_count() == 2));
    check_domination(&f, &g, 20_000, 1);
    let (mass, _) = g.mass(0, 0).unwrap();
    close(g.interval_mass(-100.0, 100.0).unwrap(), mass, 1e-12);
    let n = g.normalized(0, 0).unwrap();
    assert!(n.is_normalized());
    close(n.interval_mass(-100.0, 100.0).unwrap(), 1.0, 1e-12);

    let f3 = LogConcaveDensity::standard_gaussian(3).unwrap();
    let cfg = ApproxConfig::with_epsilon(0.25);
    let g3 = build_approximation(&f3, &cfg, 0).unwrap();
    let (_, h) = class_params(3, 0.25, cfg.c_l, cfg.c_h).unwrap();
    assert!(g3.max_facets() <= h);
    assert!(g3.diagnostics().unwrap().max_deficit() <= 0.25);
    check_domination(&f3, &g3, 20_000, 2);
    let (m3, se) = g3.mass(0, 0).unwrap();
    assert_eq!(se, 0.0);
    let (mc, mse) = g3.clone().scaled(1.0).unwrap().mass_mc(400_000, 3);
    assert!((mc - m3).abs() <= 4.0 * mse, "{m3} vs {mc} +- {mse}");
}

#[test]
fn polytope_level_sets_are_used_directly() {
    let f = LogConcaveDensity::product_exponential(vec![1.0, 2.0]).unwrap();
    let g = build_approximation(&f, &ApproxConfig::with_epsilon(0.2), 0).unwrap();
    let diag = g.diagnostics().unwrap();
    // the top of the ladder is the point y = M_f only for ε -> 0; every level here is a triangle
    assert!(diag.levels.iter().all(|l| l.directions == 0 && l.facets == 3));
    check_domination(&f, &g, 20_000, 4);
    let lap = LogConcaveDensity::product_laplace(vec![0.0, 1.0], vec![1.0, 0.5]).unwrap();
    let g = build_approximation(&lap, &ApproxConfig::with_epsilon(0.2), 0).unwrap();
    assert!(g.levels().iter().all(|l| l.polytope.facet_count() == 4));
}

#[test]
fn layered_sampler_matches_level_masses() {
    let f = LogConcaveDensity::standard_gaussian(2).unwrap();
    let g = build_approximation(&f, &ApproxConfig::with_epsilon(0.3), 0).unwrap();
    let (mass, _) = g.mass(0, 0).unwrap();
    let p1 = &g.levels()[3].polytope;
    // ∫_{P_4} g = Σ_{i<=4} (y_i - y_{i+1}) vol(P_i) + y_5 vol(P_4) for nested levels
    let ys: Vec<f64> = g.levels().iter().map(|l| l.y).collect();
    let vols: Vec<f64> =
        g.levels().iter().map(|l| crate::geometry::BoundedRegion::exact_volume(&l.polytope).unwrap()).collect();
    let inside: f64 = (0..4).map(|i| (ys[i] - ys[i + 1]) * vols[i]).sum::<f64>() + ys[4] * vols[3];
    let n = 200_000;
    let xs = crate::densities::sample(&g, 1, n).unwrap();
    let frac = xs.iter().filter(|x| p1.contains(x).unwrap()).count() as f64 / n as f64;
    let p = inside / mass;
    assert!((frac - p).abs() <= 4.0 * (p * (1.0 - p) / n as f64).sqrt(), "{frac} vs {p}");
}

fn wire(g: &PiecewisePolytopeDensity) -> Vec<(f64, Vec<crate::geometry::Halfspace>)> {
    g.levels().iter().map(|l| (l.y, l.polytope.halfspaces().to_vec())).collect()
}

fn toy_density() -> impl Strategy<Value = PiecewisePolytopeDensity> {
    (1usize..=3, prop::collection::vec((0.01f64..1.0, prop::collection::vec(-3.0f64..3.0, 6)), 1..5)).prop_map(
        |(d, raw)| {
            let mut ys: Vec<f64> = raw.iter().map(|(y, _)| *y).collect();
            ys.sort_by(|a, b| b.total_cmp(a));
            ys.dedup();
            let levels = ys
                .iter()
                .zip(&raw)
                .map(|(y, (_, c))| {
                    let lo: Vec<f64> = (0..d).map(|k| c[k].min(c[k + 3])).collect();
                    let hi: Vec<f64> = (0..d).map(|k| c[k].max(c[k + 3]) + 0.1).collect();
                    Level { y: *y, polytope: Polytope::from_box(&lo, &hi).unwrap() }
                })
                .collect();
            PiecewisePolytopeDensity::new(0.1, d, levels).unwrap()
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn json_round_trip_is_bit_exact(g in toy_density()) {
        let text = serde_json::to_string(&g).unwrap();
        let back: PiecewisePolytopeDensity = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&serde_json::to_string(&back).unwrap(), &text);
        prop_assert_eq!(wire(&back), wire(&g));
    }

    #[test]
    fn eq1_equals_eq2(g in toy_density(), seed in any::<u64>()) {
        let mut r = rng::stream(seed, 0);
        let d = g.dim();
        for _ in 0..200 {
            let x: Vec<f64> = (0..d).map(|_| r.random::<f64>() * 8.0 - 4.0).collect();
            prop_assert_eq!(g.eval_eq1(&x), g.eval_eq2(&x));
        }
    }
}

#[test]
fn built_density_round_trips() {
    let f = LogConcaveDensity::gaussian(vec![0.3, -1.0], vec![vec![2.0, 0.4], vec![0.4, 0.7]]).unwrap();
    let g = build_approximation(&f, &ApproxConfig::with_epsilon(0.3), 0).unwrap();
    let text = serde_json::to_string(&g).unwrap();
    let back: PiecewisePolytopeDensity = serde_json::from_str(&text).unwrap();
    assert_eq!(serde_json::to_string(&back).unwrap(), text);
    assert_eq!(wire(&back), wire(&g));
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert!(v["levels"][0]["halfspaces"][0]["normal"].is_array());
    assert_eq!(v["d"], 2);
    check_domination(&f, &g, 20_000, 5);
}

#[test]
fn one_dimensional_step_view_matches_level_rule() {
    let f = LogConcaveDensity::product_laplace(vec![0.3], vec![0.7]).unwrap();
    let g = build_approximation(&f, &ApproxConfig::with_epsilon(0.15), 0).unwrap();
    let g = g.normalized(0, 0).unwrap();
    let mut r = rng::stream(31, 0);
    for _ in 0..20_000 {
        let x = [r.random::<f64>() * 30.0 - 15.0];
        assert_eq!(Density::eval(&g, &x), g.eval_eq2(&x));
    }
    let cuts = g.breakpoints_1d();
    for c in &cuts {
        assert_eq!(Density::eval(&g, &[*c]), g.eval_eq2(&[*c]));
    }
    // masses from the cumulative table agree with midpoint sums over the cuts
    let (a, b) = (cuts[3] - 0.01, cuts[cuts.len() - 5] + 0.02);
    let mut pts = vec![a];
    pts.extend(cuts.iter().copied().filter(|c| *c > a && *c < b));
    pts.push(b);
    let direct: f64 = pts.windows(2).map(|w| (w[1] - w[0]) * g.eval_eq2(&[0.5 * (w[0] + w[1])])).sum();
    close(g.interval_mass(a, b).unwrap(), direct, 1e-12);
    close(g.interval_mass(f64::NEG_INFINITY, f64::INFINITY).unwrap(), 1.0, 1e-12);
    assert_eq!(g.interval_mass(b, a), Some(0.0));
}
