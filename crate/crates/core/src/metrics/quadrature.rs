use crate::error::{Error, Result};

const GL_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683_1,
    0.0,
    0.538_469_310_105_683_1,
    0.906_179_845_938_664,
];
const GL_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_1,
    0.478_628_670_499_366_5,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
];

/// Panels each segment is cut into before adaptive refinement.
const INITIAL_PANELS: usize = 16;

fn gauss_legendre(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
    GL_NODES.iter().zip(GL_WEIGHTS).map(|(t, w)| w * f(c + h * t)).sum::<f64>() * h
}

/// Adaptive 5-point Gauss-Legendre over `[a, b]`, bisecting panels until the
/// two-half estimate agrees with the whole-panel estimate. Nodes are interior,
/// so jumps at panel endpoints never get sampled. Returns `(value, error bound)`.
pub(crate) fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, evals: &mut usize) -> Result<(f64, f64)> {
    if !(b > a) {
        return Ok((0.0, 0.0));
    }
    let width = (b - a) / INITIAL_PANELS as f64;
    let panel_tol = tol / INITIAL_PANELS as f64;
    let mut stack: Vec<(f64, f64, f64, f64)> = Vec::new();
    for k in 0..INITIAL_PANELS {
        let lo = a + k as f64 * width;
        let hi = if k + 1 == INITIAL_PANELS { b } else { lo + width };
        take(evals, 5)?;
        stack.push((lo, hi, gauss_legendre(f, lo, hi), panel_tol));
    }
    let (mut value, mut err) = (0.0, 0.0);
    while let Some((lo, hi, whole, t)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        take(evals, 10)?;
        let left = gauss_legendre(f, lo, mid);
        let right = gauss_legendre(f, mid, hi);
        let diff = (left + right - whole).abs();
        if diff <= t || hi - lo <= 1e-13 * (1.0 + lo.abs().max(hi.abs())) {
            value += left + right;
            err += diff;
        } else {
            stack.push((lo, mid, left, 0.5 * t));
            stack.push((mid, hi, right, 0.5 * t));
        }
    }
    Ok((value, err))
}

/// Integral over the union of segments cut at the sorted, deduplicated `splits`.
pub(crate) fn integrate_split(f: &dyn Fn(f64) -> f64, splits: &mut Vec<f64>, tol: f64, budget: usize) -> Result<(f64, f64)> {
    splits.retain(|v| v.is_finite());
    splits.sort_by(f64::total_cmp);
    splits.dedup();
    let segments = splits.len().saturating_sub(1).max(1);
    let mut evals = budget;
    let (mut value, mut err) = (0.0, 0.0);
    for w in splits.windows(2) {
        let (v, e) = integrate(f, w[0], w[1], tol / segments as f64, &mut evals)?;
        value += v;
        err += e;
    }
    Ok((value, err))
}

fn take(evals: &mut usize, n: usize) -> Result<()> {
    if *evals < n {
        return Err(Error::BudgetExhausted(
            "quadrature evaluation budget exhausted before reaching tolerance".into(),
        ));
    }
    *evals -= n;
    Ok(())
}
