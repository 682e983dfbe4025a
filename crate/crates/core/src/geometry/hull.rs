//! Convex hulls in dimensions 1 to 3, returned in facet form.

use std::collections::HashMap;

use super::polytope::{cross, vertex_scale, Halfspace, Polytope};
use super::{dot, norm, sub};
use crate::error::{Error, Result};

/// Convex hull of `points` as a [`Polytope`] with facets and vertex cache.
///
/// Affinely dependent inputs are rejected: a lower-dimensional hull has zero
/// volume.
pub fn convex_hull(points: &[Vec<f64>]) -> Result<Polytope> {
    let dim = points
        .first()
        .map(|p| p.len())
        .ok_or_else(|| Error::Degenerate("no points".into()))?;
    for p in points {
        crate::error::check_dim(dim, p.len())?;
        if p.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite hull point".into()));
        }
    }
    match dim {
        1 => hull_1d(points),
        2 => hull_2d(points),
        3 => hull_3d(points),
        _ => Err(Error::Unsupported(format!(
            "hull to halfspace conversion is implemented for d <= 3, got d = {dim}"
        ))),
    }
}

fn hull_1d(points: &[Vec<f64>]) -> Result<Polytope> {
    let lo = points.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
    let hi = points.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
    if hi - lo <= 1e-12 * (1.0 + lo.abs().max(hi.abs())) {
        return Err(Error::Degenerate("all points coincide".into()));
    }
    Ok(Polytope::from_parts(
        1,
        vec![Halfspace::new(vec![1.0], hi)?, Halfspace::new(vec![-1.0], -lo)?],
        vec![vec![lo], vec![hi]],
    ))
}

fn turn(o: &[f64; 2], a: &[f64; 2], b: &[f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Whether `a` is within `eps` of the segment from `o` to `b`.
fn on_segment(o: &[f64; 2], a: &[f64; 2], b: &[f64; 2], eps: f64) -> bool {
    if turn(o, a, b).abs() > eps {
        return false;
    }
    let along = (a[0] - o[0]) * (b[0] - o[0]) + (a[1] - o[1]) * (b[1] - o[1]);
    let len_sq = (b[0] - o[0]).powi(2) + (b[1] - o[1]).powi(2);
    (0.0..=len_sq).contains(&along)
}

/// Andrew's monotone chain; collinear boundary points are dropped, including
/// those within rounding of an edge.
fn hull_2d(points: &[Vec<f64>]) -> Result<Polytope> {
    let mut pts: Vec<[f64; 2]> = points.iter().map(|p| [p[0], p[1]]).collect();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    let scale = vertex_scale(points);
    let eps = 1e-12 * scale * scale;
    if pts.len() < 3 {
        return Err(Error::Degenerate("fewer than three distinct points".into()));
    }
    let mut lower: Vec<[f64; 2]> = Vec::new();
    for p in &pts {
        while lower.len() >= 2 && turn(&lower[lower.len() - 2], &lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(*p);
    }
    let mut upper: Vec<[f64; 2]> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2 && turn(&upper[upper.len() - 2], &upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(*p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    let mut cycle = lower;
    // merge edges that the chains kept only because of rounding
    let mut k = 0;
    while cycle.len() > 3 && k < cycle.len() {
        let n = cycle.len();
        let (prev, next) = (cycle[(k + n - 1) % n], cycle[(k + 1) % n]);
        if on_segment(&prev, &cycle[k], &next, eps) {
            cycle.remove(k);
            k = k.saturating_sub(1);
        } else {
            k += 1;
        }
    }
    if cycle.len() < 3 {
        return Err(Error::Degenerate("points are collinear".into()));
    }
    let area: f64 = (0..cycle.len())
        .map(|i| {
            let (a, b) = (cycle[i], cycle[(i + 1) % cycle.len()]);
            a[0] * b[1] - a[1] * b[0]
        })
        .sum::<f64>()
        / 2.0;
    if area <= eps {
        return Err(Error::Degenerate("hull has zero area".into()));
    }
    let mut halfspaces = Vec::with_capacity(cycle.len());
    for i in 0..cycle.len() {
        let (a, b) = (cycle[i], cycle[(i + 1) % cycle.len()]);
        // counter-clockwise cycle: outward normal is the edge turned clockwise
        let n = vec![b[1] - a[1], a[0] - b[0]];
        let len = norm(&n);
        let n: Vec<f64> = n.iter().map(|v| v / len).collect();
        let offset = n[0] * a[0] + n[1] * a[1];
        halfspaces.push(Halfspace::new(n, offset)?);
    }
    let vertices = cycle.iter().map(|p| p.to_vec()).collect();
    Ok(Polytope::from_parts(2, halfspaces, vertices))
}

#[derive(Clone)]
struct Face {
    v: [usize; 3],
    normal: Vec<f64>,
    offset: f64,
    alive: bool,
}

fn make_face(pts: &[Vec<f64>], v: [usize; 3]) -> Face {
    let n = cross(&sub(&pts[v[1]], &pts[v[0]]), &sub(&pts[v[2]], &pts[v[0]]));
    let len = norm(&n);
    let normal: Vec<f64> = n.iter().map(|x| x / len).collect();
    let offset = dot(&normal, &pts[v[0]]);
    Face {
        v,
        normal,
        offset,
        alive: true,
    }
}

/// Incremental hull with horizon stitching; O(n^2) in the worst case.
fn hull_3d(points: &[Vec<f64>]) -> Result<Polytope> {
    let pts = points;
    let n = pts.len();
    if n < 4 {
        return Err(Error::Degenerate("fewer than four points".into()));
    }
    let scale = {
        let mut lo = vec![f64::INFINITY; 3];
        let mut hi = vec![f64::NEG_INFINITY; 3];
        for p in pts {
            for k in 0..3 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        norm(&sub(&hi, &lo)).max(f64::MIN_POSITIVE)
    };
    let eps = 1e-10 * scale;

    let i0 = (0..n).min_by(|&a, &b| pts[a][0].total_cmp(&pts[b][0])).unwrap();
    let i1 = (0..n)
        .max_by(|&a, &b| norm(&sub(&pts[a], &pts[i0])).total_cmp(&norm(&sub(&pts[b], &pts[i0]))))
        .unwrap();
    let axis = sub(&pts[i1], &pts[i0]);
    if norm(&axis) <= eps {
        return Err(Error::Degenerate("all points coincide".into()));
    }
    let line_dist = |p: &[f64]| norm(&cross(&axis, &sub(p, &pts[i0]))) / norm(&axis);
    let i2 = (0..n).max_by(|&a, &b| line_dist(&pts[a]).total_cmp(&line_dist(&pts[b]))).unwrap();
    if line_dist(&pts[i2]) <= eps {
        return Err(Error::Degenerate("points are collinear".into()));
    }
    let plane = make_face(pts, [i0, i1, i2]);
    let i3 = (0..n)
        .max_by(|&a, &b| {
            (dot(&plane.normal, &pts[a]) - plane.offset)
                .abs()
                .total_cmp(&(dot(&plane.normal, &pts[b]) - plane.offset).abs())
        })
        .unwrap();
    if (dot(&plane.normal, &pts[i3]) - plane.offset).abs() <= eps {
        return Err(Error::Degenerate("points are coplanar".into()));
    }

    let mut faces: Vec<Face> = Vec::new();
    let mut edges: HashMap<(usize, usize), usize> = HashMap::new();
    let add_face = |faces: &mut Vec<Face>, edges: &mut HashMap<(usize, usize), usize>, v: [usize; 3]| {
        let idx = faces.len();
        faces.push(make_face(pts, v));
        for k in 0..3 {
            edges.insert((v[k], v[(k + 1) % 3]), idx);
        }
    };
    // orient the tetrahedron so that every face normal points away from i3
    let base = if dot(&plane.normal, &pts[i3]) > plane.offset {
        [i0, i2, i1]
    } else {
        [i0, i1, i2]
    };
    add_face(&mut faces, &mut edges, base);
    add_face(&mut faces, &mut edges, [base[0], base[2], i3]);
    add_face(&mut faces, &mut edges, [base[2], base[1], i3]);
    add_face(&mut faces, &mut edges, [base[1], base[0], i3]);

    let seeded = [i0, i1, i2, i3];
    for p in 0..n {
        if seeded.contains(&p) {
            continue;
        }
        let visible: Vec<usize> = (0..faces.len())
            .filter(|&f| faces[f].alive && dot(&faces[f].normal, &pts[p]) - faces[f].offset > eps)
            .collect();
        if visible.is_empty() {
            continue;
        }
        let mut horizon = Vec::new();
        for &f in &visible {
            let v = faces[f].v;
            for k in 0..3 {
                let (a, b) = (v[k], v[(k + 1) % 3]);
                let neighbor = edges[&(b, a)];
                if !visible.contains(&neighbor) {
                    horizon.push((a, b));
                }
            }
        }
        for &f in &visible {
            faces[f].alive = false;
            let v = faces[f].v;
            for k in 0..3 {
                edges.remove(&(v[k], v[(k + 1) % 3]));
            }
        }
        for (a, b) in horizon {
            add_face(&mut faces, &mut edges, [a, b, p]);
        }
    }

    let mut halfspaces: Vec<Halfspace> = Vec::new();
    let mut used = vec![false; n];
    for f in faces.iter().filter(|f| f.alive) {
        for &v in &f.v {
            used[v] = true;
        }
        if f.normal.iter().any(|x| !x.is_finite()) {
            return Err(Error::Degenerate("zero-area hull face".into()));
        }
        let coplanar = halfspaces.iter().any(|h| {
            (h.offset() - f.offset).abs() <= 1e-9 * scale
                && h.normal().iter().zip(&f.normal).all(|(a, b)| (a - b).abs() <= 1e-9)
        });
        if !coplanar {
            halfspaces.push(Halfspace::new(f.normal.clone(), f.offset)?);
        }
    }
    let vertices = (0..n).filter(|&i| used[i]).map(|i| pts[i].clone()).collect();
    Ok(Polytope::from_parts(3, halfspaces, vertices))
}
