//! Polygon vertices of 2-D regions, for plotting.

use super::{Body, HPolytope, Region};

/// Counter-clockwise vertices of a bounded 2-D polytope, starting at the
/// lexicographically smallest vertex. Empty for empty or unbounded input.
pub fn polygon_vertices(p: &HPolytope) -> Vec<[f64; 2]> {
    if p.dim() != 2 {
        return Vec::new();
    }
    let rows = p.rows();
    let rhs = p.rhs();
    let mut pts: Vec<[f64; 2]> = Vec::new();
    for i in 0..rows.len() {
        for j in (i + 1)..rows.len() {
            let (a, b) = (&rows[i], &rows[j]);
            let det = a[0] * b[1] - a[1] * b[0];
            if det.abs() < 1e-12 {
                continue;
            }
            let x = (rhs[i] * b[1] - a[1] * rhs[j]) / det;
            let y = (a[0] * rhs[j] - rhs[i] * b[0]) / det;
            if p.max_violation(&[x, y]) <= 1e-7 {
                let dup = pts.iter().any(|q| (q[0] - x).abs() < 1e-7 && (q[1] - y).abs() < 1e-7);
                if !dup {
                    pts.push([x, y]);
                }
            }
        }
    }
    if pts.len() < 3 {
        // Degenerate (point/segment) or unbounded; report what exists if bounded.
        return if is_bounded(p) { pts } else { Vec::new() };
    }
    if !is_bounded(p) {
        return Vec::new();
    }
    let cx = pts.iter().map(|q| q[0]).sum::<f64>() / pts.len() as f64;
    let cy = pts.iter().map(|q| q[1]).sum::<f64>() / pts.len() as f64;
    pts.sort_by(|a, b| {
        let ta = (a[1] - cy).atan2(a[0] - cx);
        let tb = (b[1] - cy).atan2(b[0] - cx);
        ta.partial_cmp(&tb).unwrap()
    });
    let start = (0..pts.len())
        .min_by(|&i, &j| {
            pts[i][0]
                .partial_cmp(&pts[j][0])
                .unwrap()
                .then(pts[i][1].partial_cmp(&pts[j][1]).unwrap())
        })
        .unwrap();
    pts.rotate_left(start);
    pts
}

fn is_bounded(p: &HPolytope) -> bool {
    [[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]]
        .iter()
        .all(|c| matches!(p.maximize(c), super::LpOutcome::Optimal { .. }))
}

/// Polygons for every piece of a 2-D region (boxes, polytopes, unions).
pub fn region_polygons(r: &Region) -> Vec<Vec<[f64; 2]>> {
    if r.dim() != 2 {
        return Vec::new();
    }
    match r.body() {
        Body::Ellipsoid(_) | Body::Oracle(_) => Vec::new(),
        _ => r
            .pieces()
            .unwrap_or_default()
            .iter()
            .map(|p| polygon_vertices(&p.without_redundant_rows()))
            .filter(|v| !v.is_empty())
            .collect(),
    }
}

/// Formats a coordinate for display: 12 decimals, trailing zeros removed.
pub fn fmt_coord(v: f64) -> String {
    let mut s = format!("{:.12}", v);
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}
