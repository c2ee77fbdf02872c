//! Lower convex hull of `(βt, T)` points.

use serde::{Deserialize, Serialize};

/// Lower convex, non-increasing envelope of a point set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LowerHull {
    /// Hull vertices in increasing `x`, including a possible flat end point.
    pub vertices: Vec<(f64, f64)>,
    /// Indices of input points that are hull vertices, in increasing `x`.
    pub members: Vec<usize>,
}

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Monotone-chain lower hull, extended with the point `(max x, min y)` so the
/// envelope is non-increasing. Non-finite points are ignored.
pub fn lower_convex_hull(points: &[(f64, f64)]) -> LowerHull {
    let mut order: Vec<usize> = (0..points.len())
        .filter(|&i| points[i].0.is_finite() && points[i].1.is_finite())
        .collect();
    order.sort_by(|&a, &b| {
        points[a]
            .0
            .total_cmp(&points[b].0)
            .then(points[a].1.total_cmp(&points[b].1))
            .then(a.cmp(&b))
    });
    // keep the lowest point per x
    order.dedup_by(|b, a| points[*a].0 == points[*b].0);
    if order.is_empty() {
        return LowerHull {
            vertices: Vec::new(),
            members: Vec::new(),
        };
    }
    let x_max = points[*order.last().unwrap()].0;
    let y_min = order
        .iter()
        .map(|&i| points[i].1)
        .fold(f64::INFINITY, f64::min);

    // None marks the virtual flat end point
    let mut chain: Vec<Option<usize>> = Vec::new();
    let at = |c: Option<usize>| c.map_or((x_max, y_min), |i| points[i]);
    let candidates = order.iter().map(|&i| Some(i)).chain(std::iter::once(None));
    for c in candidates {
        let p = at(c);
        if c.is_none() && p == at(*chain.last().unwrap()) {
            break;
        }
        while chain.len() >= 2 && cross(at(chain[chain.len() - 2]), at(chain[chain.len() - 1]), p) <= 0.0 {
            chain.pop();
        }
        chain.push(c);
    }
    LowerHull {
        vertices: chain.iter().map(|&c| at(c)).collect(),
        members: chain.into_iter().flatten().collect(),
    }
}

impl LowerHull {
    /// Piecewise-linear hull value at `x`, or `None` outside its span.
    pub fn value_at(&self, x: f64) -> Option<f64> {
        let first = self.vertices.first()?;
        let last = self.vertices.last()?;
        if x < first.0 || x > last.0 {
            return None;
        }
        let j = self.vertices.partition_point(|v| v.0 < x);
        if j == 0 {
            return Some(first.1);
        }
        let (a, b) = (self.vertices[j - 1], self.vertices[j]);
        Some(a.1 + (b.1 - a.1) * (x - a.0) / (b.0 - a.0))
    }

    /// Slopes are non-decreasing and never positive.
    pub fn is_convex_non_increasing(&self, tol: f64) -> bool {
        let slopes: Vec<f64> = self
            .vertices
            .windows(2)
            .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
            .collect();
        slopes.iter().all(|&s| s <= tol) && slopes.windows(2).all(|w| w[1] >= w[0] - tol)
    }
}
