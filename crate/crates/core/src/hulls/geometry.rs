//! Convex hulls of finite point sets in `R^1` and `R^2` and tolerant
//! point-in-polytope tests.

use serde::{Deserialize, Serialize};

use crate::lattice::lex_cmp;

/// A convex polytope given by a minimal vertex list.
///
/// For `d = 1` the vertices are `[lo]` or `[lo, hi]`; for `d = 2` they run
/// counter-clockwise starting from the lexicographically smallest vertex.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Polytope {
    vertices: Vec<Vec<f64>>,
}

impl Polytope {
    /// Convex hull of a nonempty point set of a common dimension 1 or 2.
    pub fn hull_of<'a>(points: impl IntoIterator<Item = &'a [f64]>) -> Polytope {
        let mut pts: Vec<Vec<f64>> = points.into_iter().map(<[f64]>::to_vec).collect();
        assert!(!pts.is_empty(), "hull of an empty point set");
        let vertices = match pts[0].len() {
            1 => {
                let lo = pts.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
                let hi = pts.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
                if lo == hi {
                    vec![vec![lo]]
                } else {
                    vec![vec![lo], vec![hi]]
                }
            }
            2 => {
                pts.sort_by(|p, q| lex_cmp(p, q));
                pts.dedup();
                monotone_chain(&pts)
            }
            d => panic!("convex hulls are implemented for d = 1, 2 only (got {d})"),
        };
        Polytope { vertices }
    }

    /// Wraps an explicit vertex list, recomputing a minimal hull.
    pub fn from_vertices(vertices: Vec<Vec<f64>>) -> Polytope {
        Polytope::hull_of(vertices.iter().map(Vec::as_slice))
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    pub fn dim(&self) -> usize {
        self.vertices[0].len()
    }

    /// Euclidean distance from `x` to the polytope (zero inside).
    pub fn distance(&self, x: &[f64]) -> f64 {
        let v = &self.vertices;
        if self.dim() == 1 {
            let lo = v[0][0];
            let hi = v[v.len() - 1][0];
            return (lo - x[0]).max(x[0] - hi).max(0.0);
        }
        match v.len() {
            1 => dist2(&v[0], x),
            2 => segment_distance(&v[0], &v[1], x),
            m => {
                let inside = (0..m).all(|k| cross(&v[k], &v[(k + 1) % m], x) >= 0.0);
                if inside {
                    0.0
                } else {
                    (0..m)
                        .map(|k| segment_distance(&v[k], &v[(k + 1) % m], x))
                        .fold(f64::INFINITY, f64::min)
                }
            }
        }
    }

    /// Boundary-inclusive membership within `tol`.
    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.distance(x) <= tol
    }
}

/// `(b - a) x (c - a)`; positive when `c` lies left of the directed line `a -> b`.
pub(crate) fn cross(a: &[f64], b: &[f64], c: &[f64]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

/// Closest point of segment `[a, b]` to `x`, as the parameter `t ∈ [0, 1]`.
pub(crate) fn segment_param(a: &[f64], b: &[f64], x: &[f64]) -> f64 {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let len2 = dx * dx + dy * dy;
    if len2 == 0.0 {
        return 0.0;
    }
    (((x[0] - a[0]) * dx + (x[1] - a[1]) * dy) / len2).clamp(0.0, 1.0)
}

pub(crate) fn segment_distance(a: &[f64], b: &[f64], x: &[f64]) -> f64 {
    let t = segment_param(a, b, x);
    let p = [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
    dist2(&p, x)
}

/// Andrew's monotone chain on lexicographically sorted distinct points;
/// collinear points are dropped.
fn monotone_chain(pts: &[Vec<f64>]) -> Vec<Vec<f64>> {
    if pts.len() <= 2 {
        return pts.to_vec();
    }
    let mut lower: Vec<&Vec<f64>> = Vec::new();
    for p in pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<&Vec<f64>> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    let hull: Vec<Vec<f64>> = lower.into_iter().chain(upper).cloned().collect();
    if hull.len() == 2 && hull[0] == hull[1] {
        return vec![hull[0].clone()];
    }
    hull
}
