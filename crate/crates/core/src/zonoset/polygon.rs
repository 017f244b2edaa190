use std::cmp::Ordering;

use super::ZonoError;

/// Convex polygon with counter-clockwise vertices.
///
/// Degenerate sets are allowed: one vertex for a point, two for a segment.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon2D {
    vertices: Vec<[f64; 2]>,
}

const PARALLEL_TOL: f64 = 1e-12;

impl Polygon2D {
    /// Accepts counter-clockwise convex vertex lists.
    pub fn new(vertices: Vec<[f64; 2]>) -> Result<Self, ZonoError> {
        if vertices.iter().flatten().any(|v| !v.is_finite()) {
            return Err(ZonoError::NonFinite);
        }
        let polygon = Self { vertices };
        if !polygon.is_convex_ccw(1e-12) {
            return Err(ZonoError::NotConvex);
        }
        Ok(polygon)
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Walks the zonotope boundary: generators are flipped into the upper
    /// half-plane, sorted by angle, and parallel ones merged. Starting from
    /// the lowest vertex `c - sum g`, adding `2 g` in angle order traces the
    /// lower chain, subtracting traces the upper one.
    pub(crate) fn from_zonotope_parts(center: [f64; 2], generators: Vec<[f64; 2]>) -> Self {
        let largest = generators
            .iter()
            .map(|g| g[0].hypot(g[1]))
            .fold(0.0, f64::max);
        let mut canonical: Vec<[f64; 2]> = generators
            .into_iter()
            .filter(|g| {
                let n = g[0].hypot(g[1]);
                n > 0.0 && n > 1e-14 * largest
            })
            .map(|g| {
                if g[1] < 0.0 || (g[1] == 0.0 && g[0] < 0.0) {
                    [-g[0], -g[1]]
                } else {
                    g
                }
            })
            .collect();
        canonical.sort_by(|a, b| {
            let (ta, tb) = (a[1].atan2(a[0]), b[1].atan2(b[0]));
            ta.partial_cmp(&tb).unwrap_or(Ordering::Equal)
        });

        let mut merged: Vec<[f64; 2]> = Vec::with_capacity(canonical.len());
        for g in canonical {
            match merged.last_mut() {
                Some(last) if parallel(*last, g) && dot(*last, g) > 0.0 => {
                    last[0] += g[0];
                    last[1] += g[1];
                }
                _ => merged.push(g),
            }
        }
        // Directions just above 0 and just below pi are the same line.
        if merged.len() > 1 {
            let (first, last) = (merged[0], merged[merged.len() - 1]);
            if parallel(first, last) && dot(first, last) < 0.0 {
                merged.pop();
                merged[0] = [first[0] - last[0], first[1] - last[1]];
            }
        }

        if merged.is_empty() {
            return Self {
                vertices: vec![center],
            };
        }

        let mut v = center;
        for g in &merged {
            v[0] -= g[0];
            v[1] -= g[1];
        }
        let mut vertices = Vec::with_capacity(2 * merged.len());
        for g in &merged {
            vertices.push(v);
            v[0] += 2.0 * g[0];
            v[1] += 2.0 * g[1];
        }
        for g in &merged {
            vertices.push(v);
            v[0] -= 2.0 * g[0];
            v[1] -= 2.0 * g[1];
        }
        Self { vertices }
    }

    /// Shoelace area; zero for points and segments.
    pub fn area(&self) -> f64 {
        let n = self.vertices.len();
        if n < 3 {
            return 0.0;
        }
        let twice: f64 = (0..n)
            .map(|i| {
                let (a, b) = (self.vertices[i], self.vertices[(i + 1) % n]);
                a[0] * b[1] - b[0] * a[1]
            })
            .sum();
        0.5 * twice.abs()
    }

    /// Convexity and orientation check: every turn is left (or straight)
    /// within `tol`, scaled by edge lengths.
    pub fn is_convex_ccw(&self, tol: f64) -> bool {
        let n = self.vertices.len();
        if n < 3 {
            return true;
        }
        (0..n).all(|i| {
            let (a, b, c) = (
                self.vertices[i],
                self.vertices[(i + 1) % n],
                self.vertices[(i + 2) % n],
            );
            let e1 = [b[0] - a[0], b[1] - a[1]];
            let e2 = [c[0] - b[0], c[1] - b[1]];
            cross(e1, e2) >= -tol * norm(e1) * norm(e2)
        })
    }

    /// Point-in-polygon for full-dimensional polygons via edge half-planes.
    /// Points on the boundary count as inside.
    pub fn contains(&self, p: [f64; 2]) -> bool {
        let n = self.vertices.len();
        if n < 3 {
            return self.distance_to_boundary(p) == 0.0;
        }
        (0..n).all(|i| {
            let (a, b) = (self.vertices[i], self.vertices[(i + 1) % n]);
            cross([b[0] - a[0], b[1] - a[1]], [p[0] - a[0], p[1] - a[1]]) >= 0.0
        })
    }

    /// Euclidean distance from `p` to the polygon's boundary.
    pub fn distance_to_boundary(&self, p: [f64; 2]) -> f64 {
        let n = self.vertices.len();
        match n {
            0 => f64::INFINITY,
            1 => norm([p[0] - self.vertices[0][0], p[1] - self.vertices[0][1]]),
            _ => (0..n)
                .map(|i| segment_distance(p, self.vertices[i], self.vertices[(i + 1) % n]))
                .fold(f64::INFINITY, f64::min),
        }
    }
}

fn cross(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn norm(a: [f64; 2]) -> f64 {
    a[0].hypot(a[1])
}

fn parallel(a: [f64; 2], b: [f64; 2]) -> bool {
    cross(a, b).abs() <= PARALLEL_TOL * norm(a) * norm(b)
}

fn segment_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let ap = [p[0] - a[0], p[1] - a[1]];
    let len2 = dot(ab, ab);
    let t = if len2 > 0.0 {
        (dot(ap, ab) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    norm([ap[0] - t * ab[0], ap[1] - t * ab[1]])
}
