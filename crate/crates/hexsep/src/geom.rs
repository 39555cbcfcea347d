//! Plane geometry primitives: 2-D vectors, half-planes, and convex polygon
//! clipping with edge provenance tags.
//!
//! The clipper is a Sutherland–Hodgman pass that remembers, for every edge of
//! the output polygon, which cutting line produced it. Decision-region
//! construction uses the tags to recover exact ray directions for unbounded
//! cells, and the oracle uses the same clipper to restrict cells to an
//! integration window.

use serde::Serialize;
use std::ops::{Add, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Counter-clockwise perpendicular.
    pub fn perp(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    pub fn normalized(self) -> Vec2 {
        let n = self.norm();
        Vec2::new(self.x / n, self.y / n)
    }

    pub fn distance(self, other: Vec2) -> f64 {
        (self - other).norm()
    }

    /// Angle in [0, 2*pi).
    pub fn angle(self) -> f64 {
        let a = self.y.atan2(self.x);
        if a < 0.0 {
            a + 2.0 * std::f64::consts::PI
        } else {
            a
        }
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// Closed half-plane `{ p : normal . p <= offset }`.
#[derive(Debug, Clone, Copy)]
pub struct HalfPlane {
    pub normal: Vec2,
    pub offset: f64,
}

impl HalfPlane {
    /// Positive outside, negative inside, zero on the boundary line.
    pub fn signed_excess(&self, p: Vec2) -> f64 {
        self.normal.dot(p) - self.offset
    }

    pub fn contains(&self, p: Vec2, tol: f64) -> bool {
        self.signed_excess(p) <= tol
    }

    /// Perpendicular bisector half-plane keeping the points closer to `a`
    /// than to `b`.
    pub fn bisector(a: Vec2, b: Vec2) -> HalfPlane {
        // |p-a|^2 <= |p-b|^2  <=>  2(b-a).p <= |b|^2 - |a|^2
        HalfPlane {
            normal: (b - a) * 2.0,
            offset: b.norm_sq() - a.norm_sq(),
        }
    }
}

/// Convex polygon, counter-clockwise, `edge_tags[k]` identifying the cutting
/// line that supports the edge from `vertices[k]` to `vertices[k+1]`.
#[derive(Debug, Clone)]
pub struct TaggedPolygon {
    pub vertices: Vec<Vec2>,
    pub edge_tags: Vec<usize>,
}

impl TaggedPolygon {
    /// Axis-aligned rectangle, CCW, edges tagged `base_tag .. base_tag + 3`.
    pub fn rectangle(center: Vec2, half_w: f64, half_h: f64, base_tag: usize) -> Self {
        let v = vec![
            Vec2::new(center.x - half_w, center.y - half_h),
            Vec2::new(center.x + half_w, center.y - half_h),
            Vec2::new(center.x + half_w, center.y + half_h),
            Vec2::new(center.x - half_w, center.y + half_h),
        ];
        TaggedPolygon {
            vertices: v,
            edge_tags: vec![base_tag, base_tag + 1, base_tag + 2, base_tag + 3],
        }
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.len() < 3
    }

    /// Clip by `plane`, tagging every edge created on its boundary with `tag`.
    pub fn clip(&self, plane: &HalfPlane, tag: usize) -> TaggedPolygon {
        let n = self.vertices.len();
        let mut out_v: Vec<Vec2> = Vec::with_capacity(n + 1);
        let mut out_t: Vec<usize> = Vec::with_capacity(n + 1);
        if n == 0 {
            return TaggedPolygon {
                vertices: out_v,
                edge_tags: out_t,
            };
        }
        for i in 0..n {
            let s = self.vertices[i];
            let e = self.vertices[(i + 1) % n];
            let t = self.edge_tags[i];
            let cs = plane.signed_excess(s);
            let ce = plane.signed_excess(e);
            let s_in = cs <= 0.0;
            let e_in = ce <= 0.0;
            if s_in {
                out_v.push(s);
                out_t.push(t);
                if !e_in {
                    // leaving: cut point starts an edge on the clip line
                    let x = s + (e - s) * (cs / (cs - ce));
                    out_v.push(x);
                    out_t.push(tag);
                }
            } else if e_in {
                // entering: cut point resumes the original edge's line
                let x = s + (e - s) * (cs / (cs - ce));
                out_v.push(x);
                out_t.push(t);
            }
        }
        if out_v.len() < 3 {
            out_v.clear();
            out_t.clear();
        }
        TaggedPolygon {
            vertices: out_v,
            edge_tags: out_t,
        }
    }

    /// Merge runs of consecutive vertices closer than `tol`, keeping the
    /// first vertex of a run and the outgoing tag of its last member.
    pub fn dedup(&mut self, tol: f64) {
        let n = self.vertices.len();
        if n < 2 {
            return;
        }
        let mut keep_v: Vec<Vec2> = Vec::with_capacity(n);
        let mut keep_t: Vec<usize> = Vec::with_capacity(n);
        for i in 0..n {
            let v = self.vertices[i];
            if let Some(&last) = keep_v.last() {
                if last.distance(v) <= tol {
                    // collapse: outgoing edge of the merged vertex is the
                    // outgoing edge of the later duplicate
                    *keep_t.last_mut().unwrap() = self.edge_tags[i];
                    continue;
                }
            }
            keep_v.push(v);
            keep_t.push(self.edge_tags[i]);
        }
        // wrap-around duplicate
        if keep_v.len() >= 2 && keep_v[0].distance(*keep_v.last().unwrap()) <= tol {
            keep_v.pop();
            keep_t.pop();
        }
        if keep_v.len() < 3 {
            keep_v.clear();
            keep_t.clear();
        }
        self.vertices = keep_v;
        self.edge_tags = keep_t;
    }

    pub fn area(&self) -> f64 {
        let n = self.vertices.len();
        let mut s = 0.0;
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            s += a.x * b.y - b.x * a.y;
        }
        0.5 * s
    }

    pub fn centroid(&self) -> Vec2 {
        let n = self.vertices.len() as f64;
        let mut c = Vec2::ZERO;
        for v in &self.vertices {
            c = c + *v;
        }
        c * (1.0 / n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisector_keeps_near_side() {
        let a = Vec2::new(0.0, 0.0);
        let b = Vec2::new(2.0, 0.0);
        let h = HalfPlane::bisector(a, b);
        assert!(h.contains(Vec2::new(0.5, 1.0), 0.0));
        assert!(!h.contains(Vec2::new(1.5, -1.0), 0.0));
        assert!(h.signed_excess(Vec2::new(1.0, 3.0)).abs() < 1e-12);
    }

    #[test]
    fn clip_square_by_diagonal() {
        let sq = TaggedPolygon::rectangle(Vec2::new(0.5, 0.5), 0.5, 0.5, 100);
        // keep x + y <= 1; the cut passes through two corners, so duplicates
        // appear and must merge away
        let h = HalfPlane {
            normal: Vec2::new(1.0, 1.0),
            offset: 1.0,
        };
        let mut tri = sq.clip(&h, 7);
        tri.dedup(1e-12);
        assert_eq!(tri.vertices.len(), 3);
        assert!((tri.area() - 0.5).abs() < 1e-12);

        // a cut through the interior tags the new edge
        let h2 = HalfPlane {
            normal: Vec2::new(1.0, 0.0),
            offset: 0.25,
        };
        let cut = sq.clip(&h2, 7);
        assert_eq!(cut.vertices.len(), 4);
        assert!(cut.edge_tags.contains(&7));
        assert!((cut.area() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn clip_to_empty() {
        let sq = TaggedPolygon::rectangle(Vec2::ZERO, 1.0, 1.0, 0);
        let h = HalfPlane {
            normal: Vec2::new(1.0, 0.0),
            offset: -2.0,
        };
        assert!(sq.clip(&h, 9).is_empty());
    }

    #[test]
    fn area_positive_ccw() {
        let sq = TaggedPolygon::rectangle(Vec2::ZERO, 2.0, 1.0, 0);
        assert!((sq.area() - 8.0).abs() < 1e-12);
        let c = sq.centroid();
        assert!(c.norm() < 1e-12);
    }
}
