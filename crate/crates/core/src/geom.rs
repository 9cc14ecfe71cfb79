//! 2D geometric primitives shared by the detectors: line segments, polygons,
//! Ramer-Douglas-Peucker simplification and convex hulls.
//!
//! The same segment type serves pixel coordinates (f64 pixels) and egocentric
//! ground coordinates (metres); callers keep track of the unit.

use nalgebra::{Point2, Vector2};

use crate::error::{Result, VisionError};

pub type Pt = Point2<f64>;
pub type Vec2 = Vector2<f64>;

pub fn pt(x: f64, y: f64) -> Pt {
    Point2::new(x, y)
}

/// A finite line segment with real-valued endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineSegment2D {
    pub p1: Pt,
    pub p2: Pt,
}

impl LineSegment2D {
    pub fn new(p1: Pt, p2: Pt) -> Self {
        debug_assert!(p1.coords.iter().chain(p2.coords.iter()).all(|c| c.is_finite()));
        Self { p1, p2 }
    }

    pub fn length(&self) -> f64 {
        (self.p2 - self.p1).norm()
    }

    pub fn midpoint(&self) -> Pt {
        nalgebra::center(&self.p1, &self.p2)
    }

    /// Unit direction from p1 to p2. Zero-length segments yield a zero vector.
    pub fn direction(&self) -> Vec2 {
        let d = self.p2 - self.p1;
        let n = d.norm();
        if n > 0.0 {
            d / n
        } else {
            Vec2::zeros()
        }
    }

    /// Undirected angle between two segments, in degrees, in [0, 90].
    pub fn angle_diff_deg(&self, other: &LineSegment2D) -> f64 {
        let c = self.direction().dot(&other.direction()).abs().min(1.0);
        c.acos().to_degrees()
    }

    /// Distance from a point to this segment (not the infinite line).
    pub fn distance_to_point(&self, p: &Pt) -> f64 {
        let d = self.p2 - self.p1;
        let len2 = d.norm_squared();
        if len2 == 0.0 {
            return (p - self.p1).norm();
        }
        let t = ((p - self.p1).dot(&d) / len2).clamp(0.0, 1.0);
        (p - (self.p1 + d * t)).norm()
    }

    /// Minimum distance between two segments.
    pub fn min_distance(&self, other: &LineSegment2D) -> f64 {
        if self.intersects(other) {
            return 0.0;
        }
        self.distance_to_point(&other.p1)
            .min(self.distance_to_point(&other.p2))
            .min(other.distance_to_point(&self.p1))
            .min(other.distance_to_point(&self.p2))
    }

    /// Proper or touching intersection test.
    pub fn intersects(&self, other: &LineSegment2D) -> bool {
        let d1 = self.p2 - self.p1;
        let d2 = other.p2 - other.p1;
        let denom = cross(&d1, &d2);
        let diff = other.p1 - self.p1;
        if denom.abs() < 1e-12 {
            return false;
        }
        let t = cross(&diff, &d2) / denom;
        let u = cross(&diff, &d1) / denom;
        (0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u)
    }

    /// Perpendicular bisector as an infinite line (point + direction).
    pub fn bisector(&self) -> InfiniteLine {
        let d = self.direction();
        InfiniteLine {
            origin: self.midpoint(),
            direction: Vec2::new(-d.y, d.x),
        }
    }
}

/// Infinite line through `origin` along `direction`.
#[derive(Debug, Clone, Copy)]
pub struct InfiniteLine {
    pub origin: Pt,
    pub direction: Vec2,
}

impl InfiniteLine {
    /// Intersection with another infinite line; `None` when (near) parallel.
    pub fn intersect(&self, other: &InfiniteLine) -> Option<Pt> {
        let denom = cross(&self.direction, &other.direction);
        if denom.abs() < 1e-12 {
            return None;
        }
        let diff = other.origin - self.origin;
        let t = cross(&diff, &other.direction) / denom;
        Some(self.origin + self.direction * t)
    }
}

fn cross(a: &Vec2, b: &Vec2) -> f64 {
    a.x * b.y - a.y * b.x
}

/// An ordered list of vertices. Closed polygons do not repeat the first vertex.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Polygon2D {
    pub vertices: Vec<Pt>,
}

impl Polygon2D {
    pub fn new(vertices: Vec<Pt>) -> Self {
        Self { vertices }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Point-in-polygon by ray casting; boundary points count as inside.
    pub fn contains(&self, p: &Pt) -> bool {
        let v = &self.vertices;
        let n = v.len();
        if n < 3 {
            return false;
        }
        let mut inside = false;
        let mut j = n - 1;
        for i in 0..n {
            let (a, b) = (v[i], v[j]);
            // On-edge check keeps the boundary inclusive.
            let seg = LineSegment2D::new(a, b);
            if seg.distance_to_point(p) < 1e-9 {
                return true;
            }
            if (a.y > p.y) != (b.y > p.y) {
                let x_cross = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
                if p.x < x_cross {
                    inside = !inside;
                }
            }
            j = i;
        }
        inside
    }

    pub fn area(&self) -> f64 {
        let v = &self.vertices;
        let n = v.len();
        if n < 3 {
            return 0.0;
        }
        let mut s = 0.0;
        for i in 0..n {
            let a = v[i];
            let b = v[(i + 1) % n];
            s += a.x * b.y - b.x * a.y;
        }
        s.abs() * 0.5
    }

    /// True when consecutive edge cross products all share one sign
    /// (collinear runs allowed).
    pub fn is_convex(&self) -> bool {
        let v = &self.vertices;
        let n = v.len();
        if n < 3 {
            return false;
        }
        let mut sign = 0.0f64;
        for i in 0..n {
            let a = v[i];
            let b = v[(i + 1) % n];
            let c = v[(i + 2) % n];
            let cr = cross(&(b - a), &(c - b));
            if cr.abs() < 1e-9 {
                continue;
            }
            if sign == 0.0 {
                sign = cr.signum();
            } else if cr.signum() != sign {
                return false;
            }
        }
        true
    }
}

/// Ramer-Douglas-Peucker polyline simplification.
///
/// First and last vertices are always preserved; every dropped vertex lies
/// within `epsilon` of the simplified polyline.
pub fn rdp_simplify(poly: &Polygon2D, epsilon: f64) -> Polygon2D {
    let v = &poly.vertices;
    if v.len() <= 2 {
        return poly.clone();
    }
    let mut keep = vec![false; v.len()];
    keep[0] = true;
    keep[v.len() - 1] = true;
    rdp_recurse(v, 0, v.len() - 1, epsilon, &mut keep);
    Polygon2D::new(
        v.iter()
            .zip(keep.iter())
            .filter_map(|(p, k)| k.then_some(*p))
            .collect(),
    )
}

fn rdp_recurse(v: &[Pt], first: usize, last: usize, epsilon: f64, keep: &mut [bool]) {
    if last <= first + 1 {
        return;
    }
    let seg = LineSegment2D::new(v[first], v[last]);
    let mut max_d = -1.0;
    let mut max_i = first;
    for i in first + 1..last {
        let d = perpendicular_distance(&v[i], &seg);
        if d > max_d {
            max_d = d;
            max_i = i;
        }
    }
    if max_d > epsilon {
        keep[max_i] = true;
        rdp_recurse(v, first, max_i, epsilon, keep);
        rdp_recurse(v, max_i, last, epsilon, keep);
    }
}

/// Distance from `p` to the infinite line through the segment's endpoints.
/// Falls back to point distance when the segment is degenerate.
pub fn perpendicular_distance(p: &Pt, seg: &LineSegment2D) -> f64 {
    let d = seg.p2 - seg.p1;
    let len = d.norm();
    if len == 0.0 {
        return (p - seg.p1).norm();
    }
    cross(&d, &(p - seg.p1)).abs() / len
}

/// Convex hull by Andrew's monotone chain, counterclockwise order
/// (positive cross products in a y-up frame).
///
/// Errors on fewer than 3 points or a fully collinear cloud.
pub fn convex_hull(points: &[Pt]) -> Result<Polygon2D> {
    if points.len() < 3 {
        return Err(VisionError::Degenerate(format!(
            "convex hull needs at least 3 points, got {}",
            points.len()
        )));
    }
    let mut pts: Vec<Pt> = points.to_vec();
    pts.sort_by(|a, b| (a.x, a.y).partial_cmp(&(b.x, b.y)).unwrap());
    pts.dedup_by(|a, b| (*a - *b).norm() < 1e-12);

    let n = pts.len();
    let mut hull: Vec<Pt> = Vec::with_capacity(2 * n);
    for p in pts.iter().chain(pts.iter().rev().skip(1)) {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            if cross(&(b - a), &(p - b)) <= 1e-12 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(*p);
    }
    hull.pop();
    if hull.len() < 3 {
        return Err(VisionError::Degenerate(
            "convex hull input is collinear".to_string(),
        ));
    }
    Ok(Polygon2D::new(hull))
}
