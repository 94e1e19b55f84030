use serde::Serialize;

use super::{Point2, Vector2};
use crate::error::{invalid, Result};

/// Vertices closer than this (region units) to the line through their
/// neighbours are merged away.
pub const COLLINEAR_TOL: f64 = 1e-9;

/// Coincident-vertex threshold used when cleaning clipped output.
const DUPLICATE_TOL: f64 = 1e-12;

/// A strictly convex polygon with counter-clockwise vertices.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvexPolygon {
    vertices: Vec<Point2>,
}

impl ConvexPolygon {
    /// Validates and normalizes a vertex ring.
    ///
    /// Clockwise input is reversed. Duplicate and collinear vertices are
    /// merged. Non-convex or zero-area input is rejected.
    pub fn new(vertices: Vec<Point2>) -> Result<Self> {
        if vertices.iter().any(|p| !p.is_finite()) {
            return invalid("polygon vertex is not finite");
        }
        if vertices.len() < 3 {
            return invalid(format!("polygon needs at least 3 vertices, got {}", vertices.len()));
        }
        let mut ring = vertices;
        if signed_area(&ring) < 0.0 {
            ring.reverse();
        }
        let ring = simplify(ring);
        if ring.len() < 3 {
            return invalid("polygon is degenerate after merging collinear vertices");
        }
        let n = ring.len();
        for k in 0..n {
            let a = ring[k];
            let b = ring[(k + 1) % n];
            let c = ring[(k + 2) % n];
            if (b - a).cross(c - b) < 0.0 {
                return invalid("polygon is not convex");
            }
        }
        if signed_area(&ring) <= 0.0 {
            return invalid("polygon has zero area");
        }
        Ok(Self { vertices: ring })
    }

    /// Axis-aligned rectangle `[x0, x1] × [y0, y1]`.
    pub fn rectangle(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Self> {
        Self::new(vec![
            Point2::new(x0, y0),
            Point2::new(x1, y0),
            Point2::new(x1, y1),
            Point2::new(x0, y1),
        ])
    }

    /// Builds from output of a convex clip. Returns `None` when the ring
    /// collapsed to fewer than three vertices or no area.
    pub(crate) fn from_clipped(ring: Vec<Point2>) -> Option<Self> {
        let ring = simplify(ring);
        if ring.len() < 3 || signed_area(&ring) <= 0.0 {
            return None;
        }
        Some(Self { vertices: ring })
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn area(&self) -> f64 {
        polygon_area(self)
    }

    /// Iterator over directed edges `(v_k, v_{k+1})`.
    pub fn edges(&self) -> impl Iterator<Item = (Point2, Point2)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |k| (self.vertices[k], self.vertices[(k + 1) % n]))
    }

    /// Closed containment test; points within `tol` outside an edge count as
    /// inside.
    pub fn contains_with_tol(&self, p: Point2, tol: f64) -> bool {
        self.edges().all(|(a, b)| {
            let e = b - a;
            let len = e.norm();
            e.cross(p - a) >= -tol * len
        })
    }

    pub fn contains(&self, p: Point2) -> bool {
        self.contains_with_tol(p, 0.0)
    }

    /// `(min, max)` corners of the bounding box.
    pub fn bounds(&self) -> (Point2, Point2) {
        let mut lo = self.vertices[0];
        let mut hi = self.vertices[0];
        for p in &self.vertices[1..] {
            lo.x = lo.x.min(p.x);
            lo.y = lo.y.min(p.y);
            hi.x = hi.x.max(p.x);
            hi.y = hi.y.max(p.y);
        }
        (lo, hi)
    }

    pub fn translate(&self, v: Vector2) -> Self {
        Self {
            vertices: self.vertices.iter().map(|&p| p + v).collect(),
        }
    }

    /// Rotates about `pivot` by `angle` radians.
    pub fn rotate(&self, pivot: Point2, angle: f64) -> Self {
        Self {
            vertices: self
                .vertices
                .iter()
                .map(|&p| rotate_point(p, pivot, angle))
                .collect(),
        }
    }
}

pub(crate) fn rotate_point(p: Point2, pivot: Point2, angle: f64) -> Point2 {
    let (s, c) = angle.sin_cos();
    let d = p - pivot;
    pivot + Vector2::new(c * d.x - s * d.y, s * d.x + c * d.y)
}

fn signed_area(ring: &[Point2]) -> f64 {
    if ring.len() < 3 {
        return 0.0;
    }
    let o = ring[0];
    let mut twice = 0.0;
    for k in 1..ring.len() - 1 {
        twice += (ring[k] - o).cross(ring[k + 1] - o);
    }
    0.5 * twice
}

/// Removes coincident and collinear vertices until none remain.
fn simplify(mut ring: Vec<Point2>) -> Vec<Point2> {
    loop {
        let n = ring.len();
        if n < 3 {
            return ring;
        }
        let mut removed = false;
        // duplicates first
        let mut k = 0;
        while k < ring.len() && ring.len() >= 2 {
            let next = ring[(k + 1) % ring.len()];
            if ring[k].distance(next) <= DUPLICATE_TOL {
                ring.remove(k);
                removed = true;
            } else {
                k += 1;
            }
        }
        let mut k = 0;
        while ring.len() >= 3 && k < ring.len() {
            let n = ring.len();
            let a = ring[(k + n - 1) % n];
            let b = ring[k];
            let c = ring[(k + 1) % n];
            let base = c - a;
            let len = base.norm();
            let dist = if len > 0.0 {
                base.cross(b - a).abs() / len
            } else {
                0.0
            };
            if dist < COLLINEAR_TOL {
                ring.remove(k);
                removed = true;
            } else {
                k += 1;
            }
        }
        if !removed {
            return ring;
        }
    }
}

/// Enclosed area by the shoelace formula.
pub fn polygon_area(poly: &ConvexPolygon) -> f64 {
    signed_area(&poly.vertices).max(0.0)
}

/// Triangle area from its three edge lengths.
///
/// Uses the cancellation-free ordering of Heron's product; returns 0 when
/// the triangle inequality fails (within rounding).
pub fn heron_area(e1: f64, e2: f64, e3: f64) -> Result<f64> {
    if [e1, e2, e3].iter().any(|e| !e.is_finite() || *e < 0.0) {
        return invalid("edge lengths must be finite and non-negative");
    }
    let mut e = [e1, e2, e3];
    e.sort_by(|a, b| b.total_cmp(a));
    let [a, b, c] = e;
    let tol = 1e-12 * (a + b + c);
    if a >= b + c - tol {
        return Ok(0.0);
    }
    let product = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c));
    Ok(if product > 0.0 { 0.25 * product.sqrt() } else { 0.0 })
}

/// Intersection of `poly` with `{x : normal·x ≤ offset}`.
///
/// `Ok(None)` when the intersection has no area.
pub fn clip_halfplane(
    poly: &ConvexPolygon,
    normal: Vector2,
    offset: f64,
) -> Result<Option<ConvexPolygon>> {
    let scale = normal.norm();
    if !(scale > 0.0) || !offset.is_finite() {
        return invalid("half-plane normal must be nonzero and finite");
    }
    Ok(clip_unchecked(&poly.vertices, normal, offset).and_then(ConvexPolygon::from_clipped))
}

/// Sutherland–Hodgman against one half-plane. Points within a relative
/// rounding band of the line count as inside so that re-clipping is stable.
pub(crate) fn clip_unchecked(ring: &[Point2], normal: Vector2, offset: f64) -> Option<Vec<Point2>> {
    let extent = ring
        .iter()
        .fold(0.0_f64, |m, p| m.max(p.x.abs()).max(p.y.abs()));
    let band = 1e-12 * normal.norm() * (1.0 + extent) + 1e-15 * offset.abs();
    let side: Vec<f64> = ring
        .iter()
        .map(|p| normal.dot(p.to_vector()) - offset)
        .collect();
    if side.iter().all(|&s| s <= band) {
        return Some(ring.to_vec());
    }
    if side.iter().all(|&s| s > -band) {
        return None;
    }
    let n = ring.len();
    let mut out = Vec::with_capacity(n + 1);
    for k in 0..n {
        let j = (k + 1) % n;
        let (p, q) = (ring[k], ring[j]);
        let (sp, sq) = (side[k], side[j]);
        let p_in = sp <= band;
        let q_in = sq <= band;
        if p_in {
            out.push(p);
        }
        if p_in != q_in && (sp - sq).abs() > 0.0 {
            let t = sp / (sp - sq);
            if t > 0.0 && t < 1.0 {
                out.push(p + (q - p) * t);
            }
        }
    }
    Some(out)
}
