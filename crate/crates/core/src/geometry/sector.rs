use std::f64::consts::{PI, TAU};

use serde::Serialize;

use super::circle::disk_ring_area;
use super::polygon::clip_unchecked;
use super::{normalize_angle, ConvexPolygon, Point2, Vector2};
use crate::error::{invalid, Result};

/// Full-circle detection threshold on the view angle.
const FULL_CIRCLE_EPS: f64 = 1e-12;

/// Arc subdivisions per half-sector when a sector is turned into a polygon.
const ARC_SEGMENTS: usize = 128;

/// A closed circular sector (field of view).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sector {
    apex: Point2,
    orientation: f64,
    view_angle: f64,
    radius: f64,
}

impl Sector {
    pub fn new(apex: Point2, orientation: f64, view_angle: f64, radius: f64) -> Result<Self> {
        if !apex.is_finite() || !orientation.is_finite() {
            return invalid("sector apex and orientation must be finite");
        }
        if !(view_angle > 0.0 && view_angle <= TAU) {
            return invalid(format!("view angle {view_angle} outside (0, 2π]"));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return invalid(format!("sector radius {radius} must be positive"));
        }
        Ok(Self {
            apex,
            orientation: normalize_angle(orientation),
            view_angle,
            radius,
        })
    }

    pub fn apex(&self) -> Point2 {
        self.apex
    }

    pub fn orientation(&self) -> f64 {
        self.orientation
    }

    pub fn view_angle(&self) -> f64 {
        self.view_angle
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn is_full_circle(&self) -> bool {
        self.view_angle >= TAU - FULL_CIRCLE_EPS
    }

    /// ½·θ·r².
    pub fn area(&self) -> f64 {
        0.5 * self.view_angle * self.radius * self.radius
    }

    /// Unit vectors along the clockwise and counter-clockwise sidelines.
    pub fn sideline_directions(&self) -> (Vector2, Vector2) {
        let half = 0.5 * self.view_angle;
        (
            Vector2::from_angle(self.orientation - half),
            Vector2::from_angle(self.orientation + half),
        )
    }

    /// Closed membership: distance ≤ r and angular offset ≤ θ/2.
    pub fn contains(&self, p: Point2) -> bool {
        let w = p - self.apex;
        let d2 = w.norm_squared();
        if d2 > self.radius * self.radius {
            return false;
        }
        if self.is_full_circle() || d2 == 0.0 {
            return true;
        }
        let d = d2.sqrt();
        let axis = Vector2::from_angle(self.orientation);
        w.dot(axis) >= d * (0.5 * self.view_angle).cos() - 1e-12 * d
    }

    /// The two equal halves of a reflex sector, sharing the orientation ray.
    fn halves(&self) -> [Sector; 2] {
        let quarter = 0.25 * self.view_angle;
        let half_view = 0.5 * self.view_angle;
        [
            Sector {
                orientation: normalize_angle(self.orientation - quarter),
                view_angle: half_view,
                ..*self
            },
            Sector {
                orientation: normalize_angle(self.orientation + quarter),
                view_angle: half_view,
                ..*self
            },
        ]
    }

    /// Polygonal approximation with vertices on the arc; reflex sectors give
    /// two pieces.
    pub fn to_polygons(&self) -> Vec<ConvexPolygon> {
        if self.view_angle > PI {
            return self.halves().iter().flat_map(|h| h.to_polygons()).collect();
        }
        let start = self.orientation - 0.5 * self.view_angle;
        let mut ring = Vec::with_capacity(ARC_SEGMENTS + 2);
        ring.push(self.apex);
        for k in 0..=ARC_SEGMENTS {
            let t = start + self.view_angle * k as f64 / ARC_SEGMENTS as f64;
            ring.push(self.apex + Vector2::from_angle(t) * self.radius);
        }
        ConvexPolygon::from_clipped(ring).into_iter().collect()
    }
}

/// Exact area of `sector ∩ poly`.
///
/// For sectors up to a half-plane, the polygon is clipped by the two
/// sideline half-planes and the disk area of the remainder is taken. Reflex
/// sectors are split into two halves; the full circle is the disk case.
pub fn sector_polygon_area(sector: &Sector, poly: &ConvexPolygon) -> f64 {
    if sector.is_full_circle() {
        return disk_ring_area(sector.apex, sector.radius, poly.vertices());
    }
    if sector.view_angle > PI {
        return sector
            .halves()
            .iter()
            .map(|h| convex_sector_area(h, poly.vertices()))
            .sum();
    }
    convex_sector_area(sector, poly.vertices())
}

fn convex_sector_area(sector: &Sector, ring: &[Point2]) -> f64 {
    let (right, left) = sector.sideline_directions();
    let apex = sector.apex.to_vector();
    // keep cross(right, p - apex) ≥ 0 and cross(p - apex, left) ≥ 0
    let n1 = Vector2::new(right.y, -right.x);
    let n2 = Vector2::new(-left.y, left.x);
    let Some(ring) = clip_unchecked(ring, n1, n1.dot(apex)) else {
        return 0.0;
    };
    if ring.len() < 3 {
        return 0.0;
    }
    let Some(ring) = clip_unchecked(&ring, n2, n2.dot(apex)) else {
        return 0.0;
    };
    if ring.len() < 3 {
        return 0.0;
    }
    disk_ring_area(sector.apex, sector.radius, &ring)
}

/// Approximate area of `a ∩ b`, with `b` polygonized along its arc.
pub fn sector_overlap_area(a: &Sector, b: &Sector) -> f64 {
    let reach = a.radius + b.radius;
    if a.apex.distance(b.apex) > reach {
        return 0.0;
    }
    b.to_polygons()
        .iter()
        .map(|piece| sector_polygon_area(a, piece))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn quarter_sector() -> Sector {
        Sector::new(Point2::ORIGIN, 0.0, FRAC_PI_2, 10.0).unwrap()
    }

    #[test]
    fn sector_fully_inside_cell() {
        let cell = ConvexPolygon::rectangle(0.0, -20.0, 20.0, 20.0).unwrap();
        let a = sector_polygon_area(&quarter_sector(), &cell);
        assert!((a - 25.0 * PI).abs() < 1e-9, "{a}");
    }

    #[test]
    fn sector_cut_by_vertical_line() {
        // triangle (0,0),(5,-5),(5,5): ∫ ½ (5 / cos φ)² dφ over |φ| ≤ π/4 = 25
        let cell = ConvexPolygon::rectangle(0.0, -20.0, 5.0, 20.0).unwrap();
        let a = sector_polygon_area(&quarter_sector(), &cell);
        assert!((a - 25.0).abs() < 1e-9, "{a}");
    }

    #[test]
    fn full_circle_matches_disk() {
        let cell = ConvexPolygon::rectangle(-3.0, -1.0, 4.0, 8.0).unwrap();
        let apex = Point2::new(1.0, 2.0);
        let disk = super::super::circle_polygon_area(apex, 5.0, &cell).unwrap();
        for k in 0..7 {
            let s = Sector::new(apex, k as f64, TAU, 5.0).unwrap();
            assert_eq!(sector_polygon_area(&s, &cell), disk);
        }
    }

    #[test]
    fn reflex_sector_complements_its_opposite() {
        let cell = ConvexPolygon::rectangle(-3.0, -2.0, 4.0, 5.0).unwrap();
        let apex = Point2::new(0.5, 0.5);
        let disk = super::super::circle_polygon_area(apex, 3.0, &cell).unwrap();
        let narrow = Sector::new(apex, 0.3, 2.0, 3.0).unwrap();
        let wide = Sector::new(apex, 0.3 + PI, TAU - 2.0, 3.0).unwrap();
        let sum = sector_polygon_area(&narrow, &cell) + sector_polygon_area(&wide, &cell);
        assert!((sum - disk).abs() < 1e-9, "{sum} vs {disk}");
    }

    #[test]
    fn half_plane_sector() {
        let cell = ConvexPolygon::rectangle(-10.0, -10.0, 10.0, 10.0).unwrap();
        let s = Sector::new(Point2::ORIGIN, FRAC_PI_2, PI, 2.0).unwrap();
        assert!((sector_polygon_area(&s, &cell) - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn membership_boundary_is_closed() {
        let s = Sector::new(Point2::ORIGIN, 0.0, FRAC_PI_2, 100.0).unwrap();
        assert!(s.contains(Point2::new(100.0, 0.0)));
        assert!(s.contains(Point2::new(50.0, 50.0)));
        assert!(s.contains(Point2::ORIGIN));
        assert!(!s.contains(Point2::new(0.0, 50.0)));
        assert!(!s.contains(Point2::new(80.0, 80.0)));
    }

    #[test]
    fn rejects_bad_sectors() {
        assert!(Sector::new(Point2::ORIGIN, 0.0, 0.0, 1.0).is_err());
        assert!(Sector::new(Point2::ORIGIN, 0.0, 7.0, 1.0).is_err());
        assert!(Sector::new(Point2::ORIGIN, 0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn overlap_of_identical_sectors_is_their_area() {
        let s = Sector::new(Point2::new(1.0, 1.0), 0.4, 1.2, 4.0).unwrap();
        let o = sector_overlap_area(&s, &s);
        assert!((o - s.area()).abs() < 1e-3 * s.area());
        let far = Sector::new(Point2::new(100.0, 1.0), 0.4, 1.2, 4.0).unwrap();
        assert_eq!(sector_overlap_area(&s, &far), 0.0);
    }
}
