use super::{ConvexPolygon, Point2, Vector2};
use crate::error::{invalid, Result};

/// Exact area of `disk(center, radius) ∩ poly`.
///
/// Sums, over the directed polygon edges, the signed area of the disk
/// intersected with the triangle (center, a, b). Each edge is split where
/// it crosses the circle: pieces inside the disk contribute a triangle,
/// pieces outside contribute the circular sector they subtend.
pub fn circle_polygon_area(center: Point2, radius: f64, poly: &ConvexPolygon) -> Result<f64> {
    if !(radius > 0.0) || !radius.is_finite() || !center.is_finite() {
        return invalid("disk radius must be positive and finite");
    }
    Ok(disk_ring_area(center, radius, poly.vertices()))
}

pub(crate) fn disk_ring_area(center: Point2, radius: f64, ring: &[Point2]) -> f64 {
    let n = ring.len();
    let mut total = 0.0;
    for k in 0..n {
        let a = ring[k] - center;
        let b = ring[(k + 1) % n] - center;
        total += disk_triangle_signed(a, b, radius);
    }
    total.max(0.0)
}

/// Signed area of disk(0, r) ∩ triangle(0, a, b).
fn disk_triangle_signed(a: Vector2, b: Vector2, r: f64) -> f64 {
    let d = b - a;
    let qa = d.norm_squared();
    if qa == 0.0 {
        return 0.0;
    }
    let r2 = r * r;
    let qb = a.dot(d);
    let qc = a.norm_squared() - r2;
    let disc = qb * qb - qa * qc;
    if disc <= 0.0 {
        // the supporting line misses the open disk
        return sector_signed(a, b, r2);
    }
    let s = disc.sqrt();
    let t1 = (-qb - s) / qa;
    let t2 = (-qb + s) / qa;
    // clamped parameters map to the exact endpoints; a rounded endpoint near
    // the center would otherwise subtend a spurious arc
    let at = |t: f64| {
        if t <= 0.0 {
            a
        } else if t >= 1.0 {
            b
        } else {
            a + d * t
        }
    };
    let (p1, p2) = (at(t1), at(t2));
    let mut area = 0.5 * p1.cross(p2);
    if t1 > 0.0 {
        area += sector_signed(a, p1, r2);
    }
    if t2 < 1.0 {
        area += sector_signed(p2, b, r2);
    }
    area
}

fn sector_signed(p: Vector2, q: Vector2, r2: f64) -> f64 {
    let cross = p.cross(q);
    let dot = p.dot(q);
    if cross == 0.0 && dot >= 0.0 {
        return 0.0;
    }
    0.5 * r2 * cross.atan2(dot)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn square(h: f64) -> ConvexPolygon {
        ConvexPolygon::rectangle(-h, -h, h, h).unwrap()
    }

    #[test]
    fn polygon_inside_disk() {
        let a = circle_polygon_area(Point2::ORIGIN, 10.0, &square(1.0)).unwrap();
        assert!((a - 4.0).abs() < 1e-12);
    }

    #[test]
    fn disk_inside_polygon() {
        let a = circle_polygon_area(Point2::ORIGIN, 1.0, &square(5.0)).unwrap();
        assert!((a - PI).abs() < 1e-12);
    }

    #[test]
    fn quarter_disk() {
        let q = ConvexPolygon::rectangle(0.0, 0.0, 2.0, 2.0).unwrap();
        let a = circle_polygon_area(Point2::ORIGIN, 1.0, &q).unwrap();
        assert!((a - PI / 4.0).abs() < 1e-12);
    }

    #[test]
    fn half_disk_by_chord_through_center() {
        let p = ConvexPolygon::rectangle(-3.0, 0.0, 3.0, 3.0).unwrap();
        let a = circle_polygon_area(Point2::ORIGIN, 2.0, &p).unwrap();
        assert!((a - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn circular_segment() {
        // strip x ≥ 0.5 cuts a segment of the unit disk
        let p = ConvexPolygon::rectangle(0.5, -2.0, 2.0, 2.0).unwrap();
        let a = circle_polygon_area(Point2::ORIGIN, 1.0, &p).unwrap();
        let h = 0.5f64;
        let expected = (h).acos() - h * (1.0 - h * h).sqrt();
        assert!((a - expected).abs() < 1e-12, "{a} vs {expected}");
    }

    #[test]
    fn disjoint_is_zero() {
        let p = ConvexPolygon::rectangle(5.0, 5.0, 6.0, 6.0).unwrap();
        assert!(circle_polygon_area(Point2::ORIGIN, 1.0, &p).unwrap().abs() < 1e-12);
    }

    #[test]
    fn rejects_nonpositive_radius() {
        assert!(circle_polygon_area(Point2::ORIGIN, 0.0, &square(1.0)).is_err());
        assert!(circle_polygon_area(Point2::ORIGIN, -1.0, &square(1.0)).is_err());
    }
}
