//! Independent oracles shared by the integration tests. Nothing here calls
//! the library's own membership or area routines.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use robust_dsn::geometry::clip_halfplane;
use robust_dsn::{ConvexPolygon, Point2, Vector2};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Closed point-in-convex-polygon test by edge cross products.
pub fn in_convex(p: Point2, verts: &[Point2]) -> bool {
    let n = verts.len();
    (0..n).all(|k| {
        let a = verts[k];
        let b = verts[(k + 1) % n];
        (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x) >= -1e-12
    })
}

/// Closed sector membership by explicit angle difference.
pub fn in_sector(p: Point2, apex: Point2, orientation: f64, view: f64, r: f64) -> bool {
    let dx = p.x - apex.x;
    let dy = p.y - apex.y;
    let d2 = dx * dx + dy * dy;
    if d2 > r * r {
        return false;
    }
    if d2 == 0.0 || view >= std::f64::consts::TAU {
        return true;
    }
    let mut diff = dy.atan2(dx) - orientation;
    while diff > std::f64::consts::PI {
        diff -= std::f64::consts::TAU;
    }
    while diff < -std::f64::consts::PI {
        diff += std::f64::consts::TAU;
    }
    diff.abs() <= 0.5 * view + 1e-12
}

/// Uniform Monte-Carlo estimate of the area where `pred` holds inside the
/// box, with its binomial standard error.
pub fn mc_area(pred: impl Fn(Point2) -> bool, lo: Point2, hi: Point2, n: usize, seed: u64) -> (f64, f64) {
    let mut r = rng(seed);
    let mut hits = 0usize;
    for _ in 0..n {
        let p = Point2::new(r.gen_range(lo.x..hi.x), r.gen_range(lo.y..hi.y));
        if pred(p) {
            hits += 1;
        }
    }
    let box_area = (hi.x - lo.x) * (hi.y - lo.y);
    let f = hits as f64 / n as f64;
    (box_area * f, box_area * (f * (1.0 - f) / n as f64).sqrt())
}

/// A random convex polygon: a rectangle cut by a few random lines through
/// its interior.
pub fn random_convex(r: &mut ChaCha8Rng) -> ConvexPolygon {
    let x0 = r.gen_range(-10.0..0.0);
    let y0 = r.gen_range(-10.0..0.0);
    let mut poly = ConvexPolygon::rectangle(x0, y0, x0 + r.gen_range(4.0..15.0), y0 + r.gen_range(4.0..15.0)).unwrap();
    for _ in 0..r.gen_range(0..4) {
        let (lo, hi) = poly.bounds();
        let through = Point2::new(
            lo.x + (hi.x - lo.x) * r.gen_range(0.3..0.7),
            lo.y + (hi.y - lo.y) * r.gen_range(0.3..0.7),
        );
        let n = Vector2::from_angle(r.gen_range(-std::f64::consts::PI..std::f64::consts::PI));
        // keep the side containing the centre plus a margin
        let offset = n.dot(through.to_vector()) + r.gen_range(0.5..3.0);
        if let Ok(Some(p)) = clip_halfplane(&poly, n, offset) {
            if p.area() > 1.0 {
                poly = p;
            }
        }
    }
    poly
}

/// Index of the site nearest to `p`, and the gap to the second nearest.
pub fn nearest_site(p: Point2, sites: &[Point2]) -> (usize, f64) {
    let mut best = (usize::MAX, f64::INFINITY);
    let mut second = f64::INFINITY;
    for (i, s) in sites.iter().enumerate() {
        let d = ((p.x - s.x).powi(2) + (p.y - s.y).powi(2)).sqrt();
        if d < best.1 {
            second = best.1;
            best = (i, d);
        } else if d < second {
            second = d;
        }
    }
    (best.0, second - best.1)
}
