use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::Point2;
use crate::error::{invalid, Result};

/// Axis-aligned sampling box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundingBox {
    pub min: Point2,
    pub max: Point2,
}

impl BoundingBox {
    pub fn new(min: Point2, max: Point2) -> Result<Self> {
        if !min.is_finite() || !max.is_finite() || !(max.x > min.x) || !(max.y > min.y) {
            return invalid("bounding box must have positive finite extent");
        }
        Ok(Self { min, max })
    }

    pub fn area(&self) -> f64 {
        (self.max.x - self.min.x) * (self.max.y - self.min.y)
    }
}

/// Monte-Carlo area estimate with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub stderr: f64,
}

/// Uniform-sampling estimate of the area where `predicate` holds inside
/// `bbox`. Deterministic for a fixed seed.
pub fn mc_area_oracle<F>(predicate: F, bbox: BoundingBox, n_samples: usize, seed: u64) -> Result<McEstimate>
where
    F: Fn(Point2) -> bool,
{
    if n_samples == 0 {
        return invalid("Monte-Carlo oracle needs at least one sample");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (w, h) = (bbox.max.x - bbox.min.x, bbox.max.y - bbox.min.y);
    let hits = (0..n_samples)
        .filter(|_| {
            let p = Point2::new(bbox.min.x + w * rng.gen::<f64>(), bbox.min.y + h * rng.gen::<f64>());
            predicate(p)
        })
        .count();
    let n = n_samples as f64;
    let frac = hits as f64 / n;
    let area = bbox.area();
    Ok(McEstimate {
        estimate: area * frac,
        stderr: area * (frac * (1.0 - frac) / n).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn square() -> BoundingBox {
        BoundingBox::new(Point2::new(-1.0, -1.0), Point2::new(1.0, 1.0)).unwrap()
    }

    #[test]
    fn unit_disk_estimate() {
        let est = mc_area_oracle(|p| p.x * p.x + p.y * p.y <= 1.0, square(), 1_000_000, 7).unwrap();
        assert!((est.estimate - PI).abs() <= 3.0 * est.stderr, "{est:?}");
    }

    #[test]
    fn always_false_is_zero() {
        let est = mc_area_oracle(|_| false, square(), 1000, 1).unwrap();
        assert_eq!(est.estimate, 0.0);
        assert_eq!(est.stderr, 0.0);
    }

    #[test]
    fn deterministic_per_seed() {
        let f = |p: Point2| p.x > p.y;
        let a = mc_area_oracle(f, square(), 5000, 3).unwrap();
        let b = mc_area_oracle(f, square(), 5000, 3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(BoundingBox::new(Point2::new(0.0, 0.0), Point2::new(0.0, 1.0)).is_err());
        assert!(mc_area_oracle(|_| true, square(), 0, 1).is_err());
    }
}
