//! Directional sensing model: the coverage predicate and per-vertex
//! coverage of a sensor inside its own Voronoi cell.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{normalize_angle, sector_polygon_area, ConvexPolygon, Point2, Sector, Vector2};
use crate::rrf::PositionMode;

/// Range and view angle shared by every sensor of a deployment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensorConfig {
    pub range: f64,
    /// Radians, in (0, 2π].
    pub view_angle: f64,
}

impl SensorConfig {
    pub fn new(range: f64, view_angle: f64) -> Result<Self> {
        if !(range > 0.0 && range.is_finite()) {
            return invalid(format!("sensing range {range} must be positive"));
        }
        if !(view_angle > 0.0 && view_angle <= TAU) {
            return invalid(format!("view angle {view_angle} outside (0, 2π]"));
        }
        Ok(Self { range, view_angle })
    }

    /// Field of view at `apex` facing `orientation`.
    pub fn sector(&self, apex: Point2, orientation: f64) -> Result<Sector> {
        Sector::new(apex, orientation, self.view_angle, self.range)
    }
}

/// Whether a sensor at `position` facing `orientation` covers `p`.
///
/// Closed on both tests; the apex itself is covered.
pub fn covers(position: Point2, orientation: f64, cfg: &SensorConfig, p: Point2) -> bool {
    let w = p - position;
    let d = w.norm();
    if d > cfg.range {
        return false;
    }
    if d == 0.0 {
        return true;
    }
    w.dot(Vector2::from_angle(orientation)) >= d * (0.5 * cfg.view_angle).cos()
}

/// A candidate orientation target and the coverage it yields.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Candidate {
    pub vertex: Point2,
    pub area: f64,
}

/// Per-sensor state threaded through the optimizer.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SensorState {
    pub id: usize,
    pub nominal: Point2,
    pub rho: f64,
    pub chosen_vertex: Option<Point2>,
    pub orientation: f64,
    pub evaluated: Point2,
    /// Sorted by area descending, then vertex lexicographically.
    pub candidates: Vec<Candidate>,
    /// Index into `candidates` of the current choice.
    pub cursor: usize,
    /// Coverage of the current orientation inside the own cell.
    pub area: f64,
    pub exhausted: bool,
}

impl SensorState {
    /// Fresh state at the nominal position, facing +x, with nothing chosen.
    pub fn new(id: usize, nominal: Point2, rho: f64) -> Self {
        Self {
            id,
            nominal,
            rho,
            chosen_vertex: None,
            orientation: 0.0,
            evaluated: nominal,
            candidates: Vec::new(),
            cursor: 0,
            area: 0.0,
            exhausted: false,
        }
    }

    /// Current field of view.
    pub fn sector(&self, cfg: &SensorConfig) -> Result<Sector> {
        cfg.sector(self.evaluated, self.orientation)
    }
}

/// Evaluated position and orientation of a sensor aimed at `vertex`.
///
/// The displacement runs along the nominal-to-vertex direction û; toward the
/// vertex it is capped at the vertex itself. Since the evaluated position
/// stays on the line through the nominal position and the vertex, the
/// orientation is the angle of û in every mode.
pub fn placement(nominal: Point2, vertex: Point2, rho: f64, mode: PositionMode) -> Result<(Point2, f64)> {
    if !(rho >= 0.0) {
        return invalid(format!("displacement radius {rho} must be non-negative"));
    }
    let to_vertex = vertex - nominal;
    let u = to_vertex.normalized().ok_or(Error::DegenerateDirection)?;
    let pos = match mode {
        PositionMode::Nominal => nominal,
        PositionMode::BestRobust => {
            let reach = rho.min(to_vertex.norm());
            if reach == to_vertex.norm() {
                vertex
            } else {
                nominal + u * reach
            }
        }
        PositionMode::WorstRobust => nominal - u * rho,
    };
    Ok((pos, normalize_angle(u.angle())))
}

/// Evaluated position of a sensor with a free orientation, displaced along
/// the orientation direction.
pub fn placement_along(nominal: Point2, orientation: f64, rho: f64, mode: PositionMode) -> Point2 {
    let u = Vector2::from_angle(orientation);
    match mode {
        PositionMode::Nominal => nominal,
        PositionMode::BestRobust => nominal + u * rho,
        PositionMode::WorstRobust => nominal - u * rho,
    }
}

/// Area of the sector aimed at `vertex` intersected with `cell`, with the
/// apex placed per `mode`.
pub fn coverage_for_vertex(
    sensor: &SensorState,
    vertex: Point2,
    cfg: &SensorConfig,
    cell: &ConvexPolygon,
    mode: PositionMode,
) -> Result<f64> {
    let (pos, orientation) = placement(sensor.nominal, vertex, sensor.rho, mode)?;
    Ok(sector_polygon_area(&cfg.sector(pos, orientation)?, cell))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn quarter() -> SensorConfig {
        SensorConfig::new(100.0, FRAC_PI_2).unwrap()
    }

    #[test]
    fn covers_examples() {
        let cfg = quarter();
        assert!(covers(Point2::ORIGIN, 0.0, &cfg, Point2::new(50.0, 0.0)));
        assert!(!covers(Point2::ORIGIN, 0.0, &cfg, Point2::new(0.0, 50.0)));
        assert!(!covers(Point2::ORIGIN, 0.0, &cfg, Point2::new(80.0, 80.0)));
        assert!(covers(Point2::ORIGIN, 0.0, &cfg, Point2::ORIGIN));
        assert!(covers(Point2::ORIGIN, 0.0, &cfg, Point2::new(100.0, 0.0)));
    }

    #[test]
    fn config_validation() {
        assert!(SensorConfig::new(0.0, 1.0).is_err());
        assert!(SensorConfig::new(1.0, 0.0).is_err());
        assert!(SensorConfig::new(1.0, 7.0).is_err());
        assert!(SensorConfig::new(1.0, TAU).is_ok());
    }

    #[test]
    fn interior_sector_area_is_independent_of_vertex() {
        let cfg = SensorConfig::new(10.0, PI / 3.0).unwrap();
        let cell = ConvexPolygon::rectangle(-100.0, -100.0, 100.0, 100.0).unwrap();
        let s = SensorState::new(0, Point2::ORIGIN, 0.0);
        for v in [Point2::new(100.0, 100.0), Point2::new(-100.0, 3.0), Point2::new(0.0, -100.0)] {
            let a = coverage_for_vertex(&s, v, &cfg, &cell, PositionMode::Nominal).unwrap();
            assert!((a - 0.5 * cfg.view_angle * 100.0).abs() < 1e-9);
        }
    }

    #[test]
    fn full_circle_ignores_vertex_at_nominal() {
        let cfg = SensorConfig::new(4.0, TAU).unwrap();
        let cell = ConvexPolygon::rectangle(0.0, 0.0, 6.0, 5.0).unwrap();
        let s = SensorState::new(0, Point2::new(1.0, 2.0), 3.0);
        let first = coverage_for_vertex(&s, Point2::new(6.0, 5.0), &cfg, &cell, PositionMode::Nominal).unwrap();
        for v in cell.vertices() {
            let a = coverage_for_vertex(&s, *v, &cfg, &cell, PositionMode::Nominal).unwrap();
            assert_eq!(a, first);
        }
    }

    #[test]
    fn best_robust_is_capped_at_vertex() {
        let (pos, o) = placement(Point2::ORIGIN, Point2::new(3.0, 4.0), 50.0, PositionMode::BestRobust).unwrap();
        assert_eq!(pos, Point2::new(3.0, 4.0));
        assert!((o - (4.0f64).atan2(3.0)).abs() < 1e-15);
        let (pos, o2) = placement(Point2::ORIGIN, Point2::new(3.0, 4.0), 5.0, PositionMode::WorstRobust).unwrap();
        assert!(pos.distance(Point2::new(-3.0, -4.0)) < 1e-12);
        assert_eq!(o, o2);
        assert!(matches!(
            placement(Point2::ORIGIN, Point2::ORIGIN, 1.0, PositionMode::Nominal),
            Err(Error::DegenerateDirection)
        ));
    }

    #[test]
    fn placement_along_orientation() {
        let p = placement_along(Point2::new(1.0, 1.0), FRAC_PI_2, 2.0, PositionMode::BestRobust);
        assert!(p.distance(Point2::new(1.0, 3.0)) < 1e-12);
        let q = placement_along(Point2::new(1.0, 1.0), FRAC_PI_2, 2.0, PositionMode::WorstRobust);
        assert!(q.distance(Point2::new(1.0, -1.0)) < 1e-12);
    }
}
