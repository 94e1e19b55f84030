//! Voronoi-vertex greedy orientation with collaborative adjustment.
//!
//! Pipeline per deployment: build the diagram, compute each sensor's RRF,
//! drop cell vertices near the region boundary, aim every sensor at the
//! vertex giving the largest coverage of its own cell, then resolve shared
//! vertex conflicts by moving the weaker sensor down its candidate list.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{sector_overlap_area, ConvexPolygon, Point2, Sector, Vector2};
use crate::rrf::{compute_all_rrf, PositionMode, RobustFeasibilityResult, RrfBounds};
use crate::sensing::{coverage_for_vertex, placement, Candidate, SensorConfig, SensorState};
use crate::voronoi::{build_voronoi, Deployment, Region, VoronoiDiagram};

/// Areas are compared after rounding to this many units per area unit, so
/// that float noise cannot break ties or transitivity.
const AREA_QUANTUM: f64 = 1e6;

/// Optimizer settings. Ties are always broken the same way: the lower
/// sensor id reorients on equal areas and equal-area vertices are ordered
/// lexicographically.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlgoConfig {
    /// Minimum distance of a candidate vertex from every region edge.
    pub epsilon: f64,
    pub position_mode: PositionMode,
}

impl AlgoConfig {
    pub fn new(epsilon: f64, position_mode: PositionMode) -> Result<Self> {
        if !(epsilon >= 0.0 && epsilon.is_finite()) {
            return invalid(format!("epsilon {epsilon} must be non-negative"));
        }
        Ok(Self { epsilon, position_mode })
    }

    /// ε = r_s / 3.
    pub fn with_default_epsilon(sensor: &SensorConfig, position_mode: PositionMode) -> Self {
        Self {
            epsilon: sensor.range / 3.0,
            position_mode,
        }
    }
}

/// Why a sensor changed its vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Reason {
    /// Lost a conflict and moved to its next candidate.
    Conflict { with: usize },
    /// Lost a conflict with no candidates left; took the least-overlap one.
    Exhausted { with: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReorientationEvent {
    pub iteration: usize,
    pub sensor: usize,
    pub from: Point2,
    pub to: Point2,
    pub reason: Reason,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct AlgoTrace {
    /// Number of full conflict scans, including the final quiet one.
    pub iterations: usize,
    pub reorientation_events: Vec<ReorientationEvent>,
    pub exhausted_sensors: BTreeSet<usize>,
}

impl AlgoTrace {
    /// One line per event: `iteration sensor from_x,from_y to_x,to_y reason`.
    pub fn to_log(&self) -> String {
        let mut out = String::new();
        for e in &self.reorientation_events {
            let reason = match e.reason {
                Reason::Conflict { with } => format!("conflict:{with}"),
                Reason::Exhausted { with } => format!("exhausted:{with}"),
            };
            let _ = writeln!(
                out,
                "{} {} {:?},{:?} {:?},{:?} {}",
                e.iteration, e.sensor, e.from.x, e.from.y, e.to.x, e.to.y, reason
            );
        }
        out
    }
}

/// Everything a run of the algorithm produces.
#[derive(Debug, Clone)]
pub struct AlgorithmOutput {
    pub diagram: VoronoiDiagram,
    pub rrf: Vec<RobustFeasibilityResult>,
    pub states: Vec<SensorState>,
    pub trace: AlgoTrace,
}

/// Cell vertices of `sensor` at distance ≥ ε from every region edge, or all
/// of them when none qualify.
pub fn perimeter_filter(sensor: usize, diagram: &VoronoiDiagram, region: &Region, epsilon: f64) -> Vec<Point2> {
    let all = diagram.vertices(sensor);
    let kept: Vec<Point2> = all
        .iter()
        .copied()
        .filter(|&v| region.distance_to_boundary(v) >= epsilon)
        .collect();
    if kept.is_empty() {
        all.to_vec()
    } else {
        kept
    }
}

fn area_key(area: f64) -> i64 {
    (area * AREA_QUANTUM).round() as i64
}

/// Points the sensor at `candidates[idx]`.
fn apply_choice(state: &mut SensorState, idx: usize, mode: PositionMode) -> Result<()> {
    let c = state.candidates[idx];
    let (pos, orientation) = placement(state.nominal, c.vertex, state.rho, mode)?;
    state.cursor = idx;
    state.chosen_vertex = Some(c.vertex);
    state.evaluated = pos;
    state.orientation = orientation;
    state.area = c.area;
    Ok(())
}

/// Scores every candidate vertex, sorts them (area descending, then vertex
/// lexicographically) and aims the sensor at the best one.
///
/// Candidates coinciding with the nominal position give no direction and
/// are skipped.
pub fn localized_orientation(
    mut state: SensorState,
    candidates: &[Point2],
    cfg: &SensorConfig,
    cell: &ConvexPolygon,
    mode: PositionMode,
) -> Result<SensorState> {
    let mut scored = Vec::with_capacity(candidates.len());
    for &vertex in candidates {
        if vertex == state.nominal {
            continue;
        }
        let area = coverage_for_vertex(&state, vertex, cfg, cell, mode)?;
        scored.push(Candidate { vertex, area });
    }
    if scored.is_empty() {
        return invalid(format!("sensor {} has no usable candidate vertex", state.id));
    }
    scored.sort_by(|a, b| {
        area_key(b.area)
            .cmp(&area_key(a.area))
            .then_with(|| a.vertex.lex_cmp(&b.vertex))
    });
    state.candidates = scored;
    state.exhausted = false;
    apply_choice(&mut state, 0, mode)?;
    Ok(state)
}

fn conflict_distance(a: &SensorState, b: &SensorState, range: f64) -> f64 {
    a.rho + b.rho + 2.0 * range
}

/// Two sensors conflict when they aim at the same vertex and their nominal
/// positions are closer than `ρ_i + ρ_j + 2r_s`.
pub fn detect_conflict(a: &SensorState, b: &SensorState, range: f64) -> Result<bool> {
    let (Some(va), Some(vb)) = (a.chosen_vertex, b.chosen_vertex) else {
        return Err(Error::InvalidState(format!(
            "sensors {} and {} must both have a chosen vertex",
            a.id, b.id
        )));
    };
    Ok(va == vb && a.nominal.distance(b.nominal) < conflict_distance(a, b, range))
}

/// Which boundary elements of two sectors meet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OverlapKind {
    SidelineSideline,
    ArcSideline,
    ArcArc,
    /// Boundaries do not meet but one sector lies inside the other.
    Nested,
    None,
}

struct Segment(Point2, Point2);

fn sidelines(s: &Sector) -> Vec<Segment> {
    if s.is_full_circle() {
        return Vec::new();
    }
    let (r, l) = s.sideline_directions();
    vec![
        Segment(s.apex(), s.apex() + r * s.radius()),
        Segment(s.apex(), s.apex() + l * s.radius()),
    ]
}

const TOUCH_TOL: f64 = 1e-9;

fn segments_meet(a: &Segment, b: &Segment) -> bool {
    let (p, r) = (a.0, a.1 - a.0);
    let (q, s) = (b.0, b.1 - b.0);
    let denom = r.cross(s);
    let qp = q - p;
    let scale = r.norm().max(s.norm());
    if denom.abs() <= TOUCH_TOL * scale * scale {
        // parallel: meet only if collinear with overlapping projections
        if qp.cross(r).abs() > TOUCH_TOL * scale * scale.max(qp.norm()) {
            return false;
        }
        let rr = r.norm_squared();
        let t0 = qp.dot(r) / rr;
        let t1 = t0 + s.dot(r) / rr;
        let (lo, hi) = (t0.min(t1), t0.max(t1));
        return hi >= -TOUCH_TOL && lo <= 1.0 + TOUCH_TOL;
    }
    let t = qp.cross(s) / denom;
    let u = qp.cross(r) / denom;
    (-TOUCH_TOL..=1.0 + TOUCH_TOL).contains(&t) && (-TOUCH_TOL..=1.0 + TOUCH_TOL).contains(&u)
}

/// Whether a point on the sector's circle lies within its angular window.
fn on_arc(s: &Sector, p: Point2) -> bool {
    if s.is_full_circle() {
        return true;
    }
    let w = p - s.apex();
    let d = w.norm();
    d > 0.0 && w.dot(Vector2::from_angle(s.orientation())) >= d * (0.5 * s.view_angle()).cos() - TOUCH_TOL * d
}

fn arc_meets_segment(s: &Sector, seg: &Segment) -> bool {
    let d = seg.1 - seg.0;
    let f = seg.0 - s.apex();
    let a = d.norm_squared();
    let b = f.dot(d);
    let c = f.norm_squared() - s.radius() * s.radius();
    let disc = b * b - a * c;
    if a == 0.0 || disc < 0.0 {
        return false;
    }
    let root = disc.sqrt();
    [(-b - root) / a, (-b + root) / a]
        .into_iter()
        .filter(|t| (-TOUCH_TOL..=1.0 + TOUCH_TOL).contains(t))
        .any(|t| on_arc(s, seg.0 + d * t))
}

fn arcs_meet(a: &Sector, b: &Sector) -> bool {
    let d = b.apex() - a.apex();
    let dist = d.norm();
    let (ra, rb) = (a.radius(), b.radius());
    if dist == 0.0 {
        if ra != rb {
            return false;
        }
        // same circle: the arcs meet iff their windows share a direction
        let probe = |s: &Sector, t: &Sector| {
            let (r, l) = s.sideline_directions();
            [r, l, Vector2::from_angle(s.orientation())]
                .into_iter()
                .any(|u| on_arc(t, s.apex() + u * ra))
        };
        return probe(a, b) || probe(b, a);
    }
    if dist > ra + rb || dist < (ra - rb).abs() {
        return false;
    }
    let x = (dist * dist + ra * ra - rb * rb) / (2.0 * dist);
    let h = (ra * ra - x * x).max(0.0).sqrt();
    let u = d * (1.0 / dist);
    let base = a.apex() + u * x;
    [base + u.perp() * h, base - u.perp() * h]
        .into_iter()
        .any(|p| on_arc(a, p) && on_arc(b, p))
}

fn interior_point(s: &Sector) -> Point2 {
    s.apex() + Vector2::from_angle(s.orientation()) * (0.5 * s.radius())
}

/// Classifies how two fields of view interact, checking sideline pairs
/// first, then arc-sideline, then arc-arc.
pub fn classify_overlap(a: &Sector, b: &Sector) -> OverlapKind {
    if a.apex().distance(b.apex()) > a.radius() + b.radius() {
        return OverlapKind::None;
    }
    let (sa, sb) = (sidelines(a), sidelines(b));
    if sa.iter().any(|x| sb.iter().any(|y| segments_meet(x, y))) {
        return OverlapKind::SidelineSideline;
    }
    if sb.iter().any(|seg| arc_meets_segment(a, seg)) || sa.iter().any(|seg| arc_meets_segment(b, seg)) {
        return OverlapKind::ArcSideline;
    }
    if arcs_meet(a, b) {
        return OverlapKind::ArcArc;
    }
    if a.contains(interior_point(b)) || b.contains(interior_point(a)) {
        return OverlapKind::Nested;
    }
    OverlapKind::None
}

/// Candidate of `states[i]` with the least summed sector overlap against
/// every sensor within conflict distance; earlier candidates win ties.
fn min_overlap_candidate(states: &[SensorState], i: usize, sensor: &SensorConfig, mode: PositionMode) -> Result<usize> {
    let me = &states[i];
    let rivals: Vec<Sector> = states
        .iter()
        .filter(|o| o.id != me.id && me.nominal.distance(o.nominal) < conflict_distance(me, o, sensor.range))
        .map(|o| o.sector(sensor))
        .collect::<Result<_>>()?;
    let mut best = (0, i64::MAX);
    for (k, c) in me.candidates.iter().enumerate() {
        let (pos, orientation) = placement(me.nominal, c.vertex, me.rho, mode)?;
        let mine = sensor.sector(pos, orientation)?;
        let overlap: f64 = rivals.iter().map(|r| sector_overlap_area(&mine, r)).sum();
        let key = area_key(overlap);
        if key < best.1 {
            best = (k, key);
        }
    }
    Ok(best.0)
}

/// Resolves shared-vertex conflicts by repeated ascending pair scans until
/// a scan changes nothing.
///
/// In each conflict the sensor with the smaller current area (lower id on
/// ties) moves to its next candidate; a sensor with none left takes its
/// least-overlap candidate and is frozen.
pub fn collaborative_adjustment(
    mut states: Vec<SensorState>,
    sensor: &SensorConfig,
    algo: &AlgoConfig,
) -> Result<(Vec<SensorState>, AlgoTrace)> {
    for (k, s) in states.iter().enumerate() {
        if s.id != k {
            return Err(Error::InvalidState(format!("state {k} carries id {}", s.id)));
        }
        if s.chosen_vertex.is_none() || s.candidates.is_empty() {
            return Err(Error::InvalidState(format!("sensor {k} has not been oriented")));
        }
    }
    let mut trace = AlgoTrace::default();
    let n = states.len();
    loop {
        trace.iterations += 1;
        let mut changed = false;
        for i in 0..n {
            for j in i + 1..n {
                if states[i].exhausted || states[j].exhausted {
                    continue;
                }
                if !detect_conflict(&states[i], &states[j], sensor.range)? {
                    continue;
                }
                let (loser, winner) = if area_key(states[j].area) < area_key(states[i].area) {
                    (j, i)
                } else {
                    (i, j)
                };
                let from = states[loser].chosen_vertex.expect("checked above");
                let next = states[loser].cursor + 1;
                let (idx, reason) = if next < states[loser].candidates.len() {
                    (next, Reason::Conflict { with: winner })
                } else {
                    let idx = min_overlap_candidate(&states, loser, sensor, algo.position_mode)?;
                    states[loser].exhausted = true;
                    trace.exhausted_sensors.insert(loser);
                    (idx, Reason::Exhausted { with: winner })
                };
                apply_choice(&mut states[loser], idx, algo.position_mode)?;
                trace.reorientation_events.push(ReorientationEvent {
                    iteration: trace.iterations,
                    sensor: loser,
                    from,
                    to: states[loser].candidates[idx].vertex,
                    reason,
                });
                changed = true;
            }
        }
        if !changed {
            return Ok((states, trace));
        }
    }
}

/// Orients every sensor given a diagram and per-sensor displacement radii.
pub fn optimize(
    deployment: &Deployment,
    diagram: &VoronoiDiagram,
    rhos: &[f64],
    sensor: &SensorConfig,
    algo: &AlgoConfig,
) -> Result<(Vec<SensorState>, AlgoTrace)> {
    if rhos.len() != deployment.len() || diagram.len() != deployment.len() {
        return invalid("deployment, diagram and radii disagree in length");
    }
    let region = deployment.region();
    let states = deployment
        .positions()
        .iter()
        .zip(rhos)
        .enumerate()
        .map(|(i, (&p, &rho))| {
            let candidates = perimeter_filter(i, diagram, &region, algo.epsilon);
            localized_orientation(
                SensorState::new(i, p, rho),
                &candidates,
                sensor,
                diagram.cell(i),
                algo.position_mode,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    collaborative_adjustment(states, sensor, algo)
}

/// The full pipeline: diagram, clamped RRF, then [`optimize`].
pub fn run_algorithm(
    deployment: &Deployment,
    sensor: &SensorConfig,
    algo: &AlgoConfig,
    bounds: &RrfBounds,
) -> Result<AlgorithmOutput> {
    let diagram = build_voronoi(deployment)?;
    let rrf = compute_all_rrf(&diagram, deployment, bounds)?;
    let rhos: Vec<f64> = rrf.iter().map(|r| r.rho).collect();
    let (states, trace) = optimize(deployment, &diagram, &rhos, sensor, algo)?;
    Ok(AlgorithmOutput {
        diagram,
        rrf,
        states,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI, TAU};

    fn oriented(id: usize, nominal: Point2, rho: f64, vertex: Point2, area: f64) -> SensorState {
        let mut s = SensorState::new(id, nominal, rho);
        s.candidates = vec![Candidate { vertex, area }];
        apply_choice(&mut s, 0, PositionMode::Nominal).unwrap();
        s
    }

    #[test]
    fn perimeter_filter_examples() {
        let region = Region::new(1000.0, 1000.0).unwrap();
        let d = Deployment::new(region, vec![Point2::new(500.0, 500.0)]).unwrap();
        let v = build_voronoi(&d).unwrap();
        // the single cell has only corner vertices, all within ε
        assert_eq!(perimeter_filter(0, &v, &region, 100.0 / 3.0), v.vertices(0).to_vec());
        assert!(region.distance_to_boundary(Point2::new(10.0, 500.0)) < 100.0 / 3.0);

        let d = Deployment::new(
            Region::new(10.0, 10.0).unwrap(),
            vec![Point2::new(0.5, 0.5), Point2::new(9.5, 0.5), Point2::new(0.5, 9.5)],
        )
        .unwrap();
        let v = build_voronoi(&d).unwrap();
        let r = d.region();
        assert_eq!(perimeter_filter(0, &v, &r, 1.0), vec![Point2::new(5.0, 5.0)]);
    }

    #[test]
    fn localized_orientation_argmax_and_ties() {
        let cfg = SensorConfig::new(1.0, FRAC_PI_2).unwrap();
        let cell = ConvexPolygon::rectangle(-10.0, -10.0, 10.0, 10.0).unwrap();
        let s = SensorState::new(0, Point2::ORIGIN, 0.0);
        // every direction gives the same interior area, so lexicographic order decides
        let out = localized_orientation(
            s.clone(),
            &[Point2::new(10.0, 10.0), Point2::new(-10.0, 10.0)],
            &cfg,
            &cell,
            PositionMode::Nominal,
        )
        .unwrap();
        assert_eq!(out.chosen_vertex, Some(Point2::new(-10.0, 10.0)));
        // the sensor at the left edge: facing inward beats facing the wall
        let edge = SensorState::new(0, Point2::new(-9.5, 0.0), 0.0);
        let out = localized_orientation(
            edge,
            &[Point2::new(-10.0, 10.0), Point2::new(10.0, 0.0)],
            &cfg,
            &cell,
            PositionMode::Nominal,
        )
        .unwrap();
        assert_eq!(out.chosen_vertex, Some(Point2::new(10.0, 0.0)));
        assert!(out.candidates[0].area > out.candidates[1].area);
        assert!(localized_orientation(s, &[], &cfg, &cell, PositionMode::Nominal).is_err());
    }

    #[test]
    fn conflict_examples() {
        let v = Point2::new(0.0, 500.0);
        let a = oriented(0, Point2::ORIGIN, 5.0, v, 1.0);
        let b = oriented(1, Point2::new(150.0, 0.0), 5.0, v, 1.0);
        let far = oriented(2, Point2::new(500.0, 0.0), 5.0, v, 1.0);
        let other = oriented(3, Point2::new(150.0, 0.0), 5.0, Point2::new(1.0, 1.0), 1.0);
        assert!(detect_conflict(&a, &b, 100.0).unwrap());
        assert!(!detect_conflict(&a, &far, 100.0).unwrap());
        assert!(!detect_conflict(&a, &other, 100.0).unwrap());
        let unset = SensorState::new(4, Point2::ORIGIN, 0.0);
        assert!(matches!(detect_conflict(&a, &unset, 100.0), Err(Error::InvalidState(_))));
    }

    #[test]
    fn overlap_classification() {
        let s = Sector::new(Point2::ORIGIN, 0.3, 1.0, 2.0).unwrap();
        assert_eq!(classify_overlap(&s, &s), OverlapKind::SidelineSideline);
        let far = Sector::new(Point2::new(40.0, 0.0), 0.3, 1.0, 2.0).unwrap();
        assert_eq!(classify_overlap(&s, &far), OverlapKind::None);
        let small = Sector::new(Point2::new(0.5, 0.2), 0.3, 0.2, 0.3).unwrap();
        assert_eq!(classify_overlap(&s, &small), OverlapKind::Nested);
        let full = Sector::new(Point2::ORIGIN, 0.0, TAU, 1.0).unwrap();
        let crossing = Sector::new(Point2::new(0.5, 0.0), PI, FRAC_PI_2, 2.0).unwrap();
        assert_eq!(classify_overlap(&full, &crossing), OverlapKind::ArcSideline);
    }

    #[test]
    fn no_conflict_is_a_fixed_point() {
        let cfg = SensorConfig::new(1.0, FRAC_PI_2).unwrap();
        let algo = AlgoConfig::new(0.0, PositionMode::Nominal).unwrap();
        let states = vec![
            oriented(0, Point2::ORIGIN, 0.0, Point2::new(1.0, 0.0), 1.0),
            oriented(1, Point2::new(3.0, 0.0), 0.0, Point2::new(4.0, 0.0), 1.0),
        ];
        let (out, trace) = collaborative_adjustment(states.clone(), &cfg, &algo).unwrap();
        assert_eq!(out, states);
        assert!(trace.reorientation_events.is_empty());
        assert_eq!(trace.iterations, 1);
    }

    #[test]
    fn symmetric_conflict_moves_lower_id() {
        let cfg = SensorConfig::new(1.5, FRAC_PI_2).unwrap();
        let algo = AlgoConfig::new(0.0, PositionMode::Nominal).unwrap();
        let shared = Point2::new(1.0, 0.0);
        let mk = |id: usize, x: f64| {
            let mut s = SensorState::new(id, Point2::new(x, 0.0), 0.0);
            s.candidates = vec![
                Candidate { vertex: shared, area: 1.0 },
                Candidate { vertex: Point2::new(x, 5.0), area: 0.5 },
            ];
            apply_choice(&mut s, 0, PositionMode::Nominal).unwrap();
            s
        };
        let (out, trace) = collaborative_adjustment(vec![mk(0, 0.0), mk(1, 2.0)], &cfg, &algo).unwrap();
        assert_eq!(trace.reorientation_events.len(), 1);
        let e = trace.reorientation_events[0];
        assert_eq!((e.sensor, e.reason), (0, Reason::Conflict { with: 1 }));
        assert_eq!(out[0].chosen_vertex, Some(Point2::new(0.0, 5.0)));
        assert_eq!(out[1].chosen_vertex, Some(shared));
        assert!(trace.to_log().starts_with("1 0 1.0,0.0 0.0,5.0 conflict:1"));
    }

    #[test]
    fn exhausted_sensor_is_frozen() {
        let cfg = SensorConfig::new(1.5, FRAC_PI_2).unwrap();
        let algo = AlgoConfig::new(0.0, PositionMode::Nominal).unwrap();
        let v = Point2::new(1.0, 0.0);
        let a = oriented(0, Point2::ORIGIN, 0.0, v, 1.0);
        let b = oriented(1, Point2::new(2.0, 0.0), 0.0, v, 2.0);
        let (out, trace) = collaborative_adjustment(vec![a, b], &cfg, &algo).unwrap();
        assert!(out[0].exhausted);
        assert_eq!(trace.exhausted_sensors, BTreeSet::from([0]));
        assert_eq!(trace.reorientation_events[0].reason, Reason::Exhausted { with: 1 });
    }

    #[test]
    fn single_sensor_run() {
        let d = Deployment::new(Region::new(100.0, 100.0).unwrap(), vec![Point2::new(20.0, 30.0)]).unwrap();
        let cfg = SensorConfig::new(30.0, FRAC_PI_2).unwrap();
        let algo = AlgoConfig::with_default_epsilon(&cfg, PositionMode::Nominal);
        let bounds = RrfBounds::new(5.0, 15.0, 1e-3).unwrap();
        let out = run_algorithm(&d, &cfg, &algo, &bounds).unwrap();
        assert!(out.trace.reorientation_events.is_empty());
        assert_eq!(out.states[0].rho, 15.0);
        let best = out.states[0].candidates[0];
        assert!(out.states[0].candidates.iter().all(|c| c.area <= best.area));
        assert!((best.area - 0.5 * FRAC_PI_2 * 900.0).abs() < 1e-9);
    }
}
