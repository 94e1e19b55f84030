//! Radius of robust feasibility (RRF) of a sensor's Voronoi cell.
//!
//! The cell of sensor `i` is `{x : ā_j·x ≤ b̄_j}` over its neighbours `j`, with
//! `ā_j = 2(s̄_j − s̄_i)` and `b̄_j = ‖s̄_j‖² − ‖s̄_i‖²`. When both sensors may
//! sit anywhere in a ball of radius α around their nominal positions, the
//! linearized coefficient uncertainty is `‖a − ā‖ ≤ 4α` and
//! `|b − b̄| ≤ 2α(‖s̄_i‖ + ‖s̄_j‖)`. The robust system at level α is feasible
//! iff some `x` in the cell satisfies
//!
//! ```text
//! ā_j·x + α·(4‖x‖ + 2(‖s̄_i‖ + ‖s̄_j‖)) ≤ b̄_j   for every neighbour j,
//! ```
//!
//! and the RRF is the supremum of such α. Equivalently it is the maximum
//! over the cell of the margin ratio `min_j (b̄_j − ā_j·x) / ξ_j(x)`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{ConvexPolygon, Point2, Vector2};
use crate::voronoi::{Deployment, VoronoiDiagram};

/// Bound on ‖a − ā‖ per unit of α.
pub const A_RATE: f64 = 4.0;

/// Grid resolution per axis of one search level.
const GRID: usize = 21;
/// Coarse-to-fine levels of grid search.
const LEVELS: usize = 4;
/// Pattern-search steps after the grid levels.
const PATTERN_STEPS: usize = 100;

/// Nominal coefficients of one bisector constraint and their uncertainty
/// rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairCoefficients {
    pub a: Vector2,
    pub b: f64,
    /// `δ_b(α) / α = 2(‖s̄_i‖ + ‖s̄_j‖)`.
    pub b_rate: f64,
    pub a_rate: f64,
}

/// Coefficients of the half-plane keeping `x` closer to `s_i` than `s_j`.
pub fn neighbor_coefficients(s_i: Point2, s_j: Point2) -> Result<PairCoefficients> {
    if s_i == s_j {
        return invalid("coincident sensors have no bisector");
    }
    let a = (s_j - s_i) * 2.0;
    let (ni, nj) = (s_i.to_vector(), s_j.to_vector());
    Ok(PairCoefficients {
        a,
        b: nj.norm_squared() - ni.norm_squared(),
        b_rate: 2.0 * (ni.norm() + nj.norm()),
        a_rate: A_RATE,
    })
}

/// Support function of the per-unit-α uncertainty set in direction `(x, −1)`.
pub fn support_value(x: Point2, pair: &PairCoefficients) -> f64 {
    pair.a_rate * x.to_vector().norm() + pair.b_rate
}

fn ratio(x: Point2, pair: &PairCoefficients) -> f64 {
    (pair.b - pair.a.dot(x.to_vector())) / support_value(x, pair)
}

/// Clamping bounds and bisection tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RrfBounds {
    pub r_min: f64,
    pub r_max: f64,
    pub tol: f64,
}

impl RrfBounds {
    pub fn new(r_min: f64, r_max: f64, tol: f64) -> Result<Self> {
        if !(r_min >= 0.0 && r_min <= r_max && r_max.is_finite()) {
            return invalid(format!("RRF bounds need 0 ≤ r_min ≤ r_max, got [{r_min}, {r_max}]"));
        }
        if !(tol > 0.0 && tol.is_finite()) {
            return invalid(format!("bisection tolerance {tol} must be positive"));
        }
        Ok(Self { r_min, r_max, tol })
    }

    /// `min(max(raw, r_min), r_max)`.
    pub fn clamp(&self, raw: f64) -> f64 {
        raw.max(self.r_min).min(self.r_max)
    }
}

/// RRF of one sensor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RobustFeasibilityResult {
    pub rho_raw: f64,
    pub rho: f64,
    /// Point of the cell at which the last feasible level was certified.
    pub argmax_point: Point2,
    /// Neighbour with the smallest margin ratio at `argmax_point`; `None`
    /// for a sensor without neighbours.
    pub active_neighbor: Option<usize>,
}

/// Where a sensor is assumed to be when its coverage is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PositionMode {
    /// Case I: at the nominal position.
    Nominal,
    /// Case II: displaced by ρ toward the aimed vertex.
    BestRobust,
    /// Case III: displaced by ρ away from the aimed vertex.
    WorstRobust,
}

impl PositionMode {
    pub const ALL: [PositionMode; 3] = [
        PositionMode::Nominal,
        PositionMode::BestRobust,
        PositionMode::WorstRobust,
    ];

    /// Roman-numeral case label.
    pub fn case_label(self) -> &'static str {
        match self {
            PositionMode::Nominal => "I",
            PositionMode::BestRobust => "II",
            PositionMode::WorstRobust => "III",
        }
    }
}

impl std::str::FromStr for PositionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "i" | "1" | "nominal" => Ok(PositionMode::Nominal),
            "ii" | "2" | "best" | "best_robust" => Ok(PositionMode::BestRobust),
            "iii" | "3" | "worst" | "worst_robust" => Ok(PositionMode::WorstRobust),
            other => invalid(format!("unknown case '{other}' (expected I, II or III)")),
        }
    }
}

/// Cell and constraint data for one sensor.
struct CellProblem<'a> {
    cell: &'a ConvexPolygon,
    pairs: Vec<(usize, PairCoefficients)>,
    /// `1 / ‖ā_j‖`, parallel to `pairs`.
    inv_norms: Vec<f64>,
    tol: f64,
}

impl<'a> CellProblem<'a> {
    fn new(i: usize, diagram: &'a VoronoiDiagram, deployment: &Deployment) -> Result<Self> {
        if i >= deployment.len() || deployment.len() != diagram.len() {
            return invalid(format!("sensor index {i} out of range"));
        }
        let sites = deployment.positions();
        let pairs = diagram
            .neighbors(i)
            .iter()
            .map(|&j| Ok((j, neighbor_coefficients(sites[i], sites[j])?)))
            .collect::<Result<Vec<_>>>()?;
        let inv_norms = pairs.iter().map(|(_, p)| 1.0 / p.a.norm()).collect();
        Ok(Self {
            cell: diagram.cell(i),
            pairs,
            inv_norms,
            tol: 1e-9 * deployment.region().scale(),
        })
    }

    fn min_ratio(&self, x: Point2) -> (f64, Option<usize>) {
        self.pairs
            .iter()
            .map(|(j, p)| (ratio(x, p), Some(*j)))
            .fold((f64::INFINITY, None), |best, cur| if cur.0 < best.0 { cur } else { best })
    }

    /// Largest normalized violation of the robust constraints at level α.
    fn violation(&self, x: Point2, alpha: f64) -> f64 {
        self.violation_above(x, alpha, f64::INFINITY)
    }

    /// As [`Self::violation`], but may stop early with any value above
    /// `cutoff` once the result is known to exceed it.
    fn violation_above(&self, x: Point2, alpha: f64, cutoff: f64) -> f64 {
        let xv = x.to_vector();
        let xn = xv.norm();
        let mut worst = f64::NEG_INFINITY;
        for ((_, p), inv) in self.pairs.iter().zip(&self.inv_norms) {
            let g = (p.a.dot(xv) + alpha * (p.a_rate * xn + p.b_rate) - p.b) * inv;
            if g > worst {
                worst = g;
                if worst > cutoff {
                    break;
                }
            }
        }
        worst
    }

    fn inside(&self, x: Point2) -> bool {
        self.cell.contains_with_tol(x, self.tol)
    }

    /// Searches the cell for a point satisfying every robust constraint at
    /// level α: coarse-to-fine grids, then pattern search. Returns the best
    /// point and whether it is feasible.
    fn feasible_point(&self, alpha: f64, seed: Point2) -> (Point2, bool) {
        let mut best = seed;
        let mut best_v = self.violation(seed, alpha);
        if best_v <= 0.0 {
            return (best, true);
        }
        for &v in self.cell.vertices() {
            let g = self.violation(v, alpha);
            if g < best_v {
                best = v;
                best_v = g;
            }
        }
        if best_v <= 0.0 {
            return (best, true);
        }
        let (lo, hi) = self.cell.bounds();
        let (mut cx, mut cy) = (0.5 * (lo.x + hi.x), 0.5 * (lo.y + hi.y));
        let (mut hx, mut hy) = (0.5 * (hi.x - lo.x), 0.5 * (hi.y - lo.y));
        let steps = (GRID - 1) as f64;
        for _ in 0..LEVELS {
            for ix in 0..GRID {
                let x = cx - hx + 2.0 * hx * ix as f64 / steps;
                for iy in 0..GRID {
                    let p = Point2::new(x, cy - hy + 2.0 * hy * iy as f64 / steps);
                    if !self.inside(p) {
                        continue;
                    }
                    let g = self.violation_above(p, alpha, best_v);
                    if g < best_v {
                        best = p;
                        best_v = g;
                        if g <= 0.0 {
                            return (best, true);
                        }
                    }
                }
            }
            // zoom to one grid step around the incumbent
            hx *= 2.0 / steps;
            hy *= 2.0 / steps;
            cx = best.x;
            cy = best.y;
        }
        let mut step = hx.max(hy);
        let dirs = [
            Vector2::new(1.0, 0.0),
            Vector2::new(-1.0, 0.0),
            Vector2::new(0.0, 1.0),
            Vector2::new(0.0, -1.0),
            Vector2::new(1.0, 1.0),
            Vector2::new(-1.0, -1.0),
            Vector2::new(1.0, -1.0),
            Vector2::new(-1.0, 1.0),
        ];
        for _ in 0..PATTERN_STEPS {
            let mut moved = false;
            for d in dirs {
                let p = best + d * step;
                if !self.inside(p) {
                    continue;
                }
                let g = self.violation_above(p, alpha, best_v);
                if g < best_v {
                    best = p;
                    best_v = g;
                    moved = true;
                    break;
                }
            }
            if best_v <= 0.0 {
                return (best, true);
            }
            if !moved {
                step *= 0.5;
            }
        }
        (best, best_v <= 0.0)
    }
}

/// Margin ratio `min_j (b̄_j − ā_j·x) / ξ_j(x)` of sensor `i` at `x`.
///
/// `x` must lie in the closed cell; a sensor without neighbours has ratio
/// `+∞`.
pub fn margin_ratio(x: Point2, sensor: usize, diagram: &VoronoiDiagram, deployment: &Deployment) -> Result<f64> {
    let problem = CellProblem::new(sensor, diagram, deployment)?;
    if !problem.inside(x) {
        return Err(Error::Domain(format!(
            "point ({}, {}) is outside the cell of sensor {sensor}",
            x.x, x.y
        )));
    }
    Ok(problem.min_ratio(x).0)
}

/// Whether `x` satisfies every robust constraint of sensor `i` at level α.
pub fn is_robust_feasible(
    x: Point2,
    alpha: f64,
    sensor: usize,
    diagram: &VoronoiDiagram,
    deployment: &Deployment,
) -> Result<bool> {
    let problem = CellProblem::new(sensor, diagram, deployment)?;
    Ok(problem.violation(x, alpha) <= 0.0)
}

/// RRF of sensor `i` by bisection on α over `[0, 2·r_max]`.
///
/// Each level is decided by [`CellProblem::feasible_point`]; the bracket is
/// halved until narrower than `bounds.tol`. `rho_raw` is the lower end of
/// the final bracket, saturating at the upper end when even that level is
/// feasible.
pub fn compute_rrf(
    sensor: usize,
    diagram: &VoronoiDiagram,
    deployment: &Deployment,
    bounds: &RrfBounds,
) -> Result<RobustFeasibilityResult> {
    if !(bounds.tol > 0.0) {
        return invalid("bisection tolerance must be positive");
    }
    let problem = CellProblem::new(sensor, diagram, deployment)?;
    let nominal = deployment.positions()[sensor];
    if !problem.inside(nominal) {
        return Err(Error::Internal(format!("sensor {sensor} lies outside its own cell")));
    }
    let alpha_hi = (2.0 * bounds.r_max).max(bounds.tol);

    let (mut lo, mut hi) = (0.0, alpha_hi);
    let mut witness = nominal;
    let (x_hi, ok_hi) = problem.feasible_point(alpha_hi, nominal);
    if ok_hi {
        lo = alpha_hi;
        witness = x_hi;
    } else {
        while hi - lo >= bounds.tol {
            let mid = 0.5 * (lo + hi);
            let (x, ok) = problem.feasible_point(mid, witness);
            if ok {
                lo = mid;
                witness = x;
            } else {
                hi = mid;
            }
        }
    }
    let active_neighbor = problem.min_ratio(witness).1;
    Ok(RobustFeasibilityResult {
        rho_raw: lo,
        rho: bounds.clamp(lo),
        argmax_point: witness,
        active_neighbor,
    })
}

/// RRF of every sensor, in index order.
pub fn compute_all_rrf(
    diagram: &VoronoiDiagram,
    deployment: &Deployment,
    bounds: &RrfBounds,
) -> Result<Vec<RobustFeasibilityResult>> {
    (0..deployment.len())
        .map(|i| compute_rrf(i, diagram, deployment, bounds))
        .collect()
}

/// `s + ρ·(vertex − s)/‖vertex − s‖`.
pub fn robust_location(s: Point2, vertex: Point2, rho: f64) -> Result<Point2> {
    if !(rho >= 0.0) {
        return invalid(format!("displacement radius {rho} must be non-negative"));
    }
    let u = (vertex - s).normalized().ok_or(Error::DegenerateDirection)?;
    Ok(s + u * rho)
}

/// Sensor position under a [`PositionMode`] when aimed at `vertex`.
pub fn evaluated_position(s: Point2, vertex: Point2, rho: f64, mode: PositionMode) -> Result<Point2> {
    match mode {
        PositionMode::Nominal => Ok(s),
        PositionMode::BestRobust => robust_location(s, vertex, rho),
        PositionMode::WorstRobust => {
            let toward = robust_location(s, vertex, rho)?;
            Ok(s - (toward - s))
        }
    }
}
