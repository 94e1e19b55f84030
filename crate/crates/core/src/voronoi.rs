//! Bounded Voronoi diagrams of sensor deployments.
//!
//! Each cell is built independently as the region rectangle intersected with
//! the half-planes `2(s_j - s_i)·x ≤ ‖s_j‖² - ‖s_i‖²` for every other site,
//! clipped in ascending site order. Edges remember which bisector produced
//! them, which gives the adjacency. Vertices shared by several cells are
//! welded to one canonical value so they compare equal across cells.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{ConvexPolygon, Point2, Vector2};

/// Minimum distance between two sensors of a deployment.
pub const MIN_SEPARATION: f64 = 1e-6;

/// Relative (to the region size) distance under which cell vertices from
/// different cells are considered the same Voronoi vertex.
const WELD_TOL: f64 = 1e-8;

/// Relative edge length under which a bisector does not make two sites
/// neighbours.
const EDGE_TOL: f64 = 1e-9;

/// Axis-aligned sensing field `[0, width] × [0, height]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub width: f64,
    pub height: f64,
}

impl Region {
    pub fn new(width: f64, height: f64) -> Result<Self> {
        if !(width > 0.0 && width.is_finite() && height > 0.0 && height.is_finite()) {
            return invalid(format!("region {width}×{height} must have positive finite sides"));
        }
        Ok(Self { width, height })
    }

    pub fn area(&self) -> f64 {
        self.width * self.height
    }

    /// Larger side; the length scale for tolerances.
    pub fn scale(&self) -> f64 {
        self.width.max(self.height)
    }

    pub fn polygon(&self) -> ConvexPolygon {
        ConvexPolygon::rectangle(0.0, 0.0, self.width, self.height)
            .expect("validated region is a proper rectangle")
    }

    /// Closed containment.
    pub fn contains(&self, p: Point2) -> bool {
        p.x >= 0.0 && p.x <= self.width && p.y >= 0.0 && p.y <= self.height
    }

    /// Distance from `p` to the nearest of the four sides.
    pub fn distance_to_boundary(&self, p: Point2) -> f64 {
        p.x.min(self.width - p.x).min(p.y).min(self.height - p.y)
    }
}

/// Nominal sensor locations inside a region.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Deployment {
    region: Region,
    positions: Vec<Point2>,
}

impl Deployment {
    /// Positions must lie in the closed region and be pairwise at least
    /// [`MIN_SEPARATION`] apart.
    pub fn new(region: Region, positions: Vec<Point2>) -> Result<Self> {
        if positions.is_empty() {
            return invalid("deployment needs at least one sensor");
        }
        for (i, p) in positions.iter().enumerate() {
            if !p.is_finite() || !region.contains(*p) {
                return invalid(format!("sensor {i} at ({}, {}) lies outside the region", p.x, p.y));
            }
        }
        for i in 0..positions.len() {
            for j in i + 1..positions.len() {
                if positions[i].distance(positions[j]) <= MIN_SEPARATION {
                    return invalid(format!("sensors {i} and {j} coincide"));
                }
            }
        }
        Ok(Self { region, positions })
    }

    pub fn region(&self) -> Region {
        self.region
    }

    pub fn positions(&self) -> &[Point2] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

/// Per-sensor cells clipped to the region, with neighbour adjacency.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VoronoiDiagram {
    cells: Vec<ConvexPolygon>,
    neighbors: Vec<Vec<usize>>,
}

impl VoronoiDiagram {
    pub fn cells(&self) -> &[ConvexPolygon] {
        &self.cells
    }

    pub fn cell(&self, i: usize) -> &ConvexPolygon {
        &self.cells[i]
    }

    /// Cell corners of sensor `i`, including boundary intersections and
    /// region corners.
    pub fn vertices(&self, i: usize) -> &[Point2] {
        self.cells[i].vertices()
    }

    /// Ascending indices of the sensors sharing a cell edge with `i`.
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i]
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum EdgeTag {
    Boundary,
    Site(usize),
}

/// Ring vertex plus the tag of the edge leaving it.
type Labeled = (Point2, EdgeTag);

/// Builds the bounded Voronoi diagram of a deployment.
pub fn build_voronoi(deployment: &Deployment) -> Result<VoronoiDiagram> {
    let region = deployment.region;
    let sites = &deployment.positions;
    let scale = region.scale();
    let m = sites.len();

    let mut rings = Vec::with_capacity(m);
    let mut neighbors: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); m];
    for i in 0..m {
        let ring = site_cell(i, sites, region);
        for (k, &(p, tag)) in ring.iter().enumerate() {
            if let EdgeTag::Site(j) = tag {
                let q = ring[(k + 1) % ring.len()].0;
                if p.distance(q) > EDGE_TOL * scale {
                    neighbors[i].insert(j);
                    neighbors[j].insert(i);
                }
            }
        }
        rings.push(ring.into_iter().map(|(p, _)| p).collect::<Vec<_>>());
    }

    weld(&mut rings, WELD_TOL * scale);

    let cells = rings
        .into_iter()
        .enumerate()
        .map(|(i, ring)| {
            ConvexPolygon::from_clipped(ring)
                .ok_or_else(|| Error::Internal(format!("Voronoi cell of sensor {i} is empty")))
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(VoronoiDiagram {
        cells,
        neighbors: neighbors.into_iter().map(|s| s.into_iter().collect()).collect(),
    })
}

fn site_cell(i: usize, sites: &[Point2], region: Region) -> Vec<Labeled> {
    let (w, h) = (region.width, region.height);
    let mut ring: Vec<Labeled> = vec![
        (Point2::new(0.0, 0.0), EdgeTag::Boundary),
        (Point2::new(w, 0.0), EdgeTag::Boundary),
        (Point2::new(w, h), EdgeTag::Boundary),
        (Point2::new(0.0, h), EdgeTag::Boundary),
    ];
    let si = sites[i];
    let mut reach2 = max_dist2(si, &ring);
    for (j, &sj) in sites.iter().enumerate() {
        if j == i {
            continue;
        }
        let d = sj - si;
        // the bisector sits |d|/2 from s_i; skip it when every vertex is closer
        if 0.25 * d.norm_squared() >= reach2 {
            continue;
        }
        let mid = Vector2::new(0.5 * (si.x + sj.x), 0.5 * (si.y + sj.y));
        ring = clip_labeled(&ring, d, d.dot(mid), EdgeTag::Site(j));
        reach2 = max_dist2(si, &ring);
    }
    dedupe(ring)
}

fn max_dist2(s: Point2, ring: &[Labeled]) -> f64 {
    ring.iter()
        .map(|(p, _)| (*p - s).norm_squared())
        .fold(0.0, f64::max)
}

/// One Sutherland–Hodgman pass that carries edge tags; the new edge along
/// the clip line gets `tag`.
fn clip_labeled(ring: &[Labeled], normal: Vector2, offset: f64, tag: EdgeTag) -> Vec<Labeled> {
    let extent = ring
        .iter()
        .fold(0.0_f64, |m, (p, _)| m.max(p.x.abs()).max(p.y.abs()));
    let band = 1e-12 * normal.norm() * (1.0 + extent);
    let side: Vec<f64> = ring
        .iter()
        .map(|(p, _)| normal.dot(p.to_vector()) - offset)
        .collect();
    let n = ring.len();
    let mut out = Vec::with_capacity(n + 1);
    for k in 0..n {
        let j = (k + 1) % n;
        let (p, p_tag) = ring[k];
        let q = ring[j].0;
        let p_in = side[k] <= band;
        let q_in = side[j] <= band;
        match (p_in, q_in) {
            (true, true) => out.push((p, p_tag)),
            (true, false) => {
                out.push((p, p_tag));
                if let Some(x) = crossing(p, q, side[k], side[j]) {
                    out.push((x, tag));
                } else if let Some(last) = out.last_mut() {
                    last.1 = tag;
                }
            }
            (false, true) => {
                if let Some(x) = crossing(p, q, side[k], side[j]) {
                    out.push((x, p_tag));
                }
            }
            (false, false) => {}
        }
    }
    out
}

fn crossing(p: Point2, q: Point2, sp: f64, sq: f64) -> Option<Point2> {
    let t = sp / (sp - sq);
    (t > 0.0 && t < 1.0).then(|| p + (q - p) * t)
}

/// Drops zero-length edges; the surviving vertex keeps the outgoing tag.
fn dedupe(mut ring: Vec<Labeled>) -> Vec<Labeled> {
    let mut k = 0;
    while ring.len() > 1 && k < ring.len() {
        let next = ring[(k + 1) % ring.len()].0;
        if ring[k].0.distance(next) <= 1e-12 * (1.0 + next.x.abs() + next.y.abs()) {
            ring.remove(k);
        } else {
            k += 1;
        }
    }
    ring
}

/// Snaps every vertex to the first earlier vertex (in sensor order) within
/// `tol`, so shared Voronoi vertices are bitwise equal across cells.
fn weld(rings: &mut [Vec<Point2>], tol: f64) {
    let mut canon: Vec<Point2> = Vec::new();
    for ring in rings.iter_mut() {
        for p in ring.iter_mut() {
            match canon.iter().find(|c| c.distance(*p) <= tol) {
                Some(c) => *p = *c,
                None => canon.push(*p),
            }
        }
    }
}
