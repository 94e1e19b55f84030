//! Experiment harness: random deployments, orientation strategies, the
//! coverage metric, parameter sweeps and SVG output.

mod svg;
mod sweep;

use std::f64::consts::{PI, TAU};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{mc_area_oracle, sector_polygon_area, BoundingBox, Point2};
use crate::optimizer::{optimize, AlgoConfig, AlgoTrace};
use crate::rrf::{compute_all_rrf, PositionMode, RobustFeasibilityResult, RrfBounds};
use crate::sensing::{covers, placement, placement_along, SensorConfig, SensorState};
use crate::voronoi::{build_voronoi, Deployment, Region, VoronoiDiagram, MIN_SEPARATION};

pub use svg::{render_svg, svg_document};
pub use sweep::{sweep, to_csv, SweepRow, SweepSpec, CSV_HEADER};

/// Distance kept between random sensors and the region border.
pub const DEPLOY_MARGIN: f64 = 1e-3;
/// Sampling attempts before a deployment is declared infeasible.
pub const MAX_DEPLOY_ATTEMPTS: usize = 1_000_000;

/// How sensors choose their orientation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// Uniformly random orientations.
    Random,
    /// Voronoi greedy ignoring location uncertainty.
    Ids,
    /// Voronoi greedy scored at the robust positions.
    Proposed,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::Random, Strategy::Ids, Strategy::Proposed];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Random => "random",
            Strategy::Ids => "ids",
            Strategy::Proposed => "proposed",
        }
    }
}

impl std::str::FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "random" => Ok(Strategy::Random),
            "ids" => Ok(Strategy::Ids),
            "proposed" => Ok(Strategy::Proposed),
            other => invalid(format!("unknown strategy '{other}' (expected random, ids or proposed)")),
        }
    }
}

/// Degrees to radians, mapping 360° to exactly 2π.
pub fn view_angle_from_degrees(deg: f64) -> f64 {
    if deg == 360.0 {
        TAU
    } else {
        deg.to_radians()
    }
}

/// Radians to degrees, rounded to 1e-9° so that round trips print cleanly.
pub fn view_angle_to_degrees(rad: f64) -> f64 {
    (rad.to_degrees() * 1e9).round() / 1e9
}

/// `theta_s` is written in degrees in serialized form.
mod degrees {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(rad: &f64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(super::view_angle_to_degrees(*rad))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        f64::deserialize(d).map(super::view_angle_from_degrees)
    }
}

fn default_runs() -> usize {
    500
}

fn default_tol() -> f64 {
    1e-3
}

fn default_union_samples() -> usize {
    100_000
}

/// Parameters of one experiment cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub region: Region,
    pub m: usize,
    pub r_s: f64,
    /// Radians in memory, degrees when serialized.
    #[serde(with = "degrees")]
    pub theta_s: f64,
    pub rho_min: f64,
    pub rho_max: f64,
    /// Defaults to `r_s / 3` when unset.
    #[serde(default)]
    pub epsilon: Option<f64>,
    pub strategy: Strategy,
    pub mode: PositionMode,
    #[serde(default = "default_runs")]
    pub runs: usize,
    #[serde(default)]
    pub seed: u64,
    /// Bisection tolerance of the RRF.
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Samples of the union-coverage diagnostic; 0 disables it.
    #[serde(default = "default_union_samples")]
    pub union_samples: usize,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            region: Region {
                width: 1000.0,
                height: 1000.0,
            },
            m: 40,
            r_s: 100.0,
            theta_s: PI / 2.0,
            rho_min: 50.0,
            rho_max: 150.0,
            epsilon: None,
            strategy: Strategy::Proposed,
            mode: PositionMode::Nominal,
            runs: default_runs(),
            seed: 0,
            tol: default_tol(),
            union_samples: default_union_samples(),
        }
    }
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        Region::new(self.region.width, self.region.height)?;
        if self.m == 0 {
            return invalid("m must be at least 1");
        }
        if self.runs == 0 {
            return invalid("runs must be at least 1");
        }
        self.sensor_config()?;
        self.rrf_bounds()?;
        self.algo_config()?;
        Ok(())
    }

    pub fn theta_deg(&self) -> f64 {
        view_angle_to_degrees(self.theta_s)
    }

    pub fn sensor_config(&self) -> Result<SensorConfig> {
        SensorConfig::new(self.r_s, self.theta_s)
    }

    pub fn rrf_bounds(&self) -> Result<RrfBounds> {
        RrfBounds::new(self.rho_min, self.rho_max, self.tol)
    }

    pub fn algo_config(&self) -> Result<AlgoConfig> {
        AlgoConfig::new(self.epsilon.unwrap_or(self.r_s / 3.0), self.mode)
    }
}

fn run_rng(seed: u64, run_index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_add(run_index))
}

/// `m` uniform positions in the region shrunk by [`DEPLOY_MARGIN`], drawn
/// from the stream seeded with `seed + run_index`; points closer than the
/// minimum separation to an earlier one are redrawn.
pub fn deploy_random(config: &ScenarioConfig, run_index: u64) -> Result<Deployment> {
    let region = Region::new(config.region.width, config.region.height)?;
    if config.m == 0 {
        return invalid("m must be at least 1");
    }
    let (w, h) = (region.width, region.height);
    if w <= 2.0 * DEPLOY_MARGIN || h <= 2.0 * DEPLOY_MARGIN {
        return Err(Error::Configuration(format!("region {w}×{h} is smaller than the deployment margin")));
    }
    let mut rng = run_rng(config.seed, run_index);
    let mut positions: Vec<Point2> = Vec::with_capacity(config.m);
    let mut attempts = 0;
    while positions.len() < config.m {
        if attempts == MAX_DEPLOY_ATTEMPTS {
            return Err(Error::Configuration(format!(
                "could not place {} separated sensors in {MAX_DEPLOY_ATTEMPTS} attempts",
                config.m
            )));
        }
        attempts += 1;
        let p = Point2::new(
            rng.gen_range(DEPLOY_MARGIN..w - DEPLOY_MARGIN),
            rng.gen_range(DEPLOY_MARGIN..h - DEPLOY_MARGIN),
        );
        if positions.iter().all(|q| q.distance(p) >= MIN_SEPARATION) {
            positions.push(p);
        }
    }
    Deployment::new(region, positions)
}

/// Geometry of one deployment that does not depend on the sensor model.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub deployment: Deployment,
    pub diagram: VoronoiDiagram,
    pub rrf: Vec<RobustFeasibilityResult>,
}

impl Prepared {
    pub fn new(deployment: Deployment, bounds: &RrfBounds) -> Result<Self> {
        let diagram = build_voronoi(&deployment)?;
        let rrf = compute_all_rrf(&diagram, &deployment, bounds)?;
        Ok(Self {
            deployment,
            diagram,
            rrf,
        })
    }

    pub fn rhos(&self) -> Vec<f64> {
        self.rrf.iter().map(|r| r.rho).collect()
    }
}

/// Final sensor states of a strategy, with the optimizer trace when one ran.
#[derive(Debug, Clone)]
pub struct Assignment {
    pub states: Vec<SensorState>,
    pub trace: Option<AlgoTrace>,
}

/// Orients every sensor of a prepared deployment per `config.strategy`.
pub fn assign_orientations(prepared: &Prepared, config: &ScenarioConfig, run_index: u64) -> Result<Assignment> {
    let sensor = config.sensor_config()?;
    let algo = config.algo_config()?;
    let rhos = prepared.rhos();
    let positions = prepared.deployment.positions();
    match config.strategy {
        Strategy::Random => {
            let mut rng = run_rng(config.seed, run_index);
            rng.set_stream(1);
            let states = positions
                .iter()
                .zip(&rhos)
                .enumerate()
                .map(|(i, (&p, &rho))| {
                    // maps [0, 1) onto (-π, π]
                    let orientation = PI - 2.0 * PI * rng.gen::<f64>();
                    let mut s = SensorState::new(i, p, rho);
                    s.orientation = orientation;
                    s.evaluated = placement_along(p, orientation, rho, config.mode);
                    s
                })
                .collect();
            Ok(Assignment { states, trace: None })
        }
        Strategy::Ids => {
            let zeros = vec![0.0; rhos.len()];
            let (mut states, trace) = optimize(&prepared.deployment, &prepared.diagram, &zeros, &sensor, &algo)?;
            for (s, &rho) in states.iter_mut().zip(&rhos) {
                s.rho = rho;
                let vertex = s.chosen_vertex.ok_or_else(|| Error::Internal("optimizer left a sensor unoriented".into()))?;
                let (pos, orientation) = placement(s.nominal, vertex, rho, config.mode)?;
                s.evaluated = pos;
                s.orientation = orientation;
            }
            Ok(Assignment {
                states,
                trace: Some(trace),
            })
        }
        Strategy::Proposed => {
            let (states, trace) = optimize(&prepared.deployment, &prepared.diagram, &rhos, &sensor, &algo)?;
            Ok(Assignment {
                states,
                trace: Some(trace),
            })
        }
    }
}

/// Coverage metrics of one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunResult {
    /// Sum of per-sensor areas.
    pub total_coverage: f64,
    /// Field of view at the evaluated position intersected with the own cell.
    pub per_sensor_area: Vec<f64>,
    pub rrf_values: Vec<f64>,
    /// Monte-Carlo estimate of the area covered by any sensor; `None` when
    /// disabled.
    pub union_coverage_mc: Option<f64>,
    pub wall_time: f64,
}

/// Scores final states; also refreshes each state's `area`.
pub fn evaluate(states: &mut [SensorState], diagram: &VoronoiDiagram, config: &ScenarioConfig) -> Result<RunResult> {
    if states.len() != diagram.len() {
        return invalid("states and diagram disagree in length");
    }
    let sensor = config.sensor_config()?;
    let mut per_sensor_area = Vec::with_capacity(states.len());
    for (s, cell) in states.iter_mut().zip(diagram.cells()) {
        s.area = sector_polygon_area(&s.sector(&sensor)?, cell);
        per_sensor_area.push(s.area);
    }
    // accumulated in sensor order for bit-reproducibility
    let total_coverage = per_sensor_area.iter().sum();
    let union_coverage_mc = if config.union_samples > 0 {
        let bbox = BoundingBox::new(
            Point2::ORIGIN,
            Point2::new(config.region.width, config.region.height),
        )?;
        let pred = |p: Point2| states.iter().any(|s| covers(s.evaluated, s.orientation, &sensor, p));
        Some(mc_area_oracle(pred, bbox, config.union_samples, config.seed)?.estimate)
    } else {
        None
    };
    Ok(RunResult {
        total_coverage,
        per_sensor_area,
        rrf_values: states.iter().map(|s| s.rho).collect(),
        union_coverage_mc,
        wall_time: 0.0,
    })
}

/// Everything produced by one run of a scenario.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub prepared: Prepared,
    pub states: Vec<SensorState>,
    pub trace: Option<AlgoTrace>,
    pub result: RunResult,
}

/// Strategy and evaluation on an already prepared deployment.
pub fn run_prepared(prepared: &Prepared, config: &ScenarioConfig, run_index: u64) -> Result<(Assignment, RunResult)> {
    let start = Instant::now();
    let mut assignment = assign_orientations(prepared, config, run_index)?;
    let mut result = evaluate(&mut assignment.states, &prepared.diagram, config)?;
    result.wall_time = start.elapsed().as_secs_f64();
    Ok((assignment, result))
}

/// Deploys, prepares, orients and evaluates run `run_index` of a scenario.
pub fn run_scenario(config: &ScenarioConfig, run_index: u64) -> Result<RunOutput> {
    config.validate()?;
    let start = Instant::now();
    let prepared = Prepared::new(deploy_random(config, run_index)?, &config.rrf_bounds()?)?;
    let (assignment, mut result) = run_prepared(&prepared, config, run_index)?;
    result.wall_time = start.elapsed().as_secs_f64();
    Ok(RunOutput {
        prepared,
        states: assignment.states,
        trace: assignment.trace,
        result,
    })
}
