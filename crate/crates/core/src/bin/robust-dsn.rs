use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use robust_dsn::geometry::{mc_area_oracle, sector_polygon_area, BoundingBox};
use robust_dsn::harness::{
    deploy_random, render_svg, run_scenario, sweep, to_csv, view_angle_from_degrees, ScenarioConfig, Strategy,
    SweepSpec,
};
use robust_dsn::rrf::compute_all_rrf;
use robust_dsn::voronoi::build_voronoi;
use robust_dsn::{ConvexPolygon, Deployment, Point2, PositionMode, Result, Sector};

#[derive(Parser)]
#[command(name = "robust-dsn", version, about = "Robust directional sensor orientation simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and print its metrics as JSON.
    Run {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Which run of the scenario to execute.
        #[arg(long, default_value_t = 0)]
        run_index: u64,
        /// Also draw the run as SVG.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Run a parameter grid and emit CSV.
    Sweep {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Reproduce the grid of a results table (1: angle, 2: range, 3: sensors, 4: RRF bounds).
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
        table: Option<u8>,
        /// View angles in degrees.
        #[arg(long, value_delimiter = ',')]
        angles: Vec<f64>,
        #[arg(long, value_delimiter = ',')]
        ranges: Vec<f64>,
        #[arg(long, value_delimiter = ',')]
        sensor_counts: Vec<usize>,
        /// RRF bounds as MIN:MAX pairs.
        #[arg(long, value_delimiter = ',', value_parser = parse_bounds)]
        rho_bounds: Vec<(f64, f64)>,
        #[arg(long, value_delimiter = ',')]
        strategies: Vec<Strategy>,
        #[arg(long, value_delimiter = ',')]
        cases: Vec<PositionMode>,
        /// Write the CSV here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print per-sensor RRF of a deployment.
    Rrf {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long, default_value_t = 0)]
        run_index: u64,
        /// Explicit positions as "x,y" items instead of a random deployment.
        #[arg(long, num_args = 1.., value_parser = parse_point)]
        positions: Vec<Point2>,
    },
    /// Compare exact sector/cell areas against Monte-Carlo estimates.
    Oracle {
        #[arg(long, default_value_t = 20)]
        instances: usize,
        #[arg(long, default_value_t = 200_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct ScenarioArgs {
    /// JSON file with scenario fields; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, num_args = 2, value_names = ["W", "H"])]
    region: Option<Vec<f64>>,
    #[arg(long)]
    sensors: Option<usize>,
    #[arg(long)]
    range: Option<f64>,
    /// View angle in degrees.
    #[arg(long)]
    angle: Option<f64>,
    #[arg(long)]
    rho_min: Option<f64>,
    #[arg(long)]
    rho_max: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    strategy: Option<Strategy>,
    #[arg(long = "case")]
    case: Option<PositionMode>,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    tol: Option<f64>,
    /// Samples of the union-coverage diagnostic (0 disables it).
    #[arg(long)]
    union_samples: Option<usize>,
}

impl ScenarioArgs {
    fn resolve(&self) -> Result<ScenarioConfig> {
        let mut c = match &self.config {
            Some(path) => ScenarioConfig::from_json(&std::fs::read_to_string(path)?)?,
            None => ScenarioConfig::default(),
        };
        if let Some(r) = &self.region {
            c.region.width = r[0];
            c.region.height = r[1];
        }
        if let Some(v) = self.sensors {
            c.m = v;
        }
        if let Some(v) = self.range {
            c.r_s = v;
        }
        if let Some(v) = self.angle {
            c.theta_s = view_angle_from_degrees(v);
        }
        if let Some(v) = self.rho_min {
            c.rho_min = v;
        }
        if let Some(v) = self.rho_max {
            c.rho_max = v;
        }
        if let Some(v) = self.epsilon {
            c.epsilon = Some(v);
        }
        if let Some(v) = self.strategy {
            c.strategy = v;
        }
        if let Some(v) = self.case {
            c.mode = v;
        }
        if let Some(v) = self.runs {
            c.runs = v;
        }
        if let Some(v) = self.seed {
            c.seed = v;
        }
        if let Some(v) = self.tol {
            c.tol = v;
        }
        if let Some(v) = self.union_samples {
            c.union_samples = v;
        }
        c.validate()?;
        Ok(c)
    }
}

fn parse_bounds(s: &str) -> std::result::Result<(f64, f64), String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("expected MIN:MAX, got '{s}'"))?;
    let lo = a.trim().parse::<f64>().map_err(|e| e.to_string())?;
    let hi = b.trim().parse::<f64>().map_err(|e| e.to_string())?;
    Ok((lo, hi))
}

fn parse_point(s: &str) -> std::result::Result<Point2, String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected x,y, got '{s}'"))?;
    let x = a.trim().parse::<f64>().map_err(|e| e.to_string())?;
    let y = b.trim().parse::<f64>().map_err(|e| e.to_string())?;
    Ok(Point2::new(x, y))
}

fn table_preset(table: u8, spec: &mut SweepSpec) {
    spec.strategies = Strategy::ALL.to_vec();
    spec.modes = PositionMode::ALL.to_vec();
    match table {
        1 => spec.theta_deg = vec![30.0, 60.0, 90.0, 180.0, 360.0],
        2 => spec.r_s = vec![50.0, 100.0, 200.0, 300.0],
        3 => spec.m = vec![10, 40, 60, 100],
        _ => spec.rho_bounds = vec![(10.0, 50.0), (50.0, 150.0), (200.0, 500.0)],
    }
}

fn oracle_report(instances: usize, samples: usize, seed: u64) -> Result<serde_json::Value> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    let mut rows = Vec::new();
    for k in 0..instances {
        let x0 = rng.gen_range(0.0..5.0);
        let y0 = rng.gen_range(0.0..5.0);
        let cell = ConvexPolygon::rectangle(x0, y0, x0 + rng.gen_range(2.0..10.0), y0 + rng.gen_range(2.0..10.0))?;
        let apex = Point2::new(rng.gen_range(0.0..15.0), rng.gen_range(0.0..15.0));
        let sector = Sector::new(
            apex,
            rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI),
            rng.gen_range(0.2..std::f64::consts::TAU),
            rng.gen_range(1.0..8.0),
        )?;
        let exact = sector_polygon_area(&sector, &cell);
        let (lo, hi) = cell.bounds();
        let mc = mc_area_oracle(
            |p| cell.contains(p) && sector.contains(p),
            BoundingBox::new(lo, hi)?,
            samples,
            seed.wrapping_add(k as u64),
        )?;
        let sigma = if mc.stderr > 0.0 { (exact - mc.estimate).abs() / mc.stderr } else { 0.0 };
        worst = worst.max(sigma);
        rows.push(json!({"instance": k, "exact": exact, "mc": mc.estimate, "stderr": mc.stderr, "sigmas": sigma}));
    }
    Ok(json!({"instances": rows, "max_sigmas": worst}))
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { scenario, run_index, svg } => {
            let cfg = scenario.resolve()?;
            let out = run_scenario(&cfg, run_index)?;
            if let Some(path) = svg {
                render_svg(&out.states, &out.prepared.diagram, &cfg, &path)?;
            }
            let report = json!({
                "config": cfg,
                "run_index": run_index,
                "result": out.result,
                "states": out.states,
                "trace": out.trace,
            });
            println!("{}", serde_json::to_string_pretty(&report)?);
        }
        Command::Sweep {
            scenario,
            table,
            angles,
            ranges,
            sensor_counts,
            rho_bounds,
            strategies,
            cases,
            out,
        } => {
            let mut cfg = scenario.resolve()?;
            // the union diagnostic is per-run only unless asked for
            if scenario.union_samples.is_none() {
                cfg.union_samples = 0;
            }
            let mut spec = SweepSpec::from_base(cfg);
            if let Some(t) = table {
                table_preset(t, &mut spec);
            }
            if !angles.is_empty() {
                spec.theta_deg = angles;
            }
            if !ranges.is_empty() {
                spec.r_s = ranges;
            }
            if !sensor_counts.is_empty() {
                spec.m = sensor_counts;
            }
            if !rho_bounds.is_empty() {
                spec.rho_bounds = rho_bounds;
            }
            if !strategies.is_empty() {
                spec.strategies = strategies;
            }
            if !cases.is_empty() {
                spec.modes = cases;
            }
            let csv = to_csv(&sweep(&spec)?);
            match out {
                Some(path) => std::fs::write(path, csv)?,
                None => print!("{csv}"),
            }
        }
        Command::Rrf {
            scenario,
            run_index,
            positions,
        } => {
            let cfg = scenario.resolve()?;
            let deployment = if positions.is_empty() {
                deploy_random(&cfg, run_index)?
            } else {
                Deployment::new(cfg.region, positions)?
            };
            let diagram = build_voronoi(&deployment)?;
            let rrf = compute_all_rrf(&diagram, &deployment, &cfg.rrf_bounds()?)?;
            println!("sensor,x,y,rho_raw,rho");
            for (i, (p, r)) in deployment.positions().iter().zip(&rrf).enumerate() {
                println!("{i},{},{},{:.6},{:.6}", p.x, p.y, r.rho_raw, r.rho);
            }
        }
        Command::Oracle { instances, samples, seed } => {
            let report = oracle_report(instances, samples, seed)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
