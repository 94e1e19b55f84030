use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{deploy_random, view_angle_from_degrees, run_prepared, Prepared, ScenarioConfig, Strategy};
use crate::error::{invalid, Result};
use crate::rrf::PositionMode;

/// Header of the sweep CSV.
pub const CSV_HEADER: &str = "theta_deg,r_s,m,rho_min,rho_max,strategy,case,runs,mean_coverage,std_coverage";

/// A grid of scenarios around a base configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub base: ScenarioConfig,
    pub theta_deg: Vec<f64>,
    pub r_s: Vec<f64>,
    pub m: Vec<usize>,
    pub rho_bounds: Vec<(f64, f64)>,
    pub strategies: Vec<Strategy>,
    pub modes: Vec<PositionMode>,
}

impl SweepSpec {
    /// Single-cell grid holding the base values.
    pub fn from_base(base: ScenarioConfig) -> Self {
        Self {
            theta_deg: vec![base.theta_deg()],
            r_s: vec![base.r_s],
            m: vec![base.m],
            rho_bounds: vec![(base.rho_min, base.rho_max)],
            strategies: vec![base.strategy],
            modes: vec![base.mode],
            base,
        }
    }

    pub fn len(&self) -> usize {
        self.theta_deg.len() * self.r_s.len() * self.m.len() * self.rho_bounds.len() * self.strategies.len() * self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Mean and spread of total coverage over the runs of one grid cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub theta_deg: f64,
    pub r_s: f64,
    pub m: usize,
    pub rho_min: f64,
    pub rho_max: f64,
    pub strategy: Strategy,
    pub mode: PositionMode,
    pub runs: usize,
    pub mean_coverage: f64,
    /// Sample standard deviation; 0 for a single run.
    pub std_coverage: f64,
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Runs every grid cell and returns rows in grid order (θ, r_s, m, ρ bounds,
/// strategy, case, with the case varying fastest).
///
/// Run `k` of every cell uses the same deployment stream `seed + k`, so
/// deployments, diagrams and RRFs are computed once per (m, ρ bounds, run).
pub fn sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    if spec.is_empty() {
        return invalid("every sweep axis needs at least one value");
    }
    spec.base.validate()?;
    let runs = spec.base.runs;
    let inner = spec.strategies.len() * spec.modes.len();
    let per_m = spec.rho_bounds.len() * inner;
    let per_r = spec.m.len() * per_m;
    let per_theta = spec.r_s.len() * per_r;
    let mut rows: Vec<Option<SweepRow>> = vec![None; spec.len()];

    for (im, &m) in spec.m.iter().enumerate() {
        for (ib, &(rho_min, rho_max)) in spec.rho_bounds.iter().enumerate() {
            let geometry = ScenarioConfig {
                m,
                rho_min,
                rho_max,
                ..spec.base.clone()
            };
            let bounds = geometry.rrf_bounds()?;
            let prepared = (0..runs as u64)
                .map(|k| Prepared::new(deploy_random(&geometry, k)?, &bounds))
                .collect::<Result<Vec<_>>>()?;

            for (it, &theta_deg) in spec.theta_deg.iter().enumerate() {
                for (ir, &r_s) in spec.r_s.iter().enumerate() {
                    for (is, &strategy) in spec.strategies.iter().enumerate() {
                        for (imo, &mode) in spec.modes.iter().enumerate() {
                            let cfg = ScenarioConfig {
                                theta_s: view_angle_from_degrees(theta_deg),
                                r_s,
                                strategy,
                                mode,
                                epsilon: spec.base.epsilon,
                                ..geometry.clone()
                            };
                            cfg.validate()?;
                            let totals = prepared
                                .iter()
                                .enumerate()
                                .map(|(k, p)| Ok(run_prepared(p, &cfg, k as u64)?.1.total_coverage))
                                .collect::<Result<Vec<f64>>>()?;
                            let (mean_coverage, std_coverage) = mean_std(&totals);
                            let idx = it * per_theta + ir * per_r + im * per_m + ib * inner + is * spec.modes.len() + imo;
                            rows[idx] = Some(SweepRow {
                                theta_deg,
                                r_s,
                                m,
                                rho_min,
                                rho_max,
                                strategy,
                                mode,
                                runs,
                                mean_coverage,
                                std_coverage,
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(rows.into_iter().map(|r| r.expect("every grid cell is filled")).collect())
}

/// CSV text with [`CSV_HEADER`] and one line per row.
pub fn to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{:.6},{:.6}",
            r.theta_deg,
            r.r_s,
            r.m,
            r.rho_min,
            r.rho_max,
            r.strategy.name(),
            r.mode.case_label(),
            r.runs,
            r.mean_coverage,
            r.std_coverage
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> ScenarioConfig {
        ScenarioConfig {
            m: 6,
            runs: 2,
            seed: 11,
            union_samples: 0,
            ..ScenarioConfig::default()
        }
    }

    #[test]
    fn grid_cardinality_and_order() {
        let spec = SweepSpec {
            theta_deg: vec![60.0, 90.0, 120.0, 180.0, 360.0],
            strategies: Strategy::ALL.to_vec(),
            modes: PositionMode::ALL.to_vec(),
            ..SweepSpec::from_base(ScenarioConfig { runs: 1, ..tiny() })
        };
        let rows = sweep(&spec).unwrap();
        assert_eq!(rows.len(), 45);
        assert_eq!(rows[0].theta_deg, 60.0);
        assert_eq!((rows[1].strategy, rows[1].mode), (Strategy::Random, PositionMode::BestRobust));
        assert_eq!(rows[44].theta_deg, 360.0);
        assert_eq!((rows[44].strategy, rows[44].mode), (Strategy::Proposed, PositionMode::WorstRobust));
    }

    #[test]
    fn csv_is_deterministic() {
        let spec = SweepSpec {
            strategies: Strategy::ALL.to_vec(),
            ..SweepSpec::from_base(tiny())
        };
        let a = to_csv(&sweep(&spec).unwrap());
        let b = to_csv(&sweep(&spec).unwrap());
        assert_eq!(a, b);
        assert!(a.starts_with(CSV_HEADER));
        assert_eq!(a.lines().count(), 4);
        assert!(a.lines().nth(1).unwrap().starts_with("90,100,6,50,150,random,I,2,"));
    }

    #[test]
    fn mean_and_sample_std() {
        assert_eq!(mean_std(&[2.0, 4.0, 6.0]), (4.0, 2.0));
        assert_eq!(mean_std(&[5.0]), (5.0, 0.0));
    }

    #[test]
    fn empty_axis_is_rejected() {
        let spec = SweepSpec {
            m: vec![],
            ..SweepSpec::from_base(tiny())
        };
        assert!(sweep(&spec).is_err());
    }
}
