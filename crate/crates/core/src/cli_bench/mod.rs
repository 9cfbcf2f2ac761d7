//! Experiment configuration, the area/tolerance sweep behind the bench
//! command, and the CSV and SVG artifacts it writes.

mod files;
mod svg;

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use files::{read_plan_csv, read_tour_csv, write_plan_csv, write_results_csv, write_tour_csv, RESULTS_HEADER};
pub use svg::{line_chart_svg, sweep_figures, tour_svg, Panel, Series};

use crate::error::{Error, Result};
use crate::field_model::{noise_floor, FieldParams, PlanningQuery};
use crate::geometry::{distance, Environment, Point2, PointIndex};
use crate::planners::{disk_cover_with, hex_cover_with, tour_samples, MeasurementSet, Origin, PlanOptions};
use crate::tsp::{ChristofidesOptions, MatchingMode};
use crate::verification::{check_feasibility, compute_bounds, monte_carlo_mse, BoundsReport, MONTE_CARLO_MAX_SAMPLES};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    HexCover,
    DiskCover,
    HexCoverTour,
    DiskCoverTour,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::HexCover,
        Algorithm::DiskCover,
        Algorithm::HexCoverTour,
        Algorithm::DiskCoverTour,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::HexCover => "hexcover",
            Algorithm::DiskCover => "diskcover",
            Algorithm::HexCoverTour => "hexcovertour",
            Algorithm::DiskCoverTour => "diskcovertour",
        }
    }

    pub fn has_tour(&self) -> bool {
        matches!(self, Algorithm::HexCoverTour | Algorithm::DiskCoverTour)
    }

    fn is_hex(&self) -> bool {
        matches!(self, Algorithm::HexCover | Algorithm::HexCoverTour)
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| format!("unknown algorithm '{s}'"))
    }
}

/// Eight log-spaced square areas from 400 to 40000 m^2.
pub fn default_areas() -> Vec<f64> {
    (0..8).map(|k| 400.0 * 100f64.powf(k as f64 / 7.0)).collect()
}

/// Sweep description. Every key is optional; missing keys take the
/// defaults below, unknown or repeated keys are rejected.
///
/// | key | default |
/// |-----|---------|
/// | `environments` | squares of the eight default areas, as `[width, height]` |
/// | `sigma0` | 12.87 |
/// | `length_scale` | 8.33 |
/// | `noise_var` | 0.0361 |
/// | `delta_fractions` | `[0.3, 0.2, 0.1]` |
/// | `algorithms` | all four |
/// | `grid_step` | `null` (r_min / 20) |
/// | `seed` | 0 |
/// | `output_dir` | `"bench-out"` |
/// | `matching` | `"exact"` |
/// | `greedy_threshold` | 5000 |
/// | `two_opt` | true |
/// | `mc_trials` | 2000 (0 disables the Monte Carlo spot check) |
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub environments: Vec<[f64; 2]>,
    pub sigma0: f64,
    pub length_scale: f64,
    pub noise_var: f64,
    pub delta_fractions: Vec<f64>,
    pub algorithms: Vec<Algorithm>,
    pub grid_step: Option<f64>,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub matching: MatchingMode,
    pub greedy_threshold: usize,
    pub two_opt: bool,
    pub mc_trials: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            environments: default_areas().into_iter().map(|a| [a.sqrt(), a.sqrt()]).collect(),
            sigma0: 12.87,
            length_scale: 8.33,
            noise_var: 0.0361,
            delta_fractions: vec![0.3, 0.2, 0.1],
            algorithms: Algorithm::ALL.to_vec(),
            grid_step: None,
            seed: 0,
            output_dir: PathBuf::from("bench-out"),
            matching: MatchingMode::Exact,
            greedy_threshold: ChristofidesOptions::default().greedy_threshold,
            two_opt: true,
            mc_trials: 2000,
        }
    }
}

impl ExperimentConfig {
    pub fn params(&self) -> Result<FieldParams> {
        FieldParams::new(self.sigma0 * self.sigma0, self.length_scale, self.noise_var)
            .map_err(|e| Error::Config(format!("field parameters: {e}")))
    }

    pub fn plan_options(&self) -> PlanOptions {
        PlanOptions {
            grid_step: self.grid_step,
            christofides: ChristofidesOptions {
                matching: self.matching,
                greedy_threshold: self.greedy_threshold,
            },
            two_opt: self.two_opt,
        }
    }

    /// Checks the invariants, naming the offending field.
    pub fn validate(&self) -> Result<()> {
        let bad = |field: &str, msg: String| Err(Error::Config(format!("{field}: {msg}")));
        if self.environments.is_empty() {
            return bad("environments", "must not be empty".into());
        }
        for (i, &[w, h]) in self.environments.iter().enumerate() {
            if !(w > 0.0 && h > 0.0 && w.is_finite() && h.is_finite()) {
                return bad("environments", format!("entry {i} ({w} x {h}) must have positive finite sides"));
            }
        }
        let params = self.params()?;
        if !(self.sigma0 > 0.0) {
            return bad("sigma0", format!("must be positive, got {}", self.sigma0));
        }
        if self.delta_fractions.is_empty() {
            return bad("delta_fractions", "must not be empty".into());
        }
        let floor = noise_floor(&params) / params.sigma0_sq();
        for &f in &self.delta_fractions {
            if !(f > floor && f < 1.0) {
                return bad(
                    "delta_fractions",
                    format!("{f} must lie strictly between the noise floor fraction {floor:.6} and 1"),
                );
            }
        }
        if self.algorithms.is_empty() {
            return bad("algorithms", "must not be empty".into());
        }
        for (i, a) in self.algorithms.iter().enumerate() {
            if self.algorithms[..i].contains(a) {
                return bad("algorithms", format!("'{a}' listed twice"));
            }
        }
        if let Some(step) = self.grid_step {
            if !(step > 0.0 && step.is_finite()) {
                return bad("grid_step", format!("must be positive, got {step}"));
            }
        }
        if self.mc_trials != 0 && self.mc_trials < crate::verification::MONTE_CARLO_MIN_TRIALS {
            return bad(
                "mc_trials",
                format!("must be 0 or at least {}", crate::verification::MONTE_CARLO_MIN_TRIALS),
            );
        }
        Ok(())
    }
}

/// Strict JSON parse followed by validation.
pub fn parse_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    parse_config_str(&text)
}

pub fn parse_config_str(text: &str) -> Result<ExperimentConfig> {
    let config: ExperimentConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    config.validate()?;
    Ok(config)
}

/// One algorithm on one environment at one tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub algorithm: Algorithm,
    pub width_m: f64,
    pub height_m: f64,
    pub area_m2: f64,
    pub delta_fraction: f64,
    pub r_min_m: f64,
    pub r_max_m: f64,
    pub n_samples: usize,
    pub n_repair: usize,
    pub tour_length_m: Option<f64>,
    pub raw_christofides_length_m: Option<f64>,
    pub matching: Option<MatchingMode>,
    pub runtime_ms: f64,
    pub feasible: bool,
    pub worst_error: f64,
    pub delta: f64,
    /// Monte Carlo mean squared error at the worst grid point.
    pub mc_mse: Option<f64>,
    pub mc_stderr: Option<f64>,
    pub bounds: BoundsReport,
}

/// Runs one combination. An infeasible plan is an error.
pub fn run_case(
    algorithm: Algorithm,
    width: f64,
    height: f64,
    fraction: f64,
    config: &ExperimentConfig,
) -> Result<(ResultRow, MeasurementSet, Option<crate::tsp::Tour>)> {
    let params = config.params()?;
    let query = PlanningQuery::from_fraction(params, fraction)?;
    let env = Environment::rect(width, height)?;
    let opts = config.plan_options();

    let start = Instant::now();
    let samples = if algorithm.is_hex() {
        hex_cover_with(&env, &params, query.delta, &opts)?
    } else {
        disk_cover_with(&env, &params, query.delta, &opts)?
    };
    let toured = algorithm.has_tour().then(|| tour_samples(&samples.points, &opts));
    let runtime_ms = start.elapsed().as_secs_f64() * 1e3;

    let step = config.grid_step.unwrap_or(samples.r_min_used / 20.0);
    let feasibility = check_feasibility(&env, &samples.points, &params, query.delta, step)?;
    if !feasibility.feasible {
        return Err(Error::Verification(format!(
            "{algorithm} on {width}x{height} m at delta fraction {fraction}: error {:.6} exceeds {:.6} at ({:.3}, {:.3})",
            feasibility.worst_error, query.delta, feasibility.worst_point.x, feasibility.worst_point.y
        )));
    }
    let (mc_mse, mc_stderr) = if config.mc_trials > 0 {
        let local = local_samples(&samples.points, feasibility.worst_point, query.r_max);
        let est = monte_carlo_mse(feasibility.worst_point, &local, &params, config.mc_trials, config.seed)?;
        (Some(est.empirical_mse), Some(est.standard_error))
    } else {
        (None, None)
    };
    let raw = toured.as_ref().map(|t| t.1);
    let bounds = compute_bounds(&env, &query, samples.len(), raw);
    let row = ResultRow {
        algorithm,
        width_m: width,
        height_m: height,
        area_m2: env.area(),
        delta_fraction: fraction,
        r_min_m: query.r_min,
        r_max_m: query.r_max,
        n_samples: samples.len(),
        n_repair: samples.count(Origin::Repair),
        tour_length_m: toured.as_ref().map(|t| t.0.length),
        raw_christofides_length_m: raw,
        matching: toured.as_ref().map(|t| t.2),
        runtime_ms,
        feasible: feasibility.feasible,
        worst_error: feasibility.worst_error,
        delta: query.delta,
        mc_mse,
        mc_stderr,
        bounds,
    };
    Ok((row, samples, toured.map(|t| t.0)))
}

/// Samples within `radius` of `x`, nearest first, at most the Monte Carlo cap.
fn local_samples(points: &[Point2], x: Point2, radius: f64) -> Vec<Point2> {
    if points.is_empty() {
        return Vec::new();
    }
    let index = PointIndex::new(points, radius);
    let mut near: Vec<usize> = index.within(x, radius);
    if near.is_empty() {
        near.extend(index.nearest(x).map(|(i, _)| i));
    }
    near.sort_by(|&a, &b| distance(x, points[a]).total_cmp(&distance(x, points[b])).then(a.cmp(&b)));
    near.truncate(MONTE_CARLO_MAX_SAMPLES);
    near.into_iter().map(|i| points[i]).collect()
}

/// Every environment x tolerance x algorithm, in that nesting order.
pub fn run_sweep(config: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    config.validate()?;
    let mut rows = Vec::new();
    for &[w, h] in &config.environments {
        for &f in &config.delta_fractions {
            for &a in &config.algorithms {
                let (row, _, _) = run_case(a, w, h, f, config)?;
                log::info!(
                    "{a} {w:.1}x{h:.1} fraction {f}: {} samples, {:.1} ms",
                    row.n_samples,
                    row.runtime_ms
                );
                rows.push(row);
            }
        }
    }
    Ok(rows)
}

/// Runs the sweep and writes `results.csv`, `samples_vs_area.svg` and
/// `tour_length_vs_area.svg` into the configured output directory.
pub fn run_bench(config: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let rows = run_sweep(config)?;
    std::fs::create_dir_all(&config.output_dir)?;
    write_results_csv(&config.output_dir.join("results.csv"), &rows)?;
    let (samples_svg, tour_svg) = sweep_figures(&rows);
    std::fs::write(config.output_dir.join("samples_vs_area.svg"), samples_svg)?;
    std::fs::write(config.output_dir.join("tour_length_vs_area.svg"), tour_svg)?;
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_areas_span_range() {
        let a = default_areas();
        assert_eq!(a.len(), 8);
        assert!((a[0] - 400.0).abs() < 1e-9);
        assert!((a[7] - 40000.0).abs() < 1e-6);
        assert!(a.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse_config_str(r#"{"environments": [[20, 30]]}"#).unwrap();
        assert_eq!(c.environments, vec![[20.0, 30.0]]);
        assert_eq!(c.sigma0, 12.87);
        assert_eq!(c.length_scale, 8.33);
        assert_eq!(c.noise_var, 0.0361);
        assert_eq!(c.delta_fractions, vec![0.3, 0.2, 0.1]);
        assert_eq!(c.algorithms.len(), 4);
    }

    #[test]
    fn rejects_bad_configs() {
        let err = |s: &str| parse_config_str(s).unwrap_err().to_string();
        assert!(err(r#"{"delta_fractions": [1.5]}"#).contains("delta_fractions"));
        assert!(err(r#"{"delta_fractions": [0.0001]}"#).contains("noise floor"));
        assert!(err(r#"{"seed": 1, "seed": 2}"#).contains("duplicate field"));
        assert!(err(r#"{"colour": "red"}"#).contains("unknown field"));
        assert!(err(r#"{"environments": []}"#).contains("environments"));
        assert!(err(r#"{"environments": [[0, 3]]}"#).contains("environments"));
        assert!(err(r#"{"algorithms": ["hexcover", "hexcover"]}"#).contains("algorithms"));
        assert!(err(r#"{"algorithms": ["lawnmower"]}"#).contains("unknown variant"));
        assert!(err(r#"{"grid_step": -1}"#).contains("grid_step"));
        assert!(err("{").contains("EOF"));
    }

    #[test]
    fn algorithm_names_roundtrip() {
        for a in Algorithm::ALL {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
            assert_eq!(serde_json::to_string(&a).unwrap(), format!("\"{}\"", a.name()));
        }
    }

    #[test]
    fn small_sweep_rows_are_feasible() {
        let config = ExperimentConfig {
            environments: vec![[30.0, 20.0]],
            delta_fractions: vec![0.3],
            mc_trials: 1000,
            ..ExperimentConfig::default()
        };
        let rows = run_sweep(&config).unwrap();
        assert_eq!(rows.len(), 4);
        for r in &rows {
            assert!(r.feasible && r.worst_error <= r.delta * (1.0 + 1e-9));
            assert_eq!(r.tour_length_m.is_some(), r.algorithm.has_tour());
            let mc = r.mc_mse.unwrap();
            assert!(mc.is_finite() && mc >= 0.0);
        }
        let strip = |rows: Vec<ResultRow>| -> Vec<ResultRow> {
            rows.into_iter().map(|r| ResultRow { runtime_ms: 0.0, ..r }).collect()
        };
        assert_eq!(strip(rows), strip(run_sweep(&config).unwrap()));
    }
}
