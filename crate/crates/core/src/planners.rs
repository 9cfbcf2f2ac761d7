//! Measurement placement and tour planning: the hexagonal planner, the
//! two-level disk baseline, and the boundary repair both rely on.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::field_model::{FieldParams, PlanningQuery};
use crate::geometry::{
    distance, hexagon_vertices, hexagonal_cells, hexagonal_tiling, uncovered_points, GrowingIndex,
    Environment, Point2, PointIndex,
};
use crate::tsp::{christofides_with, two_opt, ChristofidesOptions, MatchingMode, Tour};
use crate::verification::{check_feasibility, compute_bounds, BoundsReport, FeasibilityResult};

/// Why a point is in a measurement set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    /// A lattice center that already lay in the environment.
    Tiling,
    /// A lattice center moved onto the environment by projection.
    Projected,
    /// Added by boundary repair to close a coverage gap.
    Repair,
}

impl Origin {
    pub fn as_str(&self) -> &'static str {
        match self {
            Origin::Tiling => "tiling",
            Origin::Projected => "projected",
            Origin::Repair => "repair",
        }
    }
}

impl std::str::FromStr for Origin {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "tiling" => Ok(Origin::Tiling),
            "projected" => Ok(Origin::Projected),
            "repair" => Ok(Origin::Repair),
            other => Err(format!("unknown origin tag '{other}'")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementSet {
    pub points: Vec<Point2>,
    pub origins: Vec<Origin>,
    /// Covering radius the set was built for.
    pub r_min_used: f64,
}

impl MeasurementSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn count(&self, origin: Origin) -> usize {
        self.origins.iter().filter(|&&o| o == origin).count()
    }

    /// Appends `p` unless it is within `1e-9 * r_min_used` of a kept point.
    fn push_unique(&mut self, index: &mut GrowingIndex, p: Point2, origin: Origin) {
        let eps = 1e-9 * self.r_min_used;
        if index.any_within_sq(p, eps, eps * eps) {
            return;
        }
        index.insert(p);
        self.points.push(p);
        self.origins.push(origin);
    }
}

/// Knobs shared by the planners. Defaults: grid step `r/20`, exact
/// matching below 5000 odd vertices, 2-opt on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanOptions {
    /// Verification and repair grid step; `None` means spacing / 20.
    pub grid_step: Option<f64>,
    pub christofides: ChristofidesOptions,
    pub two_opt: bool,
}

impl Default for PlanOptions {
    fn default() -> Self {
        Self {
            grid_step: None,
            christofides: ChristofidesOptions::default(),
            two_opt: true,
        }
    }
}

impl PlanOptions {
    fn step_for(&self, spacing: f64) -> f64 {
        self.grid_step.unwrap_or(spacing / 20.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanReport {
    pub query: PlanningQuery,
    pub samples: MeasurementSet,
    /// Visiting order over `samples.points`; after 2-opt when enabled.
    pub tour: Option<Tour>,
    /// Length of the Christofides tour before local improvement.
    pub raw_tour_length: Option<f64>,
    /// Matching actually used, which differs from the request on fallback.
    pub matching_used: Option<MatchingMode>,
    pub diagnostics: BoundsReport,
    pub feasibility: FeasibilityResult,
}

/// Radius the lattices are built with: `r_min`, capped at `r_max` since a
/// sample beyond the effective range is treated as uninformative.
pub fn spacing_radius(query: &PlanningQuery) -> f64 {
    if query.r_min > query.r_max {
        log::warn!(
            "r_min {:.3} exceeds the effective range {:.3}; spacing capped at r_max",
            query.r_min,
            query.r_max
        );
        query.r_max
    } else {
        query.r_min
    }
}

/// Hexagonal measurement set: every lattice cell meeting `env` contributes
/// its center, projected onto `env` when it lies outside. Gaps left on the
/// verification grid are then repaired. A set covering `env` at radius
/// `r_min` meets the tolerance everywhere, so one repair pass suffices.
pub fn hex_cover(env: &Environment, params: &FieldParams, delta: f64) -> Result<MeasurementSet> {
    hex_cover_with(env, params, delta, &PlanOptions::default())
}

pub fn hex_cover_with(
    env: &Environment,
    params: &FieldParams,
    delta: f64,
    opts: &PlanOptions,
) -> Result<MeasurementSet> {
    let query = PlanningQuery::new(*params, delta)?;
    let r = spacing_radius(&query);
    let mut set = MeasurementSet {
        points: Vec::new(),
        origins: Vec::new(),
        r_min_used: r,
    };
    let mut index = GrowingIndex::new(r);
    for c in hexagonal_cells(env, r)? {
        if env.contains(c) {
            set.push_unique(&mut index, c, Origin::Tiling);
        } else {
            set.push_unique(&mut index, env.project_to(c), Origin::Projected);
        }
    }
    boundary_repair(env, set, opts.step_for(r))
}

/// Adds grid points of `env` (step `grid_step`, scan order) that no sample
/// covers at radius `samples.r_min_used`, each one covering the gaps that
/// follow it within that radius.
pub fn boundary_repair(env: &Environment, mut samples: MeasurementSet, grid_step: f64) -> Result<MeasurementSet> {
    let r = samples.r_min_used;
    let gaps = uncovered_points(&samples.points, r, env, grid_step)?;
    if gaps.is_empty() {
        return Ok(samples);
    }
    let r_sq = r * r * (1.0 + 1e-12);
    let mut added = GrowingIndex::new(r);
    let mut count = 0;
    for g in gaps {
        if !added.any_within_sq(g, r, r_sq) {
            added.insert(g);
            samples.points.push(g);
            samples.origins.push(Origin::Repair);
            count += 1;
        }
    }
    log::debug!("boundary repair added {count} samples");
    Ok(samples)
}

/// Two-level disk baseline ("faithful variant"):
///
/// 1. hexagonal cells of edge `r_max` whose hexagon meets `env`; their
///    circumscribed disks cover `env`;
/// 2. inside every such disk, a hexagonal lattice of edge `r_min` anchored at
///    the disk center, keeping each cell whose hexagon meets the disk;
/// 3. the union of all sub-cell centers, minus those outside `env`;
/// 4. boundary repair on the verification grid;
/// 5. redundancy removal in insertion order: a point is dropped when every
///    grid point within `r_min` of it stays covered by another kept point.
pub fn disk_cover(env: &Environment, params: &FieldParams, delta: f64) -> Result<MeasurementSet> {
    disk_cover_with(env, params, delta, &PlanOptions::default())
}

pub fn disk_cover_with(
    env: &Environment,
    params: &FieldParams,
    delta: f64,
    opts: &PlanOptions,
) -> Result<MeasurementSet> {
    let query = PlanningQuery::new(*params, delta)?;
    let r = spacing_radius(&query);
    let big = query.r_max;
    let mut set = MeasurementSet {
        points: Vec::new(),
        origins: Vec::new(),
        r_min_used: r,
    };
    let mut index = GrowingIndex::new(r);
    for disk in hexagonal_cells(env, big)? {
        let square = Environment::rect_at(Point2::new(disk.x - big, disk.y - big), 2.0 * big, 2.0 * big)?;
        for c in hexagonal_tiling(&square, r)? {
            if hexagon_meets_disk(c, r, disk, big) && env.contains(c) {
                set.push_unique(&mut index, c, Origin::Tiling);
            }
        }
    }
    let step = opts.step_for(r);
    let set = boundary_repair(env, set, step)?;
    remove_redundant(env, set, step)
}

fn hexagon_meets_disk(center: Point2, edge: f64, disk: Point2, radius: f64) -> bool {
    let d = distance(center, disk);
    if d <= radius + 0.5 * 3f64.sqrt() * edge {
        return true;
    }
    if d > radius + edge {
        return false;
    }
    let hex = Environment::Polygon(hexagon_vertices(center, edge).to_vec());
    hex.distance_to(disk) <= radius
}

fn remove_redundant(env: &Environment, set: MeasurementSet, grid_step: f64) -> Result<MeasurementSet> {
    let r = set.r_min_used;
    let grid = env.grid_points(grid_step)?;
    let grid_index = PointIndex::new(&grid, r);
    let r_sq = r * r * (1.0 + 1e-12);
    let mut cover = vec![0u32; grid.len()];
    let mut reach: Vec<Vec<u32>> = Vec::with_capacity(set.len());
    for &p in &set.points {
        let mut hits = Vec::new();
        grid_index.for_each_within(p, r, |g, d_sq| {
            if d_sq <= r_sq {
                hits.push(g as u32);
            }
        });
        for &g in &hits {
            cover[g as usize] += 1;
        }
        reach.push(hits);
    }
    let mut kept = MeasurementSet {
        points: Vec::new(),
        origins: Vec::new(),
        r_min_used: r,
    };
    for (i, hits) in reach.iter().enumerate() {
        if hits.iter().all(|&g| cover[g as usize] >= 2) {
            for &g in hits {
                cover[g as usize] -= 1;
            }
        } else {
            kept.points.push(set.points[i]);
            kept.origins.push(set.origins[i]);
        }
    }
    log::debug!("redundancy removal kept {} of {} samples", kept.len(), set.len());
    Ok(kept)
}

/// Hexagonal placement followed by a Christofides tour (plus 2-opt).
pub fn hex_cover_tour(env: &Environment, params: &FieldParams, delta: f64) -> Result<PlanReport> {
    hex_cover_tour_with(env, params, delta, &PlanOptions::default())
}

pub fn hex_cover_tour_with(
    env: &Environment,
    params: &FieldParams,
    delta: f64,
    opts: &PlanOptions,
) -> Result<PlanReport> {
    let samples = hex_cover_with(env, params, delta, opts)?;
    plan_report(env, params, delta, samples, opts, true)
}

/// Disk baseline followed by a Christofides tour (plus 2-opt). Large
/// instances may fall back to greedy matching; see `matching_used`.
pub fn disk_cover_tour(env: &Environment, params: &FieldParams, delta: f64) -> Result<PlanReport> {
    disk_cover_tour_with(env, params, delta, &PlanOptions::default())
}

pub fn disk_cover_tour_with(
    env: &Environment,
    params: &FieldParams,
    delta: f64,
    opts: &PlanOptions,
) -> Result<PlanReport> {
    let samples = disk_cover_with(env, params, delta, opts)?;
    plan_report(env, params, delta, samples, opts, true)
}

/// Christofides tour over `points`, improved by 2-opt when enabled. Also
/// returns the raw Christofides length and the matching actually used.
pub fn tour_samples(points: &[Point2], opts: &PlanOptions) -> (Tour, f64, MatchingMode) {
    let (raw, mode) = christofides_with(points, &opts.christofides);
    let raw_len = raw.length;
    let tour = if opts.two_opt { two_opt(&raw, points) } else { raw };
    (tour, raw_len, mode)
}

/// Verifies `samples`, optionally tours them, and fills the diagnostics.
pub fn plan_report(
    env: &Environment,
    params: &FieldParams,
    delta: f64,
    samples: MeasurementSet,
    opts: &PlanOptions,
    with_tour: bool,
) -> Result<PlanReport> {
    let query = PlanningQuery::new(*params, delta)?;
    let step = opts.step_for(samples.r_min_used);
    let feasibility = check_feasibility(env, &samples.points, params, delta, step)?;
    let (tour, raw_tour_length, matching_used) = if with_tour {
        let (tour, raw_len, mode) = tour_samples(&samples.points, opts);
        (Some(tour), Some(raw_len), Some(mode))
    } else {
        (None, None, None)
    };
    let diagnostics = compute_bounds(env, &query, samples.len(), raw_tour_length);
    Ok(PlanReport {
        query,
        samples,
        tour,
        raw_tour_length,
        matching_used,
        diagnostics,
        feasibility,
    })
}
