use std::path::Path;

use super::ResultRow;
use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::planners::{MeasurementSet, Origin};
use crate::tsp::Tour;

pub const PLAN_HEADER: [&str; 3] = ["x", "y", "tag"];
pub const TOUR_HEADER: [&str; 3] = ["sequence", "x", "y"];
pub const RESULTS_HEADER: [&str; 27] = [
    "algorithm",
    "width_m",
    "height_m",
    "area_m2",
    "delta_fraction",
    "r_min_m",
    "r_max_m",
    "n_samples",
    "n_repair",
    "tour_length_m",
    "raw_christofides_length_m",
    "matching",
    "runtime_ms",
    "feasible",
    "worst_error",
    "delta",
    "mc_mse",
    "mc_stderr",
    "sample_lower_bound",
    "sample_upper_bound",
    "tour_lower_bound_m",
    "tour_upper_bound_m",
    "realized_sample_ratio",
    "realized_tour_ratio",
    "alpha_samples",
    "alpha_tour",
    "sample_lower_count",
];

fn csv_err(path: &Path, e: csv::Error) -> Error {
    Error::Io(format!("{}: {e}", path.display()))
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// `x,y,tag`, one row per sample, in set order.
pub fn write_plan_csv(path: &Path, set: &MeasurementSet) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    w.write_record(PLAN_HEADER).map_err(|e| csv_err(path, e))?;
    for (p, o) in set.points.iter().zip(&set.origins) {
        w.write_record([p.x.to_string(), p.y.to_string(), o.as_str().to_string()])
            .map_err(|e| csv_err(path, e))?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a plan written by [`write_plan_csv`]. The covering radius is not
/// stored in the file, so the caller supplies it.
pub fn read_plan_csv(path: &Path, r_min_used: f64) -> Result<MeasurementSet> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_err(path, e))?;
    let header = r.headers().map_err(|e| csv_err(path, e))?.clone();
    if header.iter().collect::<Vec<_>>() != PLAN_HEADER {
        return Err(Error::Config(format!(
            "{}: expected header x,y,tag, found {}",
            path.display(),
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut set = MeasurementSet {
        points: Vec::new(),
        origins: Vec::new(),
        r_min_used,
    };
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        let field = |i: usize| rec.get(i).unwrap_or("");
        let num = |i: usize| -> Result<f64> {
            field(i).trim().parse::<f64>().map_err(|_| {
                Error::Config(format!("{} row {}: bad number '{}'", path.display(), line + 2, field(i)))
            })
        };
        let p = Point2::new(num(0)?, num(1)?);
        let tag: Origin = field(2)
            .trim()
            .parse()
            .map_err(|e| Error::Config(format!("{} row {}: {e}", path.display(), line + 2)))?;
        set.points.push(p);
        set.origins.push(tag);
    }
    Ok(set)
}

/// `sequence,x,y` in visiting order; the return leg back to row 0 is implied.
pub fn write_tour_csv(path: &Path, tour: &Tour, points: &[Point2]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    w.write_record(TOUR_HEADER).map_err(|e| csv_err(path, e))?;
    for (seq, &v) in tour.order.iter().enumerate() {
        let p = points[v];
        w.write_record([seq.to_string(), p.x.to_string(), p.y.to_string()])
            .map_err(|e| csv_err(path, e))?;
    }
    w.flush()?;
    Ok(())
}

/// The tour's points in visiting order.
pub fn read_tour_csv(path: &Path) -> Result<Vec<Point2>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_err(path, e))?;
    let mut rows: Vec<(usize, Point2)> = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        let bad = || Error::Config(format!("{} row {}: malformed tour row", path.display(), line + 2));
        let seq: usize = rec.get(0).and_then(|s| s.trim().parse().ok()).ok_or_else(bad)?;
        let x: f64 = rec.get(1).and_then(|s| s.trim().parse().ok()).ok_or_else(bad)?;
        let y: f64 = rec.get(2).and_then(|s| s.trim().parse().ok()).ok_or_else(bad)?;
        rows.push((seq, Point2::new(x, y)));
    }
    rows.sort_by_key(|r| r.0);
    if rows.iter().enumerate().any(|(i, r)| r.0 != i) {
        return Err(Error::Config(format!("{}: sequence numbers are not 0..n", path.display())));
    }
    Ok(rows.into_iter().map(|r| r.1).collect())
}

pub fn write_results_csv(path: &Path, rows: &[ResultRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    w.write_record(RESULTS_HEADER).map_err(|e| csv_err(path, e))?;
    for r in rows {
        let b = &r.bounds;
        w.write_record([
            r.algorithm.name().to_string(),
            r.width_m.to_string(),
            r.height_m.to_string(),
            r.area_m2.to_string(),
            r.delta_fraction.to_string(),
            r.r_min_m.to_string(),
            r.r_max_m.to_string(),
            r.n_samples.to_string(),
            r.n_repair.to_string(),
            opt(r.tour_length_m),
            opt(r.raw_christofides_length_m),
            r.matching.map(|m| m.to_string()).unwrap_or_default(),
            format!("{:.3}", r.runtime_ms),
            r.feasible.to_string(),
            r.worst_error.to_string(),
            r.delta.to_string(),
            opt(r.mc_mse),
            opt(r.mc_stderr),
            b.sample_lower_bound.to_string(),
            b.sample_upper_bound.to_string(),
            b.tour_lower_bound.to_string(),
            b.tour_upper_bound.to_string(),
            b.realized_sample_ratio.to_string(),
            opt(b.realized_tour_ratio),
            b.alpha_samples.to_string(),
            b.alpha_tour.to_string(),
            b.sample_lower_count().to_string(),
        ])
        .map_err(|e| csv_err(path, e))?;
    }
    w.flush()?;
    Ok(())
}
