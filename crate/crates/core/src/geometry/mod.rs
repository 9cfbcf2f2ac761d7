//! Planar geometry: convex environments, hexagonal tilings and the
//! covering / packing predicates used by the planners.

mod index;

pub use index::PointIndex;
pub(crate) use index::GrowingIndex;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack used by membership tests so that projected points count as inside.
pub const CONTAINS_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    fn sub(self, other: Point2) -> (f64, f64) {
        (self.x - other.x, self.y - other.y)
    }
}

/// Euclidean distance.
#[inline]
pub fn distance(a: Point2, b: Point2) -> f64 {
    (a.x - b.x).hypot(a.y - b.y)
}

#[inline]
pub(crate) fn distance_sq(a: Point2, b: Point2) -> f64 {
    let dx = a.x - b.x;
    let dy = a.y - b.y;
    dx * dx + dy * dy
}

#[inline]
fn cross(o: Point2, a: Point2, b: Point2) -> f64 {
    let (ax, ay) = a.sub(o);
    let (bx, by) = b.sub(o);
    ax * by - ay * bx
}

/// Axis-aligned bounding box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BBox {
    pub min: Point2,
    pub max: Point2,
}

impl BBox {
    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn center(&self) -> Point2 {
        Point2::new(
            0.5 * (self.min.x + self.max.x),
            0.5 * (self.min.y + self.max.y),
        )
    }

    fn of_points(points: &[Point2]) -> Option<BBox> {
        let first = *points.first()?;
        let mut bb = BBox {
            min: first,
            max: first,
        };
        for p in &points[1..] {
            bb.min.x = bb.min.x.min(p.x);
            bb.min.y = bb.min.y.min(p.y);
            bb.max.x = bb.max.x.max(p.x);
            bb.max.y = bb.max.y.max(p.y);
        }
        Some(bb)
    }
}

/// A compact convex planar region with non-empty interior.
#[derive(Debug, Clone, PartialEq)]
pub enum Environment {
    Rect {
        origin: Point2,
        width: f64,
        height: f64,
    },
    /// Counter-clockwise vertex list.
    Polygon(Vec<Point2>),
}

impl Environment {
    pub fn rect(width: f64, height: f64) -> Result<Self> {
        Self::rect_at(Point2::new(0.0, 0.0), width, height)
    }

    pub fn rect_at(origin: Point2, width: f64, height: f64) -> Result<Self> {
        if !origin.is_finite() || !width.is_finite() || !height.is_finite() {
            return Err(Error::InvalidEnvironment(
                "rectangle has non-finite parameters".into(),
            ));
        }
        if width <= 0.0 || height <= 0.0 {
            return Err(Error::InvalidEnvironment(format!(
                "rectangle {width}x{height} has empty interior"
            )));
        }
        Ok(Environment::Rect {
            origin,
            width,
            height,
        })
    }

    /// Builds a convex polygon. Clockwise input is reversed; collinear or
    /// reflex vertices are rejected.
    pub fn polygon(mut vertices: Vec<Point2>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::InvalidEnvironment(
                "polygon needs at least 3 vertices".into(),
            ));
        }
        if vertices.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidEnvironment(
                "polygon has non-finite vertex".into(),
            ));
        }
        let signed = signed_area(&vertices);
        if signed.abs() <= 0.0 {
            return Err(Error::InvalidEnvironment("polygon has zero area".into()));
        }
        if signed < 0.0 {
            vertices.reverse();
        }
        let n = vertices.len();
        for i in 0..n {
            let c = cross(vertices[i], vertices[(i + 1) % n], vertices[(i + 2) % n]);
            if c <= 0.0 {
                return Err(Error::InvalidEnvironment(format!(
                    "polygon is not strictly convex at vertex {}",
                    (i + 1) % n
                )));
            }
        }
        Ok(Environment::Polygon(vertices))
    }

    /// Vertices in counter-clockwise order.
    pub fn vertices(&self) -> Vec<Point2> {
        match self {
            Environment::Rect {
                origin,
                width,
                height,
            } => vec![
                *origin,
                Point2::new(origin.x + width, origin.y),
                Point2::new(origin.x + width, origin.y + height),
                Point2::new(origin.x, origin.y + height),
            ],
            Environment::Polygon(v) => v.clone(),
        }
    }

    pub fn bbox(&self) -> BBox {
        match self {
            Environment::Rect {
                origin,
                width,
                height,
            } => BBox {
                min: *origin,
                max: Point2::new(origin.x + width, origin.y + height),
            },
            Environment::Polygon(v) => BBox::of_points(v).expect("polygon has vertices"),
        }
    }

    pub fn area(&self) -> f64 {
        match self {
            Environment::Rect { width, height, .. } => width * height,
            Environment::Polygon(v) => signed_area(v),
        }
    }

    pub fn perimeter(&self) -> f64 {
        match self {
            Environment::Rect { width, height, .. } => 2.0 * (width + height),
            Environment::Polygon(v) => {
                let n = v.len();
                (0..n).map(|i| distance(v[i], v[(i + 1) % n])).sum()
            }
        }
    }

    /// Closed membership test.
    pub fn contains(&self, p: Point2) -> bool {
        match self {
            Environment::Rect {
                origin,
                width,
                height,
            } => {
                p.x >= origin.x - CONTAINS_EPS
                    && p.x <= origin.x + width + CONTAINS_EPS
                    && p.y >= origin.y - CONTAINS_EPS
                    && p.y <= origin.y + height + CONTAINS_EPS
            }
            Environment::Polygon(v) => {
                let n = v.len();
                (0..n).all(|i| {
                    let a = v[i];
                    let b = v[(i + 1) % n];
                    // signed distance of p from the edge line, positive inside
                    cross(a, b, p) / distance(a, b) >= -CONTAINS_EPS
                })
            }
        }
    }

    /// Nearest point of the environment to `p`.
    pub fn project_to(&self, p: Point2) -> Point2 {
        match self {
            Environment::Rect {
                origin,
                width,
                height,
            } => Point2::new(
                p.x.clamp(origin.x, origin.x + width),
                p.y.clamp(origin.y, origin.y + height),
            ),
            Environment::Polygon(v) => {
                if self.contains(p) {
                    return p;
                }
                let n = v.len();
                let mut best = v[0];
                let mut best_d = f64::INFINITY;
                for i in 0..n {
                    let q = closest_on_segment(v[i], v[(i + 1) % n], p);
                    let d = distance_sq(p, q);
                    if d < best_d {
                        best_d = d;
                        best = q;
                    }
                }
                best
            }
        }
    }

    /// Distance from `p` to the environment (zero inside).
    pub fn distance_to(&self, p: Point2) -> f64 {
        distance(p, self.project_to(p))
    }

    /// Lattice points of step `step` over the bounding box that fall inside
    /// the environment, plus points spaced `step` along every boundary edge.
    /// Ordered row by row, bottom to top, then the boundary walk.
    pub fn grid_points(&self, step: f64) -> Result<Vec<Point2>> {
        if !(step > 0.0) || !step.is_finite() {
            return Err(Error::Domain(format!("grid step must be positive, got {step}")));
        }
        let bb = self.bbox();
        let xs = axis_samples(bb.min.x, bb.max.x, step);
        let ys = axis_samples(bb.min.y, bb.max.y, step);
        let mut out = Vec::with_capacity(xs.len() * ys.len());
        for &y in &ys {
            for &x in &xs {
                let p = Point2::new(x, y);
                if self.contains(p) {
                    out.push(p);
                }
            }
        }
        if let Environment::Polygon(v) = self {
            let n = v.len();
            for i in 0..n {
                let a = v[i];
                let b = v[(i + 1) % n];
                let len = distance(a, b);
                let k = (len / step).ceil().max(1.0) as usize;
                for s in 0..k {
                    let t = s as f64 / k as f64;
                    out.push(Point2::new(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)));
                }
            }
        }
        Ok(out)
    }

    /// Area of the Minkowski sum with a disk of radius `r`.
    pub fn offset_area(&self, r: f64) -> f64 {
        self.area() + self.perimeter() * r + std::f64::consts::PI * r * r
    }
}

fn signed_area(v: &[Point2]) -> f64 {
    let n = v.len();
    0.5 * (0..n)
        .map(|i| {
            let a = v[i];
            let b = v[(i + 1) % n];
            a.x * b.y - b.x * a.y
        })
        .sum::<f64>()
}

fn closest_on_segment(a: Point2, b: Point2, p: Point2) -> Point2 {
    let (dx, dy) = b.sub(a);
    let len_sq = dx * dx + dy * dy;
    if len_sq == 0.0 {
        return a;
    }
    let (px, py) = p.sub(a);
    let t = ((px * dx + py * dy) / len_sq).clamp(0.0, 1.0);
    Point2::new(a.x + t * dx, a.y + t * dy)
}

/// `lo, lo + step, ...` with `hi` appended when the lattice misses it.
fn axis_samples(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step).floor() as usize;
    let mut v: Vec<f64> = (0..=n).map(|i| lo + i as f64 * step).collect();
    if hi - v[n] > 1e-9 * step {
        v.push(hi);
    }
    v
}

/// Whether two convex polygons (any orientation) share at least one point.
pub fn convex_polygons_intersect(a: &[Point2], b: &[Point2]) -> bool {
    fn separated(poly: &[Point2], a: &[Point2], b: &[Point2]) -> bool {
        let n = poly.len();
        for i in 0..n {
            let p = poly[i];
            let q = poly[(i + 1) % n];
            // edge normal
            let nx = q.y - p.y;
            let ny = p.x - q.x;
            let proj = |s: &[Point2]| {
                s.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                    let d = v.x * nx + v.y * ny;
                    (lo.min(d), hi.max(d))
                })
            };
            let (alo, ahi) = proj(a);
            let (blo, bhi) = proj(b);
            let scale = nx.hypot(ny) * CONTAINS_EPS;
            if ahi < blo - scale || bhi < alo - scale {
                return true;
            }
        }
        false
    }
    !(separated(a, a, b) || separated(b, a, b))
}

/// Vertices of the flat-topped regular hexagon with circumradius `edge`.
pub fn hexagon_vertices(center: Point2, edge: f64) -> [Point2; 6] {
    let h = 0.5 * 3f64.sqrt() * edge;
    [
        Point2::new(center.x + edge, center.y),
        Point2::new(center.x + 0.5 * edge, center.y + h),
        Point2::new(center.x - 0.5 * edge, center.y + h),
        Point2::new(center.x - edge, center.y),
        Point2::new(center.x - 0.5 * edge, center.y - h),
        Point2::new(center.x + 0.5 * edge, center.y - h),
    ]
}

/// Centers of the hexagonal lattice with edge `edge` whose hexagon
/// intersects the environment. This is the smallest subset of the lattice
/// whose cells tile the environment.
pub fn hexagonal_cells(env: &Environment, edge: f64) -> Result<Vec<Point2>> {
    let poly = env.vertices();
    Ok(lattice_candidates(env, edge)?
        .into_iter()
        .filter(|&c| {
            env.distance_to(c) <= edge * (1.0 + 1e-12)
                && convex_polygons_intersect(&hexagon_vertices(c, edge), &poly)
        })
        .collect())
}

/// Centers of a hexagonal tiling of edge `edge` whose circumscribed circle
/// meets the environment. Columns are `1.5 * edge` apart; centers within a
/// column are `sqrt(3) * edge` apart; odd columns are shifted by half that.
/// The lattice is anchored so that a center sits on the bounding-box center.
pub fn hexagonal_tiling(env: &Environment, edge: f64) -> Result<Vec<Point2>> {
    Ok(lattice_candidates(env, edge)?
        .into_iter()
        .filter(|&c| env.distance_to(c) <= edge * (1.0 + 1e-12))
        .collect())
}

fn lattice_candidates(env: &Environment, edge: f64) -> Result<Vec<Point2>> {
    if !(edge > 0.0) || !edge.is_finite() {
        return Err(Error::Domain(format!(
            "tiling edge must be positive, got {edge}"
        )));
    }
    let bb = env.bbox();
    let anchor = bb.center();
    let dx = 1.5 * edge;
    let dy = 3f64.sqrt() * edge;
    let i_lo = ((bb.min.x - edge - anchor.x) / dx).floor() as i64;
    let i_hi = ((bb.max.x + edge - anchor.x) / dx).ceil() as i64;
    let j_lo = ((bb.min.y - edge - anchor.y) / dy).floor() as i64 - 1;
    let j_hi = ((bb.max.y + edge - anchor.y) / dy).ceil() as i64 + 1;
    let mut out = Vec::new();
    for i in i_lo..=i_hi {
        let x = anchor.x + i as f64 * dx;
        let shift = if i.rem_euclid(2) == 1 { 0.5 * dy } else { 0.0 };
        for j in j_lo..=j_hi {
            out.push(Point2::new(x, anchor.y + shift + j as f64 * dy));
        }
    }
    Ok(out)
}

/// A set of disk centers sharing one radius.
#[derive(Debug, Clone, PartialEq)]
pub struct Cover {
    pub centers: Vec<Point2>,
    pub radius: f64,
}

impl Cover {
    pub fn new(centers: Vec<Point2>, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::Domain(format!("cover radius must be positive, got {radius}")));
        }
        Ok(Self { centers, radius })
    }
}

/// Grid points of `env` (step `grid_step`) not within `radius` of any center.
pub fn uncovered_points(
    centers: &[Point2],
    radius: f64,
    env: &Environment,
    grid_step: f64,
) -> Result<Vec<Point2>> {
    let grid = env.grid_points(grid_step)?;
    if centers.is_empty() {
        return Ok(grid);
    }
    let index = PointIndex::new(centers, radius);
    let r_sq = radius * radius * (1.0 + 1e-12);
    Ok(grid
        .into_par_iter()
        .filter(|&g| !index.any_within_sq(g, r_sq))
        .collect())
}

/// Whether every grid point of `env` lies within the cover radius of a center.
pub fn is_covering(cover: &Cover, env: &Environment, grid_step: f64) -> Result<bool> {
    Ok(uncovered_points(&cover.centers, cover.radius, env, grid_step)?.is_empty())
}

/// Whether all pairwise distances strictly exceed `r`.
pub fn is_packing(points: &[Point2], r: f64) -> bool {
    if points.len() < 2 {
        return true;
    }
    let index = PointIndex::new(points, r.max(f64::MIN_POSITIVE));
    let r_sq = r * r;
    points.iter().enumerate().all(|(i, &p)| {
        let mut ok = true;
        index.for_each_within(p, r, |j, d_sq| {
            if j != i && d_sq <= r_sq {
                ok = false;
            }
        });
        ok
    })
}

/// Greedy maximal `r`-packing taken in input order.
pub fn maximal_packing(points: &[Point2], r: f64) -> Vec<Point2> {
    let r_sq = r * r;
    let mut chosen: Vec<Point2> = Vec::new();
    let mut index = index::GrowingIndex::new(r.max(f64::MIN_POSITIVE));
    for &p in points {
        if !index.any_within_sq(p, r, r_sq) {
            index.insert(p);
            chosen.push(p);
        }
    }
    chosen
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit_square() -> Environment {
        Environment::rect(1.0, 1.0).unwrap()
    }

    fn min_pairwise(points: &[Point2]) -> f64 {
        let mut best = f64::INFINITY;
        for i in 0..points.len() {
            for j in i + 1..points.len() {
                best = best.min(distance(points[i], points[j]));
            }
        }
        best
    }

    #[test]
    fn distance_examples() {
        assert_eq!(distance(Point2::new(0.0, 0.0), Point2::new(0.0, 0.0)), 0.0);
        assert_eq!(distance(Point2::new(0.0, 0.0), Point2::new(3.0, 4.0)), 5.0);
        assert_relative_eq!(
            distance(Point2::new(1.0, 1.0), Point2::new(2.0, 2.0)),
            std::f64::consts::SQRT_2,
            epsilon = 1e-12
        );
    }

    #[test]
    fn area_examples() {
        assert_eq!(Environment::rect(20.0, 20.0).unwrap().area(), 400.0);
        assert_eq!(unit_square().area(), 1.0);
        let tri = Environment::polygon(vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(0.0, 1.0),
        ])
        .unwrap();
        assert_relative_eq!(tri.area(), 0.5);
    }

    #[test]
    fn rejects_degenerate_environments() {
        assert!(Environment::rect(0.0, 1.0).is_err());
        assert!(Environment::polygon(vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0)]).is_err());
        // reflex vertex
        assert!(Environment::polygon(vec![
            Point2::new(0.0, 0.0),
            Point2::new(2.0, 0.0),
            Point2::new(1.0, 0.5),
            Point2::new(2.0, 2.0),
            Point2::new(0.0, 2.0),
        ])
        .is_err());
        // clockwise is accepted and normalised
        let cw = Environment::polygon(vec![
            Point2::new(0.0, 0.0),
            Point2::new(0.0, 1.0),
            Point2::new(1.0, 0.0),
        ])
        .unwrap();
        assert_relative_eq!(cw.area(), 0.5);
    }

    #[test]
    fn contains_examples() {
        let sq = unit_square();
        assert!(sq.contains(Point2::new(0.5, 0.5)));
        assert!(sq.contains(Point2::new(1.0, 1.0)));
        assert!(!sq.contains(Point2::new(1.0001, 0.5)));
        let poly = Environment::polygon(unit_square().vertices()).unwrap();
        assert!(poly.contains(Point2::new(1.0, 1.0)));
        assert!(!poly.contains(Point2::new(1.0001, 0.5)));
    }

    #[test]
    fn projection_examples() {
        for env in [unit_square(), Environment::polygon(unit_square().vertices()).unwrap()] {
            assert_eq!(env.project_to(Point2::new(0.5, 0.5)), Point2::new(0.5, 0.5));
            assert_eq!(env.project_to(Point2::new(2.0, 0.5)), Point2::new(1.0, 0.5));
            assert_eq!(env.project_to(Point2::new(2.0, 2.0)), Point2::new(1.0, 1.0));
        }
    }

    #[test]
    fn tiny_env_gets_one_tile() {
        let r = 3.0;
        let env = Environment::rect_at(Point2::new(10.0 - r / 4.0, -r / 4.0), r / 2.0, r / 2.0).unwrap();
        assert_eq!(hexagonal_tiling(&env, r).unwrap().len(), 1);
        assert_eq!(hexagonal_cells(&env, r).unwrap().len(), 1);
    }

    #[test]
    fn tiling_rejects_bad_edge() {
        assert!(hexagonal_tiling(&unit_square(), 0.0).is_err());
        assert!(hexagonal_tiling(&unit_square(), -1.0).is_err());
    }

    #[test]
    fn tiling_spacing_and_cover() {
        let env = Environment::rect(37.0, 23.0).unwrap();
        let r = 2.3;
        let tiles = hexagonal_tiling(&env, r).unwrap();
        assert_relative_eq!(min_pairwise(&tiles), 3f64.sqrt() * r, epsilon = 1e-9);
        let cover = Cover::new(tiles.clone(), r).unwrap();
        assert!(is_covering(&cover, &env, r / 20.0).unwrap());
        assert!(is_packing(&tiles, (3f64.sqrt() - 1e-6) * r));
        let cells = hexagonal_cells(&env, r).unwrap();
        assert!(cells.len() < tiles.len());
        assert!(is_covering(&Cover::new(cells, r).unwrap(), &env, r / 20.0).unwrap());
    }

    #[test]
    fn tiling_count_close_to_area_bound() {
        let env = Environment::rect(100.0, 100.0).unwrap();
        let r = 8.0;
        let cells = hexagonal_cells(&env, r).unwrap();
        let bound = 3.05 * env.area() / (std::f64::consts::PI * r * r);
        assert!((cells.len() as f64) <= bound, "{} > {bound}", cells.len());
    }

    #[test]
    fn covering_examples() {
        let sq = Environment::rect(2.0, 2.0).unwrap();
        let half_diag = 2f64.sqrt();
        let step = 0.01;
        let c = Point2::new(1.0, 1.0);
        assert!(is_covering(&Cover::new(vec![c], half_diag).unwrap(), &sq, step).unwrap());
        assert!(!is_covering(&Cover::new(vec![c], half_diag - step).unwrap(), &sq, step).unwrap());
        assert!(Cover::new(vec![c], 0.0).is_err());
    }

    #[test]
    fn packing_examples() {
        assert!(is_packing(&[Point2::new(0.0, 0.0)], 1.0));
        assert!(!is_packing(&[Point2::new(0.0, 0.0), Point2::new(1.0, 0.0)], 1.0));
        assert!(is_packing(&[Point2::new(0.0, 0.0), Point2::new(1.0 + 1e-9, 0.0)], 1.0));
    }

    #[test]
    fn maximal_packing_examples() {
        let clustered = vec![
            Point2::new(0.0, 0.0),
            Point2::new(0.1, 0.0),
            Point2::new(0.0, 0.1),
        ];
        assert_eq!(maximal_packing(&clustered, 1.0).len(), 1);
        let spread = vec![
            Point2::new(0.0, 0.0),
            Point2::new(2.0, 0.0),
            Point2::new(0.0, 2.0),
        ];
        assert_eq!(maximal_packing(&spread, 1.0), spread);
    }

    #[test]
    fn grid_includes_boundary() {
        let g = unit_square().grid_points(0.3).unwrap();
        assert!(g.contains(&Point2::new(1.0, 1.0)));
        assert!(g.contains(&Point2::new(0.0, 0.0)));
        assert!(unit_square().grid_points(0.0).is_err());
    }

    #[test]
    fn hexagon_intersection() {
        let sq = unit_square().vertices();
        assert!(convex_polygons_intersect(&hexagon_vertices(Point2::new(0.5, 0.5), 0.1), &sq));
        assert!(convex_polygons_intersect(&hexagon_vertices(Point2::new(1.5, 0.5), 0.5), &sq));
        assert!(!convex_polygons_intersect(&hexagon_vertices(Point2::new(3.0, 3.0), 1.0), &sq));
        // circumcircle reaches the corner, hexagon does not
        let off = 0.95 / 2f64.sqrt();
        let c = Point2::new(1.0 + off, 1.0 + off);
        assert!(distance(c, Point2::new(1.0, 1.0)) < 1.0);
        assert!(!convex_polygons_intersect(&hexagon_vertices(c, 1.0), &sq));
    }
}
