use std::collections::HashMap;

use super::{distance_sq, Point2};

/// Uniform bucket grid over a fixed point set for radius and nearest queries.
#[derive(Debug, Clone)]
pub struct PointIndex {
    points: Vec<Point2>,
    origin: Point2,
    cell: f64,
    nx: usize,
    ny: usize,
    starts: Vec<usize>,
    slots: Vec<usize>,
}

impl PointIndex {
    /// `cell` is the bucket side; pick it near the typical query radius.
    pub fn new(points: &[Point2], cell: f64) -> Self {
        assert!(cell > 0.0, "cell size must be positive");
        let (mut lo, mut hi) = (Point2::new(0.0, 0.0), Point2::new(0.0, 0.0));
        if let Some(&first) = points.first() {
            lo = first;
            hi = first;
            for p in points {
                lo.x = lo.x.min(p.x);
                lo.y = lo.y.min(p.y);
                hi.x = hi.x.max(p.x);
                hi.y = hi.y.max(p.y);
            }
        }
        // keep the bucket array bounded for sparse inputs with tiny cells
        let mut cell = cell;
        let max_cells = (4 * points.len()).max(1024) as f64;
        while ((hi.x - lo.x) / cell + 1.0) * ((hi.y - lo.y) / cell + 1.0) > max_cells {
            cell *= 2.0;
        }
        let nx = ((hi.x - lo.x) / cell).floor() as usize + 1;
        let ny = ((hi.y - lo.y) / cell).floor() as usize + 1;
        let mut counts = vec![0usize; nx * ny + 1];
        let key = |p: &Point2| {
            let i = (((p.x - lo.x) / cell).floor() as usize).min(nx - 1);
            let j = (((p.y - lo.y) / cell).floor() as usize).min(ny - 1);
            j * nx + i
        };
        for p in points {
            counts[key(p) + 1] += 1;
        }
        for k in 1..counts.len() {
            counts[k] += counts[k - 1];
        }
        let mut fill = counts.clone();
        let mut slots = vec![0usize; points.len()];
        for (idx, p) in points.iter().enumerate() {
            let k = key(p);
            slots[fill[k]] = idx;
            fill[k] += 1;
        }
        Self {
            points: points.to_vec(),
            origin: lo,
            cell,
            nx,
            ny,
            starts: counts,
            slots,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    fn cell_range(&self, lo: f64, hi: f64, origin: f64, n: usize) -> Option<(usize, usize)> {
        let a = ((lo - origin) / self.cell).floor();
        let b = ((hi - origin) / self.cell).floor();
        if b < 0.0 || a > (n - 1) as f64 {
            return None;
        }
        Some((a.max(0.0) as usize, (b as usize).min(n - 1)))
    }

    /// Calls `f(index, squared_distance)` for every point within `r` of `p`.
    pub fn for_each_within<F: FnMut(usize, f64)>(&self, p: Point2, r: f64, mut f: F) {
        if self.points.is_empty() {
            return;
        }
        let Some((i0, i1)) = self.cell_range(p.x - r, p.x + r, self.origin.x, self.nx) else {
            return;
        };
        let Some((j0, j1)) = self.cell_range(p.y - r, p.y + r, self.origin.y, self.ny) else {
            return;
        };
        let r_sq = r * r;
        for j in j0..=j1 {
            for i in i0..=i1 {
                let k = j * self.nx + i;
                for &idx in &self.slots[self.starts[k]..self.starts[k + 1]] {
                    let d = distance_sq(p, self.points[idx]);
                    if d <= r_sq {
                        f(idx, d);
                    }
                }
            }
        }
    }

    /// Indices of all points within `r` of `p`.
    pub fn within(&self, p: Point2, r: f64) -> Vec<usize> {
        let mut out = Vec::new();
        self.for_each_within(p, r, |i, _| out.push(i));
        out
    }

    /// Whether any point lies within squared distance `r_sq`.
    pub fn any_within_sq(&self, p: Point2, r_sq: f64) -> bool {
        let r = r_sq.sqrt();
        let mut hit = false;
        // early exit is not worth a custom loop here; buckets are small
        self.for_each_within(p, r, |_, d| hit |= d <= r_sq);
        hit
    }

    /// Index and distance of the nearest point. Ties go to the lower index.
    pub fn nearest(&self, p: Point2) -> Option<(usize, f64)> {
        if self.points.is_empty() {
            return None;
        }
        let ci = (((p.x - self.origin.x) / self.cell).floor() as i64).clamp(0, self.nx as i64 - 1);
        let cj = (((p.y - self.origin.y) / self.cell).floor() as i64).clamp(0, self.ny as i64 - 1);
        let mut best: Option<(usize, f64)> = None;
        let max_ring = self.nx.max(self.ny) as i64;
        for ring in 0..=max_ring {
            // distance from p to the nearest cell not yet scanned
            if let Some((_, d)) = best {
                let reach = self.ring_clearance(p, ci, cj, ring);
                if reach * reach > d {
                    break;
                }
            }
            for j in (cj - ring)..=(cj + ring) {
                for i in (ci - ring)..=(ci + ring) {
                    if (j - cj).abs() != ring && (i - ci).abs() != ring {
                        continue;
                    }
                    if i < 0 || j < 0 || i >= self.nx as i64 || j >= self.ny as i64 {
                        continue;
                    }
                    let k = j as usize * self.nx + i as usize;
                    for &idx in &self.slots[self.starts[k]..self.starts[k + 1]] {
                        let d = distance_sq(p, self.points[idx]);
                        let better = match best {
                            None => true,
                            Some((bi, bd)) => d < bd || (d == bd && idx < bi),
                        };
                        if better {
                            best = Some((idx, d));
                        }
                    }
                }
            }
        }
        best.map(|(i, d)| (i, d.sqrt()))
    }

    /// Lower bound on the distance from `p` to any cell in ring `ring`
    /// around cell `(ci, cj)`.
    fn ring_clearance(&self, p: Point2, ci: i64, cj: i64, ring: i64) -> f64 {
        let x0 = self.origin.x + (ci - ring + 1) as f64 * self.cell;
        let x1 = self.origin.x + (ci + ring) as f64 * self.cell;
        let y0 = self.origin.y + (cj - ring + 1) as f64 * self.cell;
        let y1 = self.origin.y + (cj + ring) as f64 * self.cell;
        let dx = (p.x - x0).min(x1 - p.x);
        let dy = (p.y - y0).min(y1 - p.y);
        dx.min(dy).max(0.0)
    }
}

/// Hash-bucket index that accepts insertions.
#[derive(Debug, Clone)]
pub(crate) struct GrowingIndex {
    cell: f64,
    buckets: HashMap<(i64, i64), Vec<Point2>>,
}

impl GrowingIndex {
    pub(crate) fn new(cell: f64) -> Self {
        Self {
            cell,
            buckets: HashMap::new(),
        }
    }

    fn key(&self, p: Point2) -> (i64, i64) {
        (
            (p.x / self.cell).floor() as i64,
            (p.y / self.cell).floor() as i64,
        )
    }

    pub(crate) fn insert(&mut self, p: Point2) {
        let k = self.key(p);
        self.buckets.entry(k).or_default().push(p);
    }

    pub(crate) fn any_within_sq(&self, p: Point2, r: f64, r_sq: f64) -> bool {
        let (i0, j0) = self.key(Point2::new(p.x - r, p.y - r));
        let (i1, j1) = self.key(Point2::new(p.x + r, p.y + r));
        for j in j0..=j1 {
            for i in i0..=i1 {
                if let Some(b) = self.buckets.get(&(i, j)) {
                    if b.iter().any(|&q| distance_sq(p, q) <= r_sq) {
                        return true;
                    }
                }
            }
        }
        false
    }
}
