use super::{cycle_length, Tour};
use crate::geometry::{distance, Point2, PointIndex};

const NEIGHBOURS: usize = 12;
/// Below this size every pair is a candidate, so the result is a true 2-opt
/// local optimum.
const FULL_SCAN: usize = 200;
const DEFAULT_PASSES: usize = 200;

/// 2-opt local search seeded by `tour`. Never returns a longer tour.
pub fn two_opt(tour: &Tour, points: &[Point2]) -> Tour {
    two_opt_with_limit(tour, points, DEFAULT_PASSES)
}

pub fn two_opt_with_limit(tour: &Tour, points: &[Point2], max_passes: usize) -> Tour {
    let n = tour.order.len();
    if n < 4 {
        return tour.clone();
    }
    let neighbours = candidate_lists(points);
    let mut order = tour.order.clone();
    let mut pos = vec![0usize; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let d = |a: usize, b: usize| distance(points[a], points[b]);

    for _ in 0..max_passes {
        let mut improved = false;
        for a in 0..n {
            for forward in [true, false] {
                let pa = pos[a];
                let b = if forward { order[(pa + 1) % n] } else { order[(pa + n - 1) % n] };
                let d_ab = d(a, b);
                for &c in &neighbours[a] {
                    let d_ac = d(a, c);
                    if d_ac >= d_ab {
                        break;
                    }
                    let pc = pos[c];
                    let dd = if forward { order[(pc + 1) % n] } else { order[(pc + n - 1) % n] };
                    if c == b || dd == a {
                        continue;
                    }
                    let gain = d_ab + d(c, dd) - d_ac - d(b, dd);
                    if gain > 1e-10 {
                        // replace (a,b),(c,dd) with (a,c),(b,dd)
                        if forward {
                            reverse_cyclic(&mut order, &mut pos, (pa + 1) % n, pc);
                        } else {
                            reverse_cyclic(&mut order, &mut pos, pc, (pa + n - 1) % n);
                        }
                        improved = true;
                        break;
                    }
                }
            }
        }
        if !improved {
            break;
        }
    }
    let length = cycle_length(&order, points);
    if length <= tour.length {
        Tour { order, length }
    } else {
        tour.clone()
    }
}

/// Reverses positions `from..=to` walking forward cyclically. When the
/// segment wraps, the complementary segment is reversed instead, which
/// yields the same cycle.
fn reverse_cyclic(order: &mut [usize], pos: &mut [usize], from: usize, to: usize) {
    let n = order.len();
    let (lo, hi) = if from <= to {
        (from, to)
    } else {
        ((to + 1) % n, (from + n - 1) % n)
    };
    if lo >= hi {
        return;
    }
    order[lo..=hi].reverse();
    for (i, &v) in order.iter().enumerate().take(hi + 1).skip(lo) {
        pos[v] = i;
    }
}

/// Nearest neighbours of every point, closest first.
fn candidate_lists(points: &[Point2]) -> Vec<Vec<usize>> {
    let n = points.len();
    let by_distance = |i: usize, mut cands: Vec<usize>| {
        cands.sort_by(|&a, &b| {
            distance(points[i], points[a])
                .total_cmp(&distance(points[i], points[b]))
                .then(a.cmp(&b))
        });
        cands
    };
    if n <= FULL_SCAN {
        return (0..n)
            .map(|i| by_distance(i, (0..n).filter(|&j| j != i).collect()))
            .collect();
    }
    let index = PointIndex::new(points, typical_spacing(points));
    (0..n)
        .map(|i| {
            let mut radius = typical_spacing(points);
            loop {
                let found: Vec<usize> = index
                    .within(points[i], radius)
                    .into_iter()
                    .filter(|&j| j != i)
                    .collect();
                if found.len() >= NEIGHBOURS {
                    let mut sorted = by_distance(i, found);
                    sorted.truncate(NEIGHBOURS);
                    return sorted;
                }
                radius *= 2.0;
            }
        })
        .collect()
}

fn typical_spacing(points: &[Point2]) -> f64 {
    let (mut lo, mut hi) = (points[0], points[0]);
    for p in points {
        lo.x = lo.x.min(p.x);
        lo.y = lo.y.min(p.y);
        hi.x = hi.x.max(p.x);
        hi.y = hi.y.max(p.y);
    }
    let area = ((hi.x - lo.x).max(1e-9) * (hi.y - lo.y).max(1e-9)).max(1e-12);
    (area / points.len() as f64).sqrt().max(1e-9)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tsp::christofides;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn square() -> Vec<Point2> {
        vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(0.0, 1.0),
        ]
    }

    #[test]
    fn optimal_square_unchanged() {
        let pts = square();
        let t = Tour::new(vec![0, 1, 2, 3], &pts).unwrap();
        let out = two_opt(&t, &pts);
        assert_eq!(out.length, 4.0);
    }

    #[test]
    fn removes_crossing() {
        let pts = square();
        // A, C, B, D crosses itself
        let t = Tour::new(vec![0, 2, 1, 3], &pts).unwrap();
        assert!(t.length > 4.0);
        let out = two_opt(&t, &pts);
        assert!((out.length - 4.0).abs() < 1e-12);
    }

    #[test]
    fn never_lengthens_and_is_idempotent() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let n = rng.random_range(4..80);
            let pts: Vec<Point2> = (0..n)
                .map(|_| Point2::new(rng.random_range(0.0..100.0), rng.random_range(0.0..100.0)))
                .collect();
            let mut order: Vec<usize> = (0..n).collect();
            for i in (1..n).rev() {
                order.swap(i, rng.random_range(0..=i));
            }
            let t = Tour::new(order, &pts).unwrap();
            let once = two_opt(&t, &pts);
            assert!(once.length <= t.length + 1e-12);
            let twice = two_opt(&once, &pts);
            assert!((twice.length - once.length).abs() < 1e-9);
            let c = christofides(&pts);
            assert!(two_opt(&c, &pts).length <= c.length + 1e-12);
        }
    }

    #[test]
    fn large_instance_uses_candidate_lists() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let pts: Vec<Point2> = (0..600)
            .map(|_| Point2::new(rng.random_range(0.0..100.0), rng.random_range(0.0..100.0)))
            .collect();
        let t = Tour::new((0..600).collect(), &pts).unwrap();
        let out = two_opt(&t, &pts);
        assert!(out.length < 0.5 * t.length);
        let mut sorted = out.order.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..600).collect::<Vec<_>>());
    }
}
