use super::Tour;
use crate::error::{Error, Result};
use crate::geometry::{distance, Point2};

/// Largest instance the exponential solver accepts.
pub const HELD_KARP_LIMIT: usize = 15;

/// Optimal tour by dynamic programming over subsets, O(2^n n^2).
pub fn held_karp_exact(points: &[Point2]) -> Result<Tour> {
    let n = points.len();
    if n > HELD_KARP_LIMIT {
        return Err(Error::SizeLimit {
            n,
            limit: HELD_KARP_LIMIT,
        });
    }
    if n <= 3 {
        return Tour::new((0..n).collect(), points);
    }
    // vertex 0 is the fixed start; subsets range over vertices 1..n
    let m = n - 1;
    let full = 1usize << m;
    let d = |a: usize, b: usize| distance(points[a], points[b]);
    let mut cost = vec![f64::INFINITY; full * m];
    let mut prev = vec![u8::MAX; full * m];
    for j in 0..m {
        cost[(1 << j) * m + j] = d(0, j + 1);
    }
    for set in 1..full {
        for last in 0..m {
            if set & (1 << last) == 0 {
                continue;
            }
            let here = cost[set * m + last];
            if !here.is_finite() {
                continue;
            }
            for next in 0..m {
                if set & (1 << next) != 0 {
                    continue;
                }
                let grown = set | (1 << next);
                let c = here + d(last + 1, next + 1);
                if c < cost[grown * m + next] {
                    cost[grown * m + next] = c;
                    prev[grown * m + next] = last as u8;
                }
            }
        }
    }
    let all = full - 1;
    let (mut last, _) = (0..m)
        .map(|j| (j, cost[all * m + j] + d(j + 1, 0)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("at least one vertex besides the start");
    let mut order = Vec::with_capacity(n);
    let mut set = all;
    loop {
        order.push(last + 1);
        let p = prev[set * m + last];
        set &= !(1 << last);
        if p == u8::MAX {
            break;
        }
        last = p as usize;
    }
    order.push(0);
    order.reverse();
    Tour::new(order, points)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Enumerates all permutations fixing vertex 0.
    fn brute_force(points: &[Point2]) -> f64 {
        fn rec(points: &[Point2], order: &mut Vec<usize>, rest: &mut Vec<usize>, best: &mut f64) {
            if rest.is_empty() {
                *best = best.min(crate::tsp::cycle_length(order, points));
                return;
            }
            for i in 0..rest.len() {
                let v = rest.remove(i);
                order.push(v);
                rec(points, order, rest, best);
                order.pop();
                rest.insert(i, v);
            }
        }
        let mut best = f64::INFINITY;
        rec(points, &mut vec![0], &mut (1..points.len()).collect(), &mut best);
        best
    }

    #[test]
    fn small_examples() {
        let tri = [Point2::new(0.0, 0.0), Point2::new(3.0, 0.0), Point2::new(0.0, 4.0)];
        assert_eq!(held_karp_exact(&tri).unwrap().length, 12.0);
        let sq = [
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(1.0, 0.0),
            Point2::new(0.0, 1.0),
        ];
        assert!((held_karp_exact(&sq).unwrap().length - 4.0).abs() < 1e-12);
    }

    #[test]
    fn matches_enumeration() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for _ in 0..30 {
            let n = rng.random_range(4..=8);
            let pts: Vec<Point2> = (0..n)
                .map(|_| Point2::new(rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)))
                .collect();
            let t = held_karp_exact(&pts).unwrap();
            assert!((t.length - brute_force(&pts)).abs() < 1e-9);
        }
    }

    #[test]
    fn size_guard() {
        let pts = vec![Point2::new(0.0, 0.0); 16];
        assert!(matches!(held_karp_exact(&pts), Err(Error::SizeLimit { n: 16, .. })));
    }
}
