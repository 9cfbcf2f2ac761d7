//! Metric TSP over planar points: Christofides, 2-opt and an exact
//! Held-Karp oracle for small instances.

mod christofides;
mod held_karp;
pub mod matching;
mod mst;
mod two_opt;

pub use christofides::{christofides, christofides_with, ChristofidesOptions, MatchingMode};
pub use held_karp::{held_karp_exact, HELD_KARP_LIMIT};
pub use mst::euclidean_mst;
pub use two_opt::{two_opt, two_opt_with_limit};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{distance, Point2};

/// A closed tour: `order` visits every vertex once and returns to the start.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tour {
    pub order: Vec<usize>,
    pub length: f64,
}

impl Tour {
    pub fn new(order: Vec<usize>, points: &[Point2]) -> Result<Self> {
        let length = tour_length(&order, points)?;
        Ok(Self { order, length })
    }

    /// Tour vertices in visiting order.
    pub fn points(&self, points: &[Point2]) -> Vec<Point2> {
        self.order.iter().map(|&i| points[i]).collect()
    }
}

/// Length of the closed cycle through `points` in `order`.
pub fn tour_length(order: &[usize], points: &[Point2]) -> Result<f64> {
    if order.len() != points.len() {
        return Err(Error::Domain(format!(
            "tour has {} entries for {} points",
            order.len(),
            points.len()
        )));
    }
    let mut seen = vec![false; points.len()];
    for &i in order {
        if i >= points.len() || std::mem::replace(&mut seen[i], true) {
            return Err(Error::Domain(format!("tour order is not a permutation (index {i})")));
        }
    }
    Ok(cycle_length(order, points))
}

pub(crate) fn cycle_length(order: &[usize], points: &[Point2]) -> f64 {
    let n = order.len();
    if n < 2 {
        return 0.0;
    }
    (0..n)
        .map(|i| distance(points[order[i]], points[order[(i + 1) % n]]))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Vec<Point2> {
        vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(0.0, 1.0),
        ]
    }

    #[test]
    fn length_examples() {
        assert_eq!(tour_length(&[0], &[Point2::new(3.0, 3.0)]).unwrap(), 0.0);
        let two = [Point2::new(0.0, 0.0), Point2::new(3.0, 4.0)];
        assert_eq!(tour_length(&[1, 0], &two).unwrap(), 10.0);
        assert_eq!(tour_length(&[0, 1, 2, 3], &square()).unwrap(), 4.0);
    }

    #[test]
    fn rejects_non_permutations() {
        assert!(tour_length(&[0, 0, 1, 2], &square()).is_err());
        assert!(tour_length(&[0, 1, 2], &square()).is_err());
        assert!(tour_length(&[0, 1, 2, 7], &square()).is_err());
    }

    #[test]
    fn rotation_and_reversal_invariant() {
        let pts = vec![
            Point2::new(0.0, 0.0),
            Point2::new(4.0, 1.0),
            Point2::new(3.0, 5.0),
            Point2::new(-1.0, 2.0),
            Point2::new(1.0, 1.0),
        ];
        let order = vec![0, 4, 1, 2, 3];
        let base = tour_length(&order, &pts).unwrap();
        for k in 0..order.len() {
            let mut rot = order.clone();
            rot.rotate_left(k);
            assert!((tour_length(&rot, &pts).unwrap() - base).abs() < 1e-12);
            rot.reverse();
            assert!((tour_length(&rot, &pts).unwrap() - base).abs() < 1e-12);
        }
    }
}
