use serde::{Deserialize, Serialize};

use super::matching::{greedy_perfect_matching, min_weight_perfect_matching};
use super::mst::euclidean_mst;
use super::{cycle_length, Tour};
use crate::geometry::Point2;

/// How the odd-degree vertices of the spanning tree are paired.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatchingMode {
    /// Blossom minimum-weight perfect matching; keeps the 3/2 guarantee.
    Exact,
    /// Greedy nearest-pair matching; no guarantee.
    Greedy,
}

impl std::fmt::Display for MatchingMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            MatchingMode::Exact => "exact",
            MatchingMode::Greedy => "greedy",
        })
    }
}

impl std::str::FromStr for MatchingMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" => Ok(MatchingMode::Exact),
            "greedy" => Ok(MatchingMode::Greedy),
            other => Err(format!("unknown matching mode '{other}' (expected exact or greedy)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChristofidesOptions {
    pub matching: MatchingMode,
    /// Above this many odd-degree vertices exact mode falls back to greedy.
    pub greedy_threshold: usize,
}

impl Default for ChristofidesOptions {
    fn default() -> Self {
        Self {
            matching: MatchingMode::Exact,
            greedy_threshold: 5000,
        }
    }
}

/// Christofides tour with exact matching.
pub fn christofides(points: &[Point2]) -> Tour {
    christofides_with(
        points,
        &ChristofidesOptions {
            matching: MatchingMode::Exact,
            greedy_threshold: usize::MAX,
        },
    )
    .0
}

/// Christofides tour plus the matching mode that was actually used.
pub fn christofides_with(points: &[Point2], opts: &ChristofidesOptions) -> (Tour, MatchingMode) {
    let n = points.len();
    if n <= 1 {
        return (
            Tour {
                order: (0..n).collect(),
                length: 0.0,
            },
            opts.matching,
        );
    }

    let tree = euclidean_mst(points);
    let mut degree = vec![0usize; n];
    for &(a, b) in &tree {
        degree[a] += 1;
        degree[b] += 1;
    }
    let odd: Vec<usize> = (0..n).filter(|&v| degree[v] % 2 == 1).collect();
    assert!(odd.len().is_multiple_of(2), "handshake lemma violated: {} odd vertices", odd.len());

    let mode = match opts.matching {
        MatchingMode::Exact if odd.len() > opts.greedy_threshold => {
            log::warn!(
                "{} odd-degree vertices exceed the exact matching threshold {}; using greedy matching (no 3/2 guarantee)",
                odd.len(),
                opts.greedy_threshold
            );
            MatchingMode::Greedy
        }
        m => m,
    };
    let odd_points: Vec<Point2> = odd.iter().map(|&v| points[v]).collect();
    let pairs = match mode {
        MatchingMode::Exact => min_weight_perfect_matching(&odd_points),
        MatchingMode::Greedy => greedy_perfect_matching(&odd_points),
    };

    let mut edges = tree;
    edges.extend(pairs.into_iter().map(|(i, j)| (odd[i], odd[j])));
    let circuit = euler_circuit(n, &edges);

    // shortcut repeated vertices, keeping first visits
    let mut seen = vec![false; n];
    let order: Vec<usize> = circuit
        .into_iter()
        .filter(|&v| !std::mem::replace(&mut seen[v], true))
        .collect();
    debug_assert_eq!(order.len(), n);
    let length = cycle_length(&order, points);
    (Tour { order, length }, mode)
}

/// Hierholzer's algorithm on a connected multigraph with all degrees even.
/// Starts at vertex 0; the returned walk repeats the start at the end.
fn euler_circuit(n: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (id, &(a, b)) in edges.iter().enumerate() {
        adj[a].push((b, id));
        adj[b].push((a, id));
    }
    let mut used = vec![false; edges.len()];
    let mut cursor = vec![0usize; n];
    let mut stack = vec![0usize];
    let mut circuit = Vec::with_capacity(edges.len() + 1);
    while let Some(&v) = stack.last() {
        let mut advanced = false;
        while cursor[v] < adj[v].len() {
            let (w, id) = adj[v][cursor[v]];
            cursor[v] += 1;
            if !used[id] {
                used[id] = true;
                stack.push(w);
                advanced = true;
                break;
            }
        }
        if !advanced {
            circuit.push(v);
            stack.pop();
        }
    }
    circuit.reverse();
    circuit
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tsp::held_karp_exact;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn trivial_instances() {
        let one = christofides(&[Point2::new(2.0, 2.0)]);
        assert_eq!(one.order, vec![0]);
        assert_eq!(one.length, 0.0);
        let two = christofides(&[Point2::new(0.0, 0.0), Point2::new(3.0, 4.0)]);
        assert_eq!(two.length, 10.0);
        assert!(christofides(&[]).order.is_empty());
    }

    #[test]
    fn unit_square_is_optimal() {
        let pts = [
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(0.0, 1.0),
        ];
        assert!((christofides(&pts).length - 4.0).abs() < 1e-12);
    }

    #[test]
    fn euler_circuit_uses_every_edge() {
        // two triangles sharing vertex 0
        let edges = [(0, 1), (1, 2), (2, 0), (0, 3), (3, 4), (4, 0)];
        let c = euler_circuit(5, &edges);
        assert_eq!(c.len(), edges.len() + 1);
        assert_eq!(c.first(), c.last());
    }

    #[test]
    fn within_three_halves_of_optimal() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..100 {
            let pts: Vec<Point2> = (0..10)
                .map(|_| Point2::new(rng.random_range(0.0..100.0), rng.random_range(0.0..100.0)))
                .collect();
            let opt = held_karp_exact(&pts).unwrap().length;
            let c = christofides(&pts);
            assert!(c.length >= opt - 1e-9);
            assert!(c.length <= 1.5 * opt + 1e-9);
        }
    }

    #[test]
    fn greedy_fallback_is_reported() {
        let pts: Vec<Point2> = (0..30).map(|i| Point2::new(i as f64, (i * i % 7) as f64)).collect();
        let (tour, mode) = christofides_with(
            &pts,
            &ChristofidesOptions {
                matching: MatchingMode::Exact,
                greedy_threshold: 2,
            },
        );
        assert_eq!(mode, MatchingMode::Greedy);
        assert_eq!(tour.order.len(), 30);
        let (_, mode) = christofides_with(&pts, &ChristofidesOptions::default());
        assert_eq!(mode, MatchingMode::Exact);
    }
}
