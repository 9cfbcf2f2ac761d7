use crate::geometry::{distance_sq, Point2};

/// Euclidean minimum spanning tree by dense Prim, O(n^2) time and O(n)
/// memory. Returns `n - 1` edges `(parent, child)` in insertion order.
/// Ties resolve to the lowest vertex index, so the result is deterministic.
pub fn euclidean_mst(points: &[Point2]) -> Vec<(usize, usize)> {
    let n = points.len();
    if n < 2 {
        return Vec::new();
    }
    let mut in_tree = vec![false; n];
    let mut best = vec![f64::INFINITY; n];
    let mut parent = vec![0usize; n];
    let mut edges = Vec::with_capacity(n - 1);
    let mut current = 0;
    in_tree[0] = true;
    for _ in 1..n {
        let p = points[current];
        let mut next = usize::MAX;
        let mut next_d = f64::INFINITY;
        for v in 0..n {
            if in_tree[v] {
                continue;
            }
            let d = distance_sq(p, points[v]);
            if d < best[v] {
                best[v] = d;
                parent[v] = current;
            }
            if best[v] < next_d {
                next_d = best[v];
                next = v;
            }
        }
        in_tree[next] = true;
        edges.push((parent[next], next));
        current = next;
    }
    edges
}
