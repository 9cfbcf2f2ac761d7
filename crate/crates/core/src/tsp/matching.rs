//! Minimum-weight perfect matching on the complete Euclidean graph.
//!
//! The exact solver is Edmonds' primal-dual blossom algorithm in the
//! O(n^3) formulation of Galil, following the structure of Joris van
//! Rantwijk's reference implementation. It runs as a maximum-cardinality
//! maximum-weight matching with weights `c - d(i, j)`, which on a complete
//! graph of even order is exactly a minimum-weight perfect matching.
//!
//! The solver runs on a sparse candidate graph (nearest neighbours). The
//! final dual solution is then priced against every edge of the complete
//! graph; any edge with negative reduced cost is added and the sparse
//! problem is solved again. A matching that passes pricing is optimal for
//! the complete graph.

use crate::geometry::{distance, Point2, PointIndex};

const NONE: usize = usize::MAX;

/// Pairs `(i, j)` with `i < j` of an exact minimum-weight perfect matching.
/// `points.len()` must be even.
pub fn min_weight_perfect_matching(points: &[Point2]) -> Vec<(usize, usize)> {
    let n = points.len();
    assert!(n.is_multiple_of(2), "perfect matching needs an even vertex count");
    match n {
        0 => return Vec::new(),
        2 => return vec![(0, 1)],
        _ => {}
    }
    let offset = offset_weight(points);
    let mut edges = nearest_neighbour_edges(points, CANDIDATES);
    loop {
        let mut solver = Blossom::new(points, &edges, offset);
        solver.solve();
        let unmatched: Vec<usize> = (0..n).filter(|&v| solver.mate[v] == NONE).collect();
        if !unmatched.is_empty() {
            // the candidate graph has no perfect matching; let the leftovers meet
            for (a, &i) in unmatched.iter().enumerate() {
                for &j in &unmatched[a + 1..] {
                    edges.push((i.min(j), i.max(j)));
                }
            }
            edges.sort_unstable();
            edges.dedup();
            continue;
        }
        let violations = solver.pricing_violations();
        if violations.is_empty() {
            let mut pairs: Vec<(usize, usize)> = (0..n)
                .filter_map(|v| {
                    let w = solver.endpoint(solver.mate[v]);
                    (v < w).then_some((v, w))
                })
                .collect();
            pairs.sort_unstable();
            assert_eq!(pairs.len() * 2, n, "blossom solver left vertices unmatched");
            return pairs;
        }
        log::debug!("matching pricing added {} edges", violations.len());
        edges.extend(violations);
        edges.sort_unstable();
        edges.dedup();
    }
}

const CANDIDATES: usize = 10;

fn offset_weight(points: &[Point2]) -> f64 {
    let (mut lo, mut hi) = (points[0], points[0]);
    for p in points {
        lo.x = lo.x.min(p.x);
        lo.y = lo.y.min(p.y);
        hi.x = hi.x.max(p.x);
        hi.y = hi.y.max(p.y);
    }
    // exceeds every pairwise distance, so all weights are positive
    distance(lo, hi) + 1.0
}

/// Union of each vertex's `k` nearest neighbours, as sorted `(i, j)` with `i < j`.
fn nearest_neighbour_edges(points: &[Point2], k: usize) -> Vec<(usize, usize)> {
    let n = points.len();
    let k = k.min(n - 1);
    let spread = spread_radius(points);
    let index = PointIndex::new(points, spread);
    let mut edges = Vec::with_capacity(n * k);
    let mut near: Vec<(f64, usize)> = Vec::new();
    for (i, &p) in points.iter().enumerate() {
        let mut radius = spread;
        loop {
            near.clear();
            index.for_each_within(p, radius, |j, d| {
                if j != i {
                    near.push((d, j));
                }
            });
            if near.len() >= k {
                break;
            }
            radius *= 2.0;
        }
        near.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        edges.extend(near.iter().take(k).map(|&(_, j)| (i.min(j), i.max(j))));
    }
    edges.sort_unstable();
    edges.dedup();
    edges
}

/// Greedy perfect matching: repeatedly join the closest free pair among
/// nearest-neighbour candidates, then sweep up leftovers. No approximation
/// guarantee.
pub fn greedy_perfect_matching(points: &[Point2]) -> Vec<(usize, usize)> {
    let n = points.len();
    assert!(n.is_multiple_of(2), "perfect matching needs an even vertex count");
    if n == 0 {
        return Vec::new();
    }
    const K: usize = 10;
    let spread = spread_radius(points);
    let index = PointIndex::new(points, spread);
    let mut candidates: Vec<(f64, usize, usize)> = Vec::with_capacity(n * K);
    for (i, &p) in points.iter().enumerate() {
        let mut near: Vec<(f64, usize)> = Vec::new();
        let mut radius = spread;
        while near.len() < K.min(n - 1) {
            near.clear();
            index.for_each_within(p, radius, |j, d| {
                if j != i {
                    near.push((d, j));
                }
            });
            radius *= 2.0;
        }
        near.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        for &(d, j) in near.iter().take(K) {
            if i < j {
                candidates.push((d, i, j));
            } else {
                candidates.push((d, j, i));
            }
        }
    }
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    candidates.dedup_by(|a, b| a.1 == b.1 && a.2 == b.2);

    let mut matched = vec![false; n];
    let mut pairs = Vec::with_capacity(n / 2);
    for (_, i, j) in candidates {
        if !matched[i] && !matched[j] {
            matched[i] = true;
            matched[j] = true;
            pairs.push((i, j));
        }
    }
    let mut rest: Vec<usize> = (0..n).filter(|&i| !matched[i]).collect();
    while let Some(i) = rest.pop() {
        let (pos, _) = rest
            .iter()
            .enumerate()
            .map(|(pos, &j)| (pos, distance(points[i], points[j])))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("even count leaves a partner");
        let j = rest.swap_remove(pos);
        pairs.push((i.min(j), i.max(j)));
    }
    pairs.sort_unstable();
    pairs
}

fn spread_radius(points: &[Point2]) -> f64 {
    let (mut lo, mut hi) = (points[0], points[0]);
    for p in points {
        lo.x = lo.x.min(p.x);
        lo.y = lo.y.min(p.y);
        hi.x = hi.x.max(p.x);
        hi.y = hi.y.max(p.y);
    }
    let area = ((hi.x - lo.x) * (hi.y - lo.y)).max(1e-12);
    (area / points.len() as f64).sqrt().max(1e-9)
}

struct Blossom<'a> {
    points: &'a [Point2],
    n: usize,
    offset: f64,
    edges: &'a [(usize, usize)],
    weights: Vec<f64>,
    endpoints: Vec<usize>,
    neighbends: Vec<Vec<usize>>,
    mate: Vec<usize>,
    label: Vec<i8>,
    labelend: Vec<usize>,
    inblossom: Vec<usize>,
    blossomparent: Vec<usize>,
    blossomchilds: Vec<Vec<usize>>,
    blossombase: Vec<usize>,
    blossomendps: Vec<Vec<usize>>,
    bestedge: Vec<usize>,
    blossombestedges: Vec<Option<Vec<usize>>>,
    unusedblossoms: Vec<usize>,
    dualvar: Vec<f64>,
    allowedge: Vec<bool>,
    queue: Vec<usize>,
}

impl<'a> Blossom<'a> {
    /// `edges` are `(i, j)` pairs; weights are `offset - d(i, j)`.
    fn new(points: &'a [Point2], edges: &'a [(usize, usize)], offset: f64) -> Self {
        let n = points.len();
        let weights: Vec<f64> = edges
            .iter()
            .map(|&(i, j)| offset - distance(points[i], points[j]))
            .collect();
        let maxweight = weights.iter().copied().fold(0.0, f64::max);
        let mut endpoints = Vec::with_capacity(2 * edges.len());
        let mut neighbends = vec![Vec::new(); n];
        for (k, &(i, j)) in edges.iter().enumerate() {
            endpoints.push(i);
            endpoints.push(j);
            neighbends[i].push(2 * k + 1);
            neighbends[j].push(2 * k);
        }
        Self {
            points,
            n,
            offset,
            edges,
            weights,
            endpoints,
            neighbends,
            mate: vec![NONE; n],
            label: vec![0; 2 * n],
            labelend: vec![NONE; 2 * n],
            inblossom: (0..n).collect(),
            blossomparent: vec![NONE; 2 * n],
            blossomchilds: vec![Vec::new(); 2 * n],
            blossombase: (0..n).chain(std::iter::repeat_n(NONE, n)).collect(),
            blossomendps: vec![Vec::new(); 2 * n],
            bestedge: vec![NONE; 2 * n],
            blossombestedges: vec![None; 2 * n],
            unusedblossoms: (n..2 * n).collect(),
            dualvar: std::iter::repeat_n(maxweight, n)
                .chain(std::iter::repeat_n(0.0, n))
                .collect(),
            allowedge: vec![false; edges.len()],
            queue: Vec::new(),
        }
    }

    #[inline]
    fn edge(&self, k: usize) -> (usize, usize) {
        self.edges[k]
    }

    #[inline]
    fn endpoint(&self, p: usize) -> usize {
        self.endpoints[p]
    }

    #[inline]
    fn slack(&self, k: usize) -> f64 {
        let (i, j) = self.edges[k];
        self.dualvar[i] + self.dualvar[j] - 2.0 * self.weights[k]
    }

    /// Complete-graph edges whose reduced cost under the final duals is
    /// negative. Empty means the matching is optimal on the complete graph.
    fn pricing_violations(&self) -> Vec<(usize, usize)> {
        let tol = 1e-9 * self.offset;
        let mut out = Vec::new();
        let mut ancestors_i = Vec::new();
        let mut ancestors_j = Vec::new();
        for j in 1..self.n {
            for i in 0..j {
                let w = self.offset - distance(self.points[i], self.points[j]);
                let mut s = self.dualvar[i] + self.dualvar[j] - 2.0 * w;
                if s >= -tol {
                    continue;
                }
                // blossom duals only ever raise the reduced cost
                self.ancestors(i, &mut ancestors_i);
                self.ancestors(j, &mut ancestors_j);
                for (bi, bj) in ancestors_i.iter().rev().zip(ancestors_j.iter().rev()) {
                    if bi != bj {
                        break;
                    }
                    s += 2.0 * self.dualvar[*bi];
                }
                if s < -tol {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Blossoms strictly containing `v`, innermost first.
    fn ancestors(&self, v: usize, out: &mut Vec<usize>) {
        out.clear();
        let mut b = self.blossomparent[v];
        while b != NONE {
            out.push(b);
            b = self.blossomparent[b];
        }
    }

    fn blossom_leaves(&self, b: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![b];
        while let Some(t) = stack.pop() {
            if t < self.n {
                out.push(t);
            } else {
                // reverse keeps the leaf order of the recursive definition
                stack.extend(self.blossomchilds[t].iter().rev());
            }
        }
        out
    }

    fn assign_label(&mut self, w: usize, t: i8, p: usize) {
        let mut w = w;
        let mut t = t;
        let mut p = p;
        loop {
            let b = self.inblossom[w];
            debug_assert!(self.label[w] == 0 && self.label[b] == 0);
            self.label[w] = t;
            self.label[b] = t;
            self.labelend[w] = p;
            self.labelend[b] = p;
            self.bestedge[w] = NONE;
            self.bestedge[b] = NONE;
            if t == 1 {
                let leaves = self.blossom_leaves(b);
                self.queue.extend(leaves);
                return;
            }
            // t == 2: the mate of the base gets an S label
            let base = self.blossombase[b];
            let mb = self.mate[base];
            debug_assert!(mb != NONE);
            w = self.endpoint(mb);
            t = 1;
            p = mb ^ 1;
        }
    }

    fn scan_blossom(&mut self, v: usize, w: usize) -> usize {
        let mut path = Vec::new();
        let mut base = NONE;
        let (mut v, mut w) = (v, w);
        while v != NONE || w != NONE {
            let mut b = self.inblossom[v];
            if self.label[b] & 4 != 0 {
                base = self.blossombase[b];
                break;
            }
            debug_assert_eq!(self.label[b], 1);
            path.push(b);
            self.label[b] = 5;
            if self.labelend[b] == NONE {
                v = NONE;
            } else {
                v = self.endpoint(self.labelend[b]);
                b = self.inblossom[v];
                debug_assert_eq!(self.label[b], 2);
                v = self.endpoint(self.labelend[b]);
            }
            if w != NONE {
                std::mem::swap(&mut v, &mut w);
            }
        }
        for b in path {
            self.label[b] = 1;
        }
        base
    }

    fn add_blossom(&mut self, base: usize, k: usize) {
        let (mut v, mut w) = self.edge(k);
        let bb = self.inblossom[base];
        let mut bv = self.inblossom[v];
        let mut bw = self.inblossom[w];
        let b = self.unusedblossoms.pop().expect("blossom slots available");
        self.blossombase[b] = base;
        self.blossomparent[b] = NONE;
        self.blossomparent[bb] = b;
        let mut path = Vec::new();
        let mut endps = Vec::new();
        while bv != bb {
            self.blossomparent[bv] = b;
            path.push(bv);
            endps.push(self.labelend[bv]);
            v = self.endpoint(self.labelend[bv]);
            bv = self.inblossom[v];
        }
        path.push(bb);
        path.reverse();
        endps.reverse();
        endps.push(2 * k);
        while bw != bb {
            self.blossomparent[bw] = b;
            path.push(bw);
            endps.push(self.labelend[bw] ^ 1);
            w = self.endpoint(self.labelend[bw]);
            bw = self.inblossom[w];
        }
        debug_assert_eq!(self.label[bb], 1);
        self.label[b] = 1;
        self.labelend[b] = self.labelend[bb];
        self.dualvar[b] = 0.0;
        self.blossomchilds[b] = path.clone();
        self.blossomendps[b] = endps;
        for leaf in self.blossom_leaves(b) {
            if self.label[self.inblossom[leaf]] == 2 {
                self.queue.push(leaf);
            }
            self.inblossom[leaf] = b;
        }

        let mut bestedgeto = vec![NONE; 2 * self.n];
        for &sub in &path {
            let lists: Vec<Vec<usize>> = match self.blossombestedges[sub].take() {
                Some(list) => vec![list],
                None => self
                    .blossom_leaves(sub)
                    .into_iter()
                    .map(|leaf| self.neighbends[leaf].iter().map(|p| p / 2).collect())
                    .collect(),
            };
            for list in lists {
                for kk in list {
                    let (mut i, mut j) = self.edge(kk);
                    if self.inblossom[j] == b {
                        std::mem::swap(&mut i, &mut j);
                    }
                    let _ = i;
                    let bj = self.inblossom[j];
                    if bj != b
                        && self.label[bj] == 1
                        && (bestedgeto[bj] == NONE || self.slack(kk) < self.slack(bestedgeto[bj]))
                    {
                        bestedgeto[bj] = kk;
                    }
                }
            }
            self.bestedge[sub] = NONE;
        }
        let best: Vec<usize> = bestedgeto.into_iter().filter(|&kk| kk != NONE).collect();
        self.bestedge[b] = NONE;
        for &kk in &best {
            if self.bestedge[b] == NONE || self.slack(kk) < self.slack(self.bestedge[b]) {
                self.bestedge[b] = kk;
            }
        }
        self.blossombestedges[b] = Some(best);
    }

    fn expand_blossom(&mut self, b: usize, endstage: bool) {
        let childs = self.blossomchilds[b].clone();
        for &s in &childs {
            self.blossomparent[s] = NONE;
            if s < self.n {
                self.inblossom[s] = s;
            } else if endstage && self.dualvar[s] == 0.0 {
                self.expand_blossom(s, endstage);
            } else {
                for leaf in self.blossom_leaves(s) {
                    self.inblossom[leaf] = s;
                }
            }
        }
        if !endstage && self.label[b] == 2 {
            let entrychild = self.inblossom[self.endpoint(self.labelend[b] ^ 1)];
            let len = childs.len() as isize;
            let mut j = childs
                .iter()
                .position(|&c| c == entrychild)
                .expect("entry child in blossom") as isize;
            let (jstep, endptrick): (isize, usize) = if j & 1 != 0 {
                j -= len;
                (1, 0)
            } else {
                (-1, 1)
            };
            let at = |j: isize| -> usize { j.rem_euclid(len) as usize };
            let endps = self.blossomendps[b].clone();
            let mut p = self.labelend[b];
            while j != 0 {
                let q = endps[at(j - endptrick as isize)];
                let e1 = self.endpoint(p ^ 1);
                self.label[e1] = 0;
                let e2 = self.endpoint(q ^ endptrick ^ 1);
                self.label[e2] = 0;
                self.assign_label(e1, 2, p);
                self.allowedge[q / 2] = true;
                j += jstep;
                p = endps[at(j - endptrick as isize)] ^ endptrick;
                self.allowedge[p / 2] = true;
                j += jstep;
            }
            let bv = childs[at(j)];
            let e = self.endpoint(p ^ 1);
            self.label[e] = 2;
            self.label[bv] = 2;
            self.labelend[e] = p;
            self.labelend[bv] = p;
            self.bestedge[bv] = NONE;
            j += jstep;
            while childs[at(j)] != entrychild {
                let bv = childs[at(j)];
                if self.label[bv] == 1 {
                    j += jstep;
                    continue;
                }
                let leaves = self.blossom_leaves(bv);
                let v = leaves
                    .iter()
                    .copied()
                    .find(|&v| self.label[v] != 0)
                    .unwrap_or(*leaves.last().expect("non-empty blossom"));
                if self.label[v] != 0 {
                    debug_assert_eq!(self.label[v], 2);
                    debug_assert_eq!(self.inblossom[v], bv);
                    self.label[v] = 0;
                    let m = self.endpoint(self.mate[self.blossombase[bv]]);
                    self.label[m] = 0;
                    let le = self.labelend[v];
                    self.assign_label(v, 2, le);
                }
                j += jstep;
            }
        }
        self.label[b] = -1;
        self.labelend[b] = NONE;
        self.blossomchilds[b].clear();
        self.blossomendps[b].clear();
        self.blossombase[b] = NONE;
        self.blossombestedges[b] = None;
        self.bestedge[b] = NONE;
        self.unusedblossoms.push(b);
    }

    fn augment_blossom(&mut self, b: usize, v: usize) {
        let mut t = v;
        while self.blossomparent[t] != b {
            t = self.blossomparent[t];
        }
        if t >= self.n {
            self.augment_blossom(t, v);
        }
        let childs = self.blossomchilds[b].clone();
        let endps = self.blossomendps[b].clone();
        let len = childs.len() as isize;
        let at = |j: isize| -> usize { j.rem_euclid(len) as usize };
        let i = childs.iter().position(|&c| c == t).expect("child in blossom");
        let mut j = i as isize;
        let (jstep, endptrick): (isize, usize) = if i & 1 != 0 {
            j -= len;
            (1, 0)
        } else {
            (-1, 1)
        };
        while j != 0 {
            j += jstep;
            let t1 = childs[at(j)];
            let p = endps[at(j - endptrick as isize)] ^ endptrick;
            if t1 >= self.n {
                let e = self.endpoint(p);
                self.augment_blossom(t1, e);
            }
            j += jstep;
            let t2 = childs[at(j)];
            if t2 >= self.n {
                let e = self.endpoint(p ^ 1);
                self.augment_blossom(t2, e);
            }
            let a = self.endpoint(p);
            let c = self.endpoint(p ^ 1);
            self.mate[a] = p ^ 1;
            self.mate[c] = p;
        }
        self.blossomchilds[b].rotate_left(i);
        self.blossomendps[b].rotate_left(i);
        self.blossombase[b] = self.blossombase[self.blossomchilds[b][0]];
        debug_assert_eq!(self.blossombase[b], v);
    }

    fn augment_matching(&mut self, k: usize) {
        let (v, w) = self.edge(k);
        for (s0, p0) in [(v, 2 * k + 1), (w, 2 * k)] {
            let (mut s, mut p) = (s0, p0);
            loop {
                let bs = self.inblossom[s];
                debug_assert_eq!(self.label[bs], 1);
                if bs >= self.n {
                    self.augment_blossom(bs, s);
                }
                self.mate[s] = p;
                if self.labelend[bs] == NONE {
                    break;
                }
                let t = self.endpoint(self.labelend[bs]);
                let bt = self.inblossom[t];
                debug_assert_eq!(self.label[bt], 2);
                s = self.endpoint(self.labelend[bt]);
                let j = self.endpoint(self.labelend[bt] ^ 1);
                debug_assert_eq!(self.blossombase[bt], t);
                if bt >= self.n {
                    self.augment_blossom(bt, j);
                }
                self.mate[j] = self.labelend[bt];
                p = self.labelend[bt] ^ 1;
            }
        }
    }

    fn solve(&mut self) {
        let n = self.n;
        for _stage in 0..n {
            self.label.fill(0);
            self.bestedge.fill(NONE);
            for b in n..2 * n {
                self.blossombestedges[b] = None;
            }
            self.allowedge.fill(false);
            self.queue.clear();
            for v in 0..n {
                if self.mate[v] == NONE && self.label[self.inblossom[v]] == 0 {
                    self.assign_label(v, 1, NONE);
                }
            }
            let mut augmented = false;
            loop {
                while let Some(v) = (!augmented).then(|| self.queue.pop()).flatten() {
                    debug_assert_eq!(self.label[self.inblossom[v]], 1);
                    for idx in 0..self.neighbends[v].len() {
                        let p = self.neighbends[v][idx];
                        let k = p / 2;
                        let w = self.endpoint(p);
                        if self.inblossom[v] == self.inblossom[w] {
                            continue;
                        }
                        let mut kslack = 0.0;
                        if !self.allowedge[k] {
                            kslack = self.slack(k);
                            if kslack <= 0.0 {
                                self.allowedge[k] = true;
                            }
                        }
                        if self.allowedge[k] {
                            let bw = self.inblossom[w];
                            if self.label[bw] == 0 {
                                self.assign_label(w, 2, p ^ 1);
                            } else if self.label[bw] == 1 {
                                let base = self.scan_blossom(v, w);
                                if base != NONE {
                                    self.add_blossom(base, k);
                                } else {
                                    self.augment_matching(k);
                                    augmented = true;
                                    break;
                                }
                            } else if self.label[w] == 0 {
                                self.label[w] = 2;
                                self.labelend[w] = p ^ 1;
                            }
                        } else if self.label[self.inblossom[w]] == 1 {
                            let b = self.inblossom[v];
                            if self.bestedge[b] == NONE || kslack < self.slack(self.bestedge[b]) {
                                self.bestedge[b] = k;
                            }
                        } else if self.label[w] == 0
                            && (self.bestedge[w] == NONE || kslack < self.slack(self.bestedge[w]))
                        {
                            self.bestedge[w] = k;
                        }
                    }
                }
                if augmented {
                    break;
                }

                // maximum-cardinality mode: no type-1 delta while improvements remain
                let mut deltatype = 0u8;
                let mut delta = 0.0;
                let mut deltaedge = NONE;
                let mut deltablossom = NONE;
                for v in 0..n {
                    if self.label[self.inblossom[v]] == 0 && self.bestedge[v] != NONE {
                        let d = self.slack(self.bestedge[v]);
                        if deltatype == 0 || d < delta {
                            delta = d;
                            deltatype = 2;
                            deltaedge = self.bestedge[v];
                        }
                    }
                }
                for b in 0..2 * n {
                    if self.blossomparent[b] == NONE && self.label[b] == 1 && self.bestedge[b] != NONE {
                        let d = self.slack(self.bestedge[b]) / 2.0;
                        if deltatype == 0 || d < delta {
                            delta = d;
                            deltatype = 3;
                            deltaedge = self.bestedge[b];
                        }
                    }
                }
                for b in n..2 * n {
                    if self.blossombase[b] != NONE
                        && self.blossomparent[b] == NONE
                        && self.label[b] == 2
                        && (deltatype == 0 || self.dualvar[b] < delta)
                    {
                        delta = self.dualvar[b];
                        deltatype = 4;
                        deltablossom = b;
                    }
                }
                if deltatype == 0 {
                    deltatype = 1;
                    delta = self.dualvar[..n].iter().copied().fold(f64::INFINITY, f64::min).max(0.0);
                }
                for v in 0..n {
                    match self.label[self.inblossom[v]] {
                        1 => self.dualvar[v] -= delta,
                        2 => self.dualvar[v] += delta,
                        _ => {}
                    }
                }
                for b in n..2 * n {
                    if self.blossombase[b] != NONE && self.blossomparent[b] == NONE {
                        match self.label[b] {
                            1 => self.dualvar[b] += delta,
                            2 => self.dualvar[b] -= delta,
                            _ => {}
                        }
                    }
                }
                match deltatype {
                    1 => break,
                    2 => {
                        self.allowedge[deltaedge] = true;
                        let (mut i, j) = self.edge(deltaedge);
                        if self.label[self.inblossom[i]] == 0 {
                            i = j;
                        }
                        debug_assert_eq!(self.label[self.inblossom[i]], 1);
                        self.queue.push(i);
                    }
                    3 => {
                        self.allowedge[deltaedge] = true;
                        let (i, _) = self.edge(deltaedge);
                        debug_assert_eq!(self.label[self.inblossom[i]], 1);
                        self.queue.push(i);
                    }
                    _ => self.expand_blossom(deltablossom, false),
                }
            }
            if !augmented {
                break;
            }
            for b in n..2 * n {
                if self.blossomparent[b] == NONE
                    && self.blossombase[b] != NONE
                    && self.label[b] == 1
                    && self.dualvar[b] == 0.0
                {
                    self.expand_blossom(b, true);
                }
            }
        }
    }
}
