//! Automorphisms and isomorphisms of weighted curve graphs.
//!
//! Backtracking over colour classes obtained by iterated neighbourhood
//! refinement. Colours start from (kind class, weight); candidate labels are
//! deliberately ignored so that morphisms may permute them.

use std::collections::{BTreeMap, BTreeSet};

use crate::graph::WeightedCurveGraph;

/// Upper bound on graph size accepted by the search.
pub const MAX_SEARCH_VERTICES: usize = 64;

/// A vertex bijection `source index -> target index`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GraphMorphism {
    map: Vec<usize>,
}

impl GraphMorphism {
    pub fn identity(n: usize) -> Self {
        GraphMorphism {
            map: (0..n).collect(),
        }
    }

    pub fn from_map(map: Vec<usize>) -> Self {
        GraphMorphism { map }
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn apply(&self, i: usize) -> usize {
        self.map[i]
    }

    pub fn apply_set(&self, set: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = set.iter().map(|&i| self.map[i]).collect();
        out.sort_unstable();
        out
    }

    /// `self` after `other`: i ↦ self(other(i)).
    pub fn compose(&self, other: &GraphMorphism) -> GraphMorphism {
        GraphMorphism {
            map: other.map.iter().map(|&i| self.map[i]).collect(),
        }
    }

    pub fn inverse(&self) -> GraphMorphism {
        let mut inv = vec![0; self.map.len()];
        for (i, &j) in self.map.iter().enumerate() {
            inv[j] = i;
        }
        GraphMorphism { map: inv }
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// Candidate label permutation induced on `g` (an automorphism of `g`).
    pub fn label_map(&self, g: &WeightedCurveGraph) -> BTreeMap<u32, u32> {
        g.candidates()
            .into_iter()
            .filter_map(|(l, i)| g.vertex(self.map[i]).kind.label().map(|m| (l, m)))
            .collect()
    }

    /// Checks that this is a weight/kind/edge preserving bijection `g -> h`.
    pub fn is_valid(&self, g: &WeightedCurveGraph, h: &WeightedCurveGraph) -> bool {
        if self.map.len() != g.len() || g.len() != h.len() {
            return false;
        }
        let image: BTreeSet<usize> = self.map.iter().copied().collect();
        if image.len() != g.len() || image.iter().any(|&j| j >= h.len()) {
            return false;
        }
        for i in 0..g.len() {
            let (a, b) = (g.vertex(i), h.vertex(self.map[i]));
            if a.weight != b.weight || a.kind.class() != b.kind.class() {
                return false;
            }
        }
        g.edge_count() == h.edge_count()
            && g.edges()
                .all(|((i, j), m)| h.multiplicity(self.map[i], self.map[j]) == m)
    }
}

fn refine(g: &WeightedCurveGraph, initial: Vec<u64>) -> Vec<u64> {
    // Colours are re-indexed through a shared table so that two graphs refined
    // jointly stay comparable.
    let mut colors = initial;
    loop {
        let sigs: Vec<(u64, Vec<(u64, u32)>)> = (0..g.len())
            .map(|i| {
                let mut n: Vec<(u64, u32)> = g
                    .neighbors(i)
                    .into_iter()
                    .map(|(j, m)| (colors[j], m))
                    .collect();
                n.sort_unstable();
                (colors[i], n)
            })
            .collect();
        let table: BTreeSet<&(u64, Vec<(u64, u32)>)> = sigs.iter().collect();
        let table: Vec<_> = table.into_iter().collect();
        let next: Vec<u64> = sigs
            .iter()
            .map(|s| table.binary_search(&s).unwrap() as u64)
            .collect();
        let classes = |c: &[u64]| c.iter().collect::<BTreeSet<_>>().len();
        if classes(&next) == classes(&colors) {
            return next;
        }
        colors = next;
    }
}

fn base_colors(g: &WeightedCurveGraph, h: &WeightedCurveGraph) -> (Vec<u64>, Vec<u64>) {
    let mut table: BTreeMap<(u8, i64), u64> = BTreeMap::new();
    for v in g.vertices().iter().chain(h.vertices()) {
        let n = table.len() as u64;
        table.entry((v.kind.class(), v.weight)).or_insert(n);
    }
    let color = |x: &WeightedCurveGraph| -> Vec<u64> {
        x.vertices()
            .iter()
            .map(|v| table[&(v.kind.class(), v.weight)])
            .collect()
    };
    (color(g), color(h))
}

/// Refines both graphs as one disjoint union so colours are comparable.
fn joint_colors(g: &WeightedCurveGraph, h: &WeightedCurveGraph) -> (Vec<u64>, Vec<u64>) {
    let (cg, ch) = base_colors(g, h);
    let mut union = g.clone();
    let offset = g.len();
    for (i, v) in h.vertices().iter().enumerate() {
        let mut v = v.clone();
        // Colours come from `init`, so the copy only needs a valid structure.
        v.id = format!("\u{0}h{i}");
        v.kind = crate::graph::VertexKind::Exceptional;
        v.pool = None;
        union
            .add_vertex(v)
            .expect("union vertex ids and labels are fresh");
    }
    for ((i, j), m) in h.edges() {
        for _ in 0..m {
            union.add_edge(i + offset, j + offset).unwrap();
        }
    }
    let mut init = cg;
    init.extend(ch);
    let refined = refine(&union, init);
    (refined[..offset].to_vec(), refined[offset..].to_vec())
}

struct Search<'a> {
    g: &'a WeightedCurveGraph,
    h: &'a WeightedCurveGraph,
    cg: Vec<u64>,
    ch: Vec<u64>,
    order: Vec<usize>,
    map: Vec<Option<usize>>,
    used: Vec<bool>,
    found: Vec<GraphMorphism>,
    limit: usize,
}

impl Search<'_> {
    fn consistent(&self, i: usize, j: usize) -> bool {
        if self.cg[i] != self.ch[j] {
            return false;
        }
        self.g.neighbors(i).len() == self.h.neighbors(j).len()
            && self.order.iter().all(|&k| match self.map[k] {
                Some(mk) => self.g.multiplicity(i, k) == self.h.multiplicity(j, mk),
                None => true,
            })
    }

    fn run(&mut self, depth: usize) {
        if self.found.len() >= self.limit {
            return;
        }
        if depth == self.order.len() {
            let map = self.map.iter().map(|m| m.unwrap()).collect();
            self.found.push(GraphMorphism { map });
            return;
        }
        let i = self.order[depth];
        for j in 0..self.h.len() {
            if self.used[j] || !self.consistent(i, j) {
                continue;
            }
            self.map[i] = Some(j);
            self.used[j] = true;
            self.run(depth + 1);
            self.map[i] = None;
            self.used[j] = false;
            if self.found.len() >= self.limit {
                return;
            }
        }
    }
}

/// Visit order: breadth-first from the curve-C vertex (or vertex 0), then any
/// remaining components, so each new vertex tends to have a mapped neighbour.
fn search_order(g: &WeightedCurveGraph) -> Vec<usize> {
    let mut order = Vec::with_capacity(g.len());
    let mut seen = vec![false; g.len()];
    let starts = g.curve_c().into_iter().chain(0..g.len());
    for s in starts {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for (u, _) in g.neighbors(v) {
                if !seen[u] {
                    seen[u] = true;
                    queue.push_back(u);
                }
            }
        }
    }
    order
}

fn search(g: &WeightedCurveGraph, h: &WeightedCurveGraph, limit: usize) -> Vec<GraphMorphism> {
    if g.len() != h.len() || g.edge_count() != h.edge_count() {
        return vec![];
    }
    assert!(
        g.len() <= MAX_SEARCH_VERTICES,
        "morphism search supports at most {MAX_SEARCH_VERTICES} vertices"
    );
    let (cg, ch) = joint_colors(g, h);
    let mut a = cg.clone();
    let mut b = ch.clone();
    a.sort_unstable();
    b.sort_unstable();
    if a != b {
        return vec![];
    }
    let mut s = Search {
        g,
        h,
        cg,
        ch,
        order: search_order(g),
        map: vec![None; g.len()],
        used: vec![false; h.len()],
        found: vec![],
        limit,
    };
    s.run(0);
    s.found
}

/// All weight/kind/edge-preserving self-bijections; the curve-C vertex is
/// fixed automatically since it is the only vertex of its kind.
pub fn automorphisms(g: &WeightedCurveGraph) -> Vec<GraphMorphism> {
    let mut all = search(g, g, usize::MAX);
    all.sort();
    all
}

pub fn is_isomorphic(g: &WeightedCurveGraph, h: &WeightedCurveGraph) -> Option<GraphMorphism> {
    search(g, h, 1).into_iter().next()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{CurveVertex, VertexKind};

    fn chain(weights: &[i64], prefix: &str) -> WeightedCurveGraph {
        let mut g = WeightedCurveGraph::new();
        for (i, &w) in weights.iter().enumerate() {
            g.add_vertex(CurveVertex::new(
                format!("{prefix}{i}"),
                w,
                VertexKind::Exceptional,
            ))
            .unwrap();
            if i > 0 {
                g.add_edge(i - 1, i).unwrap();
            }
        }
        g
    }

    #[test]
    fn palindrome_with_c_on_middle() {
        let mut g = chain(&[-2, -3, -2], "e");
        let c = g
            .add_vertex(CurveVertex::new("c", -5, VertexKind::CurveC))
            .unwrap();
        g.add_edge(1, c).unwrap();
        let auts = automorphisms(&g);
        assert_eq!(auts.len(), 2);
        assert!(auts[0].is_identity());
        assert_eq!(auts[1].map(), &[2, 1, 0, 3]);
    }

    #[test]
    fn asymmetric_chain() {
        let auts = automorphisms(&chain(&[-2, -3], "e"));
        assert_eq!(auts, vec![GraphMorphism::identity(2)]);
    }

    #[test]
    fn isomorphism_examples() {
        let g = chain(&[-2, -3], "a");
        let rev = chain(&[-3, -2], "b");
        let m = is_isomorphic(&g, &rev).unwrap();
        assert_eq!(m.map(), &[1, 0]);
        assert!(m.is_valid(&g, &rev));
        assert!(is_isomorphic(&g, &chain(&[-2, -4], "b")).is_none());

        let shuffled = g.reordered(&[1, 0]).unwrap();
        assert!(is_isomorphic(&g, &shuffled).is_some());
    }

    #[test]
    fn group_laws_on_triangle() {
        let mut g = chain(&[-2, -2, -2], "e");
        g.add_edge(0, 2).unwrap();
        let auts = automorphisms(&g);
        assert_eq!(auts.len(), 6);
        for a in &auts {
            assert!(auts.contains(&a.inverse()));
            for b in &auts {
                assert!(auts.contains(&a.compose(b)));
            }
        }
    }

    #[test]
    fn kinds_must_match() {
        let mut g = chain(&[-1, -1], "e");
        g.set_kind(0, VertexKind::Candidate(1)).unwrap();
        assert_eq!(automorphisms(&g).len(), 1);
    }
}
