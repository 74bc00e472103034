//! Weighted dual graphs of curve configurations and their blow-up calculus.
//!
//! Vertices are smooth rational curves weighted by self-intersection; an edge
//! of multiplicity m records m transversal intersection points. A nodal curve
//! is modelled by its proper transform after blowing up the node, which shows
//! up as a cycle through the curve.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{SparseSym, SymMatrix};
use crate::scalar::{Field, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("vertex index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("duplicate vertex id `{0}`")]
    DuplicateId(String),
    #[error("self-loop on `{0}`")]
    SelfLoop(String),
    #[error("more than one curve-C vertex (`{0}`)")]
    MultipleCurveC(String),
    #[error("candidate label {0} used twice")]
    DuplicateLabel(u32),
    #[error("candidate label must be positive (vertex `{0}`)")]
    ZeroLabel(String),
    #[error("vertex `{0}` carries a pool tag but is not a candidate")]
    PoolOnNonCandidate(String),
    #[error("no edge between `{0}` and `{1}`")]
    MissingEdge(String, String),
    #[error("cannot blow down `{id}`: {reason}")]
    BlowDown { id: String, reason: String },
    #[error("empty vertex subset")]
    EmptySubset,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pool {
    T1,
    T2,
    T3,
}

impl Pool {
    pub const ALL: [Pool; 3] = [Pool::T1, Pool::T2, Pool::T3];

    pub fn index(self) -> usize {
        match self {
            Pool::T1 => 0,
            Pool::T2 => 1,
            Pool::T3 => 2,
        }
    }
}

impl fmt::Display for Pool {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "T{}", self.index() + 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VertexKind {
    /// The boundary curve C (proper transform).
    CurveC,
    Exceptional,
    /// A discrepancy-0 curve available for extraction, with its figure label.
    Candidate(u32),
    /// A non-exceptional (-1)-curve kept only for consistency equations.
    Witness,
}

impl VertexKind {
    /// Kind with the candidate label erased; morphisms may permute labels.
    pub fn class(self) -> u8 {
        match self {
            VertexKind::CurveC => 0,
            VertexKind::Exceptional => 1,
            VertexKind::Candidate(_) => 2,
            VertexKind::Witness => 3,
        }
    }

    pub fn label(self) -> Option<u32> {
        match self {
            VertexKind::Candidate(l) => Some(l),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveVertex {
    pub id: String,
    pub weight: i64,
    pub kind: VertexKind,
    pub pool: Option<Pool>,
}

impl CurveVertex {
    pub fn new(id: impl Into<String>, weight: i64, kind: VertexKind) -> Self {
        CurveVertex {
            id: id.into(),
            weight,
            kind,
            pool: None,
        }
    }

    pub fn with_pool(mut self, pool: Pool) -> Self {
        self.pool = Some(pool);
        self
    }
}

/// Vertices in insertion order plus an edge multiset keyed by `(i, j)`, `i < j`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct WeightedCurveGraph {
    vertices: Vec<CurveVertex>,
    edges: BTreeMap<(usize, usize), u32>,
    index: HashMap<String, usize>,
}

fn key(i: usize, j: usize) -> (usize, usize) {
    if i < j {
        (i, j)
    } else {
        (j, i)
    }
}

impl WeightedCurveGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, v: CurveVertex) -> Result<usize, GraphError> {
        if self.index.contains_key(&v.id) {
            return Err(GraphError::DuplicateId(v.id));
        }
        match v.kind {
            VertexKind::CurveC if self.curve_c().is_some() => {
                return Err(GraphError::MultipleCurveC(v.id));
            }
            VertexKind::Candidate(0) => return Err(GraphError::ZeroLabel(v.id)),
            VertexKind::Candidate(l) if self.candidate(l).is_some() => {
                return Err(GraphError::DuplicateLabel(l));
            }
            VertexKind::Candidate(_) => {}
            _ if v.pool.is_some() => return Err(GraphError::PoolOnNonCandidate(v.id)),
            _ => {}
        }
        let i = self.vertices.len();
        self.index.insert(v.id.clone(), i);
        self.vertices.push(v);
        Ok(i)
    }

    /// Adds one intersection point between `i` and `j`.
    pub fn add_edge(&mut self, i: usize, j: usize) -> Result<(), GraphError> {
        self.check(i)?;
        self.check(j)?;
        if i == j {
            return Err(GraphError::SelfLoop(self.vertices[i].id.clone()));
        }
        *self.edges.entry(key(i, j)).or_insert(0) += 1;
        Ok(())
    }

    pub fn add_edge_by_id(&mut self, a: &str, b: &str) -> Result<(), GraphError> {
        let i = self.require(a)?;
        let j = self.require(b)?;
        self.add_edge(i, j)
    }

    fn check(&self, i: usize) -> Result<(), GraphError> {
        if i < self.vertices.len() {
            Ok(())
        } else {
            Err(GraphError::IndexOutOfRange(i))
        }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[CurveVertex] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> &CurveVertex {
        &self.vertices[i]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn require(&self, id: &str) -> Result<usize, GraphError> {
        self.index_of(id)
            .ok_or_else(|| GraphError::UnknownVertex(id.to_string()))
    }

    pub fn resolve_ids<S: AsRef<str>>(&self, ids: &[S]) -> Result<Vec<usize>, GraphError> {
        ids.iter().map(|s| self.require(s.as_ref())).collect()
    }

    pub fn all_vertices(&self) -> Vec<usize> {
        (0..self.vertices.len()).collect()
    }

    /// Edges as `((i, j), multiplicity)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = ((usize, usize), u32)> + '_ {
        self.edges.iter().map(|(&k, &m)| (k, m))
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn multiplicity(&self, i: usize, j: usize) -> u32 {
        self.edges.get(&key(i, j)).copied().unwrap_or(0)
    }

    pub fn neighbors(&self, i: usize) -> Vec<(usize, u32)> {
        self.edges
            .iter()
            .filter_map(|(&(a, b), &m)| {
                if a == i {
                    Some((b, m))
                } else if b == i {
                    Some((a, m))
                } else {
                    None
                }
            })
            .collect()
    }

    pub fn degree(&self, i: usize) -> u32 {
        self.neighbors(i).iter().map(|&(_, m)| m).sum()
    }

    pub fn curve_c(&self) -> Option<usize> {
        self.vertices
            .iter()
            .position(|v| v.kind == VertexKind::CurveC)
    }

    pub fn candidate(&self, label: u32) -> Option<usize> {
        self.vertices
            .iter()
            .position(|v| v.kind == VertexKind::Candidate(label))
    }

    /// Candidate `(label, index)` pairs sorted by label.
    pub fn candidates(&self) -> Vec<(u32, usize)> {
        let mut out: Vec<(u32, usize)> = self
            .vertices
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.kind.label().map(|l| (l, i)))
            .collect();
        out.sort_unstable();
        out
    }

    pub fn set_kind(&mut self, i: usize, kind: VertexKind) -> Result<(), GraphError> {
        self.check(i)?;
        if let VertexKind::Candidate(l) = kind {
            if let Some(j) = self.candidate(l) {
                if j != i {
                    return Err(GraphError::DuplicateLabel(l));
                }
            }
        }
        self.vertices[i].kind = kind;
        if kind.label().is_none() {
            self.vertices[i].pool = None;
        }
        Ok(())
    }

    pub fn set_weight(&mut self, i: usize, weight: i64) {
        self.vertices[i].weight = weight;
    }

    /// Intersection matrix over `subset`, rows in insertion order.
    pub fn intersection_matrix<T: Scalar>(
        &self,
        subset: &[usize],
    ) -> Result<SymMatrix<T>, GraphError> {
        if subset.is_empty() {
            return Err(GraphError::EmptySubset);
        }
        let order = self.ordered(subset)?;
        let mut m = SymMatrix::zeros(order.len());
        for (a, &i) in order.iter().enumerate() {
            m.set(a, a, T::from_i64(self.vertices[i].weight));
            for (b, &j) in order.iter().enumerate().skip(a + 1) {
                let mult = self.multiplicity(i, j);
                if mult > 0 {
                    m.set(a, b, T::from_i64(mult as i64));
                }
            }
        }
        Ok(m)
    }

    /// Sparse intersection form on `subset` (deduplicated, insertion order).
    pub fn sparse_form<T: Field>(&self, subset: &[usize]) -> Result<SparseSym<T>, GraphError> {
        let order = self.ordered(subset)?;
        let mut local = HashMap::with_capacity(order.len());
        for (k, &i) in order.iter().enumerate() {
            local.insert(i, k);
        }
        let mut m = SparseSym::new(
            order
                .iter()
                .map(|&i| T::from_i64(self.vertices[i].weight))
                .collect(),
        );
        for (&(a, b), &mult) in &self.edges {
            if let (Some(&x), Some(&y)) = (local.get(&a), local.get(&b)) {
                m.add(x, y, T::from_i64(mult as i64));
            }
        }
        Ok(m)
    }

    /// Deduplicated subset sorted into insertion order.
    pub fn ordered(&self, subset: &[usize]) -> Result<Vec<usize>, GraphError> {
        let set: BTreeSet<usize> = subset.iter().copied().collect();
        for &i in &set {
            self.check(i)?;
        }
        Ok(set.into_iter().collect())
    }

    /// Partition of `subset` into edge-connected classes, each sorted, ordered
    /// by smallest member.
    pub fn connected_components(&self, subset: &[usize]) -> Vec<Vec<usize>> {
        let inside: BTreeSet<usize> = subset
            .iter()
            .copied()
            .filter(|&i| i < self.vertices.len())
            .collect();
        let mut adj: BTreeMap<usize, Vec<usize>> = inside.iter().map(|&i| (i, vec![])).collect();
        for &(a, b) in self.edges.keys() {
            if inside.contains(&a) && inside.contains(&b) {
                adj.get_mut(&a).unwrap().push(b);
                adj.get_mut(&b).unwrap().push(a);
            }
        }
        let mut seen = BTreeSet::new();
        let mut comps = Vec::new();
        for &start in &inside {
            if !seen.insert(start) {
                continue;
            }
            let mut comp = vec![start];
            let mut stack = vec![start];
            while let Some(v) = stack.pop() {
                for &u in &adj[&v] {
                    if seen.insert(u) {
                        comp.push(u);
                        stack.push(u);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    }

    fn fresh_id(&self, base: &str) -> String {
        if !self.index.contains_key(base) {
            return base.to_string();
        }
        (1..)
            .map(|n| format!("{base}'{n}"))
            .find(|c| !self.index.contains_key(c))
            .unwrap()
    }

    /// Blows up one intersection point of the edge `(i, j)`.
    ///
    /// Returns the new graph and the index of the new (-1)-curve, which is
    /// appended as an exceptional vertex.
    pub fn blow_up_edge(&self, i: usize, j: usize) -> Result<(Self, usize), GraphError> {
        self.check(i)?;
        self.check(j)?;
        let mult = self.multiplicity(i, j);
        if mult == 0 || i == j {
            return Err(GraphError::MissingEdge(
                self.vertices[i].id.clone(),
                self.vertices[j].id.clone(),
            ));
        }
        let mut g = self.clone();
        let (a, b) = key(i, j);
        if mult == 1 {
            g.edges.remove(&(a, b));
        } else {
            g.edges.insert((a, b), mult - 1);
        }
        g.vertices[i].weight -= 1;
        g.vertices[j].weight -= 1;
        let id = g.fresh_id(&format!("{}*{}", self.vertices[a].id, self.vertices[b].id));
        let n = g.add_vertex(CurveVertex::new(id, -1, VertexKind::Exceptional))?;
        g.add_edge(i, n)?;
        g.add_edge(j, n)?;
        Ok((g, n))
    }

    /// Contracts the (-1)-curve `v`. Vertices after `v` shift down by one.
    pub fn blow_down(&self, v: usize) -> Result<Self, GraphError> {
        self.check(v)?;
        let vert = &self.vertices[v];
        let fail = |reason: &str| GraphError::BlowDown {
            id: vert.id.clone(),
            reason: reason.to_string(),
        };
        if vert.weight != -1 {
            return Err(fail(&format!("weight is {}, not -1", vert.weight)));
        }
        let nbrs = self.neighbors(v);
        if nbrs.len() > 2 {
            return Err(fail(&format!("{} neighbours", nbrs.len())));
        }
        if nbrs.iter().any(|&(_, m)| m > 1) {
            return Err(fail("meets a neighbour more than once"));
        }

        let remap = |i: usize| if i > v { i - 1 } else { i };
        let mut g = WeightedCurveGraph::new();
        for (i, vx) in self.vertices.iter().enumerate() {
            if i == v {
                continue;
            }
            let mut vx = vx.clone();
            if nbrs.iter().any(|&(n, _)| n == i) {
                vx.weight += 1;
            }
            g.index.insert(vx.id.clone(), g.vertices.len());
            g.vertices.push(vx);
        }
        for (&(a, b), &m) in &self.edges {
            if a != v && b != v {
                g.edges.insert((remap(a), remap(b)), m);
            }
        }
        if let [(x, _), (y, _)] = nbrs[..] {
            *g.edges.entry(key(remap(x), remap(y))).or_insert(0) += 1;
        }
        Ok(g)
    }

    /// Subgraph on `keep`, in insertion order.
    pub fn induced(&self, keep: &[usize]) -> Result<Self, GraphError> {
        let keep = self.ordered(keep)?;
        let mut new_index = vec![usize::MAX; self.len()];
        let mut g = WeightedCurveGraph::new();
        for (k, &old) in keep.iter().enumerate() {
            new_index[old] = k;
            let v = self.vertices[old].clone();
            g.index.insert(v.id.clone(), k);
            g.vertices.push(v);
        }
        for (&(a, b), &m) in &self.edges {
            if new_index[a] != usize::MAX && new_index[b] != usize::MAX {
                g.edges.insert((new_index[a], new_index[b]), m);
            }
        }
        Ok(g)
    }

    /// Copy with vertices reordered so that new index `k` holds old vertex
    /// `order[k]`.
    pub fn reordered(&self, order: &[usize]) -> Result<Self, GraphError> {
        let mut inverse = vec![usize::MAX; self.len()];
        for (k, &old) in order.iter().enumerate() {
            self.check(old)?;
            inverse[old] = k;
        }
        if order.len() != self.len() || inverse.contains(&usize::MAX) {
            return Err(GraphError::IndexOutOfRange(order.len()));
        }
        let mut g = WeightedCurveGraph::new();
        for &old in order {
            let v = self.vertices[old].clone();
            g.index.insert(v.id.clone(), g.vertices.len());
            g.vertices.push(v);
        }
        for (&(a, b), &m) in &self.edges {
            g.edges.insert(key(inverse[a], inverse[b]), m);
        }
        Ok(g)
    }
}
