//! Base digraphs and the constructions built on top of them.
//!
//! A [`DiGraph`] is the simple directed base graph. Vertex and edge order is
//! significant: it fixes the canonical edge layout of the derived
//! [`BunkbedGraph`].

mod bunkbed;
pub mod text;

pub use bunkbed::{
    bunkbed, mirror_subgraph, posts, BunkbedEdge, BunkbedGraph, BunkbedVertex, Layer, MirrorMap, ShadowEdgeSet,
    SubgraphMask,
};

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;

use crate::error::GraphError;

/// Label of a base vertex, e.g. `1`, `2a` or `2_3`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexId(String);

impl VertexId {
    /// Labels are non-empty and use only ASCII letters, digits, `_` and `.`,
    /// so they can appear unquoted in graph files and event expressions.
    pub fn new(label: impl Into<String>) -> Result<Self, GraphError> {
        let label = label.into();
        let ok = !label.is_empty() && label.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.');
        if ok {
            Ok(VertexId(label))
        } else {
            Err(GraphError::InvalidLabel(label))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A simple directed graph with ordered, labelled vertices and ordered edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiGraph {
    vertices: Vec<VertexId>,
    edges: Vec<(usize, usize)>,
    index: HashMap<VertexId, usize>,
    out_edges: Vec<Vec<usize>>,
    in_edges: Vec<Vec<usize>>,
}

/// Validates and builds a [`DiGraph`]. Declaration order is kept.
pub fn build_digraph<V, E, A, B>(vertices: V, edges: E) -> Result<DiGraph, GraphError>
where
    V: IntoIterator,
    V::Item: AsRef<str>,
    E: IntoIterator<Item = (A, B)>,
    A: AsRef<str>,
    B: AsRef<str>,
{
    let mut ids = Vec::new();
    let mut index = HashMap::new();
    for v in vertices {
        let id = VertexId::new(v.as_ref())?;
        if index.insert(id.clone(), ids.len()).is_some() {
            return Err(GraphError::DuplicateVertex(id.0));
        }
        ids.push(id);
    }
    let lookup = |label: &str| {
        VertexId::new(label)
            .ok()
            .and_then(|id| index.get(&id).copied())
            .ok_or_else(|| GraphError::UnknownEndpoint(label.to_string()))
    };
    let mut pairs = Vec::new();
    let mut seen = HashSet::new();
    for (a, b) in edges {
        let (a, b) = (a.as_ref(), b.as_ref());
        let (u, v) = (lookup(a)?, lookup(b)?);
        if u == v {
            return Err(GraphError::SelfLoop(a.to_string()));
        }
        if !seen.insert((u, v)) {
            return Err(GraphError::DuplicateEdge(a.to_string(), b.to_string()));
        }
        pairs.push((u, v));
    }
    Ok(DiGraph::from_parts(ids, pairs))
}

impl DiGraph {
    fn from_parts(vertices: Vec<VertexId>, edges: Vec<(usize, usize)>) -> Self {
        let index = vertices.iter().enumerate().map(|(i, v)| (v.clone(), i)).collect();
        let n = vertices.len();
        let mut out_edges = vec![Vec::new(); n];
        let mut in_edges = vec![Vec::new(); n];
        for (e, &(u, v)) in edges.iter().enumerate() {
            out_edges[u].push(e);
            in_edges[v].push(e);
        }
        DiGraph {
            vertices,
            edges,
            index,
            out_edges,
            in_edges,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    /// Edges as `(tail, head)` vertex indices, in declaration order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn label(&self, v: usize) -> &VertexId {
        &self.vertices[v]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        VertexId::new(label).ok().and_then(|id| self.index.get(&id).copied())
    }

    pub(crate) fn require(&self, label: &str) -> Result<usize, GraphError> {
        self.index_of(label)
            .ok_or_else(|| GraphError::UnknownVertex(label.to_string()))
    }

    /// Index of the directed edge `tail -> head`, if present.
    pub fn edge_index(&self, tail: usize, head: usize) -> Option<usize> {
        self.out_edges[tail].iter().copied().find(|&e| self.edges[e].1 == head)
    }

    /// Index of the edge between two labelled vertices.
    pub fn edge_by_labels(&self, tail: &str, head: &str) -> Result<usize, GraphError> {
        let (u, v) = (self.require(tail)?, self.require(head)?);
        self.edge_index(u, v)
            .ok_or_else(|| GraphError::UnknownEndpoint(format!("{tail}->{head}")))
    }

    pub fn out_edges(&self, v: usize) -> &[usize] {
        &self.out_edges[v]
    }

    pub fn in_edges(&self, v: usize) -> &[usize] {
        &self.in_edges[v]
    }

    /// Topological order preferring the lowest declared index among the ready
    /// vertices, or `None` if the graph has a directed cycle.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let n = self.vertex_count();
        let mut indegree: Vec<usize> = (0..n).map(|v| self.in_edges[v].len()).collect();
        let mut ready: BTreeSet<usize> = (0..n).filter(|&v| indegree[v] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = ready.pop_first() {
            order.push(v);
            for &e in &self.out_edges[v] {
                let w = self.edges[e].1;
                indegree[w] -= 1;
                if indegree[w] == 0 {
                    ready.insert(w);
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    pub fn is_acyclic(&self) -> bool {
        self.topological_order().is_some()
    }

    /// Same vertex set and same directed edge set, ignoring declaration order.
    pub fn same_structure(&self, other: &DiGraph) -> bool {
        let labels = |g: &DiGraph| g.vertices.iter().cloned().collect::<BTreeSet<_>>();
        let arcs = |g: &DiGraph| {
            g.edges
                .iter()
                .map(|&(u, v)| (g.label(u).clone(), g.label(v).clone()))
                .collect::<BTreeSet<_>>()
        };
        labels(self) == labels(other) && arcs(self) == arcs(other)
    }

    /// Reverses every arrow and renames vertices through `relabel`.
    ///
    /// Vertex order is kept positionally; edge `u -> v` becomes
    /// `relabel(v) -> relabel(u)` in the same slot.
    pub fn reverse_and_relabel(&self, relabel: &HashMap<VertexId, VertexId>) -> Result<DiGraph, GraphError> {
        let perm = self.relabel_permutation(relabel)?;
        let edges = self.edges.iter().map(|&(u, v)| (perm[v], perm[u])).collect();
        Ok(DiGraph::from_parts(self.vertices.clone(), edges))
    }

    /// Vertex-index form of a relabelling: `perm[i]` is the index of the
    /// image of vertex `i`.
    pub fn relabel_permutation(&self, relabel: &HashMap<VertexId, VertexId>) -> Result<Vec<usize>, GraphError> {
        if relabel.len() != self.vertex_count() {
            return Err(GraphError::NotABijection);
        }
        let mut perm = Vec::with_capacity(self.vertex_count());
        let mut hit = vec![false; self.vertex_count()];
        for v in &self.vertices {
            let image = relabel.get(v).ok_or(GraphError::NotABijection)?;
            let j = *self.index.get(image).ok_or(GraphError::NotABijection)?;
            if std::mem::replace(&mut hit[j], true) {
                return Err(GraphError::NotABijection);
            }
            perm.push(j);
        }
        Ok(perm)
    }

    /// Undirected edge set reachable from `from` along paths whose vertices,
    /// other than `from` itself, avoid `blocked`. Edges leading into a blocked
    /// vertex are included once their other endpoint is reached. Empty if
    /// `from` is blocked.
    pub fn reachable_edge_set(&self, from: usize, blocked: &BTreeSet<usize>) -> BTreeSet<usize> {
        let mut edges = BTreeSet::new();
        if blocked.contains(&from) {
            return edges;
        }
        let mut seen = vec![false; self.vertex_count()];
        seen[from] = true;
        let mut queue = VecDeque::from([from]);
        while let Some(u) = queue.pop_front() {
            let incident = self.out_edges[u].iter().chain(&self.in_edges[u]);
            for &e in incident {
                edges.insert(e);
                let (a, b) = self.edges[e];
                let w = if a == u { b } else { a };
                if !blocked.contains(&w) && !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        edges
    }

    /// Replaces each vertex `i` of `targets` by the gadget `i_a`, `i_1..i_k`,
    /// `i_b` with arcs `i_a -> i_j -> i_b`. Arcs into `i` are rerouted to `i_a`
    /// and arcs out of `i` leave from `i_b`.
    ///
    /// New vertices take the place of `i` in vertex order as
    /// `ia, i_1, ..., i_k, ib`. Gadget arcs follow the rerouted base arcs,
    /// gadget by gadget in vertex order.
    pub fn blowup(&self, targets: &BTreeSet<usize>, k: usize) -> Result<DiGraph, GraphError> {
        if k == 0 {
            return Err(GraphError::EmptyGadget);
        }
        if let Some(&t) = targets.iter().find(|&&t| t >= self.vertex_count()) {
            return Err(GraphError::UnknownVertex(t.to_string()));
        }
        for &(u, v) in &self.edges {
            if targets.contains(&u) && targets.contains(&v) {
                return Err(GraphError::AdjacentBlowupVertices(
                    self.label(u).to_string(),
                    self.label(v).to_string(),
                ));
            }
        }
        let mut labels: Vec<String> = Vec::new();
        let mut entry = vec![0usize; self.vertex_count()];
        let mut exit = vec![0usize; self.vertex_count()];
        let mut gadgets = Vec::new();
        for (i, v) in self.vertices.iter().enumerate() {
            if targets.contains(&i) {
                entry[i] = labels.len();
                labels.push(format!("{v}a"));
                let first = labels.len();
                labels.extend((1..=k).map(|j| format!("{v}_{j}")));
                exit[i] = labels.len();
                labels.push(format!("{v}b"));
                gadgets.push((entry[i], first, exit[i]));
            } else {
                entry[i] = labels.len();
                exit[i] = labels.len();
                labels.push(v.to_string());
            }
        }
        let mut edges: Vec<(usize, usize)> = self.edges.iter().map(|&(u, v)| (exit[u], entry[v])).collect();
        for (a, first, b) in gadgets {
            for j in first..first + k {
                edges.push((a, j));
                edges.push((j, b));
            }
        }
        let named: Vec<(&str, &str)> = edges
            .iter()
            .map(|&(u, v)| (labels[u].as_str(), labels[v].as_str()))
            .collect();
        build_digraph(&labels, named)
    }

    /// Resolves a list of labels into a vertex index set.
    pub fn vertex_set<I>(&self, labels: I) -> Result<BTreeSet<usize>, GraphError>
    where
        I: IntoIterator,
        I::Item: AsRef<str>,
    {
        labels.into_iter().map(|l| self.require(l.as_ref())).collect()
    }
}

/// The nine-vertex base graph of the conditioned counterexample.
pub fn build_g1() -> DiGraph {
    const ARCS: [(&str, &str); 11] = [
        ("1", "2"),
        ("1", "4"),
        ("2", "3"),
        ("3", "4"),
        ("4", "5"),
        ("3", "7"),
        ("5", "6"),
        ("6", "7"),
        ("6", "9"),
        ("7", "8"),
        ("8", "9"),
    ];
    build_digraph((1..=9).map(|i| i.to_string()), ARCS).expect("G1 is a valid simple digraph")
}

/// Vertices of G1 that carry posts in the conditioned model and gadgets in
/// the blow-up.
pub const G1_POSTS: [&str; 3] = ["2", "5", "8"];

/// The blow-up of [`build_g1`] with gadgets of size `k` at 2, 5 and 8.
pub fn build_g2k(k: usize) -> Result<DiGraph, GraphError> {
    let g1 = build_g1();
    let targets = g1.vertex_set(G1_POSTS)?;
    g1.blowup(&targets, k)
}

/// `i -> 10 - i` on the labels of G1.
pub fn g1_reflection() -> HashMap<VertexId, VertexId> {
    (1..=9)
        .map(|i: u32| (VertexId(i.to_string()), VertexId((10 - i).to_string())))
        .collect()
}
