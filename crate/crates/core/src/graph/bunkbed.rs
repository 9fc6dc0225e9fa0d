use std::collections::BTreeSet;
use std::fmt;

use super::{DiGraph, VertexId};
use crate::error::GraphError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Layer {
    Lower,
    Upper,
}

impl Layer {
    pub fn flip(self) -> Layer {
        match self {
            Layer::Lower => Layer::Upper,
            Layer::Upper => Layer::Lower,
        }
    }

    pub fn sign(self) -> char {
        match self {
            Layer::Lower => '-',
            Layer::Upper => '+',
        }
    }

    pub fn both() -> [Layer; 2] {
        [Layer::Lower, Layer::Upper]
    }
}

/// A copy `v-` or `v+` of a base vertex.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BunkbedVertex {
    pub base: VertexId,
    pub layer: Layer,
}

impl BunkbedVertex {
    pub fn new(base: VertexId, layer: Layer) -> Self {
        BunkbedVertex { base, layer }
    }
}

impl fmt::Display for BunkbedVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.base, self.layer.sign())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BunkbedEdge {
    /// Copy of base edge `edge` in `layer`.
    Horizontal { edge: usize, layer: Layer },
    /// Bidirected edge `v- <-> v+`.
    Vertical { vertex: usize },
}

/// Two-layer graph over a base [`DiGraph`].
///
/// Vertex `i` of the base appears as bunkbed vertex `i` (lower) and `n + i`
/// (upper). Edges are laid out lower horizontals, upper horizontals, then
/// verticals, each block in base order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BunkbedGraph {
    base: DiGraph,
    edges: Vec<BunkbedEdge>,
}

pub fn bunkbed(g: &DiGraph) -> BunkbedGraph {
    let m = g.edge_count();
    let mut edges = Vec::with_capacity(2 * m + g.vertex_count());
    for layer in Layer::both() {
        edges.extend((0..m).map(|edge| BunkbedEdge::Horizontal { edge, layer }));
    }
    edges.extend((0..g.vertex_count()).map(|vertex| BunkbedEdge::Vertical { vertex }));
    BunkbedGraph { base: g.clone(), edges }
}

impl BunkbedGraph {
    pub fn base(&self) -> &DiGraph {
        &self.base
    }

    pub fn edges(&self) -> &[BunkbedEdge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_count(&self) -> usize {
        2 * self.base.vertex_count()
    }

    pub fn horizontal_edge(&self, edge: usize, layer: Layer) -> usize {
        match layer {
            Layer::Lower => edge,
            Layer::Upper => self.base.edge_count() + edge,
        }
    }

    pub fn vertical_edge(&self, vertex: usize) -> usize {
        2 * self.base.edge_count() + vertex
    }

    pub fn vertex_index(&self, base: usize, layer: Layer) -> usize {
        match layer {
            Layer::Lower => base,
            Layer::Upper => self.base.vertex_count() + base,
        }
    }

    /// Inverse of [`Self::vertex_index`].
    pub fn split_vertex(&self, v: usize) -> (usize, Layer) {
        let n = self.base.vertex_count();
        if v < n {
            (v, Layer::Lower)
        } else {
            (v - n, Layer::Upper)
        }
    }

    pub fn resolve(&self, v: &BunkbedVertex) -> Option<usize> {
        self.base
            .index_of(v.base.as_str())
            .map(|b| self.vertex_index(b, v.layer))
    }

    pub fn vertex(&self, v: usize) -> BunkbedVertex {
        let (b, layer) = self.split_vertex(v);
        BunkbedVertex::new(self.base.label(b).clone(), layer)
    }

    /// Endpoints of an edge as bunkbed vertex indices. Verticals are reported
    /// lower-to-upper but are traversable both ways.
    pub fn endpoints(&self, e: usize) -> (usize, usize) {
        match self.edges[e] {
            BunkbedEdge::Horizontal { edge, layer } => {
                let (u, v) = self.base.edges()[edge];
                (self.vertex_index(u, layer), self.vertex_index(v, layer))
            }
            BunkbedEdge::Vertical { vertex } => (
                self.vertex_index(vertex, Layer::Lower),
                self.vertex_index(vertex, Layer::Upper),
            ),
        }
    }

    /// The edge joining two bunkbed vertices: a same-layer horizontal copy
    /// `x -> y`, or the vertical at a shared base vertex (either direction).
    pub fn find_edge(&self, x: usize, y: usize) -> Option<usize> {
        let (bx, lx) = self.split_vertex(x);
        let (by, ly) = self.split_vertex(y);
        if bx == by && lx != ly {
            return Some(self.vertical_edge(bx));
        }
        if lx != ly {
            return None;
        }
        self.base.edge_index(bx, by).map(|f| self.horizontal_edge(f, lx))
    }

    /// Shadow and mirrored edge of a bunkbed edge; both `None` for verticals.
    pub fn shadow_and_mirror(&self, e: usize) -> (Option<usize>, Option<usize>) {
        match self.edges[e] {
            BunkbedEdge::Horizontal { edge, layer } => (Some(edge), Some(self.horizontal_edge(edge, layer.flip()))),
            BunkbedEdge::Vertical { .. } => (None, None),
        }
    }

    pub(crate) fn words(&self) -> usize {
        self.edge_count().div_ceil(64)
    }
}

/// One percolation configuration `H`: a bit per bunkbed edge in canonical
/// order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SubgraphMask {
    words: Vec<u64>,
    len: usize,
}

impl SubgraphMask {
    pub fn empty(bb: &BunkbedGraph) -> Self {
        SubgraphMask {
            words: vec![0; bb.words()],
            len: bb.edge_count(),
        }
    }

    pub fn full(bb: &BunkbedGraph) -> Self {
        let mut m = SubgraphMask::empty(bb);
        for e in 0..m.len {
            m.insert(e);
        }
        m
    }

    pub fn from_edges(bb: &BunkbedGraph, edges: impl IntoIterator<Item = usize>) -> Self {
        let mut m = SubgraphMask::empty(bb);
        for e in edges {
            m.insert(e);
        }
        m
    }

    /// Wraps raw words; bits at or beyond `len` must be clear.
    pub fn from_words(len: usize, words: Vec<u64>) -> Self {
        debug_assert_eq!(words.len(), len.div_ceil(64));
        SubgraphMask { words, len }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn contains(&self, e: usize) -> bool {
        self.words[e / 64] >> (e % 64) & 1 == 1
    }

    pub fn insert(&mut self, e: usize) {
        assert!(e < self.len, "edge {e} out of range");
        self.words[e / 64] |= 1 << (e % 64);
    }

    pub fn remove(&mut self, e: usize) {
        self.words[e / 64] &= !(1 << (e % 64));
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(|&e| self.contains(e))
    }
}

/// A set `F` of base edge indices selecting which shadows to mirror.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct ShadowEdgeSet(BTreeSet<usize>);

impl ShadowEdgeSet {
    pub fn new(g: &DiGraph, edges: impl IntoIterator<Item = usize>) -> Result<Self, GraphError> {
        let set: BTreeSet<usize> = edges.into_iter().collect();
        match set.iter().find(|&&e| e >= g.edge_count()) {
            Some(&e) => Err(GraphError::EdgeOutOfRange(e)),
            None => Ok(ShadowEdgeSet(set)),
        }
    }

    pub fn from_labels(g: &DiGraph, arcs: &[(&str, &str)]) -> Result<Self, GraphError> {
        let ids = arcs
            .iter()
            .map(|(a, b)| g.edge_by_labels(a, b))
            .collect::<Result<Vec<_>, _>>()?;
        ShadowEdgeSet::new(g, ids)
    }

    pub fn all(g: &DiGraph) -> Self {
        ShadowEdgeSet((0..g.edge_count()).collect())
    }

    pub fn contains(&self, e: usize) -> bool {
        self.0.contains(&e)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn union(&self, other: &ShadowEdgeSet) -> ShadowEdgeSet {
        ShadowEdgeSet(self.0.union(&other.0).copied().collect())
    }
}

/// Precomputed form of `H -> M(H, F)` for repeated application on raw
/// configuration words.
#[derive(Debug, Clone)]
pub struct MirrorMap {
    words: usize,
    /// Single-word layout: lower-copy mask and the shift to the upper copy.
    packed: Option<(u64, u32)>,
    swaps: Vec<(usize, usize)>,
}

impl MirrorMap {
    pub fn new(bb: &BunkbedGraph, f: &ShadowEdgeSet) -> Self {
        let swaps: Vec<(usize, usize)> = f
            .iter()
            .map(|e| (bb.horizontal_edge(e, Layer::Lower), bb.horizontal_edge(e, Layer::Upper)))
            .collect();
        let packed = (bb.edge_count() <= 64).then(|| {
            let lower = swaps.iter().fold(0u64, |m, &(lo, _)| m | 1 << lo);
            (lower, bb.base().edge_count() as u32)
        });
        MirrorMap {
            words: bb.words(),
            packed,
            swaps,
        }
    }

    pub fn apply_words(&self, src: &[u64], dst: &mut [u64]) {
        debug_assert_eq!(src.len(), self.words);
        if let Some((lower, shift)) = self.packed {
            let h = src[0];
            let upper = lower << shift;
            dst[0] = (h & !(lower | upper)) | ((h & lower) << shift) | ((h & upper) >> shift);
            return;
        }
        dst.copy_from_slice(src);
        let bit = |w: &[u64], e: usize| w[e / 64] >> (e % 64) & 1;
        for &(lo, hi) in &self.swaps {
            let (a, b) = (bit(src, lo), bit(src, hi));
            if a != b {
                dst[lo / 64] ^= 1 << (lo % 64);
                dst[hi / 64] ^= 1 << (hi % 64);
            }
        }
    }

    pub fn apply(&self, h: &SubgraphMask) -> SubgraphMask {
        let mut out = vec![0; h.words.len()];
        self.apply_words(&h.words, &mut out);
        SubgraphMask::from_words(h.len, out)
    }
}

/// `M(H, F)`: keeps verticals and horizontals whose shadow is outside `F`,
/// and moves every horizontal with shadow in `F` to the other layer.
pub fn mirror_subgraph(bb: &BunkbedGraph, h: &SubgraphMask, f: &ShadowEdgeSet) -> SubgraphMask {
    let mut out = SubgraphMask::empty(bb);
    for e in h.iter() {
        match bb.shadow_and_mirror(e) {
            (Some(s), Some(m)) if f.contains(s) => out.insert(m),
            _ => out.insert(e),
        }
    }
    out
}

/// Posts of `H`: base vertices whose vertical edge is present.
pub fn posts(bb: &BunkbedGraph, h: &SubgraphMask) -> BTreeSet<usize> {
    (0..bb.base().vertex_count())
        .filter(|&v| h.contains(bb.vertical_edge(v)))
        .collect()
}
