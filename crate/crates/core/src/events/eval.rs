use std::collections::HashMap;

use super::Event;
use crate::error::EventError;
use crate::graph::{BunkbedEdge, BunkbedGraph, BunkbedVertex};

/// Events bound to one bunkbed graph, evaluated over raw configuration words
/// (one bit per edge in canonical order).
///
/// Reachability sets are computed at most once per configuration per
/// distinct `(source, restriction)` pair and shared by all events.
#[derive(Debug, Clone)]
pub struct CompiledEvents {
    roots: Vec<Node>,
    queries: Vec<Query>,
    kernel: Kernel,
    vertex_words: usize,
    vertex_count: usize,
    support: Vec<bool>,
}

#[derive(Debug, Clone)]
enum Node {
    Const(bool),
    Edge(usize),
    Reach {
        query: usize,
        target: usize,
    },
    /// `cfg & mask == want` over every word.
    Masked {
        mask: Vec<u64>,
        want: Vec<u64>,
    },
    And(Vec<Node>),
    Or(Vec<Node>),
    Not(Box<Node>),
}

#[derive(Debug, Clone)]
struct Query {
    source: usize,
    /// Allowed vertices, `vertex_words` long.
    within: Vec<u64>,
}

#[derive(Debug, Clone)]
enum Kernel {
    /// At most 64 edges and 64 vertices: adjacency as one `u64` row per
    /// vertex, rebuilt per configuration.
    Packed { from: Vec<u8>, to: Vec<u8>, vertical: u64 },
    General {
        /// Outgoing arcs `(edge, head)`; verticals appear in both directions.
        out: Vec<Vec<(usize, usize)>>,
    },
}

/// Per-worker buffers for [`CompiledEvents`].
#[derive(Debug, Clone)]
pub struct Scratch {
    epoch: u64,
    rows_epoch: u64,
    rows: Vec<u64>,
    done: Vec<u64>,
    memo: Vec<u64>,
    stack: Vec<usize>,
}

struct Binder<'a> {
    bb: &'a BunkbedGraph,
    vertex_words: usize,
    queries: Vec<Query>,
    query_ids: HashMap<(usize, Vec<u64>), usize>,
    support: Vec<bool>,
}

impl Binder<'_> {
    fn vertex(&self, v: &BunkbedVertex) -> Result<usize, EventError> {
        self.bb
            .resolve(v)
            .ok_or_else(|| EventError::UnboundReference(v.to_string()))
    }

    fn all_vertices(&self) -> Vec<u64> {
        let mut w = vec![0u64; self.vertex_words];
        for v in 0..self.bb.vertex_count() {
            w[v / 64] |= 1 << (v % 64);
        }
        w
    }

    fn query(&mut self, source: usize, within: Vec<u64>) -> usize {
        let next = self.queries.len();
        *self.query_ids.entry((source, within.clone())).or_insert_with(|| {
            self.queries.push(Query { source, within });
            next
        })
    }

    fn posts_mask(
        &mut self,
        labels: &std::collections::BTreeSet<crate::graph::VertexId>,
    ) -> Result<(Vec<u64>, Vec<u64>), EventError> {
        let words = self.bb.words();
        let mut want = vec![0u64; words];
        for l in labels {
            let b = self
                .bb
                .base()
                .index_of(l.as_str())
                .ok_or_else(|| EventError::UnboundReference(l.to_string()))?;
            let e = self.bb.vertical_edge(b);
            want[e / 64] |= 1 << (e % 64);
        }
        let mut all = vec![0u64; words];
        for v in 0..self.bb.base().vertex_count() {
            let e = self.bb.vertical_edge(v);
            all[e / 64] |= 1 << (e % 64);
            self.support[e] = true;
        }
        Ok((all, want))
    }

    fn bind(&mut self, ev: &Event) -> Result<Node, EventError> {
        Ok(match ev {
            Event::True => Node::Const(true),
            Event::Reach(x, y) => {
                let (x, y) = (self.vertex(x)?, self.vertex(y)?);
                self.support.iter_mut().for_each(|s| *s = true);
                let within = self.all_vertices();
                Node::Reach {
                    query: self.query(x, within),
                    target: y,
                }
            }
            Event::ReachWithin(set, x, y) => {
                let (x, y) = (self.vertex(x)?, self.vertex(y)?);
                let mut within = vec![0u64; self.vertex_words];
                for v in set {
                    let i = self.vertex(v)?;
                    within[i / 64] |= 1 << (i % 64);
                }
                let inside = |i: usize| within[i / 64] >> (i % 64) & 1 == 1;
                for e in 0..self.bb.edge_count() {
                    let (a, b) = self.bb.endpoints(e);
                    if inside(a) && inside(b) {
                        self.support[e] = true;
                    }
                }
                if !inside(x) || !inside(y) {
                    Node::Const(false)
                } else {
                    Node::Reach {
                        query: self.query(x, within),
                        target: y,
                    }
                }
            }
            Event::EdgePresent(x, y) => {
                let (xi, yi) = (self.vertex(x)?, self.vertex(y)?);
                let e = self
                    .bb
                    .find_edge(xi, yi)
                    .ok_or_else(|| EventError::UnboundReference(format!("edge {x}->{y}")))?;
                self.support[e] = true;
                Node::Edge(e)
            }
            Event::PostsInclude(labels) => {
                let (_, want) = self.posts_mask(labels)?;
                Node::Masked {
                    mask: want.clone(),
                    want,
                }
            }
            Event::PostsExactly(labels) => {
                let (mask, want) = self.posts_mask(labels)?;
                Node::Masked { mask, want }
            }
            Event::And(parts) => Node::And(parts.iter().map(|p| self.bind(p)).collect::<Result<_, _>>()?),
            Event::Or(parts) => Node::Or(parts.iter().map(|p| self.bind(p)).collect::<Result<_, _>>()?),
            Event::Not(inner) => Node::Not(Box::new(self.bind(inner)?)),
        })
    }
}

impl CompiledEvents {
    pub fn new(bb: &BunkbedGraph, events: &[Event]) -> Result<Self, EventError> {
        let vertex_words = bb.vertex_count().div_ceil(64).max(1);
        let mut binder = Binder {
            bb,
            vertex_words,
            queries: Vec::new(),
            query_ids: HashMap::new(),
            support: vec![false; bb.edge_count()],
        };
        let roots = events.iter().map(|e| binder.bind(e)).collect::<Result<Vec<_>, _>>()?;
        let kernel = if bb.edge_count() <= 64 && bb.vertex_count() <= 64 {
            let mut from = Vec::new();
            let mut to = Vec::new();
            let mut vertical = 0u64;
            for (e, kind) in bb.edges().iter().enumerate() {
                let (a, b) = bb.endpoints(e);
                from.push(a as u8);
                to.push(b as u8);
                if matches!(kind, BunkbedEdge::Vertical { .. }) {
                    vertical |= 1 << e;
                }
            }
            Kernel::Packed { from, to, vertical }
        } else {
            let mut out = vec![Vec::new(); bb.vertex_count()];
            for (e, kind) in bb.edges().iter().enumerate() {
                let (a, b) = bb.endpoints(e);
                out[a].push((e, b));
                if matches!(kind, BunkbedEdge::Vertical { .. }) {
                    out[b].push((e, a));
                }
            }
            Kernel::General { out }
        };
        Ok(CompiledEvents {
            roots,
            queries: binder.queries,
            kernel,
            vertex_words,
            vertex_count: bb.vertex_count(),
            support: binder.support,
        })
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    /// Edges whose state can influence at least one event.
    pub fn support(&self) -> &[bool] {
        &self.support
    }

    pub fn scratch(&self) -> Scratch {
        let nv = match &self.kernel {
            Kernel::Packed { .. } => self.vertex_count,
            Kernel::General { .. } => 0,
        };
        Scratch {
            epoch: 0,
            rows_epoch: 0,
            rows: vec![0; nv],
            done: vec![0; self.queries.len()],
            memo: vec![0; self.queries.len() * self.vertex_words],
            stack: Vec::new(),
        }
    }

    /// Evaluates every event on `cfg` into `out`.
    pub fn eval(&self, cfg: &[u64], scratch: &mut Scratch, out: &mut [bool]) {
        scratch.epoch += 1;
        for (slot, root) in out.iter_mut().zip(&self.roots) {
            *slot = self.node(root, cfg, scratch);
        }
    }

    pub fn eval_one(&self, index: usize, cfg: &[u64], scratch: &mut Scratch) -> bool {
        scratch.epoch += 1;
        self.node(&self.roots[index], cfg, scratch)
    }

    /// Like [`Self::eval`] but packs the results into a bit mask
    /// (at most 64 events).
    pub fn eval_bits(&self, cfg: &[u64], scratch: &mut Scratch) -> u64 {
        debug_assert!(self.roots.len() <= 64);
        scratch.epoch += 1;
        let mut bits = 0u64;
        for (i, root) in self.roots.iter().enumerate() {
            if self.node(root, cfg, scratch) {
                bits |= 1 << i;
            }
        }
        bits
    }

    fn node(&self, n: &Node, cfg: &[u64], s: &mut Scratch) -> bool {
        match n {
            Node::Const(b) => *b,
            Node::Edge(e) => cfg[e / 64] >> (e % 64) & 1 == 1,
            Node::Reach { query, target } => {
                self.ensure(*query, cfg, s);
                let w = s.memo[query * self.vertex_words + target / 64];
                w >> (target % 64) & 1 == 1
            }
            Node::Masked { mask, want } => cfg.iter().zip(mask.iter().zip(want)).all(|(c, (m, w))| c & m == *w),
            Node::And(parts) => parts.iter().all(|p| self.node(p, cfg, s)),
            Node::Or(parts) => parts.iter().any(|p| self.node(p, cfg, s)),
            Node::Not(inner) => !self.node(inner, cfg, s),
        }
    }

    fn ensure(&self, q: usize, cfg: &[u64], s: &mut Scratch) {
        if s.done[q] == s.epoch {
            return;
        }
        s.done[q] = s.epoch;
        let query = &self.queries[q];
        let vw = self.vertex_words;
        match &self.kernel {
            Kernel::Packed { from, to, vertical } => {
                if s.rows_epoch != s.epoch {
                    s.rows_epoch = s.epoch;
                    s.rows.iter_mut().for_each(|r| *r = 0);
                    let mut bits = cfg[0];
                    while bits != 0 {
                        let e = bits.trailing_zeros() as usize;
                        bits &= bits - 1;
                        let (a, b) = (from[e] as usize, to[e] as usize);
                        s.rows[a] |= 1 << b;
                        if vertical >> e & 1 == 1 {
                            s.rows[b] |= 1 << a;
                        }
                    }
                }
                let within = query.within[0];
                let src = query.source;
                let mut seen = 0u64;
                if within >> src & 1 == 1 {
                    seen = 1 << src;
                    let mut todo = seen;
                    while todo != 0 {
                        let v = todo.trailing_zeros() as usize;
                        todo &= todo - 1;
                        let new = s.rows[v] & within & !seen;
                        seen |= new;
                        todo |= new;
                    }
                }
                s.memo[q] = seen;
            }
            Kernel::General { out } => {
                let base = q * vw;
                s.memo[base..base + vw].iter_mut().for_each(|w| *w = 0);
                let src = query.source;
                let inside = |v: usize| query.within[v / 64] >> (v % 64) & 1 == 1;
                if !inside(src) {
                    return;
                }
                s.memo[base + src / 64] |= 1 << (src % 64);
                s.stack.clear();
                s.stack.push(src);
                while let Some(v) = s.stack.pop() {
                    for &(e, w) in &out[v] {
                        if cfg[e / 64] >> (e % 64) & 1 == 0 || !inside(w) {
                            continue;
                        }
                        let slot = &mut s.memo[base + w / 64];
                        if *slot >> (w % 64) & 1 == 0 {
                            *slot |= 1 << (w % 64);
                            s.stack.push(w);
                        }
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_g1, build_g2k, bunkbed, SubgraphMask};
    use proptest::prelude::*;

    /// Plain worklist closure over the edge list, no bit tricks.
    fn oracle_reach(bb: &BunkbedGraph, h: &SubgraphMask, x: usize) -> Vec<bool> {
        let mut seen = vec![false; bb.vertex_count()];
        seen[x] = true;
        loop {
            let mut changed = false;
            for e in h.iter() {
                let (a, b) = bb.endpoints(e);
                let vertical = matches!(bb.edges()[e], BunkbedEdge::Vertical { .. });
                if seen[a] && !seen[b] {
                    seen[b] = true;
                    changed = true;
                }
                if vertical && seen[b] && !seen[a] {
                    seen[a] = true;
                    changed = true;
                }
            }
            if !changed {
                return seen;
            }
        }
    }

    fn check_against_oracle(bb: &BunkbedGraph, bits: &[bool], sources: &[usize]) -> Result<(), TestCaseError> {
        let h = SubgraphMask::from_edges(bb, bits.iter().enumerate().filter(|p| *p.1).map(|p| p.0));
        let events: Vec<Event> = sources
            .iter()
            .flat_map(|&x| (0..bb.vertex_count()).map(move |y| (x, y)))
            .map(|(x, y)| Event::Reach(bb.vertex(x), bb.vertex(y)))
            .collect();
        let compiled = CompiledEvents::new(bb, &events).unwrap();
        let mut scratch = compiled.scratch();
        let mut out = vec![false; events.len()];
        compiled.eval(h.words(), &mut scratch, &mut out);
        let mut i = 0;
        for &x in sources {
            let truth = oracle_reach(bb, &h, x);
            for (y, &t) in truth.iter().enumerate() {
                prop_assert_eq!(out[i], t, "{} -> {}", bb.vertex(x), bb.vertex(y));
                i += 1;
            }
        }
        Ok(())
    }

    proptest! {
        #[test]
        fn packed_kernel_matches_oracle(bits in proptest::collection::vec(any::<bool>(), 31)) {
            let bb = bunkbed(&build_g1());
            check_against_oracle(&bb, &bits, &[0, 2, 9, 13])?;
        }

        #[test]
        fn general_kernel_matches_oracle(bits in proptest::collection::vec(any::<bool>(), 79)) {
            let bb = bunkbed(&build_g2k(3).unwrap());
            check_against_oracle(&bb, &bits, &[0, 5, 21, 30])?;
        }

        #[test]
        fn reach_is_monotone(bits in proptest::collection::vec(any::<bool>(), 31), extra in 0usize..31) {
            let bb = bunkbed(&build_g1());
            let h = SubgraphMask::from_edges(&bb, bits.iter().enumerate().filter(|p| *p.1).map(|p| p.0));
            let mut bigger = h.clone();
            bigger.insert(extra);
            let events: Vec<Event> = (0..18).map(|y| Event::Reach(bb.vertex(0), bb.vertex(y))).collect();
            let compiled = CompiledEvents::new(&bb, &events).unwrap();
            let mut s = compiled.scratch();
            let (mut a, mut b) = (vec![false; 18], vec![false; 18]);
            compiled.eval(h.words(), &mut s, &mut a);
            compiled.eval(bigger.words(), &mut s, &mut b);
            for y in 0..18 {
                prop_assert!(!a[y] || b[y]);
            }
        }
    }

    #[test]
    fn support_tracks_atoms() {
        let bb = bunkbed(&build_g1());
        let c = CompiledEvents::new(&bb, &[Event::posts_exactly(["2"])]).unwrap();
        assert_eq!(c.support().iter().filter(|s| **s).count(), 9);
        let c = CompiledEvents::new(&bb, &[Event::edge("1-", "2-"), Event::True]).unwrap();
        assert_eq!(c.support().iter().filter(|s| **s).count(), 1);
        let c = CompiledEvents::new(&bb, &[Event::reach("1-", "2+")]).unwrap();
        assert!(c.support().iter().all(|s| *s));
    }
}
