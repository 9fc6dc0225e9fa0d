//! Predicates over percolation configurations.
//!
//! An [`Event`] is a boolean tree over reachability, edge and post atoms.
//! Events refer to vertices by label; [`CompiledEvents`] binds them to a
//! concrete [`BunkbedGraph`] for fast repeated evaluation.

mod eval;
mod expr;
mod table;

pub use eval::{CompiledEvents, Scratch};
pub use expr::parse_event;
pub use table::{g1_event_table, shaded_vertices, G1Events, SHADED};

use std::collections::BTreeSet;
use std::fmt;

use crate::error::EventError;
use crate::graph::{BunkbedGraph, BunkbedVertex, Layer, SubgraphMask, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Event {
    True,
    /// Directed path from the first vertex to the second (reflexive).
    Reach(BunkbedVertex, BunkbedVertex),
    /// [`Event::Reach`] inside the subgraph induced by the vertex set.
    ReachWithin(BTreeSet<BunkbedVertex>, BunkbedVertex, BunkbedVertex),
    /// The bunkbed edge joining the two vertices is present.
    EdgePresent(BunkbedVertex, BunkbedVertex),
    PostsInclude(BTreeSet<VertexId>),
    PostsExactly(BTreeSet<VertexId>),
    And(Vec<Event>),
    Or(Vec<Event>),
    Not(Box<Event>),
}

/// Parses a signed vertex such as `1-` or `2_3+`.
///
/// # Panics
/// On malformed input; meant for literals in code and tests.
pub fn vtx(s: &str) -> BunkbedVertex {
    expr::parse_vertex(s).unwrap_or_else(|e| panic!("bad vertex literal {s:?}: {e}"))
}

fn label(s: &str) -> VertexId {
    VertexId::new(s).unwrap_or_else(|e| panic!("bad label literal {s:?}: {e}"))
}

impl Event {
    pub fn reach(x: &str, y: &str) -> Event {
        Event::Reach(vtx(x), vtx(y))
    }

    /// `x -> y` with both layers of `y` allowed, i.e. `x -> y^±`.
    pub fn reach_any_layer(x: &str, y: &str) -> Event {
        Event::Or(
            Layer::both()
                .into_iter()
                .map(|l| Event::Reach(vtx(x), BunkbedVertex::new(label(y), l)))
                .collect(),
        )
    }

    /// `x^± -> y`.
    pub fn reach_from_any_layer(x: &str, y: &str) -> Event {
        Event::Or(
            Layer::both()
                .into_iter()
                .map(|l| Event::Reach(BunkbedVertex::new(label(x), l), vtx(y)))
                .collect(),
        )
    }

    pub fn within(set: &BTreeSet<BunkbedVertex>, x: &str, y: &str) -> Event {
        Event::ReachWithin(set.clone(), vtx(x), vtx(y))
    }

    pub fn edge(x: &str, y: &str) -> Event {
        Event::EdgePresent(vtx(x), vtx(y))
    }

    pub fn posts_exactly<'a>(labels: impl IntoIterator<Item = &'a str>) -> Event {
        Event::PostsExactly(labels.into_iter().map(label).collect())
    }

    pub fn posts_include<'a>(labels: impl IntoIterator<Item = &'a str>) -> Event {
        Event::PostsInclude(labels.into_iter().map(label).collect())
    }

    pub fn and(parts: impl IntoIterator<Item = Event>) -> Event {
        Event::And(parts.into_iter().collect())
    }

    pub fn or(parts: impl IntoIterator<Item = Event>) -> Event {
        Event::Or(parts.into_iter().collect())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(ev: Event) -> Event {
        Event::Not(Box::new(ev))
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn list<T: fmt::Display>(f: &mut fmt::Formatter<'_>, items: impl IntoIterator<Item = T>) -> fmt::Result {
            for (i, item) in items.into_iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{item}")?;
            }
            Ok(())
        }
        match self {
            Event::True => f.write_str("true"),
            Event::Reach(x, y) => write!(f, "reach({x},{y})"),
            Event::ReachWithin(u, x, y) => {
                f.write_str("reachWithin({")?;
                list(f, u)?;
                write!(f, "}},{x},{y})")
            }
            Event::EdgePresent(x, y) => write!(f, "edge({x},{y})"),
            Event::PostsInclude(s) => {
                f.write_str("postsInclude(")?;
                list(f, s)?;
                f.write_str(")")
            }
            Event::PostsExactly(s) => {
                f.write_str("postsExactly(")?;
                list(f, s)?;
                f.write_str(")")
            }
            Event::And(parts) => {
                f.write_str("and(")?;
                list(f, parts)?;
                f.write_str(")")
            }
            Event::Or(parts) => {
                f.write_str("or(")?;
                list(f, parts)?;
                f.write_str(")")
            }
            Event::Not(inner) => write!(f, "not({inner})"),
        }
    }
}

/// Whether `h` contains a directed path `x -> y`. Verticals are traversable
/// both ways; every vertex reaches itself.
pub fn reaches(bb: &BunkbedGraph, h: &SubgraphMask, x: &BunkbedVertex, y: &BunkbedVertex) -> Result<bool, EventError> {
    eval_event(bb, &Event::Reach(x.clone(), y.clone()), h)
}

pub fn eval_event(bb: &BunkbedGraph, ev: &Event, h: &SubgraphMask) -> Result<bool, EventError> {
    let compiled = CompiledEvents::new(bb, std::slice::from_ref(ev))?;
    let mut scratch = compiled.scratch();
    Ok(compiled.eval_one(0, h.words(), &mut scratch))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_digraph, build_g1, bunkbed};

    fn single_edge() -> BunkbedGraph {
        bunkbed(&build_digraph(["1", "2"], [("1", "2")]).unwrap())
    }

    #[test]
    fn reflexive() {
        let bb = single_edge();
        let h = SubgraphMask::empty(&bb);
        for v in ["1-", "1+", "2-", "2+"] {
            assert!(reaches(&bb, &h, &vtx(v), &vtx(v)).unwrap());
        }
    }

    #[test]
    fn single_directed_edge() {
        let bb = single_edge();
        let h = SubgraphMask::from_edges(&bb, [bb.horizontal_edge(0, Layer::Lower)]);
        assert!(reaches(&bb, &h, &vtx("1-"), &vtx("2-")).unwrap());
        assert!(!reaches(&bb, &h, &vtx("2-"), &vtx("1-")).unwrap());
        assert!(!reaches(&bb, &h, &vtx("1-"), &vtx("2+")).unwrap());
    }

    #[test]
    fn verticals_are_bidirected() {
        let bb = single_edge();
        let h = SubgraphMask::from_edges(&bb, [bb.vertical_edge(1)]);
        assert!(reaches(&bb, &h, &vtx("2-"), &vtx("2+")).unwrap());
        assert!(reaches(&bb, &h, &vtx("2+"), &vtx("2-")).unwrap());
    }

    #[test]
    fn unbound_references() {
        let bb = single_edge();
        let h = SubgraphMask::empty(&bb);
        assert!(matches!(
            eval_event(&bb, &Event::reach("1-", "7+"), &h),
            Err(EventError::UnboundReference(_))
        ));
        assert!(matches!(
            eval_event(&bb, &Event::edge("2-", "1-"), &h),
            Err(EventError::UnboundReference(_))
        ));
        assert!(matches!(
            eval_event(&bb, &Event::posts_exactly(["3"]), &h),
            Err(EventError::UnboundReference(_))
        ));
    }

    #[test]
    fn posts_atoms() {
        let g = build_g1();
        let bb = bunkbed(&g);
        let h = SubgraphMask::from_edges(&bb, ["2", "5", "8"].map(|v| bb.vertical_edge(g.index_of(v).unwrap())));
        assert!(eval_event(&bb, &Event::posts_exactly(["2", "5", "8"]), &h).unwrap());
        assert!(eval_event(&bb, &Event::posts_include(["2", "8"]), &h).unwrap());
        assert!(!eval_event(&bb, &Event::posts_exactly(["2", "5"]), &h).unwrap());
        assert!(eval_event(&bb, &Event::True, &h).unwrap());
    }

    #[test]
    fn induced_reachability_differs_from_global() {
        // Lower 7->8->9 without (3,7); 3- only gets to 9- through 4, which is
        // outside the shaded set.
        let g = build_g1();
        let bb = bunkbed(&g);
        let lower = |a: &str, b: &str| bb.horizontal_edge(g.edge_by_labels(a, b).unwrap(), Layer::Lower);
        let h = SubgraphMask::from_edges(
            &bb,
            [
                lower("7", "8"),
                lower("8", "9"),
                lower("3", "4"),
                lower("4", "5"),
                lower("5", "6"),
                lower("6", "9"),
                lower("1", "4"),
            ],
        );
        let inside = Event::within(&shaded_vertices(), "3-", "9-");
        assert!(!eval_event(&bb, &inside, &h).unwrap());
        assert!(eval_event(&bb, &Event::reach("3-", "9-"), &h).unwrap());
        assert!(eval_event(&bb, &Event::reach("1-", "9-"), &h).unwrap());
        // Adding (3,7) gives an induced path as well.
        let mut h2 = h.clone();
        h2.insert(lower("3", "7"));
        assert!(eval_event(&bb, &inside, &h2).unwrap());
    }

    #[test]
    fn display_round_trips_examples() {
        let text = "and(reach(1-,9-),not(or(reach(1-,5-),reach(1-,5+))))";
        let ev = parse_event(text).unwrap();
        assert_eq!(ev.to_string(), text);
    }
}
