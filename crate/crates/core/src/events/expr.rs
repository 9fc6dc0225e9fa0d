//! Prefix expression syntax for events.
//!
//! ```text
//! true
//! reach(1-,9+)
//! reachWithin({3,5-,6+},3-,9-)   # an unsigned label in a set means both layers
//! edge(1-,4-)                    # horizontal copy, or a vertical like edge(2-,2+)
//! postsInclude(2,5)  postsExactly(2,5,8)  postsExactly()
//! and(e, ...)  or(e, ...)  not(e)
//! ```

use std::collections::BTreeSet;

use super::Event;
use crate::error::EventError;
use crate::graph::{BunkbedVertex, Layer, VertexId};

pub fn parse_event(input: &str) -> Result<Event, EventError> {
    let mut p = Parser {
        src: input.as_bytes(),
        pos: 0,
    };
    let ev = p.event()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("trailing input"));
    }
    Ok(ev)
}

pub(super) fn parse_vertex(input: &str) -> Result<BunkbedVertex, EventError> {
    let mut p = Parser {
        src: input.as_bytes(),
        pos: 0,
    };
    let v = p.vertex()?;
    if p.pos != p.src.len() {
        return Err(p.error("trailing input"));
    }
    Ok(v)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

fn is_label_byte(b: u8) -> bool {
    b.is_ascii_alphanumeric() || b == b'_' || b == b'.'
}

impl Parser<'_> {
    fn error(&self, message: &str) -> EventError {
        EventError::Parse {
            position: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, b: u8) -> Result<(), EventError> {
        if self.peek() == Some(b) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected `{}`", b as char)))
        }
    }

    fn ident(&mut self) -> Result<&str, EventError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && is_label_byte(self.src[self.pos]) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected a name"));
        }
        Ok(std::str::from_utf8(&self.src[start..self.pos]).expect("ascii"))
    }

    fn label(&mut self) -> Result<VertexId, EventError> {
        let name = self.ident()?.to_string();
        VertexId::new(name).map_err(|e| self.error(&e.to_string()))
    }

    fn layer(&mut self) -> Option<Layer> {
        match self.src.get(self.pos) {
            Some(b'-') => {
                self.pos += 1;
                Some(Layer::Lower)
            }
            Some(b'+') => {
                self.pos += 1;
                Some(Layer::Upper)
            }
            _ => None,
        }
    }

    fn vertex(&mut self) -> Result<BunkbedVertex, EventError> {
        let base = self.label()?;
        let layer = self
            .layer()
            .ok_or_else(|| self.error("expected `-` or `+` after vertex label"))?;
        Ok(BunkbedVertex::new(base, layer))
    }

    /// Comma-separated items up to (and consuming) `close`.
    fn items<T>(
        &mut self,
        close: u8,
        mut item: impl FnMut(&mut Self) -> Result<T, EventError>,
    ) -> Result<Vec<T>, EventError> {
        let mut out = Vec::new();
        if self.peek() == Some(close) {
            self.pos += 1;
            return Ok(out);
        }
        loop {
            out.push(item(self)?);
            match self.peek() {
                Some(b',') => self.pos += 1,
                Some(b) if b == close => {
                    self.pos += 1;
                    return Ok(out);
                }
                _ => return Err(self.error(&format!("expected `,` or `{}`", close as char))),
            }
        }
    }

    fn vertex_set(&mut self) -> Result<BTreeSet<BunkbedVertex>, EventError> {
        self.expect(b'{')?;
        let groups = self.items(b'}', |p| {
            let base = p.label()?;
            Ok(match p.layer() {
                Some(l) => vec![BunkbedVertex::new(base, l)],
                None => Layer::both()
                    .into_iter()
                    .map(|l| BunkbedVertex::new(base.clone(), l))
                    .collect(),
            })
        })?;
        Ok(groups.into_iter().flatten().collect())
    }

    fn event(&mut self) -> Result<Event, EventError> {
        let start = self.pos;
        let name = self.ident()?.to_string();
        if name == "true" {
            return Ok(Event::True);
        }
        self.expect(b'(')?;
        let two_vertices = |p: &mut Self| -> Result<(BunkbedVertex, BunkbedVertex), EventError> {
            let x = p.vertex()?;
            p.expect(b',')?;
            let y = p.vertex()?;
            p.expect(b')')?;
            Ok((x, y))
        };
        let ev = match name.as_str() {
            "reach" => {
                let (x, y) = two_vertices(self)?;
                Event::Reach(x, y)
            }
            "edge" => {
                let (x, y) = two_vertices(self)?;
                Event::EdgePresent(x, y)
            }
            "reachWithin" => {
                let set = self.vertex_set()?;
                self.expect(b',')?;
                let (x, y) = two_vertices(self)?;
                Event::ReachWithin(set, x, y)
            }
            "postsInclude" => Event::PostsInclude(self.items(b')', Self::label)?.into_iter().collect()),
            "postsExactly" => Event::PostsExactly(self.items(b')', Self::label)?.into_iter().collect()),
            "and" => Event::And(self.items(b')', Self::event)?),
            "or" => Event::Or(self.items(b')', Self::event)?),
            "not" => {
                let inner = self.event()?;
                self.expect(b')')?;
                Event::Not(Box::new(inner))
            }
            _ => {
                self.pos = start;
                return Err(self.error(&format!("unknown operator `{name}`")));
            }
        };
        Ok(ev)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::events::vtx;
    use proptest::prelude::*;

    #[test]
    fn parses_atoms() {
        assert_eq!(parse_event(" true ").unwrap(), Event::True);
        assert_eq!(parse_event("reach(2_3+, 9-)").unwrap(), Event::reach("2_3+", "9-"));
        assert_eq!(
            parse_event("postsExactly(2,5,8)").unwrap(),
            Event::posts_exactly(["2", "5", "8"])
        );
        assert_eq!(parse_event("postsExactly()").unwrap(), Event::posts_exactly([]));
        let within = parse_event("reachWithin({3,5-},3-,9-)").unwrap();
        let set = BTreeSet::from([vtx("3-"), vtx("3+"), vtx("5-")]);
        assert_eq!(within, Event::within(&set, "3-", "9-"));
    }

    #[test]
    fn rejects_garbage() {
        for bad in [
            "",
            "reach(1,2)",
            "reach(1-,2-",
            "frob(1-)",
            "and(true,)",
            "true x",
            "not(true,true)",
        ] {
            assert!(parse_event(bad).is_err(), "{bad:?} should fail");
        }
    }

    fn arb_vertex() -> impl Strategy<Value = String> {
        ("[1-9][ab]?", prop_oneof![Just('-'), Just('+')]).prop_map(|(l, s)| format!("{l}{s}"))
    }

    fn arb_event() -> impl Strategy<Value = Event> {
        let leaf = prop_oneof![
            Just(Event::True),
            (arb_vertex(), arb_vertex()).prop_map(|(x, y)| Event::reach(&x, &y)),
            (arb_vertex(), arb_vertex()).prop_map(|(x, y)| Event::edge(&x, &y)),
            proptest::collection::btree_set("[1-9]", 0..4)
                .prop_map(|s| Event::posts_exactly(s.iter().map(String::as_str))),
            (
                proptest::collection::btree_set(arb_vertex(), 0..4),
                arb_vertex(),
                arb_vertex()
            )
                .prop_map(|(u, x, y)| Event::within(&u.iter().map(|v| vtx(v)).collect(), &x, &y)),
        ];
        leaf.prop_recursive(3, 24, 3, |inner| {
            prop_oneof![
                proptest::collection::vec(inner.clone(), 0..3).prop_map(Event::And),
                proptest::collection::vec(inner.clone(), 0..3).prop_map(Event::Or),
                inner.prop_map(Event::not),
            ]
        })
    }

    proptest! {
        #[test]
        fn display_then_parse_is_identity(ev in arb_event()) {
            prop_assert_eq!(parse_event(&ev.to_string()).unwrap(), ev);
        }
    }
}
