use std::collections::{BTreeMap, BTreeSet};

use super::{vtx, Event};
use crate::graph::{BunkbedVertex, Layer};

/// Base vertices of the induced subgraph used by the `Q` events.
pub const SHADED: [&str; 6] = ["3", "5", "6", "7", "8", "9"];

/// The named events of the conditioned G1 argument.
#[derive(Debug, Clone)]
pub struct G1Events {
    pub a: Event,
    pub b: Event,
    pub f: Event,
    /// `A_1..A_4`, index 0 is `A_1`.
    pub a_parts: [Event; 4],
    pub b_parts: [Event; 4],
    /// `P_-`, `P_+`.
    pub p: [Event; 2],
    /// `Q[eps][delta]` with index 0 for `-` and 1 for `+`.
    pub q: [[Event; 2]; 2],
    /// Lower copy of `(1,4)` present.
    pub r: Event,
    pub shaded: BTreeSet<BunkbedVertex>,
}

fn sign(l: Layer) -> char {
    l.sign()
}

fn idx(l: Layer) -> usize {
    match l {
        Layer::Lower => 0,
        Layer::Upper => 1,
    }
}

pub fn shaded_vertices() -> BTreeSet<BunkbedVertex> {
    SHADED
        .iter()
        .flat_map(|v| [vtx(&format!("{v}-")), vtx(&format!("{v}+"))])
        .collect()
}

/// Builds the events over labels of G1; bind them to `bunkbed(build_g1())`.
pub fn g1_event_table() -> G1Events {
    let a = Event::reach("1-", "9-");
    let b = Event::reach("1-", "9+");
    let f = Event::posts_exactly(["2", "5", "8"]);
    let to5 = Event::reach_any_layer("1-", "5");
    let to3 = Event::reach_any_layer("1-", "3");
    let to_both_3 = Event::and([Event::reach("1-", "3-"), Event::reach("1-", "3+"), to5.clone()]);
    let parts = |target: &Event| -> [Event; 4] {
        [
            Event::and([target.clone(), Event::not(f.clone())]),
            Event::and([target.clone(), f.clone(), Event::not(to5.clone())]),
            Event::and([target.clone(), f.clone(), to5.clone(), Event::not(to3.clone())]),
            Event::and([target.clone(), f.clone(), to_both_3.clone()]),
        ]
    };
    let p = Layer::both().map(|eps| {
        Event::and([
            Event::reach("1-", &format!("3{}", sign(eps))),
            to5.clone(),
            Event::not(Event::reach("1-", &format!("3{}", sign(eps.flip())))),
        ])
    });
    let shaded = shaded_vertices();
    let q = Layer::both().map(|eps| {
        Layer::both().map(|delta| {
            let target = format!("9{}", sign(delta));
            Event::or([
                Event::within(&shaded, &format!("3{}", sign(eps)), &target),
                Event::reach_from_any_layer("5", &target),
            ])
        })
    });
    G1Events {
        a_parts: parts(&a),
        b_parts: parts(&b),
        a,
        b,
        f,
        p,
        q,
        r: Event::edge("1-", "4-"),
        shaded,
    }
}

impl G1Events {
    /// All named events keyed `A`, `B`, `F`, `A1`..`A4`, `B1`..`B4`, `P-`,
    /// `P+`, `Q--`, `Q-+`, `Q+-`, `Q++` and `R`.
    pub fn as_map(&self) -> BTreeMap<String, Event> {
        let mut m = BTreeMap::new();
        m.insert("A".to_string(), self.a.clone());
        m.insert("B".to_string(), self.b.clone());
        m.insert("F".to_string(), self.f.clone());
        for i in 0..4 {
            m.insert(format!("A{}", i + 1), self.a_parts[i].clone());
            m.insert(format!("B{}", i + 1), self.b_parts[i].clone());
        }
        for eps in Layer::both() {
            m.insert(format!("P{}", sign(eps)), self.p[idx(eps)].clone());
            for delta in Layer::both() {
                m.insert(
                    format!("Q{}{}", sign(eps), sign(delta)),
                    self.q[idx(eps)][idx(delta)].clone(),
                );
            }
        }
        m.insert("R".to_string(), self.r.clone());
        m
    }

    /// The six parts of the decomposition of `A` (or of `B` with
    /// `upper = true`): four cut-out parts, then `P_- ∩ Q_{-δ} ∩ F` and
    /// `P_+ ∩ Q_{+δ} ∩ F`.
    pub fn decomposition(&self, upper: bool) -> [Event; 6] {
        let parts = if upper { &self.b_parts } else { &self.a_parts };
        let delta = usize::from(upper);
        let tail = |eps: usize| Event::and([self.f.clone(), self.p[eps].clone(), self.q[eps][delta].clone()]);
        [
            parts[0].clone(),
            parts[1].clone(),
            parts[2].clone(),
            parts[3].clone(),
            tail(0),
            tail(1),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::events::{eval_event, parse_event};
    use crate::graph::{build_g1, bunkbed, SubgraphMask};

    #[test]
    fn table_names() {
        let m = g1_event_table().as_map();
        let names: Vec<&str> = m.keys().map(String::as_str).collect();
        assert_eq!(
            names,
            [
                "A", "A1", "A2", "A3", "A4", "B", "B1", "B2", "B3", "B4", "F", "P+", "P-", "Q++", "Q+-", "Q-+", "Q--",
                "R"
            ]
        );
    }

    #[test]
    fn a2_shape() {
        let t = g1_event_table();
        let expect = parse_event("and(reach(1-,9-),postsExactly(2,5,8),not(or(reach(1-,5-),reach(1-,5+))))").unwrap();
        assert_eq!(t.a_parts[1], expect);
    }

    #[test]
    fn full_configuration() {
        let bb = bunkbed(&build_g1());
        let t = g1_event_table();
        let h = SubgraphMask::full(&bb);
        assert!(eval_event(&bb, &t.a, &h).unwrap());
        assert!(!eval_event(&bb, &t.f, &h).unwrap());
        for ev in t.as_map().values() {
            eval_event(&bb, ev, &h).unwrap();
        }
    }
}
