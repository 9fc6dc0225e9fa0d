//! Frontier dynamic programming for `P(x -> y)` on bunkbeds of acyclic graphs.
//!
//! Vertical pairs are visited in topological order of the base graph. The
//! state is the joint reached-status of the pairs that still matter (two bits
//! per pair: lower, upper), together with its exact probability. Since every
//! bunkbed cycle lives inside one pair, the status of a pair is final once its
//! in-edges and its vertical have been applied.

use std::collections::{BTreeMap, HashMap};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::model::{half, EdgeModel};
use super::prob::ExactProb;
use crate::error::{EngineError, EventError};
use crate::graph::{BunkbedGraph, BunkbedVertex, Layer};

pub const DEFAULT_FRONTIER_CAP: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DpOptions {
    /// Maximum number of simultaneously tracked pairs (at most 32).
    pub max_frontier: usize,
}

impl Default for DpOptions {
    fn default() -> Self {
        DpOptions {
            max_frontier: DEFAULT_FRONTIER_CAP,
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Op {
    /// Reached-bit `from` propagates to reached-bit `to` through `edge`.
    Edge {
        from: u32,
        to: u32,
        edge: usize,
    },
    /// Vertical `edge` joins the two bits of `slot`.
    Vertical {
        slot: u32,
        edge: usize,
    },
    Drop {
        slot: u32,
    },
}

#[derive(Debug, Clone)]
struct Plan {
    ops: Vec<Op>,
    source_bit: Option<u32>,
    target_slot: Option<u32>,
    width: usize,
}

fn layer_bit(l: Layer) -> u32 {
    match l {
        Layer::Lower => 0,
        Layer::Upper => 1,
    }
}

fn plan(
    bb: &BunkbedGraph,
    model: &EdgeModel,
    source: usize,
    source_layer: Layer,
    target: usize,
    cap: usize,
) -> Result<Plan, EngineError> {
    let g = bb.base();
    let order = g.topological_order().ok_or(EngineError::BaseNotAcyclic)?;
    let n = g.vertex_count();
    let mut desc = vec![false; n];
    let mut anc = vec![false; n];
    desc[source] = true;
    for &v in &order {
        if desc[v] {
            for &e in g.out_edges(v) {
                desc[g.edges()[e].1] = true;
            }
        }
    }
    anc[target] = true;
    for &v in order.iter().rev() {
        if anc[v] {
            for &e in g.in_edges(v) {
                anc[g.edges()[e].0] = true;
            }
        }
    }
    let relevant: Vec<bool> = (0..n).map(|v| desc[v] && anc[v]).collect();
    if !relevant[target] {
        return Ok(Plan {
            ops: Vec::new(),
            source_bit: None,
            target_slot: None,
            width: 0,
        });
    }
    let live = |e: usize| {
        let (a, b) = g.edges()[e];
        relevant[a] && relevant[b]
    };
    let mut pending: Vec<usize> = (0..n)
        .map(|v| g.out_edges(v).iter().filter(|&&e| live(e)).count())
        .collect();
    let mut consumed = vec![false; g.edge_count()];
    let mut slots: Vec<Option<usize>> = Vec::new();
    let mut slot_of: HashMap<usize, u32> = HashMap::new();
    let mut ops = Vec::new();
    let mut width = 0;
    let cap = cap.min(32);

    let mut open =
        |v: usize, slots: &mut Vec<Option<usize>>, slot_of: &mut HashMap<usize, u32>| -> Result<u32, EngineError> {
            if let Some(&s) = slot_of.get(&v) {
                return Ok(s);
            }
            let s = match slots.iter().position(Option::is_none) {
                Some(i) => i,
                None => {
                    slots.push(None);
                    slots.len() - 1
                }
            };
            slots[s] = Some(v);
            slot_of.insert(v, s as u32);
            let used = slots.iter().filter(|s| s.is_some()).count();
            width = width.max(used);
            if used > cap {
                return Err(EngineError::FrontierTooWide { width: used, cap });
            }
            Ok(s as u32)
        };
    let horizontal = |e: usize, from: u32, to: u32, ops: &mut Vec<Op>| {
        for l in Layer::both() {
            let edge = bb.horizontal_edge(e, l);
            if !model.prob(edge).is_zero() {
                let b = layer_bit(l);
                ops.push(Op::Edge {
                    from: 2 * from + b,
                    to: 2 * to + b,
                    edge,
                });
            }
        }
    };
    let close = |v: usize, slots: &mut Vec<Option<usize>>, slot_of: &mut HashMap<usize, u32>, ops: &mut Vec<Op>| {
        let s = slot_of.remove(&v).expect("open vertex");
        slots[s as usize] = None;
        ops.push(Op::Drop { slot: s });
    };

    let mut target_slot = None;
    let mut source_bit = None;
    for &v in order.iter().filter(|&&v| relevant[v]) {
        let s = open(v, &mut slots, &mut slot_of)?;
        if v == source {
            source_bit = Some(2 * s + layer_bit(source_layer));
        }
        for &e in g.in_edges(v) {
            if !live(e) || consumed[e] {
                continue;
            }
            let u = g.edges()[e].0;
            horizontal(e, slot_of[&u], s, &mut ops);
            consumed[e] = true;
            pending[u] -= 1;
            if pending[u] == 0 {
                close(u, &mut slots, &mut slot_of, &mut ops);
            }
        }
        let ve = bb.vertical_edge(v);
        if !model.prob(ve).is_zero() {
            ops.push(Op::Vertical { slot: s, edge: ve });
        }
        if v == target {
            target_slot = Some(s);
            break;
        }
        let outs: Vec<usize> = g.out_edges(v).iter().copied().filter(|&e| live(e)).collect();
        let fresh = outs.iter().filter(|&&e| !slot_of.contains_key(&g.edges()[e].1)).count();
        if fresh <= 1 {
            for e in outs {
                let w = g.edges()[e].1;
                let t = open(w, &mut slots, &mut slot_of)?;
                horizontal(e, s, t, &mut ops);
                consumed[e] = true;
                pending[v] -= 1;
            }
        }
        if pending[v] == 0 {
            close(v, &mut slots, &mut slot_of, &mut ops);
        }
    }
    Ok(Plan {
        ops,
        source_bit,
        target_slot,
        width,
    })
}

trait Weight: Clone {
    fn merge(&mut self, other: Self);
    /// `(present, absent)` shares of `w` for an edge with factor `f`.
    fn split(self, f: &Factor) -> (Self, Self);
}

#[derive(Debug, Clone)]
struct Factor {
    num: BigUint,
    rest: BigUint,
    den: BigUint,
    half: bool,
    p: f64,
    certain: bool,
}

impl Factor {
    fn new(p: &BigRational) -> Factor {
        let num = p.numer().to_biguint().expect("non-negative");
        let den = p.denom().to_biguint().expect("positive");
        Factor {
            rest: &den - &num,
            half: *p == half(),
            p: p.to_f64().unwrap_or(f64::NAN),
            certain: p.is_one(),
            num,
            den,
        }
    }
}

impl Weight for BigUint {
    fn merge(&mut self, other: Self) {
        *self += other;
    }

    fn split(self, f: &Factor) -> (Self, Self) {
        if f.half {
            let h = self >> 1u32;
            (h.clone(), h)
        } else {
            let q = self / &f.den;
            (&q * &f.num, q * &f.rest)
        }
    }
}

impl Weight for f64 {
    fn merge(&mut self, other: Self) {
        *self += other;
    }

    fn split(self, f: &Factor) -> (Self, Self) {
        (self * f.p, self * (1.0 - f.p))
    }
}

fn insert<W: Weight>(map: &mut BTreeMap<u64, W>, key: u64, w: W) {
    match map.get_mut(&key) {
        Some(x) => x.merge(w),
        None => {
            map.insert(key, w);
        }
    }
}

fn run<W: Weight>(plan: &Plan, factors: &HashMap<usize, Factor>, start: W) -> BTreeMap<u64, W> {
    let mut states = BTreeMap::new();
    states.insert(plan.source_bit.map_or(0, |b| 1u64 << b), start);
    for op in &plan.ops {
        let mut next = BTreeMap::new();
        match *op {
            Op::Edge { from, to, edge } => {
                let f = &factors[&edge];
                for (key, w) in states {
                    if key >> from & 1 == 1 && key >> to & 1 == 0 {
                        if f.certain {
                            insert(&mut next, key | 1 << to, w);
                        } else {
                            let (yes, no) = w.split(f);
                            insert(&mut next, key | 1 << to, yes);
                            insert(&mut next, key, no);
                        }
                    } else {
                        insert(&mut next, key, w);
                    }
                }
            }
            Op::Vertical { slot, edge } => {
                let f = &factors[&edge];
                let both = 3u64 << (2 * slot);
                for (key, w) in states {
                    let st = key & both;
                    if st != 0 && st != both {
                        if f.certain {
                            insert(&mut next, key | both, w);
                        } else {
                            let (yes, no) = w.split(f);
                            insert(&mut next, key | both, yes);
                            insert(&mut next, key, no);
                        }
                    } else {
                        insert(&mut next, key, w);
                    }
                }
            }
            Op::Drop { slot } => {
                let mask = !(3u64 << (2 * slot));
                for (key, w) in states {
                    insert(&mut next, key & mask, w);
                }
            }
        }
        states = next;
    }
    states
}

struct Prepared {
    plan: Plan,
    factors: HashMap<usize, Factor>,
}

fn prepare(
    bb: &BunkbedGraph,
    model: &EdgeModel,
    source: &BunkbedVertex,
    target: usize,
    opts: DpOptions,
) -> Result<Prepared, EngineError> {
    model.check(bb)?;
    let s = bb
        .base()
        .index_of(source.base.as_str())
        .ok_or_else(|| EventError::UnboundReference(source.to_string()))?;
    let plan = plan(bb, model, s, source.layer, target, opts.max_frontier)?;
    let factors = plan
        .ops
        .iter()
        .filter_map(|op| match *op {
            Op::Edge { edge, .. } | Op::Vertical { edge, .. } => Some(edge),
            Op::Drop { .. } => None,
        })
        .map(|e| (e, Factor::new(model.prob(e))))
        .collect();
    Ok(Prepared { plan, factors })
}

fn target_index(bb: &BunkbedGraph, target: &BunkbedVertex) -> Result<usize, EngineError> {
    Ok(bb
        .base()
        .index_of(target.base.as_str())
        .ok_or_else(|| EventError::UnboundReference(target.to_string()))?)
}

/// Exact `P(x -> y^-)` and `P(x -> y^+)` for a base vertex `y`, from one pass.
pub fn exact_reach_dp_layers(
    bb: &BunkbedGraph,
    model: &EdgeModel,
    source: &BunkbedVertex,
    target: &str,
    opts: DpOptions,
) -> Result<[ExactProb; 2], EngineError> {
    let t = bb
        .base()
        .index_of(target)
        .ok_or_else(|| EventError::UnboundReference(target.to_string()))?;
    let prep = prepare(bb, model, source, t, opts)?;
    let Some(slot) = prep.plan.target_slot else {
        return Ok([ExactProb::zero(), ExactProb::zero()]);
    };
    let scale: BigUint = prep
        .factors
        .values()
        .filter(|f| !f.certain)
        .fold(BigUint::one(), |d, f| d * &f.den);
    let states = run(&prep.plan, &prep.factors, scale.clone());
    let mut sums = [BigUint::zero(), BigUint::zero()];
    for (key, w) in states {
        for (b, sum) in sums.iter_mut().enumerate() {
            if key >> (2 * slot + b as u32) & 1 == 1 {
                *sum += &w;
            }
        }
    }
    Ok(sums.map(|s| ExactProb::new(BigRational::new(BigInt::from(s), BigInt::from(scale.clone())))))
}

/// Exact `P(source -> target)`. Requires an acyclic base graph.
pub fn exact_reach_dp(
    bb: &BunkbedGraph,
    model: &EdgeModel,
    source: &BunkbedVertex,
    target: &BunkbedVertex,
) -> Result<ExactProb, EngineError> {
    target_index(bb, target)?;
    let [lo, up] = exact_reach_dp_layers(bb, model, source, target.base.as_str(), DpOptions::default())?;
    Ok(match target.layer {
        Layer::Lower => lo,
        Layer::Upper => up,
    })
}

/// Floating-point variant of [`exact_reach_dp`], for quick exploration.
pub fn float_reach_dp(
    bb: &BunkbedGraph,
    model: &EdgeModel,
    source: &BunkbedVertex,
    target: &BunkbedVertex,
    opts: DpOptions,
) -> Result<f64, EngineError> {
    let t = target_index(bb, target)?;
    let prep = prepare(bb, model, source, t, opts)?;
    let Some(slot) = prep.plan.target_slot else {
        return Ok(0.0);
    };
    let bit = 2 * slot + layer_bit(target.layer);
    let states = run(&prep.plan, &prep.factors, 1.0f64);
    Ok(states
        .into_iter()
        .filter(|(k, _)| k >> bit & 1 == 1)
        .map(|(_, w)| w)
        .sum())
}

/// Largest number of pairs tracked at once when computing reachability to `target`.
pub fn frontier_width(
    bb: &BunkbedGraph,
    model: &EdgeModel,
    source: &BunkbedVertex,
    target: &BunkbedVertex,
) -> Result<usize, EngineError> {
    let t = target_index(bb, target)?;
    Ok(prepare(bb, model, source, t, DpOptions { max_frontier: 32 })?
        .plan
        .width)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engines::enumerate::{exact_enumeration, EnumOptions};
    use crate::engines::model::conditioned_model;
    use crate::events::{vtx, Event};
    use crate::graph::{build_digraph, build_g1, build_g2k, bunkbed};

    #[test]
    fn single_edge_hand_values() {
        let bb = bunkbed(&build_digraph(["1", "2"], [("1", "2")]).unwrap());
        let m = EdgeModel::uniform(&bb, half()).unwrap();
        assert_eq!(
            exact_reach_dp(&bb, &m, &vtx("1-"), &vtx("2+")).unwrap(),
            ExactProb::ratio(7, 16)
        );
        assert_eq!(
            exact_reach_dp(&bb, &m, &vtx("1-"), &vtx("2-")).unwrap(),
            ExactProb::ratio(9, 16)
        );
        assert_eq!(
            exact_reach_dp(&bb, &m, &vtx("2-"), &vtx("1-")).unwrap(),
            ExactProb::zero()
        );
        assert_eq!(
            exact_reach_dp(&bb, &m, &vtx("1-"), &vtx("1+")).unwrap(),
            ExactProb::ratio(1, 2)
        );
        assert_eq!(
            exact_reach_dp(&bb, &m, &vtx("2+"), &vtx("2+")).unwrap(),
            ExactProb::one()
        );
    }

    #[test]
    fn rejects_cycles() {
        let bb = bunkbed(&build_digraph(["a", "b"], [("a", "b"), ("b", "a")]).unwrap());
        let m = EdgeModel::uniform(&bb, half()).unwrap();
        assert_eq!(
            exact_reach_dp(&bb, &m, &vtx("a-"), &vtx("b-")),
            Err(EngineError::BaseNotAcyclic)
        );
    }

    #[test]
    fn matches_enumeration_on_conditioned_g1() {
        let bb = bunkbed(&build_g1());
        let m = conditioned_model(&bb, &["2", "5", "8"], half()).unwrap();
        let want = exact_enumeration(
            &bb,
            &m,
            &[Event::reach("1-", "9-"), Event::reach("1-", "9+")],
            EnumOptions::default(),
        )
        .unwrap();
        let got = exact_reach_dp_layers(&bb, &m, &vtx("1-"), "9", DpOptions::default()).unwrap();
        assert_eq!(got.to_vec(), want);
    }

    #[test]
    fn non_dyadic_weights() {
        let bb = bunkbed(&build_digraph(["1", "2", "3"], [("1", "2"), ("2", "3"), ("1", "3")]).unwrap());
        let third = BigRational::new(1.into(), 3.into());
        let mut m = EdgeModel::uniform(&bb, half()).unwrap();
        for e in 0..bb.edge_count() {
            if e % 2 == 0 {
                m.set(e, third.clone()).unwrap();
            }
        }
        for t in ["3-", "3+", "2+"] {
            let want = exact_enumeration(&bb, &m, &[Event::reach("1-", t)], EnumOptions::default()).unwrap();
            assert_eq!(exact_reach_dp(&bb, &m, &vtx("1-"), &vtx(t)).unwrap(), want[0]);
        }
        let f = float_reach_dp(&bb, &m, &vtx("1-"), &vtx("3+"), DpOptions::default()).unwrap();
        let exact = exact_reach_dp(&bb, &m, &vtx("1-"), &vtx("3+")).unwrap();
        assert!((f - exact.to_f64()).abs() < 1e-12);
    }

    #[test]
    fn gadget_frontier_stays_small() {
        for k in [1, 5, 40] {
            let bb = bunkbed(&build_g2k(k).unwrap());
            let m = EdgeModel::uniform(&bb, half()).unwrap();
            assert!(frontier_width(&bb, &m, &vtx("1-"), &vtx("9+")).unwrap() <= 4);
        }
    }

    #[test]
    fn frontier_cap_is_enforced() {
        let bb = bunkbed(&build_g2k(3).unwrap());
        let m = EdgeModel::uniform(&bb, half()).unwrap();
        assert!(matches!(
            exact_reach_dp_layers(&bb, &m, &vtx("1-"), "9", DpOptions { max_frontier: 2 }),
            Err(EngineError::FrontierTooWide { cap: 2, .. })
        ));
    }
}
