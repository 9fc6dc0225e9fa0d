//! Shared inputs and sweeps of the conditioned G1 verifications.
//!
//! Sweeps over fixed inputs are computed once per process and cached.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::engines::{
    conditioned_model, exact_enumeration, exact_reach_dp_layers, fold_configs, half, posts_exactly_model, ConfigSpace,
    DpOptions, EdgeModel, EnumOptions, ExecPolicy, Sampler, DEFAULT_FREE_EDGE_CAP,
};
use crate::events::{g1_event_table, vtx, CompiledEvents, Event, G1Events, Scratch};
use crate::graph::{build_g1, bunkbed, g1_reflection, BunkbedEdge, BunkbedGraph, MirrorMap, ShadowEdgeSet, G1_POSTS};

/// Base vertices outside the posts of the conditioned model.
pub const FREE_POSTS: [&str; 6] = ["1", "3", "4", "6", "7", "9"];

pub(crate) struct G1 {
    pub bb: BunkbedGraph,
    pub table: G1Events,
    pub conditioned: EdgeModel,
    pub posts_exactly: EdgeModel,
}

pub(crate) fn g1() -> &'static G1 {
    static CELL: OnceLock<G1> = OnceLock::new();
    CELL.get_or_init(|| {
        let bb = bunkbed(&build_g1());
        G1 {
            conditioned: conditioned_model(&bb, &G1_POSTS, half()).expect("G1 has the posts"),
            posts_exactly: posts_exactly_model(&bb, &G1_POSTS, half()).expect("G1 has the posts"),
            table: g1_event_table(),
            bb,
        }
    })
}

pub(crate) fn shadow(arcs: &[(&str, &str)]) -> ShadowEdgeSet {
    ShadowEdgeSet::from_labels(g1().bb.base(), arcs).expect("arcs of G1")
}

pub(crate) fn k_set() -> Vec<(&'static str, &'static str)> {
    vec![("5", "6"), ("6", "7"), ("6", "9"), ("7", "8"), ("8", "9")]
}

/// Edge permutation induced by reversing every arc of G1 and relabelling
/// `i -> 10 - i`.
pub(crate) fn reflection_permutation(bb: &BunkbedGraph) -> Vec<usize> {
    let g = bb.base();
    let sigma = g1_reflection();
    let image = |v: usize| g.index_of(sigma[g.label(v)].as_str()).expect("relabelled vertex");
    bb.edges()
        .iter()
        .map(|e| match *e {
            BunkbedEdge::Horizontal { edge, layer } => {
                let (a, b) = g.edges()[edge];
                let f = g.edge_index(image(b), image(a)).expect("G1 is self-reverse");
                bb.horizontal_edge(f, layer)
            }
            BunkbedEdge::Vertical { vertex } => bb.vertical_edge(image(vertex)),
        })
        .collect()
}

pub(crate) fn permute(perm: &[usize], src: &[u64], dst: &mut [u64]) {
    dst.fill(0);
    for (e, &to) in perm.iter().enumerate() {
        if src[e / 64] >> (e % 64) & 1 == 1 {
            dst[to / 64] |= 1 << (to % 64);
        }
    }
}

/// Named events evaluated over the posts-exactly configurations.
fn f_events(t: &G1Events) -> Vec<(String, Event)> {
    let mut v: Vec<(String, Event)> = Vec::new();
    let mut add = |name: &str, ev: Event| v.push((name.to_string(), ev));
    add("A", t.a.clone());
    add("B", t.b.clone());
    for i in 0..4 {
        add(&format!("A{}", i + 1), t.a_parts[i].clone());
        add(&format!("B{}", i + 1), t.b_parts[i].clone());
    }
    let sign = ['-', '+'];
    for e in 0..2 {
        let p = &t.p[e];
        add(&format!("P{}", sign[e]), p.clone());
        add(&format!("P{}&R", sign[e]), Event::and([p.clone(), t.r.clone()]));
        add(
            &format!("P{}&!R", sign[e]),
            Event::and([p.clone(), Event::not(t.r.clone())]),
        );
        for d in 0..2 {
            let q = &t.q[e][d];
            add(&format!("Q{}{}", sign[e], sign[d]), q.clone());
            add(
                &format!("P{}&Q{}{}", sign[e], sign[e], sign[d]),
                Event::and([p.clone(), q.clone()]),
            );
        }
    }
    add("R", t.r.clone());
    for s in sign {
        let target = format!("9{s}");
        let w = Event::within(&t.shaded, "3-", &target);
        let z = Event::reach_from_any_layer("5", &target);
        let y = Event::and([Event::reach("7-", &target), z.clone()]);
        add(&format!("W{s}"), w.clone());
        add(&format!("Z{s}"), z.clone());
        add(&format!("W&Z{s}"), Event::and([w, z]));
        add(&format!("Y{s}"), y.clone());
        add(&format!("e37&Y{s}"), Event::and([Event::edge("3-", "7-"), y]));
    }
    let z = Event::reach_from_any_layer("5", "9-");
    add("Y'-", Event::and([Event::reach("7+", "9-"), z.clone()]));
    add(
        "L",
        Event::and([
            Event::reach("7-", "9-"),
            z.clone(),
            Event::not(Event::reach("7+", "9-")),
        ]),
    );
    add(
        "Rhs",
        Event::and([Event::reach("7+", "9-"), z, Event::not(Event::reach("7-", "9-"))]),
    );
    v
}

/// Probabilities conditional on `F` and per-configuration checks over all
/// `2^22` configurations with posts exactly `{2,5,8}`.
pub(crate) struct FSweep {
    pub probs: BTreeMap<String, BigRational>,
    pub configs: u64,
    /// `A_i(H) != B_i(M(H, F_i))` for the three explicit mirror identities.
    pub mirror_parts: [u64; 3],
    /// `(P_+ & !R)(H) != (P_- & !R)(M(H, {(2,3),(3,4),(4,5)}))`.
    pub mirror_p: u64,
    /// Reflection reduction: `L(H) != P_-(phi H)` and `Rhs(H) != P_+(phi H)`.
    pub reflect: [u64; 2],
    /// Decomposition failures of `A` and `B` on `F`.
    pub partition: [u64; 2],
}

impl FSweep {
    pub fn p(&self, name: &str) -> &BigRational {
        self.probs
            .get(name)
            .unwrap_or_else(|| panic!("no event {name} in the F sweep"))
    }
}

pub(crate) fn f_sweep() -> &'static FSweep {
    static CELL: OnceLock<FSweep> = OnceLock::new();
    CELL.get_or_init(|| compute_f_sweep(ExecPolicy::default()))
}

#[derive(Clone)]
struct FAcc {
    counts: Vec<u64>,
    viol: [u64; 8],
}

fn compute_f_sweep(policy: ExecPolicy) -> FSweep {
    let ctx = g1();
    let bb = &ctx.bb;
    let t = &ctx.table;
    let named = f_events(t);
    let events: Vec<Event> = named.iter().map(|(_, e)| e.clone()).collect();
    let compiled = CompiledEvents::new(bb, &events).expect("events bind to G1");
    let idx = |n: &str| named.iter().position(|(m, _)| m == n).expect("named event");
    let p_minus_not_r = Event::and([t.p[0].clone(), Event::not(t.r.clone())]);
    let targets = CompiledEvents::new(
        bb,
        &[
            t.b_parts[1].clone(),
            t.b_parts[2].clone(),
            t.b_parts[3].clone(),
            p_minus_not_r,
            t.p[0].clone(),
            t.p[1].clone(),
        ],
    )
    .expect("events bind to G1");
    let mut k37 = k_set();
    k37.push(("3", "7"));
    let mirrors = [
        MirrorMap::new(bb, &shadow(&[("8", "9")])),
        MirrorMap::new(bb, &shadow(&k_set())),
        MirrorMap::new(bb, &shadow(&k37)),
        MirrorMap::new(bb, &shadow(&[("2", "3"), ("3", "4"), ("4", "5")])),
    ];
    let perm = reflection_permutation(bb);
    let space = ConfigSpace::new(bb, &ctx.posts_exactly, None, DEFAULT_FREE_EDGE_CAP).expect("22 free edges");
    let a_parts = [idx("A1"), idx("A2"), idx("A3"), idx("A4"), idx("P-&Q--"), idx("P+&Q+-")];
    let b_parts = [idx("B1"), idx("B2"), idx("B3"), idx("B4"), idx("P-&Q-+"), idx("P+&Q++")];
    let (ia, ib, ibs) = (idx("A"), idx("B"), [idx("A2"), idx("A3"), idx("A4")]);
    let (ip, il, ir) = (idx("P+&!R"), idx("L"), idx("Rhs"));
    let n = events.len();
    let words = space.words();

    let (acc, ..) = fold_configs(
        &space,
        policy,
        || {
            (
                FAcc {
                    counts: vec![0; n],
                    viol: [0; 8],
                },
                compiled.scratch(),
                targets.scratch(),
                vec![false; n],
                vec![0u64; words],
            )
        },
        |(acc, s1, s2, out, buf): &mut (FAcc, Scratch, Scratch, Vec<bool>, Vec<u64>), _, cfg| {
            compiled.eval(cfg, s1, out);
            for (c, &hit) in acc.counts.iter_mut().zip(out.iter()) {
                *c += u64::from(hit);
            }
            for j in 0..3 {
                mirrors[j].apply_words(cfg, buf);
                acc.viol[j] += u64::from(out[ibs[j]] != targets.eval_one(j, buf, s2));
            }
            mirrors[3].apply_words(cfg, buf);
            acc.viol[3] += u64::from(out[ip] != targets.eval_one(3, buf, s2));
            permute(&perm, cfg, buf);
            acc.viol[4] += u64::from(out[il] != targets.eval_one(4, buf, s2));
            acc.viol[5] += u64::from(out[ir] != targets.eval_one(5, buf, s2));
            for (k, (whole, parts)) in [(ia, &a_parts), (ib, &b_parts)].into_iter().enumerate() {
                let hits = parts.iter().filter(|&&i| out[i]).count();
                acc.viol[6 + k] += u64::from(hits != usize::from(out[whole]));
            }
        },
        |mut a, b| {
            for (x, y) in a.0.counts.iter_mut().zip(b.0.counts) {
                *x += y;
            }
            for (x, y) in a.0.viol.iter_mut().zip(b.0.viol) {
                *x += y;
            }
            a
        },
    );
    let total = BigInt::from(space.size());
    let probs = named
        .iter()
        .zip(acc.counts)
        .map(|((name, _), c)| (name.clone(), BigRational::new(BigInt::from(c), total.clone())))
        .collect();
    let v = acc.viol;
    FSweep {
        probs,
        configs: space.size(),
        mirror_parts: [v[0], v[1], v[2]],
        mirror_p: v[3],
        reflect: [v[4], v[5]],
        partition: [v[6], v[7]],
    }
}

/// Exact `P(A)`, `P(B)` and `P(F)` under the conditioned model.
pub(crate) struct Unconditional {
    pub a: BigRational,
    pub b: BigRational,
    pub f: BigRational,
}

pub(crate) fn unconditional() -> &'static Unconditional {
    static CELL: OnceLock<Unconditional> = OnceLock::new();
    CELL.get_or_init(|| {
        let ctx = g1();
        let [a, b] = exact_reach_dp_layers(&ctx.bb, &ctx.conditioned, &vtx("1-"), "9", DpOptions::default())
            .expect("G1 is acyclic");
        let f = exact_enumeration(
            &ctx.bb,
            &ctx.conditioned,
            std::slice::from_ref(&ctx.table.f),
            EnumOptions::default(),
        )
        .expect("six free verticals")
        .remove(0);
        Unconditional {
            a: a.into_value(),
            b: b.into_value(),
            f: f.into_value(),
        }
    })
}

/// Which configurations the full-support sweep visits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coverage {
    /// All `2^28` configurations of the conditioned model.
    Exhaustive,
    /// `n` seeded samples from the conditioned model.
    Sampled { n: u64, seed: u64 },
}

/// Per-configuration checks over the conditioned model that need the
/// configurations outside `F`.
#[derive(Debug, Clone)]
pub(crate) struct FullSweep {
    pub configs: u64,
    /// Configurations with at least one extra post.
    pub extra_post_configs: u64,
    /// `A(H) != B(M(H, R(S)))` where `S` is the set of extra posts.
    pub biconditional: u64,
    /// Extra-post sets seen with at least one configuration.
    pub sets_seen: usize,
    pub partition: [u64; 2],
    /// Counts of `A`, `B`, `A1..A4`, `B1..B4`.
    pub counts: BTreeMap<String, u64>,
}

const FULL_NAMES: [&str; 10] = ["A", "B", "A1", "A2", "A3", "A4", "B1", "B2", "B3", "B4"];

#[derive(Clone)]
struct FullAcc {
    counts: [u64; 14],
    extra: u64,
    bicond: u64,
    seen: u64,
    partition: [u64; 2],
}

impl FullAcc {
    fn merge(mut self, b: FullAcc) -> FullAcc {
        for (x, y) in self.counts.iter_mut().zip(b.counts) {
            *x += y;
        }
        self.extra += b.extra;
        self.bicond += b.bicond;
        self.seen |= b.seen;
        self.partition[0] += b.partition[0];
        self.partition[1] += b.partition[1];
        self
    }
}

struct FullChecker {
    compiled: CompiledEvents,
    target: CompiledEvents,
    /// Indexed by the bit mask of extra posts over [`FREE_POSTS`].
    mirrors: Vec<MirrorMap>,
    verticals: [usize; 6],
}

impl FullChecker {
    fn new() -> FullChecker {
        let ctx = g1();
        let bb = &ctx.bb;
        let t = &ctx.table;
        let g = bb.base();
        let mut events = vec![t.a.clone(), t.b.clone()];
        events.extend(t.a_parts.iter().cloned());
        events.extend(t.b_parts.iter().cloned());
        events.extend(t.decomposition(false)[4..].iter().cloned());
        events.extend(t.decomposition(true)[4..].iter().cloned());
        let compiled = CompiledEvents::new(bb, &events).expect("events bind to G1");
        let target = CompiledEvents::new(bb, std::slice::from_ref(&t.b)).expect("events bind to G1");
        let verticals = FREE_POSTS.map(|v| bb.vertical_edge(g.index_of(v).expect("G1 vertex")));
        let nine = g.index_of("9").expect("G1 vertex");
        let mirrors = (0..64u32)
            .map(|mask| {
                let mut blocked = g.vertex_set(G1_POSTS).expect("G1 posts");
                for (j, v) in FREE_POSTS.iter().enumerate() {
                    if mask >> j & 1 == 1 {
                        blocked.insert(g.index_of(v).expect("G1 vertex"));
                    }
                }
                let r = g.reachable_edge_set(nine, &blocked);
                MirrorMap::new(bb, &ShadowEdgeSet::new(g, r).expect("edges of G1"))
            })
            .collect();
        FullChecker {
            compiled,
            target,
            mirrors,
            verticals,
        }
    }

    fn visit(&self, acc: &mut FullAcc, cfg: &[u64], s1: &mut Scratch, s2: &mut Scratch, buf: &mut [u64]) {
        let bits = self.compiled.eval_bits(cfg, s1);
        for (i, c) in acc.counts.iter_mut().enumerate() {
            *c += bits >> i & 1;
        }
        let mut mask = 0usize;
        for (j, &e) in self.verticals.iter().enumerate() {
            if cfg[e / 64] >> (e % 64) & 1 == 1 {
                mask |= 1 << j;
            }
        }
        acc.seen |= 1 << mask;
        if mask != 0 {
            acc.extra += 1;
            self.mirrors[mask].apply_words(cfg, buf);
            acc.bicond += u64::from((bits & 1 == 1) != self.target.eval_one(0, buf, s2));
        }
        // Parts of A: A1..A4 (bits 2..5) and the two tails (10, 11); B: 6..9, 12, 13.
        let a_parts = (bits >> 2 & 0xf).count_ones() + (bits >> 10 & 0x3).count_ones();
        let b_parts = (bits >> 6 & 0xf).count_ones() + (bits >> 12 & 0x3).count_ones();
        acc.partition[0] += u64::from(a_parts != (bits & 1) as u32);
        acc.partition[1] += u64::from(b_parts != (bits >> 1 & 1) as u32);
    }
}

fn full_sweep_uncached(coverage: Coverage, policy: ExecPolicy) -> FullSweep {
    let ctx = g1();
    let checker = FullChecker::new();
    let words = ctx.bb.edge_count().div_ceil(64);
    let init = || {
        (
            FullAcc {
                counts: [0; 14],
                extra: 0,
                bicond: 0,
                seen: 0,
                partition: [0; 2],
            },
            checker.compiled.scratch(),
            checker.target.scratch(),
            vec![0u64; words],
        )
    };
    let reduce = |a: (FullAcc, Scratch, Scratch, Vec<u64>), b: (FullAcc, Scratch, Scratch, Vec<u64>)| {
        (a.0.merge(b.0), a.1, a.2, a.3)
    };
    let (acc, configs) = match coverage {
        Coverage::Exhaustive => {
            let space =
                ConfigSpace::new(&ctx.bb, &ctx.conditioned, None, DEFAULT_FREE_EDGE_CAP).expect("28 free edges");
            let (acc, ..) = fold_configs(
                &space,
                policy,
                init,
                |(acc, s1, s2, buf), _, cfg| checker.visit(acc, cfg, s1, s2, buf),
                reduce,
            );
            (acc, space.size())
        }
        Coverage::Sampled { n, seed } => {
            let sampler = Sampler::new(&ctx.bb, &ctx.conditioned, seed).expect("model matches G1");
            const CHUNK: u64 = 4096;
            let (acc, ..) = crate::engines::fold_chunks(
                policy,
                n.div_ceil(CHUNK),
                || (init(), vec![0u64; words]),
                |((acc, s1, s2, buf), cfg), c| {
                    for i in c * CHUNK..((c + 1) * CHUNK).min(n) {
                        sampler.fill(i, cfg);
                        checker.visit(acc, cfg, s1, s2, buf);
                    }
                },
                |a, b| (reduce(a.0, b.0), a.1),
            )
            .0;
            (acc, n)
        }
    };
    let counts = FULL_NAMES
        .iter()
        .enumerate()
        .map(|(i, n)| (n.to_string(), acc.counts[i]))
        .collect();
    FullSweep {
        configs,
        extra_post_configs: acc.extra,
        biconditional: acc.bicond,
        sets_seen: (acc.seen & !1).count_ones() as usize,
        partition: acc.partition,
        counts,
    }
}

pub(crate) fn full_sweep(coverage: Coverage) -> FullSweep {
    static EXHAUSTIVE: OnceLock<FullSweep> = OnceLock::new();
    match coverage {
        Coverage::Exhaustive => EXHAUSTIVE
            .get_or_init(|| full_sweep_uncached(coverage, ExecPolicy::default()))
            .clone(),
        Coverage::Sampled { .. } => full_sweep_uncached(coverage, ExecPolicy::default()),
    }
}
