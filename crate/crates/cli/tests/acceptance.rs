//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on failure.

use std::process::Command;
use std::time::{Duration, Instant};

use bunkbed::engines::{
    conditioned_model, exact_enumeration, exact_reach_dp_layers, half, monte_carlo, rational_string, rational_to_f64,
    DpOptions, EdgeModel, EnumOptions, ExactProb, ExecPolicy, McOptions,
};
use bunkbed::events::{eval_event, vtx, CompiledEvents, Event};
use bunkbed::graph::{
    build_digraph, build_g1, bunkbed, mirror_subgraph, posts, BunkbedEdge, BunkbedGraph, MirrorMap, ShadowEdgeSet,
    SubgraphMask,
};
use bunkbed::suite::{
    certify_theorem, gadget_event_probability, gadget_formula, sweep_rows, verify_claim_i, verify_claim_ii,
    verify_claim_iii, verify_proposition, ClaimReport, Coverage, GadgetMethod,
};
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn criterion(n: u32, title: &str, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = f();
    println!(
        "criterion {n}: {} | {title} | {} | {:.1}s",
        if out.pass { "PASS" } else { "FAIL" },
        out.detail,
        start.elapsed().as_secs_f64()
    );
    out.pass
}

fn check_ok(rep: &ClaimReport, name: &str) -> bool {
    rep.check(name).is_some_and(|c| c.pass)
}

fn failures(rep: &ClaimReport) -> String {
    let f: Vec<String> = rep.failures().map(|c| c.name.clone()).collect();
    if f.is_empty() {
        "all checks pass".into()
    } else {
        format!("failed: {}", f.join("; "))
    }
}

fn c1() -> Outcome {
    let start = Instant::now();
    let rep = verify_claim_ii();
    let plus = rep
        .check("P_F(P+ & R) = 1/16 * 5/8")
        .map(|c| c.computed.clone())
        .unwrap_or_default();
    let minus = rep
        .check("P_F(P- & R) = 1/16 * 1/2")
        .map(|c| c.computed.clone())
        .unwrap_or_default();
    let pass = plus == "5/128" && minus == "1/32" && start.elapsed() <= Duration::from_secs(60);
    Outcome {
        pass,
        detail: format!("P_F(P+ & R) = {plus}, P_F(P- & R) = {minus}"),
    }
}

fn c2() -> Outcome {
    let start = Instant::now();
    let sampled = verify_claim_i(Coverage::Sampled { n: 1_000_000, seed: 0 });
    let sampled_time = start.elapsed();
    let full = verify_claim_i(Coverage::Exhaustive);
    let eq = (1..=4).all(|i| check_ok(&full, &format!("P(A{i}) = P(B{i})")));
    let pass = full.pass() && sampled.pass() && eq && sampled_time <= Duration::from_secs(60);
    Outcome {
        pass,
        detail: format!(
            "exhaustive: {}; sampled 10^6 in {:.1}s: {}",
            failures(&full),
            sampled_time.as_secs_f64(),
            failures(&sampled)
        ),
    }
}

fn c3() -> Outcome {
    let rep = verify_claim_iii();
    let named = [
        "P_F(Q++) = P_F(Q--)",
        "P_F(Q-+) = P_F(Q+-)",
        "P_F(Q--) > P_F(Q-+)",
        "P_F(Q--) = P_F(3- -> 9- in shaded) + P_F(5+- -> 9-) - 1/2 P_F(7-,5+- -> 9-): residual",
    ];
    let pass = rep.pass() && named.iter().all(|n| check_ok(&rep, n));
    let diff = rep
        .check("P_F(Q--) - P_F(Q-+)")
        .map(|c| c.computed.clone())
        .unwrap_or_default();
    Outcome {
        pass,
        detail: format!("{}; P_F(Q--) - P_F(Q-+) = {diff}", failures(&rep)),
    }
}

fn c4() -> Outcome {
    let rep = verify_proposition(Coverage::Exhaustive);
    let g = rep
        .check("g = P(B) - P(A)")
        .map(|c| c.computed.clone())
        .unwrap_or_default();
    let mc = rep
        .checks
        .iter()
        .find(|c| c.name.starts_with("g inside the 99% CI"))
        .map(|c| format!("MC {}", c.computed))
        .unwrap_or_default();
    Outcome {
        pass: rep.pass(),
        detail: format!("{}; g = {g}; {mc}", failures(&rep)),
    }
}

fn c5() -> Outcome {
    let start = Instant::now();
    let mut pass = true;
    let mut vals = Vec::new();
    for k in 1..=4 {
        for i in ["2", "5", "8"] {
            match gadget_event_probability(k, i, GadgetMethod::Exact) {
                Ok(p) => pass &= *p.value() == gadget_formula(k),
                Err(_) => pass = false,
            }
        }
        vals.push(rational_string(&gadget_formula(k)));
    }
    pass &= start.elapsed() <= Duration::from_secs(60);
    Outcome {
        pass,
        detail: format!("P(C_i) = {} for k = 1..4", vals.join(", ")),
    }
}

fn c6() -> Outcome {
    let start = Instant::now();
    let cert = match certify_theorem(1000, ExecPolicy::Parallel) {
        Ok(c) => c,
        Err(e) => {
            return Outcome {
                pass: false,
                detail: e.to_string(),
            }
        }
    };
    let mut ks = vec![];
    let mut k = 1;
    while k < cert.k_cert {
        ks.push(k);
        k *= 2;
    }
    ks.push(cert.k_cert);
    let powers_ok = ks.iter().all(|&k| cert.sweep[k - 1].limit_bound);
    // Continue the sweep past the certificate up to k = 1000.
    let rest: Vec<usize> = (cert.k_cert + 1..=1000).collect();
    let tail = sweep_rows(&rest, ExecPolicy::Parallel);
    let tail_ok = tail.as_ref().is_ok_and(|rows| {
        rows.iter()
            .all(|r| r.limit_bound && r.gap_bound && r.gap > BigRational::from_integer(0.into()))
    });
    let elapsed = start.elapsed();
    let pass = cert.pass && powers_ok && tail_ok && elapsed <= Duration::from_secs(600);
    Outcome {
        pass,
        detail: format!(
            "k_cert = {}, gap at k_cert = {:.6e} > 0, smallest positive k = {:?}, bounds on k in {:?}: {}, sweep to k = 1000 in {:.0}s",
            cert.k_cert,
            rational_to_f64(&cert.gap_at_cert),
            cert.smallest_positive_k,
            ks,
            powers_ok,
            elapsed.as_secs_f64()
        ),
    }
}

fn c7() -> Outcome {
    let g1 = bunkbed(&build_g1());
    let uniform = EdgeModel::uniform(&g1, half()).expect("model");
    let conditioned = conditioned_model(&g1, &["2", "5", "8"], half()).expect("model");
    let events = [Event::reach("1-", "9-"), Event::reach("1-", "9+")];
    let mut pass = true;
    let mut detail = Vec::new();
    for (name, model) in [("conditioned", &conditioned), ("uniform", &uniform)] {
        // The uniform model has 31 free edges, one above the default cap.
        let opts = EnumOptions {
            cap: 31,
            ..Default::default()
        };
        let e = exact_enumeration(&g1, model, &events, opts).expect("enumeration");
        let d = exact_reach_dp_layers(&g1, model, &vtx("1-"), "9", DpOptions::default()).expect("dp");
        pass &= e == d.to_vec();
        detail.push(format!("{name}: P(1- -> 9-) = {}, P(1- -> 9+) = {}", e[0], e[1]));
    }
    let single = bunkbed(&build_digraph(["1", "2"], [("1", "2")]).expect("graph"));
    let m = EdgeModel::uniform(&single, half()).expect("model");
    let ev = [Event::reach("1-", "2+"), Event::reach("1-", "2-")];
    let e = exact_enumeration(&single, &m, &ev, EnumOptions::default()).expect("enumeration");
    let d = exact_reach_dp_layers(&single, &m, &vtx("1-"), "2", DpOptions::default()).expect("dp");
    let hand = [ExactProb::ratio(7, 16), ExactProb::ratio(9, 16)];
    pass &= e == hand && d.to_vec() == vec![hand[1].clone(), hand[0].clone()];
    detail.push("single edge: 7/16 and 9/16".into());
    Outcome {
        pass,
        detail: detail.join("; "),
    }
}

fn random_mask(bb: &BunkbedGraph, rng: &mut ChaCha8Rng) -> SubgraphMask {
    SubgraphMask::from_edges(bb, (0..bb.edge_count()).filter(|_| rng.random_bool(0.5)))
}

fn random_shadow(bb: &BunkbedGraph, rng: &mut ChaCha8Rng) -> ShadowEdgeSet {
    let g = bb.base();
    ShadowEdgeSet::new(g, (0..g.edge_count()).filter(|_| rng.random_bool(0.5))).expect("base edges")
}

/// A random DAG on `n` vertices: arcs only from lower to higher index.
fn random_dag(rng: &mut ChaCha8Rng, n: usize, max_edges: usize) -> BunkbedGraph {
    let labels: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let mut arcs = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if arcs.len() < max_edges && rng.random_bool(0.5) {
                arcs.push((labels[a].clone(), labels[b].clone()));
            }
        }
    }
    bunkbed(&build_digraph(&labels, arcs).expect("simple DAG"))
}

/// `sum_H w(H) [ev(f(H))]` with `w(H) = prod (a_e or 8 - a_e)` over all configurations.
fn weighted_count(bb: &BunkbedGraph, a: &[u64], ev: &Event, mirror: Option<&MirrorMap>) -> u64 {
    let compiled = CompiledEvents::new(bb, std::slice::from_ref(ev)).expect("bound event");
    let mut s = compiled.scratch();
    let m = bb.edge_count();
    let mut buf = vec![0u64; 1];
    let mut total = 0u64;
    for h in 0..1u64 << m {
        let w: u64 = (0..m).map(|e| if h >> e & 1 == 1 { a[e] } else { 8 - a[e] }).product();
        let cfg = [h];
        let hit = match mirror {
            Some(mm) => {
                mm.apply_words(&cfg, &mut buf);
                compiled.eval_one(0, &buf, &mut s)
            }
            None => compiled.eval_one(0, &cfg, &mut s),
        };
        if hit {
            total += w;
        }
    }
    total
}

fn c8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let g1 = bunkbed(&build_g1());

    // Involution and preservation of posts and edge counts.
    let mut involution = true;
    for _ in 0..100_000 {
        let h = random_mask(&g1, &mut rng);
        let f = random_shadow(&g1, &mut rng);
        let m = mirror_subgraph(&g1, &h, &f);
        involution &= mirror_subgraph(&g1, &m, &f) == h && posts(&g1, &m) == posts(&g1, &h) && m.count() == h.count();
    }

    // Measure invariance when each edge and its mirror share a probability.
    let mut invariance = true;
    for _ in 0..1000 {
        let n = rng.random_range(2..=4);
        let bb = random_dag(&mut rng, n, 5);
        let g = bb.base();
        let per_base: Vec<u64> = (0..g.edge_count()).map(|_| rng.random_range(1..=7)).collect();
        let a: Vec<u64> = bb
            .edges()
            .iter()
            .map(|e| match e {
                BunkbedEdge::Horizontal { edge, .. } => per_base[*edge],
                BunkbedEdge::Vertical { .. } => rng.random_range(1..=7),
            })
            .collect();
        let pick = |rng: &mut ChaCha8Rng| {
            let v = g.label(rng.random_range(0..n)).as_str().to_string();
            format!("{v}{}", if rng.random_bool(0.5) { '-' } else { '+' })
        };
        let (x, y) = (pick(&mut rng), pick(&mut rng));
        let ev = Event::reach(&x, &y);
        let f = random_shadow(&bb, &mut rng);
        let mm = MirrorMap::new(&bb, &f);
        invariance &= weighted_count(&bb, &a, &ev, None) == weighted_count(&bb, &a, &ev, Some(&mm));
    }

    // Calibration of the 99% interval.
    let single = bunkbed(&build_digraph(["u", "v"], [("u", "v")]).expect("graph"));
    let m = EdgeModel::uniform(&single, half()).expect("model");
    let covered = (0..100u64)
        .filter(|&seed| {
            let est = &monte_carlo(
                &single,
                &m,
                &[Event::reach("u-", "v+")],
                10_000,
                seed,
                McOptions::default(),
            )
            .expect("mc")[0];
            est.covers(7.0 / 16.0)
        })
        .count();

    // Reflexive and bidirected reachability.
    let h = SubgraphMask::from_edges(&single, [single.vertical_edge(1)]);
    let unit = eval_event(&single, &Event::reach("u-", "u-"), &SubgraphMask::empty(&single)).unwrap()
        && eval_event(&single, &Event::reach("v+", "v-"), &h).unwrap()
        && eval_event(&single, &Event::reach("v-", "v+"), &h).unwrap()
        && !eval_event(&single, &Event::reach("u-", "v-"), &h).unwrap();

    Outcome {
        pass: involution && invariance && covered >= 95 && unit,
        detail: format!(
            "involution on 10^5: {involution}; invariance on 10^3: {invariance}; coverage {covered}/100; unit cases: {unit}"
        ),
    }
}

fn run_cli(args: &[&str]) -> (Vec<u8>, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_bunkbed"))
        .args(args)
        .output()
        .expect("run bunkbed");
    (out.stdout, out.status.code().unwrap_or(-1))
}

fn c9() -> Outcome {
    let runs: &[&[&str]] = &[
        &["verify", "claim-i", "--n", "200000", "--seed", "11"],
        &["verify", "claim-ii"],
        &["verify", "claim-iii"],
        &["verify", "proposition", "--n", "200000", "--seed", "11"],
        &[
            "mc",
            "--graph",
            "g2k",
            "--k",
            "2",
            "--event",
            "reach(1-,9+)",
            "--n",
            "200000",
            "--seed",
            "5",
        ],
        &["theorem", "--kmax", "1000"],
    ];
    let mut pass = true;
    let mut notes = Vec::new();
    for args in runs {
        let mut outputs = Vec::new();
        for threads in ["1", "3", "1"] {
            let mut full: Vec<&str> = args.to_vec();
            full.extend(["--format", "json", "--threads", threads]);
            outputs.push(run_cli(&full));
        }
        let same = outputs.windows(2).all(|w| w[0] == w[1]);
        let ok = same && outputs[0].1 == 0;
        pass &= ok;
        notes.push(format!(
            "{} {}",
            args[..2].join(" "),
            if ok { "identical" } else { "DIFFERS" }
        ));
    }
    Outcome {
        pass,
        detail: notes.join(", "),
    }
}

fn main() {
    let results = [
        criterion(1, "constants of the R-part", c1),
        criterion(2, "P(A_i) = P(B_i), exhaustive and sampled", c2),
        criterion(3, "Q equalities, strict inequality, residuals", c3),
        criterion(4, "product formula and P(A) < P(B)", c4),
        criterion(5, "gadget formula 1 - (31/32)^k", c5),
        criterion(6, "explicit-k certificate on G2^k", c6),
        criterion(7, "enumeration and DP agree", c7),
        criterion(8, "property suites", c8),
        criterion(9, "byte-identical CLI JSON across thread counts", c9),
    ];
    let passed = results.iter().filter(|p| **p).count();
    println!("acceptance: {passed}/{} criteria pass", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
