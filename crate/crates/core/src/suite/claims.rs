use std::time::Instant;

use num_rational::BigRational;
use num_traits::Zero;

use super::context::{f_sweep, full_sweep, g1, unconditional, Coverage};
use super::report::{ClaimReport, Provenance};
use crate::engines::{monte_carlo_difference, rational_to_f64, McOptions};

/// Samples used for the Monte Carlo confirmation of the conditioned gap.
pub const GAP_MC_SAMPLES: u64 = 10_000_000;

fn r(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn timed(claim: &str, body: impl FnOnce(&mut ClaimReport)) -> ClaimReport {
    let start = Instant::now();
    let mut rep = ClaimReport::new(claim);
    body(&mut rep);
    rep.wall = start.elapsed();
    rep
}

/// `P(X)` for an event `X` contained in `F`, from its conditional value.
fn joint_with_f(name: &str) -> BigRational {
    &unconditional().f * f_sweep().p(name)
}

/// `P(A_i)` and `P(B_i)` for `i = 1..4`. The first parts are
/// `P(A) - P(A & F)`; the rest lie inside `F`.
fn part_probabilities() -> ([BigRational; 4], [BigRational; 4]) {
    let u = unconditional();
    let a = [
        &u.a - joint_with_f("A"),
        joint_with_f("A2"),
        joint_with_f("A3"),
        joint_with_f("A4"),
    ];
    let b = [
        &u.b - joint_with_f("B"),
        joint_with_f("B2"),
        joint_with_f("B3"),
        joint_with_f("B4"),
    ];
    (a, b)
}

/// The conditioned gap `P(B) - P(A)` on G1.
pub fn conditioned_gap() -> BigRational {
    let u = unconditional();
    &u.b - &u.a
}

/// The gap from the product formula.
pub fn product_formula_gap() -> BigRational {
    let fs = f_sweep();
    &unconditional().f * (fs.p("P+") - fs.p("P-")) * (fs.p("Q--") - fs.p("Q-+"))
}

fn coverage_label(c: Coverage) -> String {
    match c {
        Coverage::Exhaustive => "all 2^28 configurations".to_string(),
        Coverage::Sampled { n, seed } => format!("{n} samples, seed {seed}"),
    }
}

pub fn verify_claim_i(coverage: Coverage) -> ClaimReport {
    timed("claim-i", |rep| {
        let full = full_sweep(coverage);
        rep.zero_count(
            &format!(
                "A(H) iff B(M(H,R(S))) for H in F_S, S non-empty ({})",
                coverage_label(coverage)
            ),
            full.biconditional,
            full.extra_post_configs,
            Provenance::Claimed,
        );
        if coverage == Coverage::Exhaustive {
            rep.relation(
                "non-empty extra-post sets S covered",
                "63",
                full.sets_seen.to_string(),
                full.sets_seen == 63,
                Provenance::Definition,
            );
        }
        let fs = f_sweep();
        for (j, name) in ["M(A2,{(8,9)}) = B2", "M(A3,K) = B3", "M(A4,K+{(3,7)}) = B4"]
            .iter()
            .enumerate()
        {
            rep.zero_count(name, fs.mirror_parts[j], fs.configs, Provenance::Claimed);
        }
        let (a, b) = part_probabilities();
        for (i, (pa, pb)) in a.iter().zip(&b).enumerate() {
            rep.equal(&format!("P(A{0}) = P(B{0})", i + 1), pa, pb, Provenance::Claimed);
        }
        for (i, pa) in a.iter().enumerate() {
            rep.report(&format!("P(A{})", i + 1), pa);
        }
        if coverage == Coverage::Exhaustive {
            let total = BigRational::from_integer(full.configs.into());
            let count = |n: &str| BigRational::from_integer(full.counts[n].into()) / &total;
            for i in 0..4 {
                for (letter, vals) in [("A", &a), ("B", &b)] {
                    let name = format!("{letter}{}", i + 1);
                    rep.equal(
                        &format!("P({name}) by full enumeration"),
                        &vals[i],
                        &count(&name),
                        Provenance::Consequence,
                    );
                }
            }
        }
    })
}

pub fn verify_claim_ii() -> ClaimReport {
    timed("claim-ii", |rep| {
        let fs = f_sweep();
        let u = unconditional();
        rep.equal("P(F)", &r(1, 64), &u.f, Provenance::Definition);
        rep.equal(
            "P_F(P+ & R) = 1/16 * 5/8",
            &r(5, 128),
            fs.p("P+&R"),
            Provenance::Claimed,
        );
        rep.equal(
            "P_F(P- & R) = 1/16 * 1/2",
            &r(1, 32),
            fs.p("P-&R"),
            Provenance::Claimed,
        );
        rep.zero_count(
            "M(P+ & !R & F, {(2,3),(3,4),(4,5)}) = P- & !R & F",
            fs.mirror_p,
            fs.configs,
            Provenance::Claimed,
        );
        rep.equal(
            "P_F(P+ & !R) = P_F(P- & !R)",
            fs.p("P+&!R"),
            fs.p("P-&!R"),
            Provenance::Consequence,
        );
        rep.less("P_F(P+) > P_F(P-)", fs.p("P-"), fs.p("P+"), Provenance::Claimed);
        rep.equal(
            "P_F(P+) - P_F(P-)",
            &r(1, 128),
            &(fs.p("P+") - fs.p("P-")),
            Provenance::Consequence,
        );
    })
}

pub fn verify_claim_iii() -> ClaimReport {
    timed("claim-iii", |rep| {
        let fs = f_sweep();
        let p = |n: &str| fs.p(n).clone();
        let half = r(1, 2);
        rep.equal("P_F(Q++) = P_F(Q--)", &p("Q--"), &p("Q++"), Provenance::Claimed);
        rep.equal("P_F(Q-+) = P_F(Q+-)", &p("Q+-"), &p("Q-+"), Provenance::Claimed);
        rep.less("P_F(Q--) > P_F(Q-+)", &p("Q-+"), &p("Q--"), Provenance::Claimed);
        for (d, q) in [("-", "Q--"), ("+", "Q-+")] {
            let rhs = p(&format!("W{d}")) + p(&format!("Z{d}")) - &half * p(&format!("Y{d}"));
            rep.equal(
                &format!("P_F({q}) = P_F(3- -> 9{d} in shaded) + P_F(5+- -> 9{d}) - 1/2 P_F(7-,5+- -> 9{d}): residual"),
                &BigRational::zero(),
                &(p(q) - rhs),
                Provenance::Claimed,
            );
            rep.equal(
                &format!("P_F(3- -> 9{d} in shaded and 5+- -> 9{d}) = P_F((3-,7-) and 7-,5+- -> 9{d})"),
                &p(&format!("W&Z{d}")),
                &p(&format!("e37&Y{d}")),
                Provenance::Claimed,
            );
            rep.equal(
                &format!("P_F((3-,7-) and 7-,5+- -> 9{d}) = 1/2 P_F(7-,5+- -> 9{d})"),
                &(&half * p(&format!("Y{d}"))),
                &p(&format!("e37&Y{d}")),
                Provenance::Claimed,
            );
        }
        rep.equal(
            "P_F(3- -> 9- in shaded) = P_F(3- -> 9+ in shaded)",
            &p("W-"),
            &p("W+"),
            Provenance::Claimed,
        );
        rep.equal(
            "P_F(5+- -> 9-) = P_F(5+- -> 9+)",
            &p("Z-"),
            &p("Z+"),
            Provenance::Claimed,
        );
        rep.equal(
            "P_F(7-,5+- -> 9+) = P_F(7+,5+- -> 9-)",
            &p("Y+"),
            &p("Y'-"),
            Provenance::Consequence,
        );
        rep.less(
            "P_F(7-,5+- -> 9-) < P_F(7+,5+- -> 9-)",
            &p("Y-"),
            &p("Y'-"),
            Provenance::Claimed,
        );
        rep.equal(
            "P_F(7+,5+- -> 9-) - P_F(7-,5+- -> 9-) = RHS - LHS of the reduced inequality",
            &(p("Y'-") - p("Y-")),
            &(p("Rhs") - p("L")),
            Provenance::Definition,
        );
        rep.zero_count(
            "LHS(H) iff P-(phi H) under reversal and i -> 10-i",
            fs.reflect[0],
            fs.configs,
            Provenance::Claimed,
        );
        rep.zero_count(
            "RHS(H) iff P+(phi H) under reversal and i -> 10-i",
            fs.reflect[1],
            fs.configs,
            Provenance::Claimed,
        );
        rep.equal("LHS = P_F(P-)", &p("P-"), &p("L"), Provenance::Claimed);
        rep.equal("RHS = P_F(P+)", &p("P+"), &p("Rhs"), Provenance::Claimed);
        rep.report("P_F(Q--) - P_F(Q-+)", &(p("Q--") - p("Q-+")));
    })
}

pub fn verify_proposition(coverage: Coverage) -> ClaimReport {
    timed("proposition", |rep| {
        let ctx = g1();
        let fs = f_sweep();
        let u = unconditional();
        let full = full_sweep(coverage);
        rep.zero_count(
            &format!(
                "A is the disjoint union of its six parts ({})",
                coverage_label(coverage)
            ),
            full.partition[0],
            full.configs,
            Provenance::Claimed,
        );
        rep.zero_count(
            &format!(
                "B is the disjoint union of its six parts ({})",
                coverage_label(coverage)
            ),
            full.partition[1],
            full.configs,
            Provenance::Claimed,
        );
        rep.zero_count(
            "A is the disjoint union of its six parts on F",
            fs.partition[0],
            fs.configs,
            Provenance::Claimed,
        );
        rep.zero_count(
            "B is the disjoint union of its six parts on F",
            fs.partition[1],
            fs.configs,
            Provenance::Claimed,
        );
        for e in ["-", "+"] {
            for d in ["-", "+"] {
                let joint = fs.p(&format!("P{e}&Q{e}{d}"));
                let product = fs.p(&format!("P{e}")) * fs.p(&format!("Q{e}{d}"));
                rep.equal(
                    &format!("P_F(P{e} & Q{e}{d}) = P_F(P{e}) P_F(Q{e}{d})"),
                    &product,
                    joint,
                    Provenance::Claimed,
                );
            }
        }
        let g = conditioned_gap();
        let p = |n: &str| fs.p(n).clone();
        let four_terms = &u.f * (p("P+") * p("Q++") + p("P-") * p("Q-+") - p("P-") * p("Q--") - p("P+") * p("Q+-"));
        rep.equal(
            "P(B) - P(A) = P(F)(four-term expression)",
            &four_terms,
            &g,
            Provenance::Claimed,
        );
        rep.equal(
            "P(B) - P(A) = P(F)(P_F(P+) - P_F(P-))(P_F(Q--) - P_F(Q-+))",
            &product_formula_gap(),
            &g,
            Provenance::Claimed,
        );
        rep.less("P(A) < P(B)", &u.a, &u.b, Provenance::Claimed);
        rep.report("g = P(B) - P(A)", &g);

        // P(A) three ways.
        let a1 = if coverage == Coverage::Exhaustive {
            BigRational::new(full.counts["A1"].into(), full.configs.into())
        } else {
            &u.a - joint_with_f("A")
        };
        let parts_sum = &a1
            + joint_with_f("A2")
            + joint_with_f("A3")
            + joint_with_f("A4")
            + joint_with_f("P-&Q--")
            + joint_with_f("P+&Q+-");
        rep.equal("P(A) = sum of the six parts", &u.a, &parts_sum, Provenance::Consequence);
        let via_independence = &a1
            + joint_with_f("A2")
            + joint_with_f("A3")
            + joint_with_f("A4")
            + &u.f * (p("P-") * p("Q--") + p("P+") * p("Q+-"));
        rep.equal(
            "P(A) = P(A1)+...+P(A4) + P(F)(P_F(P-)P_F(Q--) + P_F(P+)P_F(Q+-))",
            &u.a,
            &via_independence,
            Provenance::Consequence,
        );
        if coverage == Coverage::Exhaustive {
            let direct = BigRational::new(full.counts["A"].into(), full.configs.into());
            rep.equal(
                "P(A) by full enumeration = P(A) by frontier DP",
                &u.a,
                &direct,
                Provenance::Consequence,
            );
        }

        let seed = match coverage {
            Coverage::Exhaustive => 0,
            Coverage::Sampled { seed, .. } => seed,
        };
        let t = &ctx.table;
        match monte_carlo_difference(
            &ctx.bb,
            &ctx.conditioned,
            &t.a,
            &t.b,
            GAP_MC_SAMPLES,
            seed,
            McOptions::default(),
        ) {
            Ok(d) => {
                let gf = rational_to_f64(&g);
                rep.relation(
                    &format!(
                        "g inside the 99% CI of a paired Monte Carlo estimate (n = {GAP_MC_SAMPLES}, seed {seed})"
                    ),
                    format!("{gf:.6e}"),
                    format!("{:.6e} +- {:.2e}", d.estimate, d.half_width),
                    d.covers(gf),
                    Provenance::Consequence,
                );
            }
            Err(e) => rep.relation(
                "Monte Carlo estimate of g",
                "an estimate",
                e.to_string(),
                false,
                Provenance::Consequence,
            ),
        }
    })
}
