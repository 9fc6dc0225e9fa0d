use bunkbed::engines::ExactProb;
use bunkbed::graph::{build_g1, bunkbed, mirror_subgraph, posts, ShadowEdgeSet, SubgraphMask};
use bunkbed::suite::{
    certified_k, conditioned_gap, gadget_event_probability, gadget_formula, product_formula_gap, theorem_gap,
    verify_claim_ii, verify_claim_iii, GadgetMethod,
};
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;

#[test]
fn gadget_values() {
    let one = gadget_event_probability(1, "5", GadgetMethod::Exact).unwrap();
    assert_eq!(one, ExactProb::ratio(1, 32));
    let two = gadget_event_probability(2, "8", GadgetMethod::Exact).unwrap();
    assert_eq!(two, ExactProb::ratio(63, 1024));
    assert_eq!(gadget_formula(2), *two.value());
    assert!(gadget_event_probability(1, "3", GadgetMethod::Exact).is_err());
    assert!(gadget_event_probability(0, "2", GadgetMethod::Formula).is_err());
}

#[test]
fn conditioned_gap_is_two_to_minus_21() {
    let g = conditioned_gap();
    assert_eq!(g, BigRational::new(1.into(), (1i64 << 21).into()));
    assert_eq!(g, product_formula_gap());
    assert_eq!(certified_k(&g), Some(494));
    assert_eq!(certified_k(&BigRational::zero()), None);
}

#[test]
fn small_gadgets_still_favour_a() {
    for k in [1, 10] {
        let (a, b) = theorem_gap(k).unwrap();
        assert!(a.value() > b.value(), "k = {k}");
    }
    let (a, b) = theorem_gap(100).unwrap();
    assert!(a.value() < b.value());
}

#[test]
fn claims_ii_and_iii_pass() {
    let ii = verify_claim_ii();
    assert!(ii.pass(), "{ii}");
    assert_eq!(ii.check("P_F(P+ & R) = 1/16 * 5/8").unwrap().computed, "5/128");
    let iii = verify_claim_iii();
    assert!(iii.pass(), "{iii}");
}

proptest! {
    #[test]
    fn mirror_is_an_involution(h in prop::collection::vec(any::<bool>(), 31), f in prop::collection::vec(any::<bool>(), 11)) {
        let g1 = build_g1();
        let bb = bunkbed(&g1);
        let h = SubgraphMask::from_edges(&bb, (0..31).filter(|&e| h[e]));
        let f = ShadowEdgeSet::new(&g1, (0..11).filter(|&e| f[e])).unwrap();
        let m = mirror_subgraph(&bb, &h, &f);
        prop_assert_eq!(&mirror_subgraph(&bb, &m, &f), &h);
        prop_assert_eq!(posts(&bb, &m), posts(&bb, &h));
        prop_assert_eq!(m.count(), h.count());
    }
}
