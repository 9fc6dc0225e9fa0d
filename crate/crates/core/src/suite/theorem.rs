//! The gadget blow-up `G2^k` and an explicit-k certificate of `P(A_k) < P(B_k)`.

use std::time::{Duration, Instant};

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::claims::{conditioned_gap, product_formula_gap};
use super::context::unconditional;
use super::report::ser_rational;
use crate::engines::{
    exact_enumeration, exact_reach_dp_layers, half, map_ordered, rational_string, rational_to_f64, DpOptions,
    EdgeModel, EnumOptions, ExactProb, ExecPolicy,
};
use crate::error::SuiteError;
use crate::events::{vtx, Event};
use crate::graph::{build_g2k, bunkbed, G1_POSTS};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GadgetMethod {
    /// Enumeration over the `5k` edges the event depends on.
    Exact,
    /// `1 - (31/32)^k`.
    Formula,
}

/// `C_i`: some `i_j` has its vertical and all four horizontal edges to
/// `i_a`, `i_b` present.
pub fn gadget_event(k: usize, i: &str) -> Result<Event, SuiteError> {
    if !G1_POSTS.contains(&i) {
        return Err(SuiteError::UnknownGadget(i.to_string()));
    }
    if k == 0 {
        return Err(SuiteError::EmptyGadget);
    }
    Ok(Event::or((1..=k).map(|j| {
        let mid = format!("{i}_{j}");
        Event::and([
            Event::edge(&format!("{mid}-"), &format!("{mid}+")),
            Event::edge(&format!("{i}a-"), &format!("{mid}-")),
            Event::edge(&format!("{i}a+"), &format!("{mid}+")),
            Event::edge(&format!("{mid}-"), &format!("{i}b-")),
            Event::edge(&format!("{mid}+"), &format!("{i}b+")),
        ])
    })))
}

/// `1 - (31/32)^k`.
pub fn gadget_formula(k: usize) -> BigRational {
    let q = BigRational::new(31.into(), 32.into());
    BigRational::one() - pow(&q, k)
}

fn pow(x: &BigRational, k: usize) -> BigRational {
    BigRational::new(x.numer().pow(k as u32), x.denom().pow(k as u32))
}

/// `P(C^c) = 1 - (1 - (31/32)^k)^3`.
pub fn missing_crossbar_probability(k: usize) -> BigRational {
    BigRational::one() - pow(&gadget_formula(k), 3)
}

pub fn gadget_event_probability(k: usize, i: &str, method: GadgetMethod) -> Result<ExactProb, SuiteError> {
    let ev = gadget_event(k, i)?;
    match method {
        GadgetMethod::Formula => Ok(ExactProb::new(gadget_formula(k))),
        GadgetMethod::Exact => {
            let bb = bunkbed(&build_g2k(k)?);
            let model = EdgeModel::uniform(&bb, half())?;
            Ok(exact_enumeration(&bb, &model, &[ev], EnumOptions::default())?.remove(0))
        }
    }
}

/// Exact `(P(1- -> 9-), P(1- -> 9+))` on the bunkbed of `G2^k` with every
/// edge retained with probability 1/2.
pub fn theorem_gap(k: usize) -> Result<(ExactProb, ExactProb), SuiteError> {
    if k == 0 {
        return Err(SuiteError::EmptyGadget);
    }
    let bb = bunkbed(&build_g2k(k)?);
    let model = EdgeModel::uniform(&bb, half())?;
    let [a, b] = exact_reach_dp_layers(&bb, &model, &vtx("1-"), "9", DpOptions::default())?;
    Ok((a, b))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub k: usize,
    #[serde(serialize_with = "ser_rational")]
    pub p_a: BigRational,
    #[serde(serialize_with = "ser_rational")]
    pub p_b: BigRational,
    #[serde(serialize_with = "ser_rational")]
    pub gap: BigRational,
    #[serde(serialize_with = "ser_rational")]
    pub p_no_crossbar: BigRational,
    /// `|P(A_k) - P(A)| <= P(C^c)` and the same for `B`.
    pub limit_bound: bool,
    /// `|gap_k - (1 - P(C^c)) g| <= P(C^c)`.
    pub gap_bound: bool,
}

impl SweepRow {
    pub fn csv_header() -> &'static str {
        "k,p_a,p_a_float,p_b,p_b_float,gap,gap_float,p_no_crossbar_float"
    }

    pub fn csv(&self) -> String {
        format!(
            "{},{},{:e},{},{:e},{},{:e},{:e}",
            self.k,
            rational_string(&self.p_a),
            rational_to_f64(&self.p_a),
            rational_string(&self.p_b),
            rational_to_f64(&self.p_b),
            rational_string(&self.gap),
            rational_to_f64(&self.gap),
            rational_to_f64(&self.p_no_crossbar),
        )
    }
}

pub fn sweep_row(k: usize) -> Result<SweepRow, SuiteError> {
    let (a_k, b_k) = theorem_gap(k)?;
    let u = unconditional();
    let g = conditioned_gap();
    let pc = missing_crossbar_probability(k);
    let (a_k, b_k) = (a_k.into_value(), b_k.into_value());
    let gap = &b_k - &a_k;
    Ok(SweepRow {
        k,
        limit_bound: (&a_k - &u.a).abs() <= pc && (&b_k - &u.b).abs() <= pc,
        gap_bound: (&gap - (BigRational::one() - &pc) * &g).abs() <= pc,
        p_a: a_k,
        p_b: b_k,
        gap,
        p_no_crossbar: pc,
    })
}

/// Smallest `k` with `P(C^c) < (1 - P(C^c)) g`: then
/// `P(B_k) - P(A_k) >= P(C) g - P(C^c) > 0`.
pub fn certified_k(g: &BigRational) -> Option<usize> {
    if !g.is_positive() {
        return None;
    }
    // P(C^c) falls to 0 geometrically, so the search terminates.
    let q = BigRational::new(31.into(), 32.into());
    let mut qk = BigRational::one();
    for k in 1.. {
        qk *= &q;
        let c = BigRational::one() - &qk;
        let pc = BigRational::one() - &c * &c * &c;
        if pc < (BigRational::one() - &pc) * g {
            return Some(k);
        }
    }
    unreachable!()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremCertificate {
    /// `P(B) - P(A)` on the conditioned G1.
    #[serde(serialize_with = "ser_rational")]
    pub conditioned_gap: BigRational,
    pub k_cert: usize,
    #[serde(serialize_with = "ser_rational")]
    pub p_no_crossbar_at_cert: BigRational,
    #[serde(serialize_with = "ser_rational")]
    pub p_a_at_cert: BigRational,
    #[serde(serialize_with = "ser_rational")]
    pub p_b_at_cert: BigRational,
    #[serde(serialize_with = "ser_rational")]
    pub gap_at_cert: BigRational,
    /// Smallest swept `k` with a positive gap.
    pub smallest_positive_k: Option<usize>,
    /// Every swept row satisfies both bounds.
    pub bounds_hold: bool,
    pub sweep: Vec<SweepRow>,
    pub pass: bool,
    #[serde(skip)]
    pub wall: Duration,
}

impl TheoremCertificate {
    pub fn csv(&self) -> String {
        let mut out = String::from(SweepRow::csv_header());
        out.push('\n');
        for row in &self.sweep {
            out.push_str(&row.csv());
            out.push('\n');
        }
        out
    }
}

/// Sweep rows for the given `k`, in order.
pub fn sweep_rows(ks: &[usize], policy: ExecPolicy) -> Result<Vec<SweepRow>, SuiteError> {
    map_ordered(policy, ks, |&k| sweep_row(k)).into_iter().collect()
}

/// Certifies the strict inequality at an explicit `k` and sweeps
/// `k = 1..=min(k_max, k_cert)`.
pub fn certify_theorem(k_max: usize, policy: ExecPolicy) -> Result<TheoremCertificate, SuiteError> {
    let start = Instant::now();
    let g = conditioned_gap();
    debug_assert_eq!(g, product_formula_gap());
    let k_cert = certified_k(&g).ok_or(SuiteError::NonPositiveGap)?;
    if k_cert > k_max {
        return Err(SuiteError::CertifiedKExceedsKMax {
            k_cert: k_cert as u32,
            k_max: k_max as u32,
        });
    }
    let ks: Vec<usize> = (1..=k_cert).collect();
    let sweep = sweep_rows(&ks, policy)?;
    let last = sweep.last().expect("k_cert >= 1").clone();
    let smallest_positive_k = sweep.iter().find(|r| r.gap > BigRational::zero()).map(|r| r.k);
    let bounds_hold = sweep.iter().all(|r| r.limit_bound && r.gap_bound);
    Ok(TheoremCertificate {
        conditioned_gap: g,
        k_cert,
        p_no_crossbar_at_cert: last.p_no_crossbar.clone(),
        pass: last.gap > BigRational::zero() && bounds_hold,
        p_a_at_cert: last.p_a,
        p_b_at_cert: last.p_b,
        gap_at_cert: last.gap,
        smallest_positive_k,
        bounds_hold,
        sweep,
        wall: start.elapsed(),
    })
}
