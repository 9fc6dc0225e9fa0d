//! Scripted verifications of the conditioned counterexample on G1 and of its
//! unconditioned blow-up.

mod claims;
mod context;
mod report;
mod theorem;

pub use claims::{
    conditioned_gap, product_formula_gap, verify_claim_i, verify_claim_ii, verify_claim_iii, verify_proposition,
    GAP_MC_SAMPLES,
};
pub use context::{Coverage, FREE_POSTS};
pub use report::{Check, ClaimReport, Provenance};
pub use theorem::{
    certified_k, certify_theorem, gadget_event, gadget_event_probability, gadget_formula, missing_crossbar_probability,
    sweep_row, sweep_rows, theorem_gap, GadgetMethod, SweepRow, TheoremCertificate,
};
