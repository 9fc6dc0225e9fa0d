//! Seeded Monte Carlo estimation.
//!
//! Sample `i` draws from ChaCha8 stream `i` of the given seed, so it is a pure
//! function of `(seed, i)` and results do not depend on how samples are split
//! among workers.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use super::model::EdgeModel;
use super::par::{fold_chunks, ExecPolicy};
use crate::error::EngineError;
use crate::events::{CompiledEvents, Event};
use crate::graph::BunkbedGraph;

pub const DEFAULT_CONFIDENCE: f64 = 0.99;
const CHUNK: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McOptions {
    pub confidence: f64,
    pub policy: ExecPolicy,
}

impl Default for McOptions {
    fn default() -> Self {
        McOptions {
            confidence: DEFAULT_CONFIDENCE,
            policy: ExecPolicy::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MCEstimate {
    pub n: u64,
    pub hits: u64,
    pub estimate: f64,
    pub confidence: f64,
    pub half_width: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub seed: u64,
}

impl MCEstimate {
    pub fn covers(&self, p: f64) -> bool {
        self.ci_low <= p && p <= self.ci_high
    }
}

/// Estimate of `P(B) - P(A)` from paired samples.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiffEstimate {
    pub n: u64,
    pub hits_a: u64,
    pub hits_b: u64,
    pub estimate: f64,
    pub confidence: f64,
    pub half_width: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub seed: u64,
}

impl DiffEstimate {
    pub fn covers(&self, d: f64) -> bool {
        self.ci_low <= d && d <= self.ci_high
    }
}

pub fn z_value(confidence: f64) -> Result<f64, EngineError> {
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(EngineError::BadConfidence(confidence));
    }
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    Ok(normal.inverse_cdf(0.5 + confidence / 2.0))
}

/// Draws configurations of a model.
#[derive(Debug, Clone)]
pub struct Sampler {
    base: ChaCha8Rng,
    fixed: Vec<u64>,
    /// `(edge, threshold)`: the edge is present iff a draw is below threshold.
    free: Vec<(usize, u64)>,
}

impl Sampler {
    pub fn new(bb: &BunkbedGraph, model: &EdgeModel, seed: u64) -> Result<Self, EngineError> {
        model.check(bb)?;
        let words = bb.edge_count().div_ceil(64).max(1);
        let mut fixed = vec![0u64; words];
        let mut free = Vec::new();
        for e in 0..bb.edge_count() {
            let p = model.prob(e);
            if p.is_one() {
                fixed[e / 64] |= 1 << (e % 64);
            } else if !p.is_zero() {
                let num = p.numer().to_biguint().expect("non-negative");
                let den = p.denom().to_biguint().expect("positive");
                let t: BigUint = (num << 64u32) / den;
                free.push((e, t.to_u64().expect("p < 1")));
            }
        }
        Ok(Sampler {
            base: ChaCha8Rng::seed_from_u64(seed),
            fixed,
            free,
        })
    }

    pub fn words(&self) -> usize {
        self.fixed.len()
    }

    /// Writes sample `i` into `out`.
    pub fn fill(&self, i: u64, out: &mut [u64]) {
        let mut rng = self.base.clone();
        rng.set_stream(i);
        rng.set_word_pos(0);
        out.copy_from_slice(&self.fixed);
        for &(e, t) in &self.free {
            if rng.next_u64() < t {
                out[e / 64] |= 1 << (e % 64);
            }
        }
    }
}

fn sweep<A, F>(
    sampler: &Sampler,
    n: u64,
    policy: ExecPolicy,
    init: impl Fn() -> A + Sync + Send,
    step: F,
    reduce: impl Fn(A, A) -> A + Sync + Send,
) -> A
where
    A: Send,
    F: Fn(&mut A, &[u64]) + Sync + Send,
{
    fold_chunks(
        policy,
        n.div_ceil(CHUNK),
        || (init(), vec![0u64; sampler.words()]),
        |(acc, buf), c| {
            for i in c * CHUNK..((c + 1) * CHUNK).min(n) {
                sampler.fill(i, buf);
                step(acc, buf);
            }
        },
        |a, b| (reduce(a.0, b.0), a.1),
    )
    .0
}

fn interval(estimate: f64, var: f64, n: u64, z: f64, lo: f64, hi: f64) -> (f64, f64, f64) {
    let hw = z * (var.max(0.0) / n as f64).sqrt();
    (hw, (estimate - hw).max(lo), (estimate + hw).min(hi))
}

pub fn monte_carlo(
    bb: &BunkbedGraph,
    model: &EdgeModel,
    events: &[Event],
    n: u64,
    seed: u64,
    opts: McOptions,
) -> Result<Vec<MCEstimate>, EngineError> {
    if n == 0 {
        return Err(EngineError::NoSamples);
    }
    let z = z_value(opts.confidence)?;
    let compiled = CompiledEvents::new(bb, events)?;
    let sampler = Sampler::new(bb, model, seed)?;
    let k = compiled.len();
    let (hits, _, _) = sweep(
        &sampler,
        n,
        opts.policy,
        || (vec![0u64; k], compiled.scratch(), vec![false; k]),
        |(hits, scratch, out), cfg| {
            compiled.eval(cfg, scratch, out);
            for (h, x) in hits.iter_mut().zip(out.iter()) {
                *h += u64::from(*x);
            }
        },
        |mut a, b| {
            for (x, y) in a.0.iter_mut().zip(b.0) {
                *x += y;
            }
            a
        },
    );
    Ok(hits
        .into_iter()
        .map(|h| {
            let p = h as f64 / n as f64;
            let (half_width, ci_low, ci_high) = interval(p, p * (1.0 - p), n, z, 0.0, 1.0);
            MCEstimate {
                n,
                hits: h,
                estimate: p,
                confidence: opts.confidence,
                half_width,
                ci_low,
                ci_high,
                seed,
            }
        })
        .collect())
}

/// Paired estimate of `P(b) - P(a)` using the same samples for both events.
pub fn monte_carlo_difference(
    bb: &BunkbedGraph,
    model: &EdgeModel,
    a: &Event,
    b: &Event,
    n: u64,
    seed: u64,
    opts: McOptions,
) -> Result<DiffEstimate, EngineError> {
    if n == 0 {
        return Err(EngineError::NoSamples);
    }
    let z = z_value(opts.confidence)?;
    let compiled = CompiledEvents::new(bb, &[a.clone(), b.clone()])?;
    let sampler = Sampler::new(bb, model, seed)?;
    // [a only, b only, a total, b total]
    let (c, _) = sweep(
        &sampler,
        n,
        opts.policy,
        || ([0u64; 4], compiled.scratch()),
        |(c, scratch), cfg| {
            let bits = compiled.eval_bits(cfg, scratch);
            let (x, y) = (bits & 1 == 1, bits & 2 == 2);
            c[0] += u64::from(x && !y);
            c[1] += u64::from(y && !x);
            c[2] += u64::from(x);
            c[3] += u64::from(y);
        },
        |mut a, b| {
            for i in 0..4 {
                a.0[i] += b.0[i];
            }
            a
        },
    );
    let nf = n as f64;
    let d = (c[1] as f64 - c[0] as f64) / nf;
    let var = (c[0] + c[1]) as f64 / nf - d * d;
    let (half_width, ci_low, ci_high) = interval(d, var, n, z, -1.0, 1.0);
    Ok(DiffEstimate {
        n,
        hits_a: c[2],
        hits_b: c[3],
        estimate: d,
        confidence: opts.confidence,
        half_width,
        ci_low,
        ci_high,
        seed,
    })
}
