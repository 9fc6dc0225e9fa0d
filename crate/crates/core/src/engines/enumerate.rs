//! Exhaustive enumeration over the free edges of a model.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::model::{half, EdgeModel};
use super::par::{fold_chunks, ExecPolicy};
use super::prob::ExactProb;
use crate::error::EngineError;
use crate::events::{CompiledEvents, Event};
use crate::graph::BunkbedGraph;

pub const DEFAULT_FREE_EDGE_CAP: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumOptions {
    /// Largest number of free edges accepted (2^cap configurations).
    pub cap: usize,
    pub policy: ExecPolicy,
}

impl Default for EnumOptions {
    fn default() -> Self {
        EnumOptions {
            cap: DEFAULT_FREE_EDGE_CAP,
            policy: ExecPolicy::default(),
        }
    }
}

const LOW_BITS: usize = 16;

/// All configurations of a model's free edges with the deterministic edges
/// fixed. Configuration `i` sets free edge `free[j]` iff bit `j` of `i` is
/// set; edges forced present are always set.
#[derive(Debug, Clone)]
pub struct ConfigSpace {
    words: usize,
    free: Vec<usize>,
    lo_bits: usize,
    /// Scattered low index bits, `words` entries per index, base included.
    lo: Vec<u64>,
    /// Scattered high index bits, `words` entries per index.
    hi: Vec<u64>,
}

impl ConfigSpace {
    /// Free edges outside `support` (when given) are left out: events that do
    /// not observe them have the same probability either way.
    pub fn new(
        bb: &BunkbedGraph,
        model: &EdgeModel,
        support: Option<&[bool]>,
        cap: usize,
    ) -> Result<Self, EngineError> {
        model.check(bb)?;
        let free: Vec<usize> = model
            .free_edges()
            .into_iter()
            .filter(|&e| support.is_none_or(|s| s[e]))
            .collect();
        if free.len() > cap {
            return Err(EngineError::TooManyFreeEdges { free: free.len(), cap });
        }
        let words = bb.edge_count().div_ceil(64).max(1);
        let mut base = vec![0u64; words];
        for e in 0..bb.edge_count() {
            if model.prob(e).is_one() {
                base[e / 64] |= 1 << (e % 64);
            }
        }
        let lo_bits = free.len().min(LOW_BITS);
        let scatter = |bits: &[usize], seed: &[u64]| -> Vec<u64> {
            let mut table = Vec::with_capacity(words << bits.len());
            for i in 0..1u64 << bits.len() {
                let mut w = seed.to_vec();
                for (j, &e) in bits.iter().enumerate() {
                    if i >> j & 1 == 1 {
                        w[e / 64] |= 1 << (e % 64);
                    }
                }
                table.extend(w);
            }
            table
        };
        let lo = scatter(&free[..lo_bits], &base);
        let hi = scatter(&free[lo_bits..], &vec![0u64; words]);
        Ok(ConfigSpace {
            words,
            free,
            lo_bits,
            lo,
            hi,
        })
    }

    pub fn free_edges(&self) -> &[usize] {
        &self.free
    }

    pub fn words(&self) -> usize {
        self.words
    }

    pub fn size(&self) -> u64 {
        1 << self.free.len()
    }

    pub fn chunk_count(&self) -> u64 {
        1 << (self.free.len() - self.lo_bits)
    }

    pub fn chunk_len(&self) -> u64 {
        1 << self.lo_bits
    }

    pub fn fill(&self, index: u64, out: &mut [u64]) {
        let lo = (index & ((1 << self.lo_bits) - 1)) as usize;
        let hi = (index >> self.lo_bits) as usize;
        let w = self.words;
        let (lo_row, hi_row) = (&self.lo[lo * w..(lo + 1) * w], &self.hi[hi * w..(hi + 1) * w]);
        for ((o, a), b) in out.iter_mut().zip(lo_row).zip(hi_row) {
            *o = a | b;
        }
    }

    /// Calls `f(index, cfg)` for every configuration of one chunk.
    pub fn for_each_in_chunk(&self, chunk: u64, mut f: impl FnMut(u64, &[u64])) {
        let w = self.words;
        let hi = &self.hi[chunk as usize * w..(chunk as usize + 1) * w];
        if w == 1 {
            let h = hi[0];
            for (i, lo) in self.lo.iter().enumerate() {
                f(chunk << self.lo_bits | i as u64, &[lo | h]);
            }
            return;
        }
        let mut buf = vec![0u64; w];
        for i in 0..self.chunk_len() as usize {
            for k in 0..w {
                buf[k] = self.lo[i * w + k] | hi[k];
            }
            f(chunk << self.lo_bits | i as u64, &buf);
        }
    }
}

/// Folds over every configuration of `space`, split by high index bits.
pub fn fold_configs<A, I, F, R>(space: &ConfigSpace, policy: ExecPolicy, init: I, fold: F, reduce: R) -> A
where
    A: Send,
    I: Fn() -> A + Sync + Send,
    F: Fn(&mut A, u64, &[u64]) + Sync + Send,
    R: Fn(A, A) -> A + Sync + Send,
{
    fold_chunks(
        policy,
        space.chunk_count(),
        init,
        |acc, chunk| space.for_each_in_chunk(chunk, |i, cfg| fold(acc, i, cfg)),
        reduce,
    )
}

/// Exact probabilities of all `events` in a single sweep.
pub fn exact_enumeration(
    bb: &BunkbedGraph,
    model: &EdgeModel,
    events: &[Event],
    opts: EnumOptions,
) -> Result<Vec<ExactProb>, EngineError> {
    let compiled = CompiledEvents::new(bb, events)?;
    let space = ConfigSpace::new(bb, model, Some(compiled.support()), opts.cap)?;
    let dyadic = space.free_edges().iter().all(|&e| *model.prob(e) == half());
    if dyadic {
        let counts = count_events(&compiled, &space, opts.policy);
        let total = BigUint::one() << space.free_edges().len();
        Ok(counts
            .into_iter()
            .map(|c| ExactProb::from_counts(BigUint::from(c), total.clone()))
            .collect())
    } else {
        Ok(weighted_events(&compiled, &space, model, opts.policy))
    }
}

/// Number of configurations of `space` satisfying each compiled event.
pub fn count_events(compiled: &CompiledEvents, space: &ConfigSpace, policy: ExecPolicy) -> Vec<u64> {
    let n = compiled.len();
    let (counts, _, _) = fold_configs(
        space,
        policy,
        || (vec![0u64; n], compiled.scratch(), vec![false; n]),
        |(counts, scratch, out), _, cfg| {
            compiled.eval(cfg, scratch, out);
            for (c, hit) in counts.iter_mut().zip(out.iter()) {
                *c += u64::from(*hit);
            }
        },
        |mut a, b| {
            for (x, y) in a.0.iter_mut().zip(b.0) {
                *x += y;
            }
            a
        },
    );
    counts
}

fn weighted_events(
    compiled: &CompiledEvents,
    space: &ConfigSpace,
    model: &EdgeModel,
    policy: ExecPolicy,
) -> Vec<ExactProb> {
    let free = space.free_edges();
    let factors: Vec<(BigUint, BigUint)> = free
        .iter()
        .map(|&e| {
            let p = model.prob(e);
            let num = p.numer().to_biguint().expect("non-negative");
            let den = p.denom().to_biguint().expect("positive");
            let rest = &den - &num;
            (num, rest)
        })
        .collect();
    let weight_of = |bits: &[(BigUint, BigUint)], index: u64| -> BigUint {
        bits.iter().enumerate().fold(
            BigUint::one(),
            |w, (j, (num, rest))| {
                if index >> j & 1 == 1 {
                    w * num
                } else {
                    w * rest
                }
            },
        )
    };
    let lo_n = space.chunk_len().trailing_zeros() as usize;
    let lo_weights: Vec<BigUint> = (0..space.chunk_len()).map(|i| weight_of(&factors[..lo_n], i)).collect();
    let n = compiled.len();
    let sums = fold_chunks(
        policy,
        space.chunk_count(),
        || (vec![BigUint::zero(); n], compiled.scratch(), vec![false; n]),
        |(sums, scratch, out), chunk| {
            let hi_weight = weight_of(&factors[lo_n..], chunk);
            space.for_each_in_chunk(chunk, |i, cfg| {
                compiled.eval(cfg, scratch, out);
                if out.iter().any(|h| *h) {
                    let w = &hi_weight * &lo_weights[(i & (space.chunk_len() - 1)) as usize];
                    for (s, hit) in sums.iter_mut().zip(out.iter()) {
                        if *hit {
                            *s += &w;
                        }
                    }
                }
            });
        },
        |mut a, b| {
            for (x, y) in a.0.iter_mut().zip(b.0) {
                *x += y;
            }
            a
        },
    )
    .0;
    let total: BigUint = free.iter().fold(BigUint::one(), |d, &e| {
        d * model.prob(e).denom().to_biguint().expect("positive")
    });
    sums.into_iter()
        .map(|s| ExactProb::new(BigRational::new(BigInt::from(s), BigInt::from(total.clone()))))
        .collect()
}
