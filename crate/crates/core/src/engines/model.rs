use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{EngineError, GraphError};
use crate::graph::{BunkbedEdge, BunkbedGraph};

/// Independent retention probability for every bunkbed edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeModel {
    probs: Vec<BigRational>,
}

pub fn half() -> BigRational {
    BigRational::new(BigInt::from(1), BigInt::from(2))
}

impl EdgeModel {
    pub fn new(probs: Vec<BigRational>) -> Result<Self, EngineError> {
        if let Some(p) = probs
            .iter()
            .find(|p| **p < BigRational::zero() || **p > BigRational::one())
        {
            return Err(EngineError::ProbabilityOutOfRange(p.to_string()));
        }
        Ok(EdgeModel { probs })
    }

    pub fn uniform(bb: &BunkbedGraph, p: BigRational) -> Result<Self, EngineError> {
        EdgeModel::new(vec![p; bb.edge_count()])
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn prob(&self, e: usize) -> &BigRational {
        &self.probs[e]
    }

    pub fn probs(&self) -> &[BigRational] {
        &self.probs
    }

    pub fn set(&mut self, e: usize, p: BigRational) -> Result<(), EngineError> {
        if p < BigRational::zero() || p > BigRational::one() {
            return Err(EngineError::ProbabilityOutOfRange(p.to_string()));
        }
        self.probs[e] = p;
        Ok(())
    }

    /// Edges whose probability is strictly between 0 and 1.
    pub fn free_edges(&self) -> Vec<usize> {
        (0..self.probs.len()).filter(|&e| self.is_free(e)).collect()
    }

    pub fn is_free(&self, e: usize) -> bool {
        let p = &self.probs[e];
        !p.is_zero() && !p.is_one()
    }

    pub(crate) fn check(&self, bb: &BunkbedGraph) -> Result<(), EngineError> {
        if self.probs.len() != bb.edge_count() {
            return Err(EngineError::ModelLength {
                expected: bb.edge_count(),
                actual: self.probs.len(),
            });
        }
        Ok(())
    }
}

fn resolve_posts(bb: &BunkbedGraph, t: &[&str]) -> Result<BTreeSet<usize>, EngineError> {
    t.iter()
        .map(|l| {
            bb.base()
                .index_of(l)
                .ok_or_else(|| EngineError::Graph(GraphError::UnknownVertex(l.to_string())))
        })
        .collect()
}

/// Percolation with verticals at `t` forced present and every other edge
/// retained with probability `p`.
pub fn conditioned_model(bb: &BunkbedGraph, t: &[&str], p: BigRational) -> Result<EdgeModel, EngineError> {
    let posts = resolve_posts(bb, t)?;
    let mut model = EdgeModel::uniform(bb, p)?;
    for v in posts {
        model.probs[bb.vertical_edge(v)] = BigRational::one();
    }
    Ok(model)
}

/// The conditioned model further restricted to posts exactly `t`: verticals
/// outside `t` are forced absent. Since edges are independent, probabilities
/// under this model equal conditional probabilities given that event.
pub fn posts_exactly_model(bb: &BunkbedGraph, t: &[&str], p: BigRational) -> Result<EdgeModel, EngineError> {
    let posts = resolve_posts(bb, t)?;
    let mut model = EdgeModel::uniform(bb, p)?;
    for (e, kind) in bb.edges().iter().enumerate() {
        if let BunkbedEdge::Vertical { vertex } = kind {
            model.probs[e] = if posts.contains(vertex) {
                BigRational::one()
            } else {
                BigRational::zero()
            };
        }
    }
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_g1, bunkbed};

    #[test]
    fn conditioned_counts() {
        let bb = bunkbed(&build_g1());
        let m = conditioned_model(&bb, &["2", "5", "8"], half()).unwrap();
        assert_eq!(m.probs().iter().filter(|p| p.is_one()).count(), 3);
        assert_eq!(m.probs().iter().filter(|p| **p == half()).count(), 28);
        let unconditioned = conditioned_model(&bb, &[], half()).unwrap();
        assert_eq!(unconditioned, EdgeModel::uniform(&bb, half()).unwrap());
        assert!(matches!(
            conditioned_model(&bb, &["10"], half()),
            Err(EngineError::Graph(GraphError::UnknownVertex(_)))
        ));
    }

    #[test]
    fn rejects_out_of_range() {
        let bb = bunkbed(&build_g1());
        let two = BigRational::from_integer(BigInt::from(2));
        assert!(matches!(
            EdgeModel::uniform(&bb, two),
            Err(EngineError::ProbabilityOutOfRange(_))
        ));
    }

    #[test]
    fn posts_exactly_fixes_every_vertical() {
        let bb = bunkbed(&build_g1());
        let m = posts_exactly_model(&bb, &["2", "5", "8"], half()).unwrap();
        assert_eq!(m.free_edges().len(), 22);
    }
}
