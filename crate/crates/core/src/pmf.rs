use std::collections::BTreeMap;
use std::ops::Add;

use num_traits::Zero;
use serde::Serialize;

/// Probability mass function over integer outcomes, plus a residual bucket
/// for mass that was not resolved to any outcome (capped or truncated).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Pmf<M> {
    support: BTreeMap<i64, M>,
    residual: M,
}

impl<M> Pmf<M>
where
    M: Clone + Zero + for<'a> Add<&'a M, Output = M>,
{
    pub fn new(support: BTreeMap<i64, M>, residual: M) -> Self {
        Self { support, residual }
    }

    pub fn mass(&self, outcome: i64) -> M {
        self.support.get(&outcome).cloned().unwrap_or_else(M::zero)
    }

    pub fn support(&self) -> &BTreeMap<i64, M> {
        &self.support
    }

    pub fn residual(&self) -> &M {
        &self.residual
    }

    /// Sum of resolved masses, excluding the residual.
    pub fn resolved(&self) -> M {
        self.support.values().fold(M::zero(), |acc, m| acc + m)
    }

    pub fn total(&self) -> M {
        self.resolved() + &self.residual
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &M)> {
        self.support.iter().map(|(k, v)| (*k, v))
    }
}
