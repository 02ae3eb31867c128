//! Exponential-hazard variant: a player who has already eaten `i - 1` M&M's
//! tosses heads with probability `1 - exp(-lambda * i)`.
//!
//! Each M&M therefore waits an independent geometric number of rounds, and a
//! player's depletion time is the sum of those waits. Both players follow the
//! same schedule independently, so the tie probability is the sum of the
//! squared depletion-time masses.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pmf::Pmf;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HazardGame {
    pub n: u64,
    pub lambda: f64,
}

impl HazardGame {
    pub fn new(n: u64, lambda: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidCount(n));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidRate(lambda));
        }
        Ok(Self { n, lambda })
    }

    pub fn schedule(&self) -> DepletionSchedule {
        let probs = (1..=self.n)
            .map(|i| -(-self.lambda * i as f64).exp_m1())
            .collect();
        DepletionSchedule { probs }
    }
}

/// Head probability with `remaining` of `initial` M&M's left.
pub fn heads_probability(initial: u64, remaining: u64, lambda: f64) -> Result<f64> {
    if remaining == 0 || remaining > initial {
        return Err(Error::InvalidRemaining { remaining, initial });
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidRate(lambda));
    }
    let eaten_next = (initial - remaining + 1) as f64;
    Ok(-(-lambda * eaten_next).exp_m1())
}

/// Per-M&M head probabilities in eating order.
#[derive(Debug, Clone, PartialEq)]
pub struct DepletionSchedule {
    probs: Vec<f64>,
}

impl DepletionSchedule {
    /// Explicit schedule; every probability must lie in (0, 1].
    pub fn from_probs(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidCount(0));
        }
        if let Some(bad) = probs.iter().find(|p| !(**p > 0.0 && **p <= 1.0)) {
            return Err(Error::InvalidProbability(bad.to_string()));
        }
        Ok(Self { probs })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn mean(&self) -> f64 {
        self.probs.iter().map(|p| 1.0 / p).sum()
    }
}

/// Masses `P(N = t)` for `t = 0..=horizon` and the exact tail `P(N > horizon)`.
fn convolve(schedule: &DepletionSchedule, horizon: usize) -> (Vec<f64>, f64) {
    let mut pmf = vec![0.0; horizon + 1];
    pmf[0] = 1.0;
    let mut tail = 0.0;
    for &p in schedule.probs() {
        let q = 1.0 - p;
        // acc(t) = sum_{s <= t} P_prev(s) q^(t-s); next P(t) = p acc(t-1)
        // and P_next(N > h) = P_prev(N > h) + acc(h).
        let mut acc = 0.0;
        let mut next = vec![0.0; horizon + 1];
        for t in 0..=horizon {
            if t > 0 {
                next[t] = p * acc;
            }
            acc = q * acc + pmf[t];
        }
        tail += acc;
        pmf = next;
    }
    (pmf, tail)
}

/// Depletion-time distribution, with the horizon doubled until the unresolved
/// tail mass is at most `eps`.
pub fn depletion_time_pmf(schedule: &DepletionSchedule, eps: f64) -> Result<Pmf<f64>> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidTolerance(eps));
    }
    let mut horizon = (2 * schedule.probs().len()).max(16);
    loop {
        let (pmf, tail) = convolve(schedule, horizon);
        if tail <= eps {
            let support: BTreeMap<i64, f64> = pmf
                .into_iter()
                .enumerate()
                .filter(|(_, m)| *m > 0.0)
                .map(|(t, m)| (t as i64, m))
                .collect();
            return Ok(Pmf::new(support, tail));
        }
        horizon *= 2;
    }
}

/// Exact tie probability for two independent players on `schedule`; the
/// omitted contribution is at most the squared residual, below `eps^2`.
pub fn tie_prob_schedule(schedule: &DepletionSchedule, eps: f64) -> Result<f64> {
    let pmf = depletion_time_pmf(schedule, eps)?;
    Ok(pmf.iter().map(|(_, m)| m * m).sum())
}

pub fn tie_prob_evolving_exact(game: &HazardGame, eps: f64) -> Result<f64> {
    tie_prob_schedule(&game.schedule(), eps)
}
