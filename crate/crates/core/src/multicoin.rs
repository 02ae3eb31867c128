//! Multi-coin variant: each player tosses `m` fair coins per round and adds
//! the values of the coins that land heads to a running total that starts at
//! zero. A player finishes on the first round the total reaches `target`;
//! dropping below `floor` or running past `horizon` rounds leaves the player
//! unresolved (capped).

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pmf::Pmf;
use crate::rational::{to_f64, Rational};

/// Largest coin count for which the increment distribution is enumerated.
pub const MAX_ENUMERATED_COINS: usize = 24;

pub const DEFAULT_FLOOR: i64 = -1000;

/// Upper bound on `target - floor`, the number of lattice states in the round DP.
const MAX_STATES: i64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct CoinSet {
    values: Vec<i64>,
}

impl CoinSet {
    pub fn new(values: Vec<i64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyCoinSet);
        }
        if values.contains(&0) {
            return Err(Error::ZeroCoin);
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_zero_sum(&self) -> bool {
        self.values.iter().map(|&v| v as i128).sum::<i128>() == 0
    }

    /// Every coin value negated.
    pub fn dual(&self) -> CoinSet {
        CoinSet {
            values: self.values.iter().map(|v| -v).collect(),
        }
    }
}

impl TryFrom<Vec<i64>> for CoinSet {
    type Error = Error;

    fn try_from(values: Vec<i64>) -> Result<Self> {
        CoinSet::new(values)
    }
}

impl From<CoinSet> for Vec<i64> {
    fn from(coins: CoinSet) -> Self {
        coins.values
    }
}

impl std::fmt::Display for CoinSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.values.iter().map(|v| v.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// How a run where both players are capped is scored.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieConvention {
    /// Capped runs are never ties.
    #[default]
    ExcludeCapped,
    /// Two capped players count as a tie, as a naive round-count comparison does.
    IncludeCapped,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MulticoinGame {
    pub coins: CoinSet,
    pub target: i64,
    pub floor: i64,
    pub horizon: u64,
}

impl MulticoinGame {
    /// Game with the default floor and a horizon of `10 * target * m` rounds.
    pub fn new(coins: CoinSet, target: i64) -> Result<Self> {
        let horizon = (10 * target.max(1) as u64).saturating_mul(coins.len() as u64);
        Self::with_limits(coins, target, DEFAULT_FLOOR, horizon)
    }

    pub fn with_limits(coins: CoinSet, target: i64, floor: i64, horizon: u64) -> Result<Self> {
        if target <= 0 {
            return Err(Error::InvalidGame(format!(
                "target must be positive, got {target}"
            )));
        }
        if floor >= 0 {
            return Err(Error::InvalidGame(format!(
                "floor must be negative, got {floor}"
            )));
        }
        if horizon == 0 {
            return Err(Error::InvalidGame(
                "horizon must be at least one round".into(),
            ));
        }
        Ok(Self {
            coins,
            target,
            floor,
            horizon,
        })
    }

    pub fn dual(&self) -> Self {
        Self {
            coins: self.coins.dual(),
            ..self.clone()
        }
    }
}

/// Number of heads-subsets producing each round total, keyed by total.
/// Counts sum to `2^m`.
pub fn subset_sum_counts(coins: &CoinSet) -> Result<BTreeMap<i64, u64>> {
    if coins.len() > MAX_ENUMERATED_COINS {
        return Err(Error::TooManyCoins {
            got: coins.len(),
            max: MAX_ENUMERATED_COINS,
        });
    }
    let mut counts = BTreeMap::from([(0i64, 1u64)]);
    for &value in coins.values() {
        let mut next = counts.clone();
        for (&sum, &n) in &counts {
            *next.entry(sum + value).or_insert(0) += n;
        }
        counts = next;
    }
    Ok(counts)
}

/// Exact distribution of one round's total over the `2^m` equally likely
/// heads-subsets.
pub fn increment_pmf(coins: &CoinSet) -> Result<Pmf<Rational>> {
    let counts = subset_sum_counts(coins)?;
    let denom = BigInt::one() << coins.len();
    let support = counts
        .into_iter()
        .map(|(sum, n)| (sum, Rational::new(BigInt::from(n), denom.clone())))
        .collect();
    Ok(Pmf::new(support, Rational::zero()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DualityReport {
    pub zero_sum: bool,
    pub pmf_equal: bool,
}

pub fn duality_check(coins: &CoinSet) -> Result<DualityReport> {
    let pmf_equal = increment_pmf(coins)? == increment_pmf(&coins.dual())?;
    Ok(DualityReport {
        zero_sum: coins.is_zero_sum(),
        pmf_equal,
    })
}

/// Exact distribution of the round on which one player first reaches the
/// target. Walks that drop below the floor or are still running after the
/// horizon go to the residual.
pub fn round_count_pmf(game: &MulticoinGame) -> Result<Pmf<Rational>> {
    let increments: Vec<(i64, u64)> = subset_sum_counts(&game.coins)?.into_iter().collect();
    let width = game.target - game.floor;
    if width > MAX_STATES {
        return Err(Error::InvalidGame(format!(
            "{width} lattice states exceed the limit of {MAX_STATES}"
        )));
    }
    let width = width as usize;
    let origin = (-game.floor) as usize;
    let m = game.coins.len();

    // Path counts; the probability of a count at round n is count / 2^(m n).
    let mut current = vec![BigUint::zero(); width];
    current[origin] = BigUint::one();
    let mut support = BTreeMap::new();
    let mut resolved = Rational::zero();
    let mut live = true;

    for round in 1..=game.horizon {
        if !live {
            break;
        }
        let mut next = vec![BigUint::zero(); width];
        let mut hits = BigUint::zero();
        for (idx, paths) in current.iter().enumerate() {
            if paths.is_zero() {
                continue;
            }
            let total = idx as i64 + game.floor;
            for &(step, ways) in &increments {
                let landed = total + step;
                if landed >= game.target {
                    hits += paths * ways;
                } else if landed >= game.floor {
                    next[(landed - game.floor) as usize] += paths * ways;
                }
            }
        }
        if !hits.is_zero() {
            let mass = Rational::new(BigInt::from(hits), BigInt::one() << (m as u64 * round));
            resolved += &mass;
            support.insert(round as i64, mass);
        }
        live = next.iter().any(|c| !c.is_zero());
        current = next;
    }

    let residual = Rational::one() - resolved;
    Ok(Pmf::new(support, residual))
}

/// Probability the two players finish on the same round, from the exact
/// round-count distribution.
pub fn tie_prob_multicoin(game: &MulticoinGame, convention: TieConvention) -> Result<f64> {
    let pmf = round_count_pmf(game)?;
    Ok(to_f64(&tie_prob_from_rounds(&pmf, convention)))
}

pub fn tie_prob_from_rounds(pmf: &Pmf<Rational>, convention: TieConvention) -> Rational {
    let mut tie = pmf.iter().fold(Rational::zero(), |acc, (_, p)| acc + p * p);
    if convention == TieConvention::IncludeCapped {
        tie += pmf.residual() * pmf.residual();
    }
    tie
}
