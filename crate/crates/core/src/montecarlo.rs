//! Seeded Monte Carlo engine for every game variant.
//!
//! Runs are split into fixed-size batches. Batch `b` draws from ChaCha8
//! seeded with the run seed and switched to stream `b`, so each batch's
//! randomness depends only on `(seed, b)`. Batches execute on the current
//! rayon pool and their integer tallies are summed, which makes a report a
//! pure function of its [`SimConfig`] regardless of thread count.

use rand::distr::{Bernoulli, Distribution};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolving::HazardGame;
use crate::exact::StartCounts;
use crate::markov::tie_prob_dp;
use crate::multicoin::{MulticoinGame, TieConvention};
use crate::rational::{to_f64, Rational};

/// Runs per PRNG substream.
pub const BATCH_RUNS: u64 = 2048;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Variant {
    /// The original game with a common head probability; raw turns are counted.
    Standard {
        start: StartCounts,
        p_heads: f64,
    },
    /// Multi-coin cumulative-sum game. `legacy_accumulation` keeps the round
    /// total running across rounds instead of re-tossing it.
    Multicoin {
        game: MulticoinGame,
        convention: TieConvention,
        legacy_accumulation: bool,
    },
    Evolving {
        game: HazardGame,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub runs: u64,
    pub seed: u64,
    pub variant: Variant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub runs: u64,
    pub ties: u64,
    pub p1_wins: u64,
    pub p2_wins: u64,
    pub capped: u64,
    /// Mean game length over runs in which at least one player finished.
    pub mean_turns: f64,
    pub mean_turns_stderr: f64,
    pub tie_rate: f64,
    pub tie_rate_stderr: f64,
    pub seed: u64,
}

impl SimReport {
    fn from_tally(t: &Tally, seed: u64) -> Self {
        let runs = t.ties + t.p1_wins + t.p2_wins + t.capped;
        let tie_rate = t.ties as f64 / runs as f64;
        let (mean_turns, mean_turns_stderr) = if t.timed == 0 {
            (0.0, 0.0)
        } else {
            let n = t.timed as f64;
            let mean = t.turns as f64 / n;
            let var = if t.timed > 1 {
                // exact integer numerator avoids cancellation in sum-of-squares
                let num = t.timed as u128 * t.turns_sq - t.turns * t.turns;
                num as f64 / (n * (n - 1.0))
            } else {
                0.0
            };
            (mean, (var / n).sqrt())
        };
        Self {
            runs,
            ties: t.ties,
            p1_wins: t.p1_wins,
            p2_wins: t.p2_wins,
            capped: t.capped,
            mean_turns,
            mean_turns_stderr,
            tie_rate,
            tie_rate_stderr: binomial_stderr(tie_rate, runs),
            seed,
        }
    }
}

/// Standard error of a binomial proportion, `sqrt(r (1 - r) / n)`.
pub fn binomial_stderr(rate: f64, runs: u64) -> f64 {
    (rate * (1.0 - rate) / runs as f64).sqrt()
}

#[derive(Debug, Default, Clone, Copy)]
struct Tally {
    ties: u64,
    p1_wins: u64,
    p2_wins: u64,
    capped: u64,
    timed: u64,
    turns: u128,
    turns_sq: u128,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        self.ties += other.ties;
        self.p1_wins += other.p1_wins;
        self.p2_wins += other.p2_wins;
        self.capped += other.capped;
        self.timed += other.timed;
        self.turns += other.turns;
        self.turns_sq += other.turns_sq;
        self
    }

    fn record_turns(&mut self, turns: u64) {
        self.timed += 1;
        self.turns += turns as u128;
        self.turns_sq += turns as u128 * turns as u128;
    }
}

fn batch_rng(seed: u64, batch: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(batch);
    rng
}

/// Independent seed for the `index`-th member of a family of simulations
/// (grid points of a sweep). SplitMix64 finalizer over `seed + index * golden`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Runs a simulation on the current rayon pool.
pub fn simulate(config: &SimConfig) -> Result<SimReport> {
    if config.runs == 0 {
        return Err(Error::NoRuns);
    }
    let kernel = Kernel::new(&config.variant)?;
    let batches = config.runs.div_ceil(BATCH_RUNS);
    let tally = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = batch_rng(config.seed, b);
            let runs = BATCH_RUNS.min(config.runs - b * BATCH_RUNS);
            let mut tally = Tally::default();
            for _ in 0..runs {
                kernel.run_once(&mut rng, &mut tally);
            }
            tally
        })
        .reduce(Tally::default, Tally::merge);
    Ok(SimReport::from_tally(&tally, config.seed))
}

pub fn simulate_standard(
    start: StartCounts,
    p_heads: f64,
    runs: u64,
    seed: u64,
) -> Result<SimReport> {
    simulate(&SimConfig {
        runs,
        seed,
        variant: Variant::Standard { start, p_heads },
    })
}

pub fn simulate_multicoin(
    game: &MulticoinGame,
    convention: TieConvention,
    legacy_accumulation: bool,
    runs: u64,
    seed: u64,
) -> Result<SimReport> {
    let variant = Variant::Multicoin {
        game: game.clone(),
        convention,
        legacy_accumulation,
    };
    simulate(&SimConfig {
        runs,
        seed,
        variant,
    })
}

pub fn simulate_evolving(game: HazardGame, runs: u64, seed: u64) -> Result<SimReport> {
    simulate(&SimConfig {
        runs,
        seed,
        variant: Variant::Evolving { game },
    })
}

/// Per-variant sampler with precomputed tables.
enum Kernel {
    Standard {
        i1: u64,
        i2: u64,
        coin: Bernoulli,
    },
    Multicoin {
        walk: CoinWalk,
        convention: TieConvention,
    },
    Evolving {
        p_heads: Vec<f64>,
    },
}

impl Kernel {
    fn new(variant: &Variant) -> Result<Self> {
        Ok(match variant {
            Variant::Standard { start, p_heads } => {
                if !(*p_heads > 0.0 && *p_heads <= 1.0) {
                    return Err(Error::InvalidProbability(p_heads.to_string()));
                }
                let coin = Bernoulli::new(*p_heads)
                    .map_err(|_| Error::InvalidProbability(p_heads.to_string()))?;
                Kernel::Standard {
                    i1: start.i1,
                    i2: start.i2,
                    coin,
                }
            }
            Variant::Multicoin {
                game,
                convention,
                legacy_accumulation,
            } => Kernel::Multicoin {
                walk: CoinWalk::new(game, *legacy_accumulation),
                convention: *convention,
            },
            Variant::Evolving { game } => Kernel::Evolving {
                p_heads: game.schedule().probs().to_vec(),
            },
        })
    }

    fn run_once<R: Rng>(&self, rng: &mut R, tally: &mut Tally) {
        match self {
            Kernel::Standard { i1, i2, coin } => {
                let (mut a, mut b, mut turns) = (*i1, *i2, 0u64);
                while a > 0 && b > 0 {
                    turns += 1;
                    a -= coin.sample(rng) as u64;
                    b -= coin.sample(rng) as u64;
                }
                score_depletion(a, b, tally);
                tally.record_turns(turns);
            }
            Kernel::Evolving { p_heads } => {
                let n = p_heads.len();
                let (mut eaten_a, mut eaten_b, mut turns) = (0usize, 0usize, 0u64);
                while eaten_a < n && eaten_b < n {
                    turns += 1;
                    // two fresh uniforms per round, player A first
                    if rng.random::<f64>() < p_heads[eaten_a] {
                        eaten_a += 1;
                    }
                    if rng.random::<f64>() < p_heads[eaten_b] {
                        eaten_b += 1;
                    }
                }
                score_depletion((n - eaten_a) as u64, (n - eaten_b) as u64, tally);
                tally.record_turns(turns);
            }
            Kernel::Multicoin { walk, convention } => {
                let first = walk.rounds_to_target(rng);
                let second = walk.rounds_to_target(rng);
                match (first, second) {
                    (Some(a), Some(b)) => {
                        match a.cmp(&b) {
                            std::cmp::Ordering::Equal => tally.ties += 1,
                            // finishing first means running out first
                            std::cmp::Ordering::Less => tally.p2_wins += 1,
                            std::cmp::Ordering::Greater => tally.p1_wins += 1,
                        }
                        tally.record_turns(a.min(b));
                    }
                    (None, None) if *convention == TieConvention::IncludeCapped => tally.ties += 1,
                    (None, None) => tally.capped += 1,
                    (Some(a), None) | (None, Some(a)) => {
                        tally.capped += 1;
                        tally.record_turns(a);
                    }
                }
            }
        }
    }
}

fn score_depletion(a: u64, b: u64, tally: &mut Tally) {
    match (a == 0, b == 0) {
        (true, true) => tally.ties += 1,
        (true, false) => tally.p2_wins += 1,
        (false, true) => tally.p1_wins += 1,
        (false, false) => unreachable!("game ended with both players holding M&M's"),
    }
}

/// One player's cumulative-sum walk in the multi-coin game.
struct CoinWalk {
    values: Vec<i64>,
    /// Subset sums indexed by heads bitmask, for up to `TABLE_COINS` coins.
    table: Option<Vec<i64>>,
    target: i64,
    floor: i64,
    horizon: u64,
    legacy: bool,
}

const TABLE_COINS: usize = 16;

impl CoinWalk {
    fn new(game: &MulticoinGame, legacy: bool) -> Self {
        let values = game.coins.values().to_vec();
        let table = (values.len() <= TABLE_COINS).then(|| {
            (0..1u32 << values.len())
                .map(|mask| {
                    values
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| mask >> i & 1 == 1)
                        .map(|(_, v)| v)
                        .sum()
                })
                .collect()
        });
        Self {
            values,
            table,
            target: game.target,
            floor: game.floor,
            horizon: game.horizon,
            legacy,
        }
    }

    /// Total of the coins landing heads in one toss of every coin.
    fn toss<R: RngCore>(&self, rng: &mut R) -> i64 {
        match &self.table {
            Some(table) => table[(rng.next_u32() & ((1u32 << self.values.len()) - 1)) as usize],
            None => {
                let mut sum = 0;
                for chunk in self.values.chunks(64) {
                    let bits = rng.next_u64();
                    sum += chunk
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| bits >> i & 1 == 1)
                        .map(|(_, v)| v)
                        .sum::<i64>();
                }
                sum
            }
        }
    }

    /// Round on which the running total first reaches the target, or `None`
    /// if it drops below the floor or the horizon passes first.
    fn rounds_to_target<R: RngCore>(&self, rng: &mut R) -> Option<u64> {
        let mut total = 0i64;
        let mut round_sum = 0i64;
        for round in 1..=self.horizon {
            if self.legacy {
                round_sum += self.toss(rng);
            } else {
                round_sum = self.toss(rng);
            }
            total += round_sum;
            if total < self.floor {
                return None;
            }
            if total >= self.target {
                return Some(round);
            }
        }
        None
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvePoint {
    pub p: f64,
    pub tie_rate: f64,
    pub stderr: f64,
    pub exact: f64,
}

/// Tie rate of the symmetric `k`-vs-`k` game across head probabilities, with
/// the exact lattice value alongside each simulated point. Grid point `i`
/// uses seed `derive_seed(seed, i)`.
pub fn tie_curve_vs_p(
    k: u64,
    p_grid: &[Rational],
    runs: u64,
    seed: u64,
) -> Result<Vec<CurvePoint>> {
    let start = StartCounts::symmetric(k)?;
    p_grid
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let exact = tie_prob_dp(k, k, p)?;
            let p_f = to_f64(p);
            let report = simulate_standard(start, p_f, runs, derive_seed(seed, i as u64))?;
            Ok(CurvePoint {
                p: p_f,
                tie_rate: report.tie_rate,
                stderr: report.tie_rate_stderr,
                exact: to_f64(&exact),
            })
        })
        .collect()
}
