//! Closed-form evaluation of tie probabilities and expected game length for
//! the fair two-player game.
//!
//! Everything here is exact rational arithmetic except
//! [`tie_prob_truncated`], which sums the infinite negative-binomial series
//! in floating point with a rigorous bound on the omitted tail.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// `C(n, r)`, zero outside `0 <= r <= n`.
pub fn binomial(n: u64, r: i64) -> BigInt {
    if r < 0 || r as u64 > n {
        return BigInt::zero();
    }
    let r = (r as u64).min(n - r as u64);
    let mut acc = BigUint::one();
    for i in 0..r {
        acc *= n - i;
        acc /= i + 1;
    }
    BigInt::from(acc)
}

/// Signed-argument convenience used by the triple sums; negative `n` yields 0.
fn binom(n: i64, r: i64) -> BigInt {
    if n < 0 {
        return BigInt::zero();
    }
    binomial(n as u64, r)
}

fn pow3(e: u64) -> BigInt {
    num_traits::pow(BigInt::from(3u32), e as usize)
}

/// Initial M&M counts of the two players.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StartCounts {
    pub i1: u64,
    pub i2: u64,
}

impl StartCounts {
    pub fn new(i1: u64, i2: u64) -> Result<Self> {
        if i1 == 0 {
            return Err(Error::InvalidCount(i1));
        }
        if i2 == 0 {
            return Err(Error::InvalidCount(i2));
        }
        Ok(Self { i1, i2 })
    }

    pub fn symmetric(k: u64) -> Result<Self> {
        Self::new(k, k)
    }

    /// Same game with the smaller stash listed first.
    pub fn normalized(self) -> Self {
        if self.i1 <= self.i2 {
            self
        } else {
            Self {
                i1: self.i2,
                i2: self.i1,
            }
        }
    }
}

/// Exact tie probability of the symmetric fair game with `k` M&M's each,
/// via the finite sum over the number of single-player moves.
pub fn tie_prob_finite(k: u64) -> Result<Rational> {
    if k == 0 {
        return Err(Error::InvalidCount(k));
    }
    let k = k as i64;
    // Common denominator 3^(2k-1); term n carries 3^n in the numerator.
    let mut numer = BigInt::zero();
    let mut three_n = BigInt::one();
    for n in 0..k {
        let paths = binom(2 * k - n - 2, n) * binom(2 * k - 2 * n - 2, k - n - 1);
        numer += paths * &three_n;
        three_n *= 3;
    }
    Ok(BigRational::new(numer, pow3((2 * k - 1) as u64)))
}

/// Result of summing the infinite tie series up to a finite cut-off.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncatedSum {
    pub value: f64,
    /// Rigorous upper bound on the mass of the omitted terms.
    pub tail_bound: f64,
    /// Last index `n` included in the partial sum.
    pub last_term: u64,
}

/// Term sequence `t_n = C(n-1, k-1)^2 4^-n`, n = k, k+1, ..., carried as a
/// mantissa and a binary exponent so that large `k` neither underflows at the
/// start nor loses the peak.
struct SeriesWalker {
    k: u64,
    n: u64,
    term: f64,
    sum: f64,
    exp2: i64,
}

const RESCALE_AT: f64 = 1.0e180;
const RESCALE_BITS: i32 = 598;

impl SeriesWalker {
    fn new(k: u64) -> Self {
        Self {
            k,
            n: k,
            term: 1.0,
            sum: 0.0,
            exp2: -2 * k as i64,
        }
    }

    /// Ratio `t_{n+1} / t_n`.
    fn ratio(k: u64, n: u64) -> f64 {
        let q = n as f64 / (n - k + 1) as f64;
        q * q / 4.0
    }

    fn absolute(&self, scaled: f64) -> f64 {
        scale_by_pow2(scaled, self.exp2)
    }

    /// Adds `t_n` to the sum and advances to `n + 1`.
    fn step(&mut self) {
        self.sum += self.term;
        self.term *= Self::ratio(self.k, self.n);
        self.n += 1;
        if self.term > RESCALE_AT {
            let down = 2f64.powi(-RESCALE_BITS);
            self.term *= down;
            self.sum *= down;
            self.exp2 += RESCALE_BITS as i64;
        }
    }

    /// Bound on `sum_{m >= n} t_m` once the ratio from `n` on is at most 1/2.
    fn tail_bound(&self) -> Option<f64> {
        let r = Self::ratio(self.k, self.n);
        (r <= 0.5).then(|| self.absolute(self.term) / (1.0 - r))
    }
}

fn scale_by_pow2(x: f64, e: i64) -> f64 {
    let mut x = x;
    let mut e = e;
    while e > 0 {
        let s = e.min(1000);
        x *= 2f64.powi(s as i32);
        e -= s;
    }
    while e < 0 {
        let s = (-e).min(1000);
        x *= 2f64.powi(-(s as i32));
        e += s;
    }
    x
}

/// Sums the infinite series for the fair symmetric tie probability until the
/// omitted tail is provably at most `eps`.
///
/// The term ratio `(n/(n-k+1))^2/4` is nonincreasing in `n`; once it drops to
/// 1/2 the tail from `n` on is bounded by `t_n / (1 - r_n) <= 2 t_n`.
pub fn tie_prob_truncated(k: u64, eps: f64) -> Result<TruncatedSum> {
    if k == 0 {
        return Err(Error::InvalidCount(k));
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidTolerance(eps));
    }
    let mut walker = SeriesWalker::new(k);
    loop {
        walker.step();
        if let Some(bound) = walker.tail_bound() {
            if bound <= eps {
                return Ok(TruncatedSum {
                    value: walker.absolute(walker.sum),
                    tail_bound: bound,
                    last_term: walker.n - 1,
                });
            }
        }
    }
}

/// Partial sum of the infinite series over `k <= n <= last`.
pub fn tie_partial_sum(k: u64, last: u64) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidCount(k));
    }
    let mut walker = SeriesWalker::new(k);
    while walker.n <= last {
        walker.step();
    }
    Ok(walker.absolute(walker.sum))
}

/// Exact expected number of raw turns (double-tail turns included) of the fair
/// game, summed over penultimate lattice states. Inputs are normalized so the
/// smaller stash comes first.
pub fn expected_turns(start: StartCounts) -> Rational {
    let StartCounts { i1, i2 } = start.normalized();
    let (i1, i2) = (i1 as i64, i2 as i64);

    // sum over k of (len / 3^len) C(len-1, k) C(len-k-1, a-k-1), len = m + a - k
    let edge = |a: i64, m: i64, k: i64| -> Rational {
        let len = m + a - k;
        let paths = binom(len - 1, k) * binom(len - k - 1, a - k - 1);
        BigRational::new(paths * len, pow3(len as u64))
    };

    let mut first = Rational::zero();
    for m in 0..i1 {
        for k in 0..=m {
            first += edge(i2, m, k);
        }
    }
    let mut second = Rational::zero();
    for m in 0..i2 {
        for k in 0..=(i1 - 1).min(m) {
            second += edge(i1, m, k);
        }
    }
    let mut corner = Rational::zero();
    for k in 0..i1 {
        let len = i1 + i2 - k - 1;
        let paths = binom(len - 1, k) * binom(len - k - 1, i1 - k - 1);
        corner += BigRational::new(paths * len, pow3(len as u64));
    }

    let eight_thirds = BigRational::new(8.into(), 3.into());
    let four_thirds = BigRational::new(4.into(), 3.into());
    eight_thirds * (first + second) - four_thirds * corner
}
