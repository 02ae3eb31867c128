//! Absorbing-chain dynamic programming over the lattice of remaining counts.
//!
//! Double-tail turns never change the state, so the chain is compressed to
//! the three moves that do: both players eat, only player 1 eats, only
//! player 2 eats. Tables are filled row-major over increasing `(i, j)` in
//! exact rationals.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::StartCounts;
use crate::rational::{is_probability, ratio, Rational};

/// Two-player game with a common per-toss head probability.
#[derive(Debug, Clone, PartialEq)]
pub struct BiasedGame {
    pub start: StartCounts,
    pub p_heads: Rational,
}

impl BiasedGame {
    pub fn new(start: StartCounts, p_heads: Rational) -> Result<Self> {
        validate_p(&p_heads)?;
        Ok(Self { start, p_heads })
    }

    pub fn fair(start: StartCounts) -> Self {
        Self {
            start,
            p_heads: ratio(1, 2),
        }
    }
}

/// Conditional move probabilities given that at least one head was tossed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompressedMoves {
    pub both: Rational,
    pub only1: Rational,
    pub only2: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutcomeDist {
    pub p1_wins: Rational,
    pub p2_wins: Rational,
    pub tie: Rational,
}

fn validate_p(p: &Rational) -> Result<()> {
    if p.is_zero() || !is_probability(p) {
        return Err(Error::InvalidProbability(p.to_string()));
    }
    Ok(())
}

/// With `q = 1 - p`: both = p/(1+q), each single move = q/(1+q).
pub fn compressed_transitions(p_heads: &Rational) -> Result<CompressedMoves> {
    validate_p(p_heads)?;
    let q = Rational::one() - p_heads;
    let norm = Rational::one() + &q;
    let single = &q / &norm;
    Ok(CompressedMoves {
        both: p_heads / &norm,
        only1: single.clone(),
        only2: single,
    })
}

/// Fills `table[i][j]` for `0 <= i <= i1`, `0 <= j <= i2`, where `boundary`
/// gives absorbing values (any cell with `i == 0 || j == 0`) and interior cells
/// are `add + both*T(i-1,j-1) + only1*T(i-1,j) + only2*T(i,j-1)`.
fn lattice<B>(i1: u64, i2: u64, moves: &CompressedMoves, add: &Rational, boundary: B) -> Rational
where
    B: Fn(u64, u64) -> Rational,
{
    let cols = i2 as usize + 1;
    let mut prev: Vec<Rational> = (0..cols as u64).map(|j| boundary(0, j)).collect();
    for i in 1..=i1 {
        let mut row = Vec::with_capacity(cols);
        row.push(boundary(i, 0));
        for j in 1..cols {
            let value = add
                + &moves.both * &prev[j - 1]
                + &moves.only1 * &prev[j]
                + &moves.only2 * &row[j - 1];
            row.push(value);
        }
        prev = row;
    }
    prev.pop().expect("nonempty row")
}

/// Exact tie probability from `(i1, i2)` with head probability `p_heads`.
pub fn tie_prob_dp(i1: u64, i2: u64, p_heads: &Rational) -> Result<Rational> {
    let start = StartCounts::new(i1, i2)?;
    let moves = compressed_transitions(p_heads)?;
    let zero = Rational::zero();
    Ok(lattice(start.i1, start.i2, &moves, &zero, |i, j| {
        if i == 0 && j == 0 {
            Rational::one()
        } else {
            Rational::zero()
        }
    }))
}

/// Full outcome distribution; player 1 wins when player 2 empties first.
pub fn outcome_dist_dp(i1: u64, i2: u64, p_heads: &Rational) -> Result<OutcomeDist> {
    let start = StartCounts::new(i1, i2)?;
    let moves = compressed_transitions(p_heads)?;
    let zero = Rational::zero();
    let tie = tie_prob_dp(i1, i2, p_heads)?;
    let p1_wins = lattice(start.i1, start.i2, &moves, &zero, |i, j| {
        if i > 0 && j == 0 {
            Rational::one()
        } else {
            Rational::zero()
        }
    });
    let p2_wins = lattice(start.i1, start.i2, &moves, &zero, |i, j| {
        if i == 0 && j > 0 {
            Rational::one()
        } else {
            Rational::zero()
        }
    });
    Ok(OutcomeDist {
        p1_wins,
        p2_wins,
        tie,
    })
}

/// Expected raw turns of the fair game: 4/3 times the expected number of
/// compressed state changes.
pub fn expected_turns_dp(i1: u64, i2: u64) -> Result<Rational> {
    let start = StartCounts::new(i1, i2)?;
    let moves = compressed_transitions(&ratio(1, 2))?;
    let changes = lattice(start.i1, start.i2, &moves, &Rational::one(), |_, _| {
        Rational::zero()
    });
    Ok(ratio(4, 3) * changes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{expected_turns, tie_prob_finite};

    #[test]
    fn transitions() {
        let fair = compressed_transitions(&ratio(1, 2)).unwrap();
        assert_eq!(fair.both, ratio(1, 3));
        assert_eq!(fair.only1, ratio(1, 3));
        assert_eq!(fair.only2, ratio(1, 3));

        let sure = compressed_transitions(&ratio(1, 1)).unwrap();
        assert_eq!(
            (sure.both, sure.only1, sure.only2),
            (ratio(1, 1), ratio(0, 1), ratio(0, 1))
        );

        let biased = compressed_transitions(&ratio(2, 3)).unwrap();
        assert_eq!(biased.both, ratio(1, 2));
        assert_eq!(biased.only1, ratio(1, 4));
        assert_eq!(&biased.both + &biased.only1 + &biased.only2, ratio(1, 1));
    }

    #[test]
    fn rejects_degenerate_probabilities() {
        assert!(matches!(
            compressed_transitions(&ratio(0, 1)),
            Err(Error::InvalidProbability(_))
        ));
        assert!(compressed_transitions(&ratio(3, 2)).is_err());
        assert!(compressed_transitions(&ratio(-1, 2)).is_err());
        assert!(tie_prob_dp(0, 1, &ratio(1, 2)).is_err());
    }

    #[test]
    fn hand_values() {
        assert_eq!(tie_prob_dp(1, 1, &ratio(1, 2)).unwrap(), ratio(1, 3));
        assert_eq!(tie_prob_dp(2, 1, &ratio(1, 2)).unwrap(), ratio(1, 9));
        assert_eq!(tie_prob_dp(2, 2, &ratio(1, 2)).unwrap(), ratio(5, 27));
        for k in 1..=6 {
            assert_eq!(tie_prob_dp(k, k, &ratio(1, 1)).unwrap(), ratio(1, 1));
        }
    }

    #[test]
    fn outcome_distribution() {
        let d = outcome_dist_dp(1, 1, &ratio(1, 2)).unwrap();
        assert_eq!(
            d,
            OutcomeDist {
                p1_wins: ratio(1, 3),
                p2_wins: ratio(1, 3),
                tie: ratio(1, 3)
            }
        );

        let d = outcome_dist_dp(2, 1, &ratio(1, 2)).unwrap();
        assert_eq!(&d.p1_wins + &d.p2_wins, ratio(8, 9));
        // player 2 holds fewer, so player 1 is favoured
        assert!(d.p1_wins > d.p2_wins);

        for (i1, i2) in [(1, 4), (3, 3), (5, 2), (7, 7)] {
            for p in [ratio(1, 10), ratio(1, 2), ratio(9, 10)] {
                let d = outcome_dist_dp(i1, i2, &p).unwrap();
                assert_eq!(&d.p1_wins + &d.p2_wins + &d.tie, ratio(1, 1));
                if i1 == i2 {
                    assert_eq!(d.p1_wins, d.p2_wins);
                }
            }
        }
    }

    #[test]
    fn expected_turn_values() {
        assert_eq!(expected_turns_dp(1, 1).unwrap(), ratio(4, 3));
        assert_eq!(expected_turns_dp(1, 2).unwrap(), ratio(16, 9));
        assert_eq!(
            expected_turns_dp(10, 10).unwrap(),
            expected_turns(StartCounts::new(10, 10).unwrap())
        );
    }

    #[test]
    fn matches_finite_sum() {
        assert_eq!(
            tie_prob_dp(5, 5, &ratio(1, 2)).unwrap(),
            tie_prob_finite(5).unwrap()
        );
    }

    #[test]
    fn player_symmetry() {
        for i1 in 1..=6 {
            for i2 in 1..=6 {
                for p in [ratio(3, 10), ratio(1, 2), ratio(7, 8)] {
                    assert_eq!(
                        tie_prob_dp(i1, i2, &p).unwrap(),
                        tie_prob_dp(i2, i1, &p).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn tie_nondecreasing_in_p() {
        for k in [10, 50] {
            let mut prev = Rational::zero();
            for tenth in 1..=10 {
                let t = tie_prob_dp(k, k, &ratio(tenth, 10)).unwrap();
                assert!(t >= prev, "k={k} p={tenth}/10");
                prev = t;
            }
        }
    }

    #[test]
    fn wider_gap_never_helps_a_tie() {
        for p in [ratio(3, 10), ratio(1, 2), ratio(9, 10)] {
            for i1 in 1..=8u64 {
                for i2 in (i1 + 1)..=8 {
                    let base = tie_prob_dp(i1, i2, &p).unwrap();
                    for d in 1..=(8 - i2) {
                        assert!(tie_prob_dp(i1, i2 + d, &p).unwrap() <= base);
                    }
                    for d in 1..i1 {
                        assert!(tie_prob_dp(i1 - d, i2, &p).unwrap() <= base);
                    }
                }
            }
        }
    }
}
