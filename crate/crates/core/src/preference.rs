//! Pairwise-preference analytics over ranked ballots.
//!
//! When a choice is being made between exclusive alternatives, consensus
//! cannot exist without a strong Condorcet winner — one option that beats
//! every other in pairwise comparison. This module builds the pairwise
//! matrix and detects that winner.

use crate::error::{ConsensusError, Result};
use crate::tabulation::{check_ranking, RankedBallot};

/// M x M grid where `prefer(i, j)` counts the ballots ranking `i` above
/// `j`.
///
/// A ranked choice is above every unranked choice; two unranked choices
/// contribute to neither cell, so `prefer(i, j) + prefer(j, i)` can be less
/// than the number of ballots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairwiseMatrix {
    m: usize,
    prefer: Vec<Vec<u64>>,
}

impl PairwiseMatrix {
    pub fn num_choices(&self) -> usize {
        self.m
    }

    /// Count of ballots ranking `i` above `j`.
    pub fn prefer(&self, i: usize, j: usize) -> u64 {
        self.prefer[i][j]
    }

    /// The full grid, row-major.
    pub fn rows(&self) -> &[Vec<u64>] {
        &self.prefer
    }
}

/// Build the pairwise matrix for `m` choices.
pub fn pairwise_matrix(ballots: &[RankedBallot], m: usize) -> Result<PairwiseMatrix> {
    if m < 2 {
        return Err(ConsensusError::InvalidParameter(format!(
            "a contest needs at least 2 choices, got {m}"
        )));
    }
    let mut prefer = vec![vec![0u64; m]; m];
    let mut is_ranked = vec![false; m];
    for (idx, ballot) in ballots.iter().enumerate() {
        check_ranking(ballot, m, idx + 1)?;
        is_ranked.iter_mut().for_each(|r| *r = false);
        for &choice in &ballot.ranking {
            is_ranked[choice] = true;
        }
        for (position, &above) in ballot.ranking.iter().enumerate() {
            for &below in &ballot.ranking[position + 1..] {
                prefer[above][below] += 1;
            }
            for (unranked, _) in is_ranked.iter().enumerate().filter(|(_, &r)| !r) {
                prefer[above][unranked] += 1;
            }
        }
    }
    Ok(PairwiseMatrix { m, prefer })
}

/// Whether one option unambiguously beats all others.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CondorcetResult {
    /// This option beats every other option pairwise.
    StrongWinner(usize),
    NoStrongWinner,
}

/// Find the strong Condorcet winner, if one exists.
///
/// At most one can exist: two winners would each have to beat the other.
pub fn condorcet_winner(matrix: &PairwiseMatrix) -> CondorcetResult {
    let m = matrix.num_choices();
    for candidate in 0..m {
        let beats_all = (0..m)
            .filter(|&other| other != candidate)
            .all(|other| matrix.prefer(candidate, other) > matrix.prefer(other, candidate));
        if beats_all {
            return CondorcetResult::StrongWinner(candidate);
        }
    }
    CondorcetResult::NoStrongWinner
}
