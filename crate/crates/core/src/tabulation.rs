//! Ballot tabulation: raw ballots to tallies.
//!
//! Abstentions, overvotes, and exhausted ballots are all accounted for
//! explicitly so that the participation bookkeeping feeding quorum and
//! population decisions is never ambiguous. Empty ballots are abstentions;
//! overvoted choice ballots are spoiled for the contest and contribute
//! nothing.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet};

use crate::error::{ConsensusError, Result};
use crate::rules::{one_of_m, MultiTally, OneOfMResult, QuorumSpec, ThresholdSpec, YesNoTally};

/// A yes-or-no ballot carries exactly one mark.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum YesNoBallot {
    Yes,
    No,
    Abstain,
}

/// Selections on a vote-for-at-most-N ballot. An empty set is an
/// abstention.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct ChoiceBallot {
    pub selections: BTreeSet<usize>,
}

impl ChoiceBallot {
    pub fn new(selections: impl IntoIterator<Item = usize>) -> Self {
        ChoiceBallot {
            selections: selections.into_iter().collect(),
        }
    }
}

/// A ranked ballot: distinct choice indices in preference order, possibly
/// truncated. An empty ranking is an abstention.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RankedBallot {
    pub ranking: Vec<usize>,
}

impl RankedBallot {
    pub fn new(ranking: impl IntoIterator<Item = usize>) -> Self {
        RankedBallot {
            ranking: ranking.into_iter().collect(),
        }
    }
}

/// Tally of one contest plus the participation bookkeeping around it.
///
/// `present = voting + abstaining + spoiled` over the ballots submitted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContestTallyReport<C> {
    pub counts: C,
    /// Ballots submitted.
    pub present: u64,
    /// Ballots contributing at least one vote.
    pub voting: u64,
    /// Empty ballots.
    pub abstaining: u64,
    /// Ballots discarded for this contest (overvotes).
    pub spoiled: u64,
}

/// Count yes, no, and abstain marks.
pub fn tally_yes_no(ballots: &[YesNoBallot]) -> ContestTallyReport<YesNoTally> {
    let mut votes_y = 0;
    let mut votes_n = 0;
    let mut abstaining = 0;
    for ballot in ballots {
        match ballot {
            YesNoBallot::Yes => votes_y += 1,
            YesNoBallot::No => votes_n += 1,
            YesNoBallot::Abstain => abstaining += 1,
        }
    }
    ContestTallyReport {
        counts: YesNoTally::new(votes_y, votes_n),
        present: ballots.len() as u64,
        voting: votes_y + votes_n,
        abstaining,
        spoiled: 0,
    }
}

fn check_contest_shape(m: usize, n: usize) -> Result<()> {
    if m < 2 {
        return Err(ConsensusError::InvalidParameter(format!(
            "a contest needs at least 2 choices, got {m}"
        )));
    }
    if n < 1 || n > m {
        return Err(ConsensusError::InvalidParameter(format!(
            "votes per ballot must be in 1..={m}, got {n}"
        )));
    }
    Ok(())
}

fn check_selections(ballot: &ChoiceBallot, m: usize, ordinal: usize) -> Result<()> {
    for &sel in &ballot.selections {
        if sel >= m {
            return Err(ConsensusError::MalformedBallot {
                ordinal,
                reason: format!("selection {sel} out of range for {m} choices"),
            });
        }
    }
    Ok(())
}

/// Tally a vote-for-at-most-`n` contest over `m` choices.
///
/// A ballot with 1..=n selections contributes one vote per selection. A
/// ballot with more than `n` selections is an overvote: it is spoiled and
/// contributes nothing.
pub fn tally_choices(
    ballots: &[ChoiceBallot],
    m: usize,
    n: usize,
) -> Result<ContestTallyReport<MultiTally>> {
    check_contest_shape(m, n)?;
    let mut votes = vec![0u64; m];
    let mut voting = 0;
    let mut abstaining = 0;
    let mut spoiled = 0;
    for (idx, ballot) in ballots.iter().enumerate() {
        check_selections(ballot, m, idx + 1)?;
        if ballot.selections.is_empty() {
            abstaining += 1;
        } else if ballot.selections.len() > n {
            spoiled += 1;
        } else {
            voting += 1;
            for &sel in &ballot.selections {
                votes[sel] += 1;
            }
        }
    }
    Ok(ContestTallyReport {
        counts: MultiTally::new(votes)?,
        present: ballots.len() as u64,
        voting,
        abstaining,
        spoiled,
    })
}

/// Tabulation by slate: the count of each exact selection set observed.
///
/// Only observed slates appear in the map; the power set of the choices is
/// never materialized. Spoiled and abstaining ballots are excluded exactly
/// as in [`tally_choices`].
pub fn tally_slates(
    ballots: &[ChoiceBallot],
    m: usize,
    n: usize,
) -> Result<BTreeMap<BTreeSet<usize>, u64>> {
    check_contest_shape(m, n)?;
    let mut slates: BTreeMap<BTreeSet<usize>, u64> = BTreeMap::new();
    for (idx, ballot) in ballots.iter().enumerate() {
        check_selections(ballot, m, idx + 1)?;
        if ballot.selections.is_empty() || ballot.selections.len() > n {
            continue;
        }
        *slates.entry(ballot.selections.clone()).or_insert(0) += 1;
    }
    Ok(slates)
}

/// Reject duplicate or out-of-range entries. `ordinal` is 1-based.
pub(crate) fn check_ranking(ballot: &RankedBallot, m: usize, ordinal: usize) -> Result<()> {
    let mut seen = vec![false; m];
    for &choice in &ballot.ranking {
        if choice >= m {
            return Err(ConsensusError::MalformedBallot {
                ordinal,
                reason: format!("ranked choice {choice} out of range for {m} choices"),
            });
        }
        if seen[choice] {
            return Err(ConsensusError::MalformedBallot {
                ordinal,
                reason: format!("choice {choice} ranked more than once"),
            });
        }
        seen[choice] = true;
    }
    Ok(())
}

/// Count of ballots ranking each choice first.
///
/// Empty ballots contribute nothing; they are abstentions, not exhausted
/// ballots.
pub fn first_round_counts(ballots: &[RankedBallot], m: usize) -> Result<MultiTally> {
    if m < 2 {
        return Err(ConsensusError::InvalidParameter(format!(
            "a contest needs at least 2 choices, got {m}"
        )));
    }
    let mut votes = vec![0u64; m];
    for (idx, ballot) in ballots.iter().enumerate() {
        check_ranking(ballot, m, idx + 1)?;
        if let Some(&first) = ballot.ranking.first() {
            votes[first] += 1;
        }
    }
    MultiTally::new(votes)
}

/// One elimination round.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IrvRound {
    /// 1-based round number.
    pub round_index: usize,
    /// Count of ballots whose highest-ranked continuing choice is this one,
    /// for every continuing choice.
    pub counts: BTreeMap<usize, u64>,
    /// Ballots with no continuing choice left.
    pub exhausted: u64,
    /// Choices eliminated at the end of this round: all those tied for
    /// fewest votes. Empty in the final round.
    pub eliminated: BTreeSet<usize>,
}

/// Why the elimination rounds stopped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IrvStatus {
    /// This choice holds a strict majority of the non-exhausted ballots.
    Winner(usize),
    /// Every continuing choice is tied for fewest votes; eliminating them
    /// all would settle nothing, so tabulation stops without a winner
    /// rather than manufacture one.
    UnresolvedTie(BTreeSet<usize>),
}

/// Full round log of an instant-runoff tabulation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IrvTabulation {
    pub rounds: Vec<IrvRound>,
    pub status: IrvStatus,
}

impl IrvTabulation {
    /// The winning choice, if the rounds resolved one.
    pub fn winner(&self) -> Option<usize> {
        match self.status {
            IrvStatus::Winner(choice) => Some(choice),
            IrvStatus::UnresolvedTie(_) => None,
        }
    }
}

/// Tabulate ranked ballots by iterated elimination.
///
/// Each round counts the highest-ranked continuing choice of every
/// non-empty ballot. A choice holding a strict majority of the
/// non-exhausted ballots wins; otherwise all choices tied for fewest votes
/// are eliminated simultaneously and their ballots transfer to the next
/// continuing choice in ranked order. Ballots with no continuing choice
/// become exhausted.
pub fn irv_tabulate(ballots: &[RankedBallot], m: usize) -> Result<IrvTabulation> {
    if m < 2 {
        return Err(ConsensusError::InvalidParameter(format!(
            "a contest needs at least 2 choices, got {m}"
        )));
    }
    for (idx, ballot) in ballots.iter().enumerate() {
        check_ranking(ballot, m, idx + 1)?;
    }
    let ranked: Vec<&RankedBallot> = ballots.iter().filter(|b| !b.ranking.is_empty()).collect();
    if ranked.is_empty() {
        return Err(ConsensusError::InvalidParameter(
            "no non-empty ranked ballots to tabulate".into(),
        ));
    }

    let mut continuing: BTreeSet<usize> = (0..m).collect();
    let mut rounds = Vec::new();
    loop {
        let round_index = rounds.len() + 1;
        let mut counts: BTreeMap<usize, u64> = continuing.iter().map(|&c| (c, 0)).collect();
        let mut exhausted = 0u64;
        for ballot in &ranked {
            match ballot.ranking.iter().find(|c| continuing.contains(c)) {
                Some(choice) => *counts.get_mut(choice).expect("continuing choice") += 1,
                None => exhausted += 1,
            }
        }
        let live: u64 = counts.values().sum();

        let holds_majority = |votes: u64| 2 * u128::from(votes) > u128::from(live);
        if let Some((&winner, _)) = counts.iter().find(|&(_, &votes)| holds_majority(votes)) {
            rounds.push(IrvRound {
                round_index,
                counts,
                exhausted,
                eliminated: BTreeSet::new(),
            });
            return Ok(IrvTabulation {
                rounds,
                status: IrvStatus::Winner(winner),
            });
        }

        let fewest = *counts.values().min().expect("continuing is non-empty");
        let tied_for_last: BTreeSet<usize> = counts
            .iter()
            .filter(|&(_, &votes)| votes == fewest)
            .map(|(&choice, _)| choice)
            .collect();
        if tied_for_last.len() == continuing.len() {
            rounds.push(IrvRound {
                round_index,
                counts,
                exhausted,
                eliminated: BTreeSet::new(),
            });
            return Ok(IrvTabulation {
                rounds,
                status: IrvStatus::UnresolvedTie(continuing),
            });
        }
        for choice in &tied_for_last {
            continuing.remove(choice);
        }
        rounds.push(IrvRound {
            round_index,
            counts,
            exhausted,
            eliminated: tied_for_last,
        });
    }
}

/// Result of measuring consensus over ranked ballots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RankedResult {
    /// The first-round counts already satisfy the 1-of-M criteria.
    Consensus(usize),
    /// No winner in the first round, so there is no consensus. The
    /// elimination rounds may still resolve an explainable compromise,
    /// which is not a consensus choice.
    NoConsensus { irv: IrvTabulation },
    /// Quorum unmet.
    NullResult,
}

impl RankedResult {
    /// The compromise winner, when there is no consensus but the
    /// elimination rounds resolved a choice.
    pub fn compromise(&self) -> Option<usize> {
        match self {
            RankedResult::NoConsensus { irv } => irv.winner(),
            _ => None,
        }
    }
}

/// Measure consensus on a ranked-order contest.
///
/// The 1-of-M criteria are applied to the counts derived from the most
/// preferred choice of every ballot — the first round. A winner there is a
/// consensus choice; anything resolved later by elimination rounds is a
/// compromise, not a consensus.
pub fn ranked_consensus(
    ballots: &[RankedBallot],
    m: usize,
    quorum: QuorumSpec,
    present: u64,
    population: u64,
    threshold: ThresholdSpec,
) -> Result<RankedResult> {
    let first_round = first_round_counts(ballots, m)?;
    match one_of_m(quorum, present, &first_round, population, threshold)? {
        OneOfMResult::Consensus(choice) => Ok(RankedResult::Consensus(choice)),
        OneOfMResult::NullResult => Ok(RankedResult::NullResult),
        OneOfMResult::NegativeResult => {
            let irv = irv_tabulate(ballots, m)?;
            Ok(RankedResult::NoConsensus { irv })
        }
    }
}

/// Plurality ranking with the line drawn below the top `n` counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PluralitySelection {
    /// Choices ordered by descending count, ties by ascending index.
    pub ranking: Vec<usize>,
    /// The top `n` choices.
    pub selected: BTreeSet<usize>,
    /// Counts immediately above and below the line; `None` when `n = m`.
    pub cut: Option<(u64, u64)>,
    /// The line falls within a group of equal counts, so the selection is
    /// not unique.
    pub tie_at_cut: bool,
}

/// Rank choices by vote count and elect the top `n`.
pub fn plurality_top_n(tally: &MultiTally, n: usize) -> Result<PluralitySelection> {
    let m = tally.num_choices();
    if n < 1 || n > m {
        return Err(ConsensusError::InvalidParameter(format!(
            "selection size must be in 1..={m}, got {n}"
        )));
    }
    let votes = tally.votes();
    let mut ranking: Vec<usize> = (0..m).collect();
    ranking.sort_by_key(|&i| (Reverse(votes[i]), i));
    let selected: BTreeSet<usize> = ranking[..n].iter().copied().collect();
    let cut = if n < m {
        Some((votes[ranking[n - 1]], votes[ranking[n]]))
    } else {
        None
    };
    let tie_at_cut = cut.is_some_and(|(above, below)| above == below);
    Ok(PluralitySelection {
        ranking,
        selected,
        cut,
        tie_at_cut,
    })
}
