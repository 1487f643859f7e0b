//! Decision rules reducing vote counts to dichotomic outcomes.
//!
//! The measure of consensus on a yes-or-no question is the proportion of
//! votes in favor; the elaborated model evaluates acceptance and rejection
//! thresholds against a configurable effective population, gated by a
//! quorum. All comparisons are exact integer cross-multiplications, so a
//! boundary such as 2/3 of 9 never depends on rounding.

use std::collections::BTreeSet;

use crate::error::{ConsensusError, Result};
use crate::Rational;

/// Threshold a count must reach against the effective population before it
/// indicates consensus.
///
/// Unanimity is the limiting case of both `Supermajority(1)` and
/// `NearUnanimity(0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThresholdSpec {
    /// Strictly more than half of the population.
    Majority,
    /// At least `t` of the population, with 1/2 < t <= 1.
    Supermajority(Rational),
    /// All but `c` members of the population. `c` must stay strictly below
    /// half the population whenever it is evaluated.
    NearUnanimity(u64),
    /// Every member of the population.
    Unanimity,
}

impl ThresholdSpec {
    /// Check the population-independent parameter ranges.
    pub fn validate(&self) -> Result<()> {
        if let ThresholdSpec::Supermajority(t) = self {
            if *t <= Rational::new(1, 2) || *t > Rational::from_integer(1) {
                return Err(ConsensusError::InvalidParameter(format!(
                    "supermajority threshold must satisfy 1/2 < t <= 1, got {t}"
                )));
            }
        }
        Ok(())
    }
}

/// Minimum participation required before any result other than null.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuorumSpec {
    /// Quorum type (1): at least `q` members present at the time of voting.
    NumPresent(u64),
    /// Quorum type (2): at least `q` members not abstaining.
    NumVoting(u64),
    /// Quorum type (2) derived from attendance: the non-abstaining count
    /// must reach `r` times the present count. Proportions of the nominal or
    /// current body size must be resolved to constant counts by the caller,
    /// rounding up.
    ProportionVoting(Rational),
}

impl QuorumSpec {
    /// Check the parameter ranges.
    pub fn validate(&self) -> Result<()> {
        match self {
            QuorumSpec::NumPresent(q) | QuorumSpec::NumVoting(q) => {
                if *q < 1 {
                    return Err(ConsensusError::InvalidParameter(
                        "quorum count must be at least 1".into(),
                    ));
                }
            }
            QuorumSpec::ProportionVoting(r) => {
                if *r <= Rational::from_integer(0) || *r > Rational::from_integer(1) {
                    return Err(ConsensusError::InvalidParameter(format!(
                        "quorum proportion must satisfy 0 < r <= 1, got {r}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Which effective population size thresholds are evaluated against.
///
/// The first two levels require a voting body with defined membership; the
/// third requires attendance (and hence abstentions) to be counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PopulationLevel {
    /// Nominal size of the voting body.
    P1,
    /// Current size of the voting body, vacant positions excluded.
    P2,
    /// Members present at the time of voting.
    P3,
    /// Members that did not abstain.
    P4,
}

/// Dichotomic-plus result scale for a yes-or-no question.
///
/// A null result (quorum unmet, absence of evidence) is distinct from a
/// negative result (quorate, evidence of the absence of consensus).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    /// A consensus exists in favor of the proposition.
    Accepted,
    /// A consensus exists in opposition to the proposition.
    Rejected,
    /// Quorate, but neither threshold met.
    NegativeResult,
    /// Quorum unmet.
    NullResult,
}

/// Yes and no vote counts for one question.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct YesNoTally {
    pub votes_y: u64,
    pub votes_n: u64,
}

impl YesNoTally {
    pub fn new(votes_y: u64, votes_n: u64) -> Self {
        YesNoTally { votes_y, votes_n }
    }

    /// Number of members that voted either way.
    pub fn total(&self) -> u64 {
        self.votes_y + self.votes_n
    }
}

/// Per-choice vote counts for a contest with at least two choices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiTally {
    votes: Vec<u64>,
}

impl MultiTally {
    /// A contest needs at least two choices.
    pub fn new(votes: Vec<u64>) -> Result<Self> {
        if votes.len() < 2 {
            return Err(ConsensusError::InvalidParameter(format!(
                "a contest needs at least 2 choices, got {}",
                votes.len()
            )));
        }
        Ok(MultiTally { votes })
    }

    pub fn votes(&self) -> &[u64] {
        &self.votes
    }

    pub fn num_choices(&self) -> usize {
        self.votes.len()
    }

    /// Sum of all per-choice counts.
    pub fn total(&self) -> u64 {
        self.votes.iter().sum()
    }
}

/// Result of a 1-of-M contest.
///
/// There is no rejection outcome: a vote for one choice says nothing about
/// the voter's stance on the others, so the rejection criteria of yes-or-no
/// questions do not generalize.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OneOfMResult {
    /// A consensus exists in favor of the choice at this index.
    Consensus(usize),
    /// Quorate, but no choice met the threshold.
    NegativeResult,
    /// Quorum unmet.
    NullResult,
}

/// Result of an N-of-M contest.
///
/// Votes are not exclusive here, so several choices can individually meet
/// the threshold; no attempt is made to identify a consensus slate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NOfMResult {
    /// Every choice in the set met the threshold by itself.
    ConsensusChoices(BTreeSet<usize>),
    /// Quorate, but no choice met the threshold.
    NegativeResult,
    /// Quorum unmet.
    NullResult,
}

/// Exact check of `count / whole >= ratio` by u128 cross-multiplication.
fn frac_ge(count: u64, whole: u64, ratio: Rational) -> bool {
    u128::from(count) * u128::from(*ratio.denom()) >= u128::from(*ratio.numer()) * u128::from(whole)
}

/// Exact check of `count / whole <= ratio` by u128 cross-multiplication.
fn frac_le(count: u64, whole: u64, ratio: Rational) -> bool {
    u128::from(count) * u128::from(*ratio.denom()) <= u128::from(*ratio.numer()) * u128::from(whole)
}

/// The measure of consensus on a yes-or-no question: the proportion of
/// votes in favor, `p = votes_y / (votes_y + votes_n)`, as an exact
/// rational.
pub fn measure_proportion(tally: YesNoTally) -> Result<Rational> {
    let total = tally.total();
    if total == 0 {
        return Err(ConsensusError::DivisionUndefined);
    }
    Ok(Rational::new(tally.votes_y, total))
}

/// Yes-or-no question with a minimum number of votes as the quorum and a
/// supermajority of the votes cast as the threshold.
///
/// Quorum is determined from the number of votes, so abstentions have no
/// impact. With `p` the proportion of votes in favor: `p >= t` accepts,
/// `p <= 1 - t` rejects, anything between is a negative result, and fewer
/// than `quorum` votes is a null result.
pub fn question_simple(
    quorum: u64,
    votes_y: u64,
    votes_n: u64,
    threshold: Rational,
) -> Result<Outcome> {
    if quorum < 1 {
        return Err(ConsensusError::InvalidParameter(
            "quorum must be at least 1".into(),
        ));
    }
    ThresholdSpec::Supermajority(threshold).validate()?;
    let total = votes_y + votes_n;
    if total < quorum {
        return Ok(Outcome::NullResult);
    }
    if frac_ge(votes_y, total, threshold) {
        Ok(Outcome::Accepted)
    } else if frac_le(votes_y, total, Rational::from_integer(1) - threshold) {
        Ok(Outcome::Rejected)
    } else {
        Ok(Outcome::NegativeResult)
    }
}

/// Whether quorum is met.
///
/// In any event at least one member must vote: complete absence of evidence
/// supports only a null result, so `voting == 0` is never quorate.
pub fn quorate(spec: QuorumSpec, present: u64, voting: u64) -> Result<bool> {
    spec.validate()?;
    if voting > present {
        return Err(ConsensusError::InconsistentCounts(format!(
            "number voting ({voting}) exceeds number present ({present})"
        )));
    }
    if voting == 0 {
        return Ok(false);
    }
    Ok(match spec {
        QuorumSpec::NumPresent(q) => present >= q,
        QuorumSpec::NumVoting(q) => voting >= q,
        QuorumSpec::ProportionVoting(r) => frac_ge(voting, present, r),
    })
}

/// Whether `votes` for a single choice meet the consensus threshold against
/// the effective population.
pub fn meets_threshold(votes: u64, population: u64, spec: ThresholdSpec) -> Result<bool> {
    spec.validate()?;
    if population < 1 {
        return Err(ConsensusError::InvalidParameter(
            "population must be at least 1".into(),
        ));
    }
    if votes > population {
        return Err(ConsensusError::InconsistentCounts(format!(
            "votes ({votes}) exceed population ({population})"
        )));
    }
    Ok(match spec {
        ThresholdSpec::Majority => 2 * u128::from(votes) > u128::from(population),
        ThresholdSpec::Supermajority(t) => frac_ge(votes, population, t),
        ThresholdSpec::NearUnanimity(c) => {
            if 2 * u128::from(c) >= u128::from(population) {
                return Err(ConsensusError::ShortfallTooLarge {
                    shortfall: c,
                    population,
                });
            }
            votes >= population - c
        }
        ThresholdSpec::Unanimity => votes == population,
    })
}

/// Elaborated yes-or-no question.
///
/// Quorum is evaluated first; without it the result is null regardless of
/// the tally. Otherwise the acceptance threshold is evaluated on the yes
/// votes and the rejection threshold on the no votes, both against
/// `population`.
///
/// `present` may exceed `population`: when the population is the
/// non-abstaining members, the body attending for quorum purposes is the
/// larger of the two.
pub fn question(
    quorum: QuorumSpec,
    present: u64,
    tally: YesNoTally,
    population: u64,
    threshold: ThresholdSpec,
) -> Result<Outcome> {
    let voting = tally.total();
    if voting > present {
        return Err(ConsensusError::InconsistentCounts(format!(
            "votes cast ({voting}) exceed number present ({present})"
        )));
    }
    if tally.votes_y > population || tally.votes_n > population {
        return Err(ConsensusError::InconsistentCounts(format!(
            "votes ({}/{}) exceed population ({population})",
            tally.votes_y, tally.votes_n
        )));
    }
    if !quorate(quorum, present, voting)? {
        return Ok(Outcome::NullResult);
    }
    let accept = meets_threshold(tally.votes_y, population, threshold)?;
    let reject = meets_threshold(tally.votes_n, population, threshold)?;
    match (accept, reject) {
        (true, true) => Err(ConsensusError::ContradictoryTally(format!(
            "both acceptance ({} yes) and rejection ({} no) meet the threshold \
             against population {population}",
            tally.votes_y, tally.votes_n
        ))),
        (true, false) => Ok(Outcome::Accepted),
        (false, true) => Ok(Outcome::Rejected),
        (false, false) => Ok(Outcome::NegativeResult),
    }
}

/// Indices of choices whose counts meet the threshold.
fn passing_choices(
    tally: &MultiTally,
    population: u64,
    threshold: ThresholdSpec,
) -> Result<BTreeSet<usize>> {
    let mut passing = BTreeSet::new();
    for (i, &votes) in tally.votes().iter().enumerate() {
        if meets_threshold(votes, population, threshold)? {
            passing.insert(i);
        }
    }
    Ok(passing)
}

/// 1-of-M contest: two or more choices, only one can be chosen.
///
/// The number voting equals the total votes since each voter casts exactly
/// one. With the threshold above half the population and the total at most
/// the population, at most one choice can pass; if inconsistent inputs ever
/// claim otherwise, that is an error, not a result.
pub fn one_of_m(
    quorum: QuorumSpec,
    present: u64,
    tally: &MultiTally,
    population: u64,
    threshold: ThresholdSpec,
) -> Result<OneOfMResult> {
    let voting = tally.total();
    check_contest_counts(tally, voting, present, population)?;
    if !quorate(quorum, present, voting)? {
        return Ok(OneOfMResult::NullResult);
    }
    let passing = passing_choices(tally, population, threshold)?;
    match passing.len() {
        0 => Ok(OneOfMResult::NegativeResult),
        1 => Ok(OneOfMResult::Consensus(
            passing.into_iter().next().expect("len checked"),
        )),
        _ => Err(ConsensusError::ContradictoryTally(format!(
            "choices {passing:?} each meet the threshold in a 1-of-M contest"
        ))),
    }
}

/// N-of-M contest: two or more choices, up to `n` of them per ballot.
///
/// Every choice individually meeting the threshold is reported; multiple
/// winners are legitimate because votes are not exclusive.
pub fn n_of_m(
    quorum: QuorumSpec,
    present: u64,
    voting: u64,
    tally: &MultiTally,
    population: u64,
    threshold: ThresholdSpec,
    n: usize,
) -> Result<NOfMResult> {
    let m = tally.num_choices();
    if n < 1 || n > m {
        return Err(ConsensusError::InvalidParameter(format!(
            "n must be in 1..={m}, got {n}"
        )));
    }
    let total = tally.total();
    if voting > total {
        return Err(ConsensusError::InconsistentCounts(format!(
            "number voting ({voting}) exceeds total votes ({total})"
        )));
    }
    if u128::from(total) > n as u128 * u128::from(voting) {
        return Err(ConsensusError::InconsistentCounts(format!(
            "total votes ({total}) exceed {n} per voter for {voting} voting"
        )));
    }
    check_contest_counts(tally, voting, present, population)?;
    if !quorate(quorum, present, voting)? {
        return Ok(NOfMResult::NullResult);
    }
    let passing = passing_choices(tally, population, threshold)?;
    if passing.is_empty() {
        Ok(NOfMResult::NegativeResult)
    } else {
        Ok(NOfMResult::ConsensusChoices(passing))
    }
}

/// Count constraints shared by the multi-choice contests.
fn check_contest_counts(
    tally: &MultiTally,
    voting: u64,
    present: u64,
    population: u64,
) -> Result<()> {
    if voting > present {
        return Err(ConsensusError::InconsistentCounts(format!(
            "number voting ({voting}) exceeds number present ({present})"
        )));
    }
    if voting > population {
        return Err(ConsensusError::InconsistentCounts(format!(
            "number voting ({voting}) exceeds population ({population})"
        )));
    }
    for (i, &votes) in tally.votes().iter().enumerate() {
        if votes > population {
            return Err(ConsensusError::InconsistentCounts(format!(
                "votes for choice {i} ({votes}) exceed population ({population})"
            )));
        }
    }
    Ok(())
}
