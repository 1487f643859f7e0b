//! Sequential yes-or-no voting over exclusive options.
//!
//! When a choice among exclusive options is broken into a sequence of
//! yes-or-no votes, three pathologies follow: a consensus can exist for two
//! or more of the options at once, the first passing option wins so the
//! process is biased toward whatever is voted on early, and the group can
//! reject every option and default. This module quantifies them under an
//! explicit voter model: each voter holds a full preference ranking and
//! approves their top `cutoff` options. The claims here are relative to
//! that model only.

use std::collections::BTreeSet;

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{ConsensusError, Result};
use crate::preference::{condorcet_winner, pairwise_matrix, CondorcetResult};
use crate::rules::{question, Outcome, QuorumSpec, ThresholdSpec, YesNoTally};
use crate::tabulation::RankedBallot;
use crate::Rational;

/// Exhaustive enumeration walks all m! orders, so m is capped.
pub const MAX_EXHAUSTIVE_OPTIONS: usize = 8;

/// One voter: a full preference ranking over the options and an approval
/// cutoff. The voter approves exactly their top `cutoff` options and votes
/// yes on an option iff they approve it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Voter {
    pub ranking: Vec<usize>,
    pub cutoff: usize,
}

impl Voter {
    pub fn new(ranking: impl IntoIterator<Item = usize>, cutoff: usize) -> Self {
        Voter {
            ranking: ranking.into_iter().collect(),
            cutoff,
        }
    }
}

/// A voter population over `m` exclusive options.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApprovalProfile {
    m: usize,
    voters: Vec<Voter>,
}

impl ApprovalProfile {
    /// Every ranking must be a permutation of the `m` options and every
    /// cutoff must lie in `1..=m`.
    pub fn new(m: usize, voters: Vec<Voter>) -> Result<Self> {
        if m < 2 {
            return Err(ConsensusError::InvalidParameter(format!(
                "a contest needs at least 2 options, got {m}"
            )));
        }
        for (idx, voter) in voters.iter().enumerate() {
            if voter.ranking.len() != m || !is_permutation(&voter.ranking, m) {
                return Err(ConsensusError::InvalidParameter(format!(
                    "voter {}: ranking must be a permutation of the {m} options",
                    idx + 1
                )));
            }
            if voter.cutoff < 1 || voter.cutoff > m {
                return Err(ConsensusError::InvalidParameter(format!(
                    "voter {}: approval cutoff must be in 1..={m}, got {}",
                    idx + 1,
                    voter.cutoff
                )));
            }
        }
        Ok(ApprovalProfile { m, voters })
    }

    pub fn num_options(&self) -> usize {
        self.m
    }

    pub fn voters(&self) -> &[Voter] {
        &self.voters
    }

    /// Number of voters approving each option.
    pub fn approval_counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.m];
        for voter in &self.voters {
            for &option in &voter.ranking[..voter.cutoff] {
                counts[option] += 1;
            }
        }
        counts
    }

    /// The voters' rankings as ranked ballots, for pairwise analysis.
    pub fn ranked_ballots(&self) -> Vec<RankedBallot> {
        self.voters
            .iter()
            .map(|voter| RankedBallot::new(voter.ranking.iter().copied()))
            .collect()
    }
}

fn is_permutation(ranking: &[usize], m: usize) -> bool {
    let mut seen = vec![false; m];
    for &option in ranking {
        if option >= m || seen[option] {
            return false;
        }
        seen[option] = true;
    }
    ranking.len() == m
}

/// Options whose approval count meets the threshold against `population`.
///
/// More than one passer means a consensus exists in support of two or more
/// exclusive options at once.
pub fn passing_set(
    profile: &ApprovalProfile,
    population: u64,
    threshold: ThresholdSpec,
) -> Result<BTreeSet<usize>> {
    if population < profile.voters.len() as u64 {
        return Err(ConsensusError::InconsistentCounts(format!(
            "population ({population}) is smaller than the number of voters ({})",
            profile.voters.len()
        )));
    }
    let mut passing = BTreeSet::new();
    for (option, &approvals) in profile.approval_counts().iter().enumerate() {
        if crate::rules::meets_threshold(approvals, population, threshold)? {
            passing.insert(option);
        }
    }
    Ok(passing)
}

/// Outcome of voting the options one at a time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceOutcome {
    /// The first option accepted, or `None` when every option failed and
    /// the group defaulted.
    pub chosen: Option<usize>,
    /// Per-option outcomes, in the order they were put to a vote. Stops
    /// after the first acceptance.
    pub steps: Vec<(usize, Outcome)>,
    /// The order voted.
    pub order: Vec<usize>,
}

/// Put each option to a yes-or-no vote in the given order; the decision is
/// made as soon as any option receives a passing result.
///
/// Every voter votes: yes with `approvals` votes, no with the rest of the
/// population.
pub fn simulate_sequence(
    profile: &ApprovalProfile,
    order: &[usize],
    population: u64,
    threshold: ThresholdSpec,
) -> Result<SequenceOutcome> {
    if !is_permutation(order, profile.m) {
        return Err(ConsensusError::InvalidParameter(format!(
            "voting order must be a permutation of the {} options",
            profile.m
        )));
    }
    if population < profile.voters.len() as u64 {
        return Err(ConsensusError::InconsistentCounts(format!(
            "population ({population}) is smaller than the number of voters ({})",
            profile.voters.len()
        )));
    }
    let approvals = profile.approval_counts();
    let mut steps = Vec::new();
    let mut chosen = None;
    for &option in order {
        let tally = YesNoTally::new(approvals[option], population - approvals[option]);
        let outcome = question(
            QuorumSpec::NumVoting(1),
            population,
            tally,
            population,
            threshold,
        )?;
        steps.push((option, outcome));
        if outcome == Outcome::Accepted {
            chosen = Some(option);
            break;
        }
    }
    Ok(SequenceOutcome {
        chosen,
        steps,
        order: order.to_vec(),
    })
}

/// How selection probabilities over voting orders are computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnalysisMode {
    /// Enumerate all m! orders; exact. Requires m <= [`MAX_EXHAUSTIVE_OPTIONS`].
    Exhaustive,
    /// Estimate over uniformly random orders. Each trial derives its
    /// randomness from `(seed, trial index)`, so results are reproducible
    /// and independent of scheduling.
    MonteCarlo { trials: u64, seed: u64 },
}

/// Selection probabilities over uniformly random voting orders, plus the
/// passing set and the Condorcet view of the same profile.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderAnalysis {
    /// Probability that each option is the one chosen. Exact under
    /// [`AnalysisMode::Exhaustive`]; the hit frequency under Monte Carlo.
    pub selection_probability: Vec<Rational>,
    /// Standard error of each estimate; `None` for exhaustive analysis.
    pub standard_error: Option<Vec<f64>>,
    /// Orders evaluated: m! or the trial count.
    pub orders_evaluated: u64,
    pub passing: BTreeSet<usize>,
    pub condorcet: CondorcetResult,
}

/// Measure the order bias of sequential voting on this profile.
pub fn order_analysis(
    profile: &ApprovalProfile,
    population: u64,
    threshold: ThresholdSpec,
    mode: AnalysisMode,
) -> Result<OrderAnalysis> {
    let m = profile.num_options();
    let passing = passing_set(profile, population, threshold)?;
    let mut hits = vec![0u64; m];
    let orders_evaluated = match mode {
        AnalysisMode::Exhaustive => {
            if m > MAX_EXHAUSTIVE_OPTIONS {
                return Err(ConsensusError::InvalidParameter(format!(
                    "exhaustive analysis is limited to {MAX_EXHAUSTIVE_OPTIONS} options, got {m}"
                )));
            }
            let mut evaluated = 0u64;
            for order in (0..m).permutations(m) {
                let outcome = simulate_sequence(profile, &order, population, threshold)?;
                if let Some(option) = outcome.chosen {
                    hits[option] += 1;
                }
                evaluated += 1;
            }
            evaluated
        }
        AnalysisMode::MonteCarlo { trials, seed } => {
            if trials < 1 {
                return Err(ConsensusError::InvalidParameter(
                    "Monte Carlo analysis needs at least 1 trial".into(),
                ));
            }
            for trial in 0..trials {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(trial);
                let mut order: Vec<usize> = (0..m).collect();
                order.shuffle(&mut rng);
                let outcome = simulate_sequence(profile, &order, population, threshold)?;
                if let Some(option) = outcome.chosen {
                    hits[option] += 1;
                }
            }
            trials
        }
    };
    let selection_probability: Vec<Rational> = hits
        .iter()
        .map(|&h| Rational::new(h, orders_evaluated))
        .collect();
    let standard_error = match mode {
        AnalysisMode::Exhaustive => None,
        AnalysisMode::MonteCarlo { trials, .. } => Some(
            hits.iter()
                .map(|&h| {
                    let p = h as f64 / trials as f64;
                    (p * (1.0 - p) / trials as f64).sqrt()
                })
                .collect(),
        ),
    };
    let condorcet = condorcet_winner(&pairwise_matrix(&profile.ranked_ballots(), m)?);
    Ok(OrderAnalysis {
        selection_probability,
        standard_error,
        orders_evaluated,
        passing,
        condorcet,
    })
}
