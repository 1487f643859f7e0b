//! Quantitative measurement of social consensus.
//!
//! Voting is treated as a measurement method: ballots are tabulated into
//! counts, counts are reduced through explicit quorum and threshold decision
//! rules to a dichotomic-plus scale (accepted, rejected, negative result,
//! null result), and the reduction is exact — thresholds are rationals and
//! every comparison is an integer cross-multiplication, never floating
//! point.
//!
//! The crate is organized around that pipeline:
//!
//! * [`rules`] — the decision-rule engine: quorum, thresholds, yes-or-no
//!   questions, 1-of-M and N-of-M contests.
//! * [`tabulation`] — raw ballots to tallies, including slate tabulation and
//!   ranked-ballot elimination rounds.
//! * [`preference`] — pairwise preference matrices and strong Condorcet
//!   winner detection.
//! * [`sequence`] — sequential yes-or-no voting over exclusive options and
//!   the order-bias pathologies it produces.
//! * [`uncertainty`] — advisory Wilson score intervals and turnout
//!   diagnostics; these never alter a decision outcome.
//!
//! Everything is a pure function of its inputs; there is no shared mutable
//! state anywhere in the crate.
//!
//! ```
//! use consensus_core::{question, Outcome, QuorumSpec, Rational, ThresholdSpec, YesNoTally};
//!
//! // 7 yes, 1 no, 10 present, 2/3 supermajority of the 8 non-abstainers
//! let outcome = question(
//!     QuorumSpec::NumVoting(3),
//!     10,
//!     YesNoTally::new(7, 1),
//!     8,
//!     ThresholdSpec::Supermajority(Rational::new(2, 3)),
//! )?;
//! assert_eq!(outcome, Outcome::Accepted);
//! # Ok::<(), consensus_core::ConsensusError>(())
//! ```

pub mod error;
pub mod preference;
pub mod rules;
pub mod sequence;
pub mod tabulation;
pub mod uncertainty;

pub use error::{ConsensusError, Result};
pub use preference::{condorcet_winner, pairwise_matrix, CondorcetResult, PairwiseMatrix};
pub use rules::{
    measure_proportion, meets_threshold, n_of_m, one_of_m, question, question_simple, quorate,
    MultiTally, NOfMResult, OneOfMResult, Outcome, PopulationLevel, QuorumSpec, ThresholdSpec,
    YesNoTally,
};
pub use sequence::{
    order_analysis, passing_set, simulate_sequence, AnalysisMode, ApprovalProfile, OrderAnalysis,
    SequenceOutcome, Voter,
};
pub use tabulation::{
    first_round_counts, irv_tabulate, plurality_top_n, ranked_consensus, tally_choices,
    tally_slates, tally_yes_no, ChoiceBallot, ContestTallyReport, IrvRound, IrvStatus,
    IrvTabulation, PluralitySelection, RankedBallot, RankedResult, YesNoBallot,
};
pub use uncertainty::{
    classify_margin, default_boycott_floor, proportion_interval, turnout_report, Direction,
    MarginClass, ProportionInterval, TurnoutReport,
};

/// Exact nonnegative rational, used for thresholds, measured proportions,
/// and selection probabilities.
pub type Rational = num_rational::Ratio<u64>;
