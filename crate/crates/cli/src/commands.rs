//! Subcommand definitions and their implementations.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use consensus_core::{
    classify_margin, condorcet_winner, default_boycott_floor, first_round_counts,
    measure_proportion, meets_threshold, n_of_m, one_of_m, order_analysis, pairwise_matrix,
    plurality_top_n, proportion_interval, quorate, ranked_consensus, simulate_sequence,
    tally_choices, tally_slates, tally_yes_no, turnout_report, AnalysisMode, ApprovalProfile,
    CondorcetResult, ConsensusError, Direction, MarginClass, MultiTally, NOfMResult, OneOfMResult,
    RankedResult, Rational, ThresholdSpec, YesNoTally,
};

use crate::ballots;
use crate::document::{
    decimal6, outcome_tag, CountsBlock, PluralityBlock, PopulationBlock, QuorumBlock, RationalText,
    ResultDocument, RoundBlock, RoundCount, SequenceBlock, SlateBlock, StepBlock, ThresholdBlock,
    TurnoutBlock, UncertaintyBlock,
};
use crate::policy::{
    self, parse_population_flag, parse_quorum_flag, parse_rational, parse_threshold_flag,
    quorum_spec_text, threshold_proportion, threshold_spec_text, PolicyConfig, PopulationSource,
};
use crate::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "consensus",
    version,
    about = "Measure consensus from votes and ballots",
    after_help = "Exit status: 0 consensus/accepted, 1 rejected, 2 negative result, \
                  3 null result, 64 usage error, 65 malformed input."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Measure consensus on a yes-or-no question
    Question(QuestionArgs),
    /// Measure consensus in a choose-one contest
    #[command(name = "one-of-m")]
    OneOfM(ContestArgs),
    /// Measure per-choice consensus in a vote-for-at-most-N contest
    #[command(name = "n-of-m")]
    NOfM(NOfMArgs),
    /// Measure consensus on ranked ballots; elimination rounds only ever
    /// yield a compromise
    Ranked(RankedArgs),
    /// Pairwise preferences and the strong Condorcet winner
    Condorcet(CondorcetArgs),
    /// Tabulate by exact selection set and look for a consensus slate
    Slates(SlatesArgs),
    /// Sequential yes-or-no voting over exclusive options
    Sequence(SequenceArgs),
}

#[derive(Debug, Args)]
pub struct PolicyArgs {
    /// Policy config file (TOML)
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Quorum: present:N, voting:N, or proportion-voting:R
    #[arg(long, value_name = "SPEC")]
    pub quorum: Option<String>,
    /// Threshold: majority, supermajority:T, near-unanimity:C, or unanimity
    #[arg(long, value_name = "SPEC")]
    pub threshold: Option<String>,
    /// Effective population: a size, "present", or "voting"
    #[arg(long, value_name = "POP")]
    pub population: Option<String>,
    /// Members present at the time of voting
    #[arg(long, value_name = "N")]
    pub present: Option<u64>,
    /// Confidence level for the advisory uncertainty block, e.g. 0.95
    #[arg(long, value_name = "C")]
    pub confidence: Option<f64>,
    /// Advisory turnout floor as a rational (default 1/2)
    #[arg(long, value_name = "R")]
    pub boycott_floor: Option<String>,
}

impl PolicyArgs {
    /// Config file overlaid by flags; flags win field by field.
    pub fn load(&self) -> Result<PolicyConfig, CliError> {
        let from_file = match &self.config {
            Some(path) => policy::parse_policy(&read_file(path)?)?,
            None => PolicyConfig::default(),
        };
        let mut from_flags = PolicyConfig::default();
        if let Some(text) = &self.quorum {
            from_flags.quorum = Some(parse_quorum_flag(text)?);
        }
        if let Some(text) = &self.threshold {
            from_flags.threshold = Some(parse_threshold_flag(text)?);
        }
        if let Some(text) = &self.population {
            from_flags.population = Some(parse_population_flag(text)?);
        }
        if let Some(confidence) = self.confidence {
            if !(confidence > 0.0 && confidence < 1.0) {
                return Err(CliError::Usage(format!(
                    "confidence must be strictly between 0 and 1, got {confidence}"
                )));
            }
            from_flags.confidence = Some(confidence);
        }
        if let Some(text) = &self.boycott_floor {
            let floor = parse_rational(text).map_err(CliError::Usage)?;
            if floor > Rational::from_integer(1) {
                return Err(CliError::Usage(format!(
                    "boycott floor must be at most 1, got {floor}"
                )));
            }
            from_flags.boycott_floor = Some(floor);
        }
        Ok(from_flags.or(from_file))
    }
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Inline comma-separated counts
    #[arg(long, value_name = "COUNTS", conflicts_with = "ballots")]
    pub tally: Option<String>,
    /// Ballot file, one ballot per line
    #[arg(long, value_name = "FILE")]
    pub ballots: Option<PathBuf>,
    /// Number of choices, when the ballot file has no names header
    #[arg(long, value_name = "M")]
    pub choices: Option<usize>,
    /// Spoil malformed ballot rows instead of aborting
    #[arg(long)]
    pub lenient: bool,
}

#[derive(Debug, Args)]
pub struct QuestionArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub policy: PolicyArgs,
}

#[derive(Debug, Args)]
pub struct ContestArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub policy: PolicyArgs,
}

#[derive(Debug, Args)]
pub struct NOfMArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Maximum selections per ballot
    #[arg(long, value_name = "N")]
    pub n: usize,
    /// Number of ballots contributing votes (inline tallies only)
    #[arg(long, value_name = "COUNT")]
    pub voting: Option<u64>,
    #[command(flatten)]
    pub policy: PolicyArgs,
}

#[derive(Debug, Args)]
pub struct RankedArgs {
    /// Ranked ballot file
    #[arg(long, value_name = "FILE")]
    pub ballots: PathBuf,
    /// Number of choices, when the ballot file has no names header
    #[arg(long, value_name = "M")]
    pub choices: Option<usize>,
    /// Spoil malformed ballot rows instead of aborting
    #[arg(long)]
    pub lenient: bool,
    #[command(flatten)]
    pub policy: PolicyArgs,
}

#[derive(Debug, Args)]
pub struct CondorcetArgs {
    /// Ranked ballot file
    #[arg(long, value_name = "FILE")]
    pub ballots: PathBuf,
    /// Number of choices, when the ballot file has no names header
    #[arg(long, value_name = "M")]
    pub choices: Option<usize>,
    /// Spoil malformed ballot rows instead of aborting
    #[arg(long)]
    pub lenient: bool,
}

#[derive(Debug, Args)]
pub struct SlatesArgs {
    /// Choice ballot file
    #[arg(long, value_name = "FILE")]
    pub ballots: PathBuf,
    /// Maximum selections per ballot
    #[arg(long, value_name = "N")]
    pub n: usize,
    /// Number of choices, when the ballot file has no names header
    #[arg(long, value_name = "M")]
    pub choices: Option<usize>,
    /// Spoil malformed ballot rows instead of aborting
    #[arg(long)]
    pub lenient: bool,
    #[command(flatten)]
    pub policy: PolicyArgs,
}

#[derive(Debug, Args)]
pub struct SequenceArgs {
    /// Approval profile file: `ranking;cutoff` per voter
    #[arg(long, value_name = "FILE")]
    pub profile: PathBuf,
    /// Number of options, when the profile has no names header
    #[arg(long, value_name = "M")]
    pub choices: Option<usize>,
    /// Vote the options in this specific order (comma-separated)
    #[arg(long, value_name = "ORDER", conflicts_with_all = ["exhaustive", "monte_carlo"])]
    pub order: Option<String>,
    /// Enumerate all voting orders exactly
    #[arg(long, conflicts_with = "monte_carlo")]
    pub exhaustive: bool,
    /// Estimate selection probabilities over random voting orders
    #[arg(long)]
    pub monte_carlo: bool,
    /// Monte Carlo trial count
    #[arg(
        long,
        value_name = "N",
        requires = "monte_carlo",
        default_value_t = 10_000
    )]
    pub trials: u64,
    /// Monte Carlo seed; required so runs are reproducible
    #[arg(long, value_name = "SEED", requires = "monte_carlo")]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub policy: PolicyArgs,
}

pub fn dispatch(cli: Cli) -> Result<ResultDocument, CliError> {
    match cli.command {
        Command::Question(args) => run_question(&args),
        Command::OneOfM(args) => run_one_of_m(&args),
        Command::NOfM(args) => run_n_of_m(&args),
        Command::Ranked(args) => run_ranked(&args),
        Command::Condorcet(args) => run_condorcet(&args),
        Command::Slates(args) => run_slates(&args),
        Command::Sequence(args) => run_sequence(&args),
    }
}

fn lib_err(err: ConsensusError) -> CliError {
    CliError::Data(err.to_string())
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))
}

fn parse_count_list(text: &str) -> Result<Vec<u64>, CliError> {
    text.split(',')
        .map(|part| {
            part.trim().parse::<u64>().map_err(|_| {
                CliError::Usage(format!(
                    "cannot parse tally {text:?}: expected comma-separated counts"
                ))
            })
        })
        .collect()
}

/// The present count: an explicit flag wins, then the ballots submitted,
/// then the number voting.
fn resolve_present(
    flag: Option<u64>,
    from_file: Option<u64>,
    voting: u64,
    warnings: &mut Vec<String>,
) -> Result<u64, CliError> {
    match (flag, from_file) {
        (Some(present), Some(submitted)) if present < submitted => Err(CliError::Data(format!(
            "--present {present} is less than the {submitted} ballots submitted"
        ))),
        (Some(present), _) => Ok(present),
        (None, Some(submitted)) => Ok(submitted),
        (None, None) => {
            warnings.push(format!(
                "number present defaulted to the number voting ({voting}); abstentions are \
                 not counted"
            ));
            Ok(voting)
        }
    }
}

fn population_block(source: PopulationSource, size: u64) -> PopulationBlock {
    PopulationBlock {
        level: source.level_tag().to_string(),
        size,
    }
}

fn margin_tag(margin: MarginClass) -> &'static str {
    match margin {
        MarginClass::Clear(Direction::Above) => "clear-above",
        MarginClass::Clear(Direction::Below) => "clear-below",
        MarginClass::Marginal => "marginal",
    }
}

/// Attach the advisory uncertainty block when a confidence level or a
/// boycott floor is configured. Never changes the outcome.
fn attach_uncertainty(
    doc: &mut ResultDocument,
    policy: &PolicyConfig,
    tally: Option<YesNoTally>,
    voting: u64,
    population: u64,
    threshold: ThresholdSpec,
) -> Result<(), CliError> {
    if policy.confidence.is_none() && policy.boycott_floor.is_none() {
        return Ok(());
    }
    let floor = policy.boycott_floor.unwrap_or_else(default_boycott_floor);
    let mut block = UncertaintyBlock {
        confidence: policy.confidence.map(decimal6),
        proportion_low: None,
        proportion_high: None,
        margin: None,
        margin_threshold: None,
        turnout: None,
    };
    if let (Some(confidence), Some(tally)) = (policy.confidence, tally) {
        if tally.total() > 0 {
            let interval =
                proportion_interval(tally.votes_y, tally.votes_n, confidence).map_err(lib_err)?;
            block.proportion_low = Some(decimal6(interval.low));
            block.proportion_high = Some(decimal6(interval.high));
            if let Some(t) = threshold_proportion(threshold, population) {
                let margin = classify_margin(&interval, t);
                block.margin = Some(margin_tag(margin).to_string());
                block.margin_threshold = Some(RationalText::new(t));
                if margin == MarginClass::Marginal {
                    doc.warnings.push(format!(
                        "marginal at confidence {}: the interval straddles the threshold, \
                         the counts on its two sides are effectively equal",
                        decimal6(confidence)
                    ));
                }
            }
        }
    }
    if population >= 1 && voting <= population {
        let turnout = turnout_report(voting, population, floor).map_err(lib_err)?;
        block.turnout = Some(TurnoutBlock {
            ratio: RationalText::new(turnout.ratio),
            floor: RationalText::new(turnout.floor),
            flagged: turnout.flagged,
        });
        if turnout.flagged {
            doc.warnings.push(format!(
                "turnout {voting}/{population} is below the advisory floor {}/{}; evidence \
                 of consensus cannot rest on a widely boycotted poll",
                floor.numer(),
                floor.denom()
            ));
        }
    }
    doc.uncertainty = Some(block);
    Ok(())
}

fn run_question(args: &QuestionArgs) -> Result<ResultDocument, CliError> {
    let policy = args.policy.load()?;
    let quorum = policy.require_quorum()?;
    let threshold = policy.require_threshold()?;
    let source = policy.require_population()?;

    let (tally, abstaining, spoiled, submitted) = match (&args.input.tally, &args.input.ballots) {
        (Some(counts), None) => {
            let counts = parse_count_list(counts)?;
            if counts.len() != 2 {
                return Err(CliError::Usage(
                    "question takes a tally of exactly two counts: yes,no".into(),
                ));
            }
            (YesNoTally::new(counts[0], counts[1]), 0, 0, None)
        }
        (None, Some(path)) => {
            let parsed = ballots::parse_yes_no(&read_file(path)?, args.input.lenient)?;
            let report = tally_yes_no(&parsed.ballots);
            (
                report.counts,
                report.abstaining,
                parsed.spoiled_rows,
                Some(report.present + parsed.spoiled_rows),
            )
        }
        _ => {
            return Err(CliError::Usage(
                "provide exactly one of --tally or --ballots".into(),
            ))
        }
    };

    let mut warnings = Vec::new();
    let voting = tally.total();
    let present = resolve_present(args.policy.present, submitted, voting, &mut warnings)?;
    let population = source.resolve(present, voting);

    let outcome =
        consensus_core::question(quorum, present, tally, population, threshold).map_err(lib_err)?;
    let quorum_met = quorate(quorum, present, voting).map_err(lib_err)?;

    let mut doc = ResultDocument::new("question", outcome_tag(outcome));
    doc.warnings = warnings;
    doc.counts = Some(CountsBlock {
        votes_yes: Some(tally.votes_y),
        votes_no: Some(tally.votes_n),
        per_choice: None,
        present,
        voting,
        abstaining,
        spoiled,
    });
    doc.population = Some(population_block(source, population));
    doc.quorum = Some(QuorumBlock {
        spec: quorum_spec_text(quorum),
        met: quorum_met,
    });
    let mut threshold_block = ThresholdBlock {
        spec: threshold_spec_text(threshold),
        accept_met: None,
        reject_met: None,
    };
    if quorum_met {
        threshold_block.accept_met =
            Some(meets_threshold(tally.votes_y, population, threshold).map_err(lib_err)?);
        threshold_block.reject_met =
            Some(meets_threshold(tally.votes_n, population, threshold).map_err(lib_err)?);
    }
    doc.threshold = Some(threshold_block);
    if voting > 0 {
        doc.proportion = Some(RationalText::new(
            measure_proportion(tally).map_err(lib_err)?,
        ));
    }
    attach_uncertainty(
        &mut doc,
        &policy,
        Some(tally),
        voting,
        population,
        threshold,
    )?;
    Ok(doc)
}

/// Counts for a multi-choice contest, from an inline tally or a ballot
/// file, plus the participation bookkeeping.
struct ContestInput {
    tally: MultiTally,
    voting: u64,
    abstaining: u64,
    spoiled: u64,
    submitted: Option<u64>,
    names: Option<Vec<String>>,
}

fn contest_input(input: &InputArgs, n: usize) -> Result<ContestInput, CliError> {
    match (&input.tally, &input.ballots) {
        (Some(counts), None) => {
            let counts = parse_count_list(counts)?;
            let tally = MultiTally::new(counts).map_err(lib_err)?;
            if let Some(m) = input.choices {
                if m != tally.num_choices() {
                    return Err(CliError::Usage(format!(
                        "--choices {m} contradicts the tally, which has {} counts",
                        tally.num_choices()
                    )));
                }
            }
            let voting = tally.total();
            Ok(ContestInput {
                voting,
                tally,
                abstaining: 0,
                spoiled: 0,
                submitted: None,
                names: None,
            })
        }
        (None, Some(path)) => {
            let (parsed, m) =
                ballots::parse_choices(&read_file(path)?, input.choices, input.lenient)?;
            let report = tally_choices(&parsed.ballots, m, n).map_err(lib_err)?;
            Ok(ContestInput {
                tally: report.counts,
                voting: report.voting,
                abstaining: report.abstaining,
                spoiled: report.spoiled + parsed.spoiled_rows,
                submitted: Some(report.present + parsed.spoiled_rows),
                names: parsed.names,
            })
        }
        _ => Err(CliError::Usage(
            "provide exactly one of --tally or --ballots".into(),
        )),
    }
}

fn run_one_of_m(args: &ContestArgs) -> Result<ResultDocument, CliError> {
    let policy = args.policy.load()?;
    let quorum = policy.require_quorum()?;
    let threshold = policy.require_threshold()?;
    let source = policy.require_population()?;

    let contest = contest_input(&args.input, 1)?;
    let mut warnings = Vec::new();
    let present = resolve_present(
        args.policy.present,
        contest.submitted,
        contest.voting,
        &mut warnings,
    )?;
    let population = source.resolve(present, contest.voting);

    let result =
        one_of_m(quorum, present, &contest.tally, population, threshold).map_err(lib_err)?;
    let (outcome, winner) = match result {
        OneOfMResult::Consensus(choice) => ("consensus", Some(choice)),
        OneOfMResult::NegativeResult => ("negative-result", None),
        OneOfMResult::NullResult => ("null-result", None),
    };

    let mut doc = ResultDocument::new("one-of-m", outcome);
    doc.warnings = warnings;
    doc.winner = winner;
    doc.choice_names = contest.names;
    doc.counts = Some(CountsBlock {
        votes_yes: None,
        votes_no: None,
        per_choice: Some(contest.tally.votes().to_vec()),
        present,
        voting: contest.voting,
        abstaining: contest.abstaining,
        spoiled: contest.spoiled,
    });
    doc.population = Some(population_block(source, population));
    doc.quorum = Some(QuorumBlock {
        spec: quorum_spec_text(quorum),
        met: quorate(quorum, present, contest.voting).map_err(lib_err)?,
    });
    doc.threshold = Some(ThresholdBlock {
        spec: threshold_spec_text(threshold),
        accept_met: None,
        reject_met: None,
    });
    attach_uncertainty(
        &mut doc,
        &policy,
        None,
        contest.voting,
        population,
        threshold,
    )?;
    Ok(doc)
}

fn run_n_of_m(args: &NOfMArgs) -> Result<ResultDocument, CliError> {
    let policy = args.policy.load()?;
    let quorum = policy.require_quorum()?;
    let threshold = policy.require_threshold()?;
    let source = policy.require_population()?;

    let contest = contest_input(&args.input, args.n)?;
    let voting = match (args.voting, contest.submitted) {
        (Some(flag), None) => flag,
        (None, None) => {
            return Err(CliError::Usage(
                "an inline n-of-m tally needs --voting: the counts alone do not reveal how \
                 many ballots contributed"
                    .into(),
            ))
        }
        (None, Some(_)) => contest.voting,
        (Some(_), Some(_)) => {
            return Err(CliError::Usage(
                "--voting applies to inline tallies only; ballot files already carry it".into(),
            ))
        }
    };

    let mut warnings = Vec::new();
    let present = resolve_present(
        args.policy.present,
        contest.submitted,
        voting,
        &mut warnings,
    )?;
    let population = source.resolve(present, voting);

    let result = n_of_m(
        quorum,
        present,
        voting,
        &contest.tally,
        population,
        threshold,
        args.n,
    )
    .map_err(lib_err)?;
    let (outcome, winners) = match result {
        NOfMResult::ConsensusChoices(choices) => {
            ("consensus", Some(choices.into_iter().collect::<Vec<_>>()))
        }
        NOfMResult::NegativeResult => ("negative-result", None),
        NOfMResult::NullResult => ("null-result", None),
    };

    let selection = plurality_top_n(&contest.tally, args.n).map_err(lib_err)?;

    let mut doc = ResultDocument::new("n-of-m", outcome);
    doc.warnings = warnings;
    doc.winners = winners;
    doc.choice_names = contest.names;
    doc.counts = Some(CountsBlock {
        votes_yes: None,
        votes_no: None,
        per_choice: Some(contest.tally.votes().to_vec()),
        present,
        voting,
        abstaining: contest.abstaining,
        spoiled: contest.spoiled,
    });
    doc.population = Some(population_block(source, population));
    doc.quorum = Some(QuorumBlock {
        spec: quorum_spec_text(quorum),
        met: quorate(quorum, present, voting).map_err(lib_err)?,
    });
    doc.threshold = Some(ThresholdBlock {
        spec: threshold_spec_text(threshold),
        accept_met: None,
        reject_met: None,
    });
    doc.plurality = Some(PluralityBlock {
        ranking: selection.ranking,
        selected: selection.selected.into_iter().collect(),
        cut: selection.cut,
        tie_at_cut: selection.tie_at_cut,
    });
    if selection.tie_at_cut {
        doc.warnings.push(
            "the plurality line falls within a group of equal counts; the top-n selection \
             is not unique"
                .into(),
        );
    }
    attach_uncertainty(&mut doc, &policy, None, voting, population, threshold)?;
    Ok(doc)
}

fn run_ranked(args: &RankedArgs) -> Result<ResultDocument, CliError> {
    let policy = args.policy.load()?;
    let quorum = policy.require_quorum()?;
    let threshold = policy.require_threshold()?;
    let source = policy.require_population()?;

    let (parsed, m) =
        ballots::parse_ranked(&read_file(&args.ballots)?, args.choices, args.lenient)?;
    let first = first_round_counts(&parsed.ballots, m).map_err(lib_err)?;
    let voting = first.total();
    let abstaining = parsed
        .ballots
        .iter()
        .filter(|b| b.ranking.is_empty())
        .count() as u64;
    let submitted = Some(parsed.ballots.len() as u64 + parsed.spoiled_rows);

    let mut warnings = Vec::new();
    let present = resolve_present(args.policy.present, submitted, voting, &mut warnings)?;
    let population = source.resolve(present, voting);

    let result = ranked_consensus(&parsed.ballots, m, quorum, present, population, threshold)
        .map_err(lib_err)?;

    let mut doc = ResultDocument::new(
        "ranked",
        match &result {
            RankedResult::Consensus(_) => "consensus",
            RankedResult::NoConsensus { .. } => "no-consensus",
            RankedResult::NullResult => "null-result",
        },
    );
    doc.warnings = warnings;
    match &result {
        RankedResult::Consensus(choice) => doc.winner = Some(*choice),
        RankedResult::NoConsensus { irv } => {
            doc.compromise = irv.winner();
            doc.rounds = Some(
                irv.rounds
                    .iter()
                    .map(|round| RoundBlock {
                        round: round.round_index,
                        counts: round
                            .counts
                            .iter()
                            .map(|(&choice, &votes)| RoundCount { choice, votes })
                            .collect(),
                        exhausted: round.exhausted,
                        eliminated: round.eliminated.iter().copied().collect(),
                    })
                    .collect(),
            );
            match doc.compromise {
                Some(choice) => doc.warnings.push(format!(
                    "no consensus: option {choice} is the elimination-rounds compromise, \
                     not a consensus choice"
                )),
                None => doc
                    .warnings
                    .push("no consensus, and the elimination rounds ended in a tie".into()),
            }
        }
        RankedResult::NullResult => {}
    }
    doc.choice_names = parsed.names;
    doc.counts = Some(CountsBlock {
        votes_yes: None,
        votes_no: None,
        per_choice: Some(first.votes().to_vec()),
        present,
        voting,
        abstaining,
        spoiled: parsed.spoiled_rows,
    });
    doc.population = Some(population_block(source, population));
    doc.quorum = Some(QuorumBlock {
        spec: quorum_spec_text(quorum),
        met: quorate(quorum, present, voting).map_err(lib_err)?,
    });
    doc.threshold = Some(ThresholdBlock {
        spec: threshold_spec_text(threshold),
        accept_met: None,
        reject_met: None,
    });
    attach_uncertainty(&mut doc, &policy, None, voting, population, threshold)?;
    Ok(doc)
}

fn run_condorcet(args: &CondorcetArgs) -> Result<ResultDocument, CliError> {
    let (parsed, m) =
        ballots::parse_ranked(&read_file(&args.ballots)?, args.choices, args.lenient)?;
    let matrix = pairwise_matrix(&parsed.ballots, m).map_err(lib_err)?;
    let result = condorcet_winner(&matrix);

    let mut doc = ResultDocument::new(
        "condorcet",
        match result {
            CondorcetResult::StrongWinner(_) => "strong-winner",
            CondorcetResult::NoStrongWinner => "no-strong-winner",
        },
    );
    if let CondorcetResult::StrongWinner(choice) = result {
        doc.winner = Some(choice);
    } else {
        doc.warnings.push(
            "no strong Condorcet winner: consensus cannot exist among these alternatives".into(),
        );
    }
    doc.choice_names = parsed.names;
    doc.pairwise = Some(matrix.rows().to_vec());
    Ok(doc)
}

fn run_slates(args: &SlatesArgs) -> Result<ResultDocument, CliError> {
    let policy = args.policy.load()?;
    let quorum = policy.require_quorum()?;
    let threshold = policy.require_threshold()?;
    let source = policy.require_population()?;

    let (parsed, m) =
        ballots::parse_choices(&read_file(&args.ballots)?, args.choices, args.lenient)?;
    let report = tally_choices(&parsed.ballots, m, args.n).map_err(lib_err)?;
    let slate_counts = tally_slates(&parsed.ballots, m, args.n).map_err(lib_err)?;

    let voting = report.voting;
    let submitted = Some(report.present + parsed.spoiled_rows);
    let mut warnings = Vec::new();
    let present = resolve_present(args.policy.present, submitted, voting, &mut warnings)?;
    let population = source.resolve(present, voting);

    if voting > population {
        return Err(CliError::Data(format!(
            "inconsistent counts: number voting ({voting}) exceeds population ({population})"
        )));
    }
    let quorum_met = quorate(quorum, present, voting).map_err(lib_err)?;

    // slates sorted by count descending, then by membership
    let mut ordered: Vec<(BTreeSet<usize>, u64)> = slate_counts.into_iter().collect();
    ordered.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));

    let mut winning_slate = None;
    let mut blocks = Vec::with_capacity(ordered.len());
    for (slate, count) in ordered {
        let meets = if quorum_met {
            meets_threshold(count, population, threshold).map_err(lib_err)?
        } else {
            false
        };
        if meets && winning_slate.is_none() {
            winning_slate = Some(slate.iter().copied().collect::<Vec<_>>());
        }
        blocks.push(SlateBlock {
            choices: slate.into_iter().collect(),
            count,
            meets_threshold: meets,
        });
    }

    let outcome = if !quorum_met {
        "null-result"
    } else if winning_slate.is_some() {
        "consensus"
    } else {
        "negative-result"
    };

    let mut doc = ResultDocument::new("slates", outcome);
    doc.warnings = warnings;
    doc.winners = winning_slate;
    doc.choice_names = parsed.names;
    doc.counts = Some(CountsBlock {
        votes_yes: None,
        votes_no: None,
        per_choice: Some(report.counts.votes().to_vec()),
        present,
        voting,
        abstaining: report.abstaining,
        spoiled: report.spoiled + parsed.spoiled_rows,
    });
    doc.population = Some(population_block(source, population));
    doc.quorum = Some(QuorumBlock {
        spec: quorum_spec_text(quorum),
        met: quorum_met,
    });
    doc.threshold = Some(ThresholdBlock {
        spec: threshold_spec_text(threshold),
        accept_met: None,
        reject_met: None,
    });
    doc.slates = Some(blocks);
    attach_uncertainty(&mut doc, &policy, None, voting, population, threshold)?;
    Ok(doc)
}

fn parse_order(text: &str, names: &Option<Vec<String>>, m: usize) -> Result<Vec<usize>, CliError> {
    text.split(',')
        .map(|entry| {
            let entry = entry.trim();
            if let Some(names) = names {
                if let Some(index) = names.iter().position(|name| name == entry) {
                    return Ok(index);
                }
            }
            match entry.parse::<usize>() {
                Ok(index) if index < m => Ok(index),
                _ => Err(CliError::Usage(format!(
                    "cannot resolve {entry:?} in --order to one of the {m} options"
                ))),
            }
        })
        .collect()
}

fn run_sequence(args: &SequenceArgs) -> Result<ResultDocument, CliError> {
    let policy = args.policy.load()?;
    let threshold = policy.require_threshold()?;

    let parsed = ballots::parse_profile(&read_file(&args.profile)?, args.choices)?;
    let (m, names) = (parsed.num_options, parsed.names);
    let voter_count = parsed.voters.len() as u64;
    let profile = ApprovalProfile::new(m, parsed.voters).map_err(lib_err)?;

    // everyone votes, so present and voting are both the voter count
    let population = match policy.population {
        Some(source) => source.resolve(voter_count, voter_count),
        None => voter_count,
    };

    let passing = consensus_core::passing_set(&profile, population, threshold).map_err(lib_err)?;

    let mut doc;
    let mut block = SequenceBlock {
        passing: passing.iter().copied().collect(),
        order: None,
        steps: None,
        selection_probability: None,
        standard_error: None,
        orders_evaluated: None,
        condorcet_winner: None,
    };

    if let Some(order_text) = &args.order {
        let order = parse_order(order_text, &names, m)?;
        let outcome =
            simulate_sequence(&profile, &order, population, threshold).map_err(lib_err)?;
        doc = ResultDocument::new(
            "sequence",
            if outcome.chosen.is_some() {
                "chosen"
            } else {
                "default"
            },
        );
        doc.winner = outcome.chosen;
        block.order = Some(outcome.order.clone());
        block.steps = Some(
            outcome
                .steps
                .iter()
                .map(|&(option, step)| StepBlock {
                    option,
                    outcome: outcome_tag(step).to_string(),
                })
                .collect(),
        );
        let matrix = pairwise_matrix(&profile.ranked_ballots(), m).map_err(lib_err)?;
        if let CondorcetResult::StrongWinner(choice) = condorcet_winner(&matrix) {
            block.condorcet_winner = Some(choice);
        }
        if outcome.chosen.is_none() {
            doc.warnings
                .push("every option failed: the group defaulted without a decision".into());
        }
    } else {
        let mode = if args.exhaustive {
            AnalysisMode::Exhaustive
        } else if args.monte_carlo {
            let seed = args.seed.ok_or_else(|| {
                CliError::Usage("--seed is required for Monte Carlo analysis".into())
            })?;
            AnalysisMode::MonteCarlo {
                trials: args.trials,
                seed,
            }
        } else {
            return Err(CliError::Usage(
                "choose one of --order, --exhaustive, or --monte-carlo".into(),
            ));
        };
        let analysis = order_analysis(&profile, population, threshold, mode).map_err(lib_err)?;
        doc = ResultDocument::new(
            "sequence",
            match analysis.passing.len() {
                0 => "default",
                1 => "consensus",
                _ => "conflicting-choices",
            },
        );
        if analysis.passing.len() == 1 {
            doc.winner = analysis.passing.iter().next().copied();
        }
        block.selection_probability = Some(
            analysis
                .selection_probability
                .iter()
                .map(|&p| RationalText::new(p))
                .collect(),
        );
        block.standard_error = analysis
            .standard_error
            .as_ref()
            .map(|errors| errors.iter().map(|&se| decimal6(se)).collect());
        block.orders_evaluated = Some(analysis.orders_evaluated);
        if let CondorcetResult::StrongWinner(choice) = analysis.condorcet {
            block.condorcet_winner = Some(choice);
        }
        if analysis.passing.len() >= 2 {
            doc.warnings.push(format!(
                "conflicting choices: a consensus exists for {} exclusive options at once; \
                 the sequential outcome depends on the voting order",
                analysis.passing.len()
            ));
            if let CondorcetResult::StrongWinner(favorite) = analysis.condorcet {
                if analysis.passing.contains(&favorite) {
                    let p = analysis.selection_probability[favorite];
                    doc.warnings.push(format!(
                        "order bias: the group favorite (option {favorite}) is chosen with \
                         probability {}/{}",
                        p.numer(),
                        p.denom()
                    ));
                }
            }
        }
        if analysis.passing.is_empty() {
            doc.warnings
                .push("every option fails: sequential voting would default".into());
        }
    }

    doc.choice_names = names;
    doc.population = Some(PopulationBlock {
        level: policy
            .population
            .map_or("voters", |source| source.level_tag())
            .to_string(),
        size: population,
    });
    doc.threshold = Some(ThresholdBlock {
        spec: threshold_spec_text(threshold),
        accept_met: None,
        reject_met: None,
    });
    doc.sequence = Some(block);
    Ok(doc)
}
