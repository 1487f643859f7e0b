//! Acceptance suite for the measurement library.
//!
//! Each test is one acceptance criterion, checked at its stated scale, and
//! prints a single `[PASS]` line on success (visible with
//! `cargo test --test acceptance -- --nocapture`). The CLI criteria live in
//! the cli crate's own `acceptance` target.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use num_traits::ToPrimitive;
use rand::prelude::IndexedRandom;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use consensus_core::{
    classify_margin, condorcet_winner, first_round_counts, irv_tabulate, measure_proportion,
    meets_threshold, one_of_m, order_analysis, pairwise_matrix, plurality_top_n,
    proportion_interval, question, question_simple, AnalysisMode, ApprovalProfile, CondorcetResult,
    Direction, MarginClass, MultiTally, OneOfMResult, PopulationLevel, QuorumSpec, RankedBallot,
    Rational, ThresholdSpec, Voter, YesNoTally,
};

/// Criterion 1: the simple model is the elaborated model at P(4) with a
/// supermajority threshold, exhaustively at small scale.
#[test]
fn criterion_1_model_equivalence() {
    let started = Instant::now();
    let thresholds = [
        Rational::new(2, 3),
        Rational::new(3, 5),
        Rational::new(3, 4),
        Rational::new(1, 1),
    ];
    let mut checked = 0u64;
    for quorum in 1..=20u64 {
        for votes_y in 0..=40u64 {
            for votes_n in 0..=40u64 {
                for t in thresholds {
                    let simple = question_simple(quorum, votes_y, votes_n, t);
                    let total = votes_y + votes_n;
                    let elaborated = question(
                        QuorumSpec::NumVoting(quorum),
                        total,
                        YesNoTally::new(votes_y, votes_n),
                        total,
                        ThresholdSpec::Supermajority(t),
                    );
                    assert_eq!(
                        simple, elaborated,
                        "criterion 1 mismatch at quorum={quorum} y={votes_y} n={votes_n} t={t}"
                    );
                    checked += 1;
                }
            }
        }
    }
    let elapsed = started.elapsed();
    assert!(
        elapsed < Duration::from_secs(10),
        "criterion 1 exceeded 10 s: {elapsed:?}"
    );
    println!(
        "[PASS] criterion 1: question_simple == question at P(4) over {checked} cases \
         ({elapsed:?})"
    );
}

/// Criterion 2: Supermajority(1), NearUnanimity(0), and Unanimity are the
/// same limit, exhaustively for populations up to 200.
#[test]
fn criterion_2_limiting_cases() {
    let started = Instant::now();
    let mut checked = 0u64;
    for population in 0..=200u64 {
        for votes in 0..=population {
            let supermajority = meets_threshold(
                votes,
                population,
                ThresholdSpec::Supermajority(Rational::new(1, 1)),
            );
            let near_unanimity =
                meets_threshold(votes, population, ThresholdSpec::NearUnanimity(0));
            let unanimity = meets_threshold(votes, population, ThresholdSpec::Unanimity);
            assert_eq!(
                supermajority, near_unanimity,
                "criterion 2 mismatch at votes={votes} population={population}"
            );
            assert_eq!(
                near_unanimity, unanimity,
                "criterion 2 mismatch at votes={votes} population={population}"
            );
            checked += 1;
        }
    }
    let elapsed = started.elapsed();
    assert!(
        elapsed < Duration::from_secs(5),
        "criterion 2 exceeded 5 s: {elapsed:?}"
    );
    println!("[PASS] criterion 2: unanimity limit identity over {checked} cases ({elapsed:?})");
}

/// Criterion 4: the plurality table — the top-3 line falls between 49086
/// and 46995.
#[test]
fn criterion_4_plurality_table() {
    let tally = MultiTally::new(vec![90785, 69212, 49086, 46995, 28479, 5662]).unwrap();
    let selection = plurality_top_n(&tally, 3).unwrap();
    assert_eq!(selection.selected, BTreeSet::from([0, 1, 2]));
    assert_eq!(selection.cut, Some((49086, 46995)));
    assert!(!selection.tie_at_cut);
    println!(
        "[PASS] criterion 4: plurality top-3 = {{0, 1, 2}} with the line between 49086 and 46995"
    );
}

/// Resolve the effective population for the abstention experiment.
fn resolve_population(
    level: PopulationLevel,
    nominal: u64,
    current: u64,
    present: u64,
    voting: u64,
) -> u64 {
    match level {
        PopulationLevel::P1 => nominal,
        PopulationLevel::P2 => current,
        PopulationLevel::P3 => present,
        PopulationLevel::P4 => voting,
    }
}

/// Criterion 5: converting an abstainer to a no-voter never changes the
/// acceptance proposition at a fixed population, and at P(4) it can only
/// revoke it.
#[test]
fn criterion_5_abstention_semantics() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EC5);
    let fixed_levels = [
        PopulationLevel::P1,
        PopulationLevel::P2,
        PopulationLevel::P3,
    ];
    for _ in 0..10_000 {
        let votes_y = rng.random_range(0..=40u64);
        let votes_n = rng.random_range(0..=40u64);
        let abstaining = rng.random_range(1..=10u64);
        let voting = votes_y + votes_n;
        if voting == 0 {
            continue;
        }
        let present = voting + abstaining;
        let current = present + rng.random_range(0..=5u64);
        let nominal = current + rng.random_range(0..=5u64);

        // a threshold valid for every population in play (the smallest is
        // the pre-swap P(4) = voting)
        let threshold = match rng.random_range(0..4u32) {
            0 => ThresholdSpec::Majority,
            1 => {
                let den = rng.random_range(2..=12u64);
                let num = rng.random_range(den / 2 + 1..=den);
                ThresholdSpec::Supermajority(Rational::new(num, den))
            }
            2 => ThresholdSpec::NearUnanimity(rng.random_range(0..=(voting - 1) / 2)),
            _ => ThresholdSpec::Unanimity,
        };

        // swap one abstainer to a no-vote
        let swapped_n = votes_n + 1;
        let swapped_voting = voting + 1;

        for level in fixed_levels {
            let population = resolve_population(level, nominal, current, present, voting);
            let before = meets_threshold(votes_y, population, threshold).unwrap();
            let population_after =
                resolve_population(level, nominal, current, present, swapped_voting);
            assert_eq!(population, population_after, "fixed levels must not move");
            let after = meets_threshold(votes_y, population_after, threshold).unwrap();
            assert_eq!(
                before, after,
                "criterion 5: t_a changed at fixed {level:?} for y={votes_y} n={votes_n}"
            );
            let _ = swapped_n;
        }

        let p4_before = meets_threshold(votes_y, voting, threshold).unwrap();
        let p4_after = meets_threshold(votes_y, swapped_voting, threshold).unwrap();
        assert!(
            !(p4_after && !p4_before),
            "criterion 5: t_a flipped false->true at P(4) for y={votes_y} n={votes_n}"
        );
    }
    println!("[PASS] criterion 5: abstention swap semantics over 10000 randomized cases");
}

/// Criterion 6: with the votes summing to at most the population, never
/// more than one choice passes a threshold above half of it.
#[test]
fn criterion_6_uniqueness() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x01F0);
    for _ in 0..10_000 {
        let m = rng.random_range(2..=8usize);
        let population = rng.random_range(1..=120u64);
        // votes with sum <= population
        let mut votes = vec![0u64; m];
        let mut budget = rng.random_range(0..=population);
        for slot in votes.iter_mut() {
            let share = rng.random_range(0..=budget);
            *slot = share;
            budget -= share;
        }
        let threshold = match rng.random_range(0..4u32) {
            0 => ThresholdSpec::Majority,
            1 => {
                let den = rng.random_range(2..=12u64);
                let num = rng.random_range(den / 2 + 1..=den);
                ThresholdSpec::Supermajority(Rational::new(num, den))
            }
            2 => ThresholdSpec::NearUnanimity(rng.random_range(0..=(population - 1) / 2)),
            _ => ThresholdSpec::Unanimity,
        };
        let passing = votes
            .iter()
            .filter(|&&v| meets_threshold(v, population, threshold).unwrap())
            .count();
        assert!(
            passing <= 1,
            "criterion 6: {passing} choices passed {threshold:?} with votes {votes:?} \
             of population {population}"
        );
        // and the contest engine agrees rather than erroring
        let tally = MultiTally::new(votes).unwrap();
        let result = one_of_m(
            QuorumSpec::NumVoting(1),
            population,
            &tally,
            population,
            threshold,
        );
        assert!(result.is_ok(), "criterion 6: {result:?}");
    }
    println!("[PASS] criterion 6: 1-of-M winner uniqueness over 10000 randomized tallies");
}

/// Random ranked ballots: distinct choices, possibly truncated or empty.
fn random_ballots(rng: &mut ChaCha8Rng, m: usize, max_ballots: usize) -> Vec<RankedBallot> {
    let count = rng.random_range(1..=max_ballots);
    (0..count)
        .map(|_| {
            let mut choices: Vec<usize> = (0..m).collect();
            choices.shuffle(rng);
            let keep = rng.random_range(0..=m);
            choices.truncate(keep);
            RankedBallot::new(choices)
        })
        .collect()
}

/// Criterion 7: every elimination round conserves ballots and the first
/// round equals the first-preference counts.
#[test]
fn criterion_7_irv_conservation() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x13B0);
    let mut profiles = 0;
    while profiles < 1_000 {
        let m = rng.random_range(2..=6usize);
        let ballots = random_ballots(&mut rng, m, 50);
        let nonempty = ballots.iter().filter(|b| !b.ranking.is_empty()).count() as u64;
        if nonempty == 0 {
            continue;
        }
        profiles += 1;
        let first = first_round_counts(&ballots, m).unwrap();
        let tabulation = irv_tabulate(&ballots, m).unwrap();
        for round in &tabulation.rounds {
            let live: u64 = round.counts.values().sum();
            assert_eq!(
                live + round.exhausted,
                nonempty,
                "criterion 7: conservation failed in round {} of {ballots:?}",
                round.round_index
            );
        }
        let round_one = &tabulation.rounds[0];
        for (choice, &count) in &round_one.counts {
            assert_eq!(
                count,
                first.votes()[*choice],
                "criterion 7: first-round mismatch for choice {choice}"
            );
        }
    }
    println!("[PASS] criterion 7: round conservation over 1000 randomized ranked profiles");
}

/// Criterion 8: a first-round majority over complete rankings is always
/// the strong Condorcet winner.
#[test]
fn criterion_8_consensus_implies_condorcet() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC0DC);
    let mut consensus_cases = 0u32;
    for round in 0..1_000 {
        let m = rng.random_range(2..=5usize);
        let ballots_count = rng.random_range(1..=30usize);
        // bias half the profiles toward a shared favorite so the
        // implication is exercised, not vacuous
        let favorite = (round % 2 == 0).then(|| rng.random_range(0..m));
        let ballots: Vec<RankedBallot> = (0..ballots_count)
            .map(|_| {
                let mut choices: Vec<usize> = (0..m).collect();
                choices.shuffle(&mut rng);
                if let Some(favorite) = favorite {
                    if rng.random_bool(0.7) {
                        let at = choices.iter().position(|&c| c == favorite).unwrap();
                        choices.swap(0, at);
                    }
                }
                RankedBallot::new(choices)
            })
            .collect();
        let population = ballots.len() as u64;
        let counts = first_round_counts(&ballots, m).unwrap();
        let outcome = one_of_m(
            QuorumSpec::NumVoting(1),
            population,
            &counts,
            population,
            ThresholdSpec::Majority,
        )
        .unwrap();
        if let OneOfMResult::Consensus(winner) = outcome {
            consensus_cases += 1;
            let matrix = pairwise_matrix(&ballots, m).unwrap();
            assert_eq!(
                condorcet_winner(&matrix),
                CondorcetResult::StrongWinner(winner),
                "criterion 8: consensus winner {winner} is not the strong Condorcet winner"
            );
        }
    }
    assert!(
        consensus_cases > 100,
        "criterion 8 exercised only {consensus_cases} consensus profiles"
    );
    println!(
        "[PASS] criterion 8: consensus implies strong Condorcet winner over 1000 profiles \
         ({consensus_cases} with a consensus)"
    );
}

/// The demo profile: 9 voters over 3 options, approvals [7, 7, 6], all
/// three options passing a majority of 9, option 0 the strong Condorcet
/// winner.
fn demo_three_passer_profile() -> ApprovalProfile {
    let mut voters = vec![Voter::new([0, 1, 2], 2); 3];
    voters.extend(vec![Voter::new([0, 1, 2], 3); 2]);
    voters.extend(vec![Voter::new([2, 1, 0], 2); 2]);
    voters.extend(vec![Voter::new([2, 0, 1], 2); 2]);
    ApprovalProfile::new(3, voters).unwrap()
}

/// Criterion 9: sequential-order bias. Exhaustively, every passing option
/// is selected with probability exactly 1/k; the demo profile selects the
/// strong Condorcet winner with probability 1/3 < 1/2; Monte Carlo agrees
/// within 0.02.
#[test]
fn criterion_9_sequential_order_bias() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0B1A);

    // exhaustive uniformity over random profiles, m <= 5
    for _ in 0..300 {
        let m = rng.random_range(2..=5usize);
        let voters: Vec<Voter> = (0..rng.random_range(1..=12usize))
            .map(|_| {
                let mut ranking: Vec<usize> = (0..m).collect();
                ranking.shuffle(&mut rng);
                Voter::new(ranking, rng.random_range(1..=m))
            })
            .collect();
        let profile = ApprovalProfile::new(m, voters).unwrap();
        let population = profile.voters().len() as u64 + rng.random_range(0..=3u64);
        let threshold = *[
            ThresholdSpec::Majority,
            ThresholdSpec::Supermajority(Rational::new(2, 3)),
        ]
        .choose(&mut rng)
        .unwrap();
        let analysis =
            order_analysis(&profile, population, threshold, AnalysisMode::Exhaustive).unwrap();
        let passers = analysis.passing.len() as u64;
        for (option, probability) in analysis.selection_probability.iter().enumerate() {
            let expected = if analysis.passing.contains(&option) {
                Rational::new(1, passers)
            } else {
                Rational::new(0, 1)
            };
            assert_eq!(
                *probability, expected,
                "criterion 9: option {option} probability {probability} != {expected} \
                 with passing set {:?}",
                analysis.passing
            );
        }
    }

    // the documented three-passer profile
    let demo = demo_three_passer_profile();
    let exhaustive =
        order_analysis(&demo, 9, ThresholdSpec::Majority, AnalysisMode::Exhaustive).unwrap();
    assert_eq!(exhaustive.passing, BTreeSet::from([0, 1, 2]));
    assert_eq!(exhaustive.condorcet, CondorcetResult::StrongWinner(0));
    let third = Rational::new(1, 3);
    assert_eq!(exhaustive.selection_probability[0], third);
    assert!(third < Rational::new(1, 2));

    // Monte Carlo within +-0.02 of the exhaustive values
    let monte_carlo = order_analysis(
        &demo,
        9,
        ThresholdSpec::Majority,
        AnalysisMode::MonteCarlo {
            trials: 10_000,
            seed: 0xD1CE,
        },
    )
    .unwrap();
    for option in 0..3 {
        let exact = exhaustive.selection_probability[option].to_f64().unwrap();
        let estimate = monte_carlo.selection_probability[option].to_f64().unwrap();
        assert!(
            (estimate - exact).abs() <= 0.02,
            "criterion 9: Monte Carlo estimate {estimate} strays from {exact} for option {option}"
        );
    }

    // and on random profiles, m <= 5
    for seed in 0..5u64 {
        let m = rng.random_range(2..=5usize);
        let voters: Vec<Voter> = (0..rng.random_range(2..=10usize))
            .map(|_| {
                let mut ranking: Vec<usize> = (0..m).collect();
                ranking.shuffle(&mut rng);
                Voter::new(ranking, rng.random_range(1..=m))
            })
            .collect();
        let profile = ApprovalProfile::new(m, voters).unwrap();
        let population = profile.voters().len() as u64;
        let exact = order_analysis(
            &profile,
            population,
            ThresholdSpec::Majority,
            AnalysisMode::Exhaustive,
        )
        .unwrap();
        let estimated = order_analysis(
            &profile,
            population,
            ThresholdSpec::Majority,
            AnalysisMode::MonteCarlo {
                trials: 10_000,
                seed,
            },
        )
        .unwrap();
        for option in 0..m {
            let expected = exact.selection_probability[option].to_f64().unwrap();
            let estimate = estimated.selection_probability[option].to_f64().unwrap();
            assert!(
                (estimate - expected).abs() <= 0.02,
                "criterion 9: Monte Carlo {estimate} strays from {expected} (seed {seed})"
            );
        }
    }
    println!(
        "[PASS] criterion 9: selection probability 1/k exhaustively; demo profile picks the \
         strong Condorcet winner with probability 1/3; Monte Carlo within 0.02"
    );
}

/// Criterion 10: clear interval verdicts agree with the exact comparison,
/// and doubling the evidence never widens the interval.
#[test]
fn criterion_10_uncertainty_consistency() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0CF1);
    for _ in 0..1_000 {
        let votes_y = rng.random_range(0..=1_000u64);
        let votes_n = rng.random_range(0..=1_000u64);
        if votes_y + votes_n == 0 {
            continue;
        }
        let confidence = rng.random_range(0.5..0.999);
        let den = rng.random_range(2..=12u64);
        let num = rng.random_range(1..=den);
        let threshold = Rational::new(num, den);

        let interval = proportion_interval(votes_y, votes_n, confidence).unwrap();
        let exact = measure_proportion(YesNoTally::new(votes_y, votes_n)).unwrap();
        match classify_margin(&interval, threshold) {
            MarginClass::Clear(Direction::Above) => assert!(
                exact >= threshold,
                "criterion 10: clear-above at t={threshold} but p={exact}"
            ),
            MarginClass::Clear(Direction::Below) => assert!(
                exact < threshold,
                "criterion 10: clear-below at t={threshold} but p={exact}"
            ),
            MarginClass::Marginal => {}
        }

        let doubled = proportion_interval(2 * votes_y, 2 * votes_n, confidence).unwrap();
        assert!(
            doubled.width() <= interval.width() + 1e-12,
            "criterion 10: interval widened from {} to {} when votes doubled",
            interval.width(),
            doubled.width()
        );
    }
    println!("[PASS] criterion 10: margin verdicts and interval widths over 1000 random tallies");
}
