//! Deterministic input generators shared by the benchmarks.

use consensus_core::{ApprovalProfile, RankedBallot, Voter};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Ranked ballots over `m` choices, possibly truncated, seeded for
/// reproducible runs.
pub fn ranked_ballots(seed: u64, m: usize, count: usize) -> Vec<RankedBallot> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mut choices: Vec<usize> = (0..m).collect();
            choices.shuffle(&mut rng);
            let keep = rng.random_range(1..=m);
            choices.truncate(keep);
            RankedBallot::new(choices)
        })
        .collect()
}

/// An approval profile with random full rankings and cutoffs.
pub fn approval_profile(seed: u64, m: usize, voters: usize) -> ApprovalProfile {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let voters = (0..voters)
        .map(|_| {
            let mut ranking: Vec<usize> = (0..m).collect();
            ranking.shuffle(&mut rng);
            Voter::new(ranking, rng.random_range(1..=m))
        })
        .collect();
    ApprovalProfile::new(m, voters).expect("generated profiles are valid")
}
