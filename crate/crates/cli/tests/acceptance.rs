//! Acceptance suite for the command-line front end: the policy validity
//! matrix and the determinism / exit-code contract. Each test prints one
//! `[PASS]` line (visible with `-- --nocapture`). The library criteria live
//! in the core crate's `acceptance` target.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn binary() -> &'static str {
    env!("CARGO_BIN_EXE_consensus")
}

fn testdata(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/testdata")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(binary())
        .args(args)
        .output()
        .expect("the consensus binary runs")
}

fn exit_code(output: &Output) -> i32 {
    output.status.code().expect("no signal")
}

/// Criterion 3: of the ten population-basis x quorum-type combinations,
/// exactly the three incoherent ones are rejected at policy load time.
#[test]
fn criterion_3_quorum_validity_matrix() {
    let scratch = tempfile::tempdir().expect("temp dir");
    let bases = ["constant", "p1", "p2", "p3", "p4"];
    let types = ["present", "voting"];
    let invalid = [("p3", "present"), ("p4", "present"), ("p4", "voting")];

    let mut rejected = Vec::new();
    for basis in bases {
        for quorum_type in types {
            let spec = if basis == "constant" {
                "constant = 4".to_string()
            } else {
                format!("proportion = \"1/3\"\nof = \"{basis}\"")
            };
            let config = format!(
                "[population]\nnominal = 12\ncurrent = 10\n\n\
                 [quorum]\ntype = \"{quorum_type}\"\n{spec}\n\n\
                 [threshold]\nfamily = \"majority\"\n"
            );
            let path = scratch.path().join(format!("{basis}_{quorum_type}.toml"));
            fs::write(&path, config).expect("write config");

            let output = run(&[
                "question",
                "--tally",
                "6,2",
                "--config",
                path.to_str().unwrap(),
                "--population",
                "10",
                "--present",
                "9",
            ]);
            let code = exit_code(&output);
            if invalid.contains(&(basis, quorum_type)) {
                assert_eq!(
                    code, 65,
                    "criterion 3: {basis}/{quorum_type} must be rejected, got exit {code}"
                );
                let stderr = String::from_utf8_lossy(&output.stderr);
                assert!(
                    stderr.contains("invalid quorum"),
                    "criterion 3: {basis}/{quorum_type} rejection must explain itself: {stderr}"
                );
                rejected.push((basis, quorum_type));
            } else {
                assert!(
                    (0..=3).contains(&code),
                    "criterion 3: {basis}/{quorum_type} must be accepted, got exit {code}: {}",
                    String::from_utf8_lossy(&output.stderr)
                );
            }
        }
    }
    assert_eq!(
        rejected.len(),
        3,
        "criterion 3: exactly three combinations are invalid"
    );
    println!(
        "[PASS] criterion 3: 7 of 10 quorum specifications accepted, \
         {rejected:?} rejected at load time"
    );
}

/// Criterion 11: golden-file determinism and the exit-code contract for
/// every subcommand.
#[test]
fn criterion_11_determinism_and_exit_codes() {
    let ranked_file = testdata("ranked_nine.csv");
    let ranked = ranked_file.to_str().unwrap();
    let yesno_file = testdata("yesno_committee.csv");
    let yesno = yesno_file.to_str().unwrap();
    let config_file = testdata("committee_policy.toml");
    let config = config_file.to_str().unwrap();
    let empty_file = testdata("ranked_empty.csv");
    let empty = empty_file.to_str().unwrap();
    let slates_file = testdata("slates_nine.csv");
    let slates = slates_file.to_str().unwrap();
    let profile_file = testdata("sequence_profile.csv");
    let profile = profile_file.to_str().unwrap();
    let cases: Vec<(&str, Vec<&str>, i32)> = vec![
        (
            "question.json",
            vec!["question", "--ballots", yesno, "--config", config],
            0,
        ),
        (
            "one_of_m.json",
            vec![
                "one-of-m",
                "--tally",
                "5,5,0",
                "--population",
                "10",
                "--threshold",
                "majority",
                "--quorum",
                "voting:5",
                "--present",
                "10",
            ],
            2,
        ),
        (
            "n_of_m.json",
            vec![
                "n-of-m",
                "--tally",
                "90785,69212,49086,46995,28479,5662",
                "--voting",
                "180000",
                "--n",
                "3",
                "--quorum",
                "voting:1000",
                "--threshold",
                "majority",
                "--population",
                "250000",
                "--present",
                "250000",
            ],
            2,
        ),
        (
            "ranked.json",
            vec![
                "ranked",
                "--ballots",
                ranked,
                "--quorum",
                "voting:1",
                "--threshold",
                "majority",
                "--population",
                "voting",
            ],
            2,
        ),
        (
            "ranked_empty.json",
            vec![
                "ranked",
                "--ballots",
                empty,
                "--quorum",
                "voting:1",
                "--threshold",
                "majority",
                "--population",
                "voting",
            ],
            3,
        ),
        ("condorcet.json", vec!["condorcet", "--ballots", ranked], 0),
        (
            "slates.json",
            vec![
                "slates",
                "--ballots",
                slates,
                "--n",
                "2",
                "--quorum",
                "voting:3",
                "--threshold",
                "supermajority:3/4",
                "--population",
                "9",
            ],
            0,
        ),
        (
            "sequence_exhaustive.json",
            vec![
                "sequence",
                "--profile",
                profile,
                "--threshold",
                "majority",
                "--exhaustive",
            ],
            0,
        ),
        (
            "sequence_montecarlo.json",
            vec![
                "sequence",
                "--profile",
                profile,
                "--threshold",
                "majority",
                "--monte-carlo",
                "--trials",
                "2000",
                "--seed",
                "42",
            ],
            0,
        ),
        (
            "sequence_order.json",
            vec![
                "sequence",
                "--profile",
                profile,
                "--threshold",
                "majority",
                "--order",
                "Y,X,Z",
            ],
            0,
        ),
    ];

    for (golden_name, args, expected_exit) in &cases {
        let golden = fs::read(testdata(&format!("golden/{golden_name}")))
            .unwrap_or_else(|e| panic!("golden {golden_name}: {e}"));
        let first = run(args);
        let second = run(args);
        assert_eq!(
            first.stdout, second.stdout,
            "criterion 11: {golden_name}: identical inputs must give byte-identical output"
        );
        assert_eq!(
            first.stdout,
            golden,
            "criterion 11: {golden_name}: output drifted from the golden file\n--- got ---\n{}",
            String::from_utf8_lossy(&first.stdout)
        );
        assert_eq!(
            exit_code(&first),
            *expected_exit,
            "criterion 11: {golden_name}: wrong exit code; stderr: {}",
            String::from_utf8_lossy(&first.stderr)
        );
    }

    // the exit code is a pure function of the outcome: drive each outcome
    // variant and both error classes
    let outcome_cases: Vec<(Vec<&str>, i32)> = vec![
        // accepted
        (
            vec![
                "question",
                "--tally",
                "8,2",
                "--quorum",
                "voting:10",
                "--threshold",
                "supermajority:2/3",
                "--population",
                "voting",
            ],
            0,
        ),
        // rejected
        (
            vec![
                "question",
                "--tally",
                "2,8",
                "--quorum",
                "voting:10",
                "--threshold",
                "supermajority:2/3",
                "--population",
                "voting",
            ],
            1,
        ),
        // negative result
        (
            vec![
                "question",
                "--tally",
                "5,5",
                "--quorum",
                "voting:10",
                "--threshold",
                "supermajority:2/3",
                "--population",
                "voting",
            ],
            2,
        ),
        // null result
        (
            vec![
                "question",
                "--tally",
                "2,7",
                "--quorum",
                "voting:10",
                "--threshold",
                "supermajority:2/3",
                "--population",
                "voting",
            ],
            3,
        ),
        // usage error: threshold outside its range
        (
            vec![
                "question",
                "--tally",
                "8,2",
                "--quorum",
                "voting:10",
                "--threshold",
                "supermajority:1/2",
                "--population",
                "voting",
            ],
            64,
        ),
        // usage error: unknown subcommand
        (vec!["tabulate"], 64),
    ];
    for (args, expected_exit) in &outcome_cases {
        let output = run(args);
        assert_eq!(
            exit_code(&output),
            *expected_exit,
            "criterion 11: exit contract for {args:?}; stderr: {}",
            String::from_utf8_lossy(&output.stderr)
        );
    }

    // malformed input is exit 65 and names the offending row
    let scratch = tempfile::tempdir().expect("temp dir");
    let bad = scratch.path().join("bad.csv");
    fs::write(&bad, "y\nmaybe\n").unwrap();
    let output = run(&[
        "question",
        "--ballots",
        bad.to_str().unwrap(),
        "--quorum",
        "voting:1",
        "--threshold",
        "majority",
        "--population",
        "voting",
    ]);
    assert_eq!(exit_code(&output), 65);
    assert!(
        String::from_utf8_lossy(&output.stderr).contains("line 2"),
        "criterion 11: the diagnostic must name the offending row"
    );

    println!(
        "[PASS] criterion 11: {} golden files byte-stable; exit codes 0/1/2/3/64/65 as mapped",
        cases.len()
    );
}
