//! The structured result document.
//!
//! One document shape serves every subcommand; sections that do not apply
//! are omitted. Field order is fixed by declaration, maps are sorted, and
//! numbers that are not integers are rendered as exact `num/den` strings
//! with a 6-decimal convenience rendering, so identical inputs always
//! produce byte-identical output.

use consensus_core::{Outcome, Rational};
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

/// An exact rational plus a fixed-precision decimal rendering.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalText {
    pub exact: String,
    pub decimal: String,
}

impl RationalText {
    pub fn new(value: Rational) -> Self {
        RationalText {
            exact: format!("{}/{}", value.numer(), value.denom()),
            decimal: decimal6(value.to_f64().unwrap_or(f64::NAN)),
        }
    }
}

/// Render a float to the document's fixed 6-decimal precision.
pub fn decimal6(value: f64) -> String {
    format!("{value:.6}")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountsBlock {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub votes_yes: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub votes_no: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub per_choice: Option<Vec<u64>>,
    pub present: u64,
    pub voting: u64,
    pub abstaining: u64,
    pub spoiled: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PopulationBlock {
    /// p1..p4, or "explicit" for a directly stated size.
    pub level: String,
    pub size: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuorumBlock {
    pub spec: String,
    pub met: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThresholdBlock {
    pub spec: String,
    /// Whether the yes side met the threshold; absent when quorum failed.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub accept_met: Option<bool>,
    /// Whether the no side met the threshold; only yes-or-no questions
    /// have one.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub reject_met: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlateBlock {
    pub choices: Vec<usize>,
    pub count: u64,
    pub meets_threshold: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundCount {
    pub choice: usize,
    pub votes: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundBlock {
    pub round: usize,
    pub counts: Vec<RoundCount>,
    pub exhausted: u64,
    pub eliminated: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PluralityBlock {
    /// Choices ordered by descending count.
    pub ranking: Vec<usize>,
    pub selected: Vec<usize>,
    /// Counts immediately above and below the line.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub cut: Option<(u64, u64)>,
    pub tie_at_cut: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepBlock {
    pub option: usize,
    pub outcome: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceBlock {
    pub passing: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub order: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub steps: Option<Vec<StepBlock>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub selection_probability: Option<Vec<RationalText>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub standard_error: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub orders_evaluated: Option<u64>,
    /// The strong Condorcet winner of the voters' rankings, if any.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub condorcet_winner: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TurnoutBlock {
    pub ratio: RationalText,
    pub floor: RationalText,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UncertaintyBlock {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub confidence: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub proportion_low: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub proportion_high: Option<String>,
    /// clear-above, clear-below, or marginal, against `margin_threshold`.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub margin: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub margin_threshold: Option<RationalText>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub turnout: Option<TurnoutBlock>,
}

/// Everything a subcommand reports. Serialized as JSON on stdout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultDocument {
    pub command: String,
    pub outcome: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub winner: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub winners: Option<Vec<usize>>,
    /// A choice resolved by elimination rounds: an explainable compromise,
    /// not a consensus.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub compromise: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub choice_names: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub proportion: Option<RationalText>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub counts: Option<CountsBlock>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub population: Option<PopulationBlock>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub quorum: Option<QuorumBlock>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub threshold: Option<ThresholdBlock>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub plurality: Option<PluralityBlock>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub slates: Option<Vec<SlateBlock>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub rounds: Option<Vec<RoundBlock>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub pairwise: Option<Vec<Vec<u64>>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub sequence: Option<SequenceBlock>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub uncertainty: Option<UncertaintyBlock>,
    pub warnings: Vec<String>,
}

impl ResultDocument {
    pub fn new(command: &str, outcome: &str) -> Self {
        ResultDocument {
            command: command.to_string(),
            outcome: outcome.to_string(),
            winner: None,
            winners: None,
            compromise: None,
            choice_names: None,
            proportion: None,
            counts: None,
            population: None,
            quorum: None,
            threshold: None,
            plurality: None,
            slates: None,
            rounds: None,
            pairwise: None,
            sequence: None,
            uncertainty: None,
            warnings: Vec::new(),
        }
    }

    /// Serialize with a trailing newline; stable byte-for-byte.
    pub fn render(&self) -> String {
        let mut text =
            serde_json::to_string_pretty(self).expect("result documents always serialize");
        text.push('\n');
        text
    }
}

/// Canonical outcome tag for a yes-or-no question outcome.
pub fn outcome_tag(outcome: Outcome) -> &'static str {
    match outcome {
        Outcome::Accepted => "accepted",
        Outcome::Rejected => "rejected",
        Outcome::NegativeResult => "negative-result",
        Outcome::NullResult => "null-result",
    }
}

/// Exit status is a pure function of the outcome tag.
pub fn exit_code(outcome: &str) -> i32 {
    match outcome {
        "accepted" | "consensus" | "strong-winner" | "chosen" | "conflicting-choices" => 0,
        "rejected" => 1,
        "negative-result" | "no-consensus" | "no-strong-winner" | "default" => 2,
        "null-result" => 3,
        other => unreachable!("unmapped outcome {other}"),
    }
}
