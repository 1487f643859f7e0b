//! Measurement policy: quorum, effective population, threshold, and the
//! advisory uncertainty knobs.
//!
//! A policy comes from a TOML config file, command-line flags, or both
//! (flags win field by field). Loading resolves everything down to the
//! concrete specs the library takes: quorum proportions of a fixed body
//! size are reduced to constant counts here, rounding up, and population /
//! quorum combinations that cannot be given a coherent meaning are rejected
//! outright.

use consensus_core::{QuorumSpec, Rational, ThresholdSpec};
use serde::Deserialize;

use crate::CliError;

/// Where the effective population number comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PopulationSource {
    /// An explicitly stated size.
    Size(u64),
    /// Nominal size of the voting body.
    Nominal(u64),
    /// Current size of the voting body, vacancies excluded.
    Current(u64),
    /// Members present at the time of voting.
    Present,
    /// Members that did not abstain.
    Voting,
}

impl PopulationSource {
    pub fn resolve(self, present: u64, voting: u64) -> u64 {
        match self {
            PopulationSource::Size(size)
            | PopulationSource::Nominal(size)
            | PopulationSource::Current(size) => size,
            PopulationSource::Present => present,
            PopulationSource::Voting => voting,
        }
    }

    pub fn level_tag(self) -> &'static str {
        match self {
            PopulationSource::Size(_) => "explicit",
            PopulationSource::Nominal(_) => "p1",
            PopulationSource::Current(_) => "p2",
            PopulationSource::Present => "p3",
            PopulationSource::Voting => "p4",
        }
    }
}

/// A policy as assembled from config file and flags; fields stay optional
/// until a command states what it needs.
#[derive(Debug, Clone, Default)]
pub struct PolicyConfig {
    pub quorum: Option<QuorumSpec>,
    pub population: Option<PopulationSource>,
    pub threshold: Option<ThresholdSpec>,
    pub confidence: Option<f64>,
    pub boycott_floor: Option<Rational>,
}

impl PolicyConfig {
    /// Field-by-field overlay; `self` wins where both are set.
    pub fn or(self, fallback: PolicyConfig) -> PolicyConfig {
        PolicyConfig {
            quorum: self.quorum.or(fallback.quorum),
            population: self.population.or(fallback.population),
            threshold: self.threshold.or(fallback.threshold),
            confidence: self.confidence.or(fallback.confidence),
            boycott_floor: self.boycott_floor.or(fallback.boycott_floor),
        }
    }

    pub fn require_quorum(&self) -> Result<QuorumSpec, CliError> {
        self.quorum.ok_or_else(|| {
            CliError::Usage("no quorum given: use --quorum or a [quorum] config section".into())
        })
    }

    pub fn require_threshold(&self) -> Result<ThresholdSpec, CliError> {
        self.threshold.ok_or_else(|| {
            CliError::Usage(
                "no threshold given: use --threshold or a [threshold] config section".into(),
            )
        })
    }

    pub fn require_population(&self) -> Result<PopulationSource, CliError> {
        self.population.ok_or_else(|| {
            CliError::Usage(
                "no population given: use --population or a [population] config section".into(),
            )
        })
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    population: Option<PopulationSection>,
    quorum: Option<QuorumSection>,
    threshold: Option<ThresholdSection>,
    uncertainty: Option<UncertaintySection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PopulationSection {
    level: Option<String>,
    nominal: Option<u64>,
    current: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct QuorumSection {
    #[serde(rename = "type")]
    quorum_type: String,
    constant: Option<u64>,
    proportion: Option<String>,
    of: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ThresholdSection {
    family: String,
    value: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct UncertaintySection {
    confidence: Option<f64>,
    boycott_floor: Option<String>,
}

/// Parse and validate a TOML policy document.
pub fn parse_policy(text: &str) -> Result<PolicyConfig, CliError> {
    let file: ConfigFile =
        toml::from_str(text).map_err(|e| CliError::Data(format!("config: {e}")))?;

    let mut policy = PolicyConfig::default();

    let (nominal, current) = match &file.population {
        Some(section) => (section.nominal, section.current),
        None => (None, None),
    };

    if let Some(section) = &file.population {
        if let Some(level) = &section.level {
            policy.population = Some(match level.as_str() {
                "p1" => PopulationSource::Nominal(nominal.ok_or_else(|| {
                    CliError::Data("config: population level p1 needs the nominal body size".into())
                })?),
                "p2" => PopulationSource::Current(current.ok_or_else(|| {
                    CliError::Data("config: population level p2 needs the current body size".into())
                })?),
                "p3" => PopulationSource::Present,
                "p4" => PopulationSource::Voting,
                other => {
                    return Err(CliError::Data(format!(
                        "config: unknown population level {other:?} (expected p1..p4)"
                    )))
                }
            });
        }
    }

    if let Some(section) = &file.quorum {
        policy.quorum = Some(resolve_quorum(section, nominal, current)?);
    }

    if let Some(section) = &file.threshold {
        policy.threshold = Some(parse_threshold_parts(
            &section.family,
            section.value.as_deref(),
        )?);
    }

    if let Some(section) = &file.uncertainty {
        if let Some(confidence) = section.confidence {
            if !(confidence > 0.0 && confidence < 1.0) {
                return Err(CliError::Data(format!(
                    "config: confidence must be strictly between 0 and 1, got {confidence}"
                )));
            }
            policy.confidence = Some(confidence);
        }
        if let Some(floor) = &section.boycott_floor {
            let floor = parse_rational(floor).map_err(CliError::Data)?;
            if floor > Rational::from_integer(1) {
                return Err(CliError::Data(format!(
                    "config: boycott floor must be at most 1, got {floor}"
                )));
            }
            policy.boycott_floor = Some(floor);
        }
    }

    Ok(policy)
}

/// Reduce a configured quorum to a concrete spec, applying the validity
/// matrix for population/quorum combinations.
fn resolve_quorum(
    section: &QuorumSection,
    nominal: Option<u64>,
    current: Option<u64>,
) -> Result<QuorumSpec, CliError> {
    let wants_present = match section.quorum_type.as_str() {
        "present" => true,
        "voting" => false,
        other => {
            return Err(CliError::Data(format!(
                "config: unknown quorum type {other:?} (expected \"present\" or \"voting\")"
            )))
        }
    };

    match (&section.constant, &section.proportion) {
        (Some(_), Some(_)) => Err(CliError::Data(
            "config: quorum takes either a constant or a proportion, not both".into(),
        )),
        (None, None) => Err(CliError::Data(
            "config: quorum needs a constant or a proportion".into(),
        )),
        (Some(q), None) => {
            let q = *q;
            let spec = if wants_present {
                QuorumSpec::NumPresent(q)
            } else {
                QuorumSpec::NumVoting(q)
            };
            spec.validate().map_err(|e| CliError::Data(e.to_string()))?;
            Ok(spec)
        }
        (None, Some(proportion)) => {
            let ratio = parse_rational(proportion).map_err(CliError::Data)?;
            if ratio == Rational::from_integer(0) || ratio > Rational::from_integer(1) {
                return Err(CliError::Data(format!(
                    "config: quorum proportion must satisfy 0 < r <= 1, got {ratio}"
                )));
            }
            let of = section.of.as_deref().ok_or_else(|| {
                CliError::Data("config: a quorum proportion needs `of` (p1, p2, or p3)".into())
            })?;
            match (of, wants_present) {
                ("p1", _) => {
                    let size = nominal.ok_or_else(|| {
                        CliError::Data(
                            "config: a quorum proportion of p1 needs the nominal body size".into(),
                        )
                    })?;
                    constant_quorum(ratio, size, wants_present)
                }
                ("p2", _) => {
                    let size = current.ok_or_else(|| {
                        CliError::Data(
                            "config: a quorum proportion of p2 needs the current body size".into(),
                        )
                    })?;
                    constant_quorum(ratio, size, wants_present)
                }
                ("p3", false) => Ok(QuorumSpec::ProportionVoting(ratio)),
                ("p3", true) => Err(CliError::Data(
                    "config: invalid quorum: a minimum presence cannot be a proportion of \
                     the presence it is checking"
                        .into(),
                )),
                ("p4", true) => Err(CliError::Data(
                    "config: invalid quorum: a minimum presence cannot be a proportion of \
                     the non-abstaining count, which is only known after the vote"
                        .into(),
                )),
                ("p4", false) => Err(CliError::Data(
                    "config: invalid quorum: a minimum non-abstaining count cannot be a \
                     proportion of itself"
                        .into(),
                )),
                (other, _) => Err(CliError::Data(format!(
                    "config: unknown quorum proportion basis {other:?} (expected p1..p4)"
                ))),
            }
        }
    }
}

/// `ceil(ratio * size)` as a constant quorum of the requested type.
fn constant_quorum(
    ratio: Rational,
    size: u64,
    wants_present: bool,
) -> Result<QuorumSpec, CliError> {
    let num = u128::from(*ratio.numer());
    let den = u128::from(*ratio.denom());
    let count = (num * u128::from(size)).div_ceil(den);
    let count = u64::try_from(count)
        .map_err(|_| CliError::Data("config: quorum proportion overflows".into()))?;
    let spec = if wants_present {
        QuorumSpec::NumPresent(count)
    } else {
        QuorumSpec::NumVoting(count)
    };
    spec.validate().map_err(|e| CliError::Data(e.to_string()))?;
    Ok(spec)
}

/// Parse `"num/den"` or a bare integer.
pub fn parse_rational(text: &str) -> Result<Rational, String> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((num, den)) => (num.trim(), den.trim()),
        None => (text, "1"),
    };
    let num: u64 = num
        .parse()
        .map_err(|_| format!("cannot parse {text:?} as a rational"))?;
    let den: u64 = den
        .parse()
        .map_err(|_| format!("cannot parse {text:?} as a rational"))?;
    if den == 0 {
        return Err(format!("rational {text:?} has a zero denominator"));
    }
    Ok(Rational::new(num, den))
}

fn parse_threshold_parts(family: &str, value: Option<&str>) -> Result<ThresholdSpec, CliError> {
    let spec = match family {
        "majority" => ThresholdSpec::Majority,
        "unanimity" => ThresholdSpec::Unanimity,
        "supermajority" => {
            let value = value.ok_or_else(|| {
                CliError::Data("a supermajority threshold needs a value, e.g. 2/3".into())
            })?;
            ThresholdSpec::Supermajority(parse_rational(value).map_err(CliError::Data)?)
        }
        "near-unanimity" => {
            let value = value.ok_or_else(|| {
                CliError::Data("a near-unanimity threshold needs a tolerated shortfall".into())
            })?;
            let shortfall: u64 = value.trim().parse().map_err(|_| {
                CliError::Data(format!(
                    "cannot parse {value:?} as a near-unanimity shortfall"
                ))
            })?;
            ThresholdSpec::NearUnanimity(shortfall)
        }
        other => {
            return Err(CliError::Data(format!(
                "unknown threshold family {other:?} (expected majority, supermajority, \
                 near-unanimity, or unanimity)"
            )))
        }
    };
    spec.validate().map_err(|e| CliError::Data(e.to_string()))?;
    Ok(spec)
}

/// Parse a `--threshold` flag: `majority`, `supermajority:2/3`,
/// `near-unanimity:2`, or `unanimity`.
pub fn parse_threshold_flag(text: &str) -> Result<ThresholdSpec, CliError> {
    let (family, value) = match text.split_once(':') {
        Some((family, value)) => (family, Some(value)),
        None => (text, None),
    };
    parse_threshold_parts(family, value).map_err(CliError::into_usage)
}

/// Parse a `--quorum` flag: `present:N`, `voting:N`, or
/// `proportion-voting:R`.
pub fn parse_quorum_flag(text: &str) -> Result<QuorumSpec, CliError> {
    let (kind, value) = text.split_once(':').ok_or_else(|| {
        CliError::Usage(format!(
            "cannot parse quorum {text:?}: expected present:N, voting:N, or proportion-voting:R"
        ))
    })?;
    let spec = match kind {
        "present" => QuorumSpec::NumPresent(
            value
                .parse()
                .map_err(|_| CliError::Usage(format!("cannot parse quorum count {value:?}")))?,
        ),
        "voting" => QuorumSpec::NumVoting(
            value
                .parse()
                .map_err(|_| CliError::Usage(format!("cannot parse quorum count {value:?}")))?,
        ),
        "proportion-voting" => {
            QuorumSpec::ProportionVoting(parse_rational(value).map_err(CliError::Usage)?)
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown quorum kind {other:?} (expected present, voting, or proportion-voting)"
            )))
        }
    };
    spec.validate()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(spec)
}

/// Parse a `--population` flag: a size, `present`, or `voting`.
pub fn parse_population_flag(text: &str) -> Result<PopulationSource, CliError> {
    match text {
        "present" => Ok(PopulationSource::Present),
        "voting" => Ok(PopulationSource::Voting),
        number => number.parse().map(PopulationSource::Size).map_err(|_| {
            CliError::Usage(format!(
                "cannot parse population {text:?}: expected a size, \"present\", or \"voting\""
            ))
        }),
    }
}

/// Render a quorum spec the way the flags spell it.
pub fn quorum_spec_text(spec: QuorumSpec) -> String {
    match spec {
        QuorumSpec::NumPresent(q) => format!("present:{q}"),
        QuorumSpec::NumVoting(q) => format!("voting:{q}"),
        QuorumSpec::ProportionVoting(r) => {
            format!("proportion-voting:{}/{}", r.numer(), r.denom())
        }
    }
}

/// Render a threshold spec the way the flags spell it.
pub fn threshold_spec_text(spec: ThresholdSpec) -> String {
    match spec {
        ThresholdSpec::Majority => "majority".into(),
        ThresholdSpec::Supermajority(t) => format!("supermajority:{}/{}", t.numer(), t.denom()),
        ThresholdSpec::NearUnanimity(c) => format!("near-unanimity:{c}"),
        ThresholdSpec::Unanimity => "unanimity".into(),
    }
}

/// The acceptance side of a threshold as a proportion of the population,
/// for interval classification.
pub fn threshold_proportion(spec: ThresholdSpec, population: u64) -> Option<Rational> {
    match spec {
        ThresholdSpec::Majority => Some(Rational::new(1, 2)),
        ThresholdSpec::Supermajority(t) => Some(t),
        ThresholdSpec::NearUnanimity(c) => {
            (population > 0 && c < population).then(|| Rational::new(population - c, population))
        }
        ThresholdSpec::Unanimity => Some(Rational::from_integer(1)),
    }
}
