//! Ballot file parsing.
//!
//! Files are UTF-8 text, one ballot per line. Lines starting with `#` are
//! comments. An optional header line `choices: A;B;C` names the choices so
//! ballots can refer to them by name instead of index; without it, ballots
//! must use zero-based indices and the number of choices must come from
//! `--choices`.
//!
//! Per kind:
//! * yes/no — one of `y`, `yes`, `n`, `no`, `abstain` per line (case
//!   insensitive); a blank line is an abstention.
//! * choice — selections separated by `;`; a blank line is an abstention.
//! * ranked — choices separated by `>`, most preferred first; a blank line
//!   is an abstention.
//! * profile — `ranking;cutoff`, e.g. `A>B>C;2`: a full ranking and how
//!   many of its top entries the voter approves.
//!
//! A malformed row aborts in strict mode (the default) and is spoiled and
//! counted in lenient mode. Overvotes are not malformed: they are valid
//! rows that the tabulation spoils.

use consensus_core::{ChoiceBallot, RankedBallot, Voter, YesNoBallot};

use crate::CliError;

/// Ballots parsed from one file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedBallots<B> {
    pub ballots: Vec<B>,
    /// Malformed rows spoiled in lenient mode. They count toward the number
    /// present but never contribute votes.
    pub spoiled_rows: u64,
    /// Choice names from the header, if any.
    pub names: Option<Vec<String>>,
}

struct Rows<'a> {
    names: Option<Vec<String>>,
    /// (1-based line number, content)
    rows: Vec<(usize, &'a str)>,
}

fn split_rows(text: &str) -> Result<Rows<'_>, CliError> {
    let mut names = None;
    let mut rows = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.starts_with('#') {
            continue;
        }
        if let Some(list) = line.strip_prefix("choices:") {
            if names.is_some() {
                return Err(CliError::Data(format!(
                    "line {}: duplicate choices header",
                    idx + 1
                )));
            }
            if !rows.is_empty() {
                return Err(CliError::Data(format!(
                    "line {}: the choices header must come before any ballot",
                    idx + 1
                )));
            }
            let list: Vec<String> = list
                .split(';')
                .map(|name| name.trim().to_string())
                .collect();
            if list.iter().any(String::is_empty) {
                return Err(CliError::Data(format!(
                    "line {}: empty choice name in header",
                    idx + 1
                )));
            }
            for (i, name) in list.iter().enumerate() {
                // names must survive the ballot-row separators
                if name.contains(['>', ',']) {
                    return Err(CliError::Data(format!(
                        "line {}: choice name {name:?} may not contain '>' or ','",
                        idx + 1
                    )));
                }
                if list[..i].contains(name) {
                    return Err(CliError::Data(format!(
                        "line {}: duplicate choice name {name:?} in header",
                        idx + 1
                    )));
                }
            }
            names = Some(list);
            continue;
        }
        rows.push((idx + 1, line));
    }
    Ok(Rows { names, rows })
}

/// Number of choices, reconciling the header with `--choices`.
fn contest_size(
    names: &Option<Vec<String>>,
    choices_flag: Option<usize>,
) -> Result<usize, CliError> {
    match (names, choices_flag) {
        (Some(names), Some(m)) if names.len() != m => Err(CliError::Data(format!(
            "--choices {m} contradicts the header, which names {} choices",
            names.len()
        ))),
        (Some(names), _) => Ok(names.len()),
        (None, Some(m)) => Ok(m),
        (None, None) => Err(CliError::Usage(
            "number of choices unknown: add a `choices:` header to the ballot file or pass \
             --choices"
                .into(),
        )),
    }
}

fn resolve_entry(
    entry: &str,
    names: &Option<Vec<String>>,
    m: usize,
    line: usize,
) -> Result<usize, String> {
    if let Some(names) = names {
        if let Some(index) = names.iter().position(|name| name == entry) {
            return Ok(index);
        }
    }
    match entry.parse::<usize>() {
        Ok(index) if index < m => Ok(index),
        Ok(index) => Err(format!(
            "line {line}: choice index {index} out of range for {m} choices"
        )),
        Err(_) => Err(format!("line {line}: unknown choice {entry:?}")),
    }
}

/// Run a per-row parser with strict/lenient malformed-row handling.
fn parse_each<'a, B>(
    rows: &[(usize, &'a str)],
    lenient: bool,
    mut parse: impl FnMut(usize, &'a str) -> Result<B, String>,
) -> Result<(Vec<B>, u64), CliError> {
    let mut ballots = Vec::with_capacity(rows.len());
    let mut spoiled_rows = 0;
    for &(line, row) in rows {
        match parse(line, row) {
            Ok(ballot) => ballots.push(ballot),
            Err(reason) if lenient => {
                eprintln!("spoiling malformed ballot: {reason}");
                spoiled_rows += 1;
            }
            Err(reason) => return Err(CliError::Data(reason)),
        }
    }
    Ok((ballots, spoiled_rows))
}

/// Parse a yes/no ballot file.
pub fn parse_yes_no(text: &str, lenient: bool) -> Result<ParsedBallots<YesNoBallot>, CliError> {
    let rows = split_rows(text)?;
    if rows.names.is_some() {
        return Err(CliError::Data(
            "a yes/no ballot file does not take a choices header".into(),
        ));
    }
    let (ballots, spoiled_rows) = parse_each(&rows.rows, lenient, |line, row| {
        match row.to_ascii_lowercase().as_str() {
            "y" | "yes" => Ok(YesNoBallot::Yes),
            "n" | "no" => Ok(YesNoBallot::No),
            "" | "abstain" => Ok(YesNoBallot::Abstain),
            other => Err(format!(
                "line {line}: unknown mark {other:?} (expected y, n, or abstain)"
            )),
        }
    })?;
    Ok(ParsedBallots {
        ballots,
        spoiled_rows,
        names: None,
    })
}

/// Parse a choice ballot file for a contest with `m` choices.
pub fn parse_choices(
    text: &str,
    choices_flag: Option<usize>,
    lenient: bool,
) -> Result<(ParsedBallots<ChoiceBallot>, usize), CliError> {
    let rows = split_rows(text)?;
    let m = contest_size(&rows.names, choices_flag)?;
    let names = rows.names;
    let (ballots, spoiled_rows) = parse_each(&rows.rows, lenient, |line, row| {
        if row.is_empty() {
            return Ok(ChoiceBallot::default());
        }
        let mut selections = std::collections::BTreeSet::new();
        for entry in row.split(';') {
            let index = resolve_entry(entry.trim(), &names, m, line)?;
            if !selections.insert(index) {
                return Err(format!("line {line}: duplicate selection {entry:?}"));
            }
        }
        Ok(ChoiceBallot { selections })
    })?;
    Ok((
        ParsedBallots {
            ballots,
            spoiled_rows,
            names,
        },
        m,
    ))
}

/// Parse a ranked ballot file for a contest with `m` choices.
pub fn parse_ranked(
    text: &str,
    choices_flag: Option<usize>,
    lenient: bool,
) -> Result<(ParsedBallots<RankedBallot>, usize), CliError> {
    let rows = split_rows(text)?;
    let m = contest_size(&rows.names, choices_flag)?;
    let names = rows.names;
    let (ballots, spoiled_rows) = parse_each(&rows.rows, lenient, |line, row| {
        parse_ranking(row, &names, m, line)
    })?;
    Ok((
        ParsedBallots {
            ballots,
            spoiled_rows,
            names,
        },
        m,
    ))
}

fn parse_ranking(
    row: &str,
    names: &Option<Vec<String>>,
    m: usize,
    line: usize,
) -> Result<RankedBallot, String> {
    if row.is_empty() {
        return Ok(RankedBallot::default());
    }
    let mut ranking = Vec::new();
    for entry in row.split('>') {
        let index = resolve_entry(entry.trim(), names, m, line)?;
        if ranking.contains(&index) {
            return Err(format!(
                "line {line}: choice {entry:?} ranked more than once"
            ));
        }
        ranking.push(index);
    }
    Ok(RankedBallot { ranking })
}

/// Voters parsed from an approval profile file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedProfile {
    pub voters: Vec<Voter>,
    pub names: Option<Vec<String>>,
    pub num_options: usize,
}

/// Parse an approval profile file: `ranking;cutoff` per voter. Always
/// strict — a voter model with spoiled voters is not meaningful.
pub fn parse_profile(text: &str, choices_flag: Option<usize>) -> Result<ParsedProfile, CliError> {
    let rows = split_rows(text)?;
    let m = contest_size(&rows.names, choices_flag)?;
    let names = rows.names;
    let mut voters = Vec::with_capacity(rows.rows.len());
    for &(line, row) in &rows.rows {
        let (ranking_part, cutoff_part) = row.rsplit_once(';').ok_or_else(|| {
            CliError::Data(format!(
                "line {line}: expected `ranking;cutoff`, e.g. A>B>C;2"
            ))
        })?;
        let ranking =
            parse_ranking(ranking_part.trim(), &names, m, line).map_err(CliError::Data)?;
        let cutoff: usize = cutoff_part.trim().parse().map_err(|_| {
            CliError::Data(format!(
                "line {line}: cannot parse approval cutoff {cutoff_part:?}"
            ))
        })?;
        voters.push(Voter::new(ranking.ranking, cutoff));
    }
    Ok(ParsedProfile {
        voters,
        names,
        num_options: m,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn yes_no_tokens() {
        let parsed = parse_yes_no("y\nn\nabstain\n", false).unwrap();
        assert_eq!(
            parsed.ballots,
            vec![YesNoBallot::Yes, YesNoBallot::No, YesNoBallot::Abstain]
        );
        assert_eq!(parsed.spoiled_rows, 0);
    }

    #[test]
    fn yes_no_strict_rejects_unknown_marks() {
        let err = parse_yes_no("y\nmaybe\n", false).unwrap_err();
        assert!(matches!(err, CliError::Data(ref msg) if msg.contains("line 2")));
    }

    #[test]
    fn yes_no_lenient_spoils_unknown_marks() {
        let parsed = parse_yes_no("y\nmaybe\nn\n", true).unwrap();
        assert_eq!(parsed.ballots.len(), 2);
        assert_eq!(parsed.spoiled_rows, 1);
    }

    #[test]
    fn ranked_header_maps_names() {
        let (parsed, m) = parse_ranked("choices: A;B;C\nA>B>C\nB>C>A\n", None, false).unwrap();
        assert_eq!(m, 3);
        assert_eq!(
            parsed.ballots,
            vec![RankedBallot::new([0, 1, 2]), RankedBallot::new([1, 2, 0])]
        );
        assert_eq!(
            parsed.names,
            Some(vec!["A".to_string(), "B".to_string(), "C".to_string()])
        );
    }

    #[test]
    fn ranked_blank_line_is_abstention() {
        let (parsed, _) = parse_ranked("choices: A;B\nA>B\n\nB\n", None, false).unwrap();
        assert_eq!(parsed.ballots[1], RankedBallot::default());
        assert_eq!(parsed.ballots.len(), 3);
    }

    #[test]
    fn choice_indices_without_header_need_choices_flag() {
        assert!(matches!(
            parse_choices("0;1\n", None, false),
            Err(CliError::Usage(_))
        ));
        let (parsed, m) = parse_choices("0;1\n2\n", Some(3), false).unwrap();
        assert_eq!(m, 3);
        assert_eq!(parsed.ballots[0], ChoiceBallot::new([0, 1]));
        assert_eq!(parsed.ballots[1], ChoiceBallot::new([2]));
    }

    #[test]
    fn choice_out_of_range_reports_line() {
        let err = parse_choices("0\n5\n", Some(3), false).unwrap_err();
        assert!(matches!(err, CliError::Data(ref msg) if msg.contains("line 2")));
    }

    #[test]
    fn overvote_rows_parse_cleanly() {
        // three selections under n=2 is an overvote: the tabulation spoils
        // it, the parser does not
        let (parsed, _) = parse_choices("0;1;2\n", Some(3), false).unwrap();
        assert_eq!(parsed.ballots[0].selections.len(), 3);
    }

    #[test]
    fn header_and_flag_must_agree() {
        assert!(parse_choices("choices: A;B\nA\n", Some(3), false).is_err());
        assert!(parse_choices("choices: A;B\nA\n", Some(2), false).is_ok());
    }

    #[test]
    fn comments_and_duplicate_headers() {
        let (parsed, _) = parse_ranked("# a comment\nchoices: A;B\nA>B\n", None, false).unwrap();
        assert_eq!(parsed.ballots.len(), 1);
        assert!(parse_ranked("choices: A;B\nchoices: A;B\n", None, false).is_err());
        assert!(parse_ranked("A>B\nchoices: A;B\n", Some(2), false).is_err());
    }

    #[test]
    fn header_rejects_names_that_clash_with_separators() {
        assert!(parse_ranked("choices: A>B;C\n", None, false).is_err());
        assert!(parse_ranked("choices: A,B;C\n", None, false).is_err());
    }

    #[test]
    fn profile_rows_carry_cutoffs() {
        let profile = parse_profile("choices: X;Y;Z\nX>Y>Z;2\nZ>Y>X;1\n", None).unwrap();
        assert_eq!(profile.num_options, 3);
        assert_eq!(profile.names.unwrap()[0], "X");
        assert_eq!(profile.voters[0], Voter::new([0, 1, 2], 2));
        assert_eq!(profile.voters[1], Voter::new([2, 1, 0], 1));
    }

    #[test]
    fn profile_rejects_missing_cutoff() {
        assert!(parse_profile("choices: X;Y\nX>Y\n", None).is_err());
    }
}
