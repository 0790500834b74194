//! Corpus ingestion, filtering, and holdout splitting.
//!
//! A corpus is a UTF-8 file with one JSON object per line, one line per
//! delivery. Malformed lines are counted and reported with their line
//! numbers, never silently dropped; the caller decides whether the reject
//! rate is fatal.

pub mod synthetic;

use std::collections::BTreeMap;
use std::io::BufRead;

use chrono::{Days, NaiveDate};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::{self, Execution};
use crate::lexicon::Role;

/// Five hand-checkable deliveries used throughout the documentation and
/// tests; the first line is the worked single-delivery example.
pub const SAMPLE_CORPUS_JSONL: &str = include_str!("../../assets/sample_corpus.jsonl");

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("corpus stream is unreadable: {0}")]
    Io(#[from] std::io::Error),
    #[error("unsupported corpus schema version `{0}` (supported: v1)")]
    UnsupportedSchema(String),
    #[error("corpus contains no records")]
    EmptyCorpus,
    #[error(
        "reject rate {rate:.1}% exceeds threshold {threshold:.1}% ({rejected} of {total} lines)"
    )]
    RejectRateExceeded {
        rate: f64,
        threshold: f64,
        rejected: usize,
        total: usize,
    },
    #[error("filter has an empty player name")]
    EmptyPlayer,
    #[error("filter date range has start {start} after end {end}")]
    InvalidDateRange { start: NaiveDate, end: NaiveDate },
    #[error("time window `{0}` needs a `session` field on every record in scope")]
    SessionFieldMissing(WindowKind),
    #[error("holdout window must be at least 1 day")]
    InvalidWindowDays,
    #[error("synthetic spec invalid: {0}")]
    InvalidSyntheticSpec(String),
}

/// One delivery: the structured head plus the free-text body.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CommentaryRecord {
    pub match_id: String,
    pub series_id: String,
    pub innings: u8,
    pub over: u32,
    #[serde(rename = "ball")]
    pub ball_in_over: u8,
    pub date: NaiveDate,
    pub bowler: String,
    pub batsman: String,
    #[serde(rename = "outcome")]
    pub outcome_token: String,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub session: Option<u8>,
}

impl CommentaryRecord {
    fn validate(&self) -> Result<(), String> {
        if !(1..=4).contains(&self.innings) {
            return Err(format!("innings {} outside 1..4", self.innings));
        }
        if self.ball_in_over == 0 {
            return Err("ball must be at least 1".to_string());
        }
        if self.text.chars().count() > 2000 {
            return Err("text exceeds 2000 characters".to_string());
        }
        let bowler = normalize_name(&self.bowler);
        let batsman = normalize_name(&self.batsman);
        if bowler.is_empty() || batsman.is_empty() {
            return Err("bowler and batsman must be non-empty".to_string());
        }
        if bowler == batsman {
            return Err(format!("bowler and batsman are both `{}`", self.bowler));
        }
        Ok(())
    }
}

/// Names are matched case-insensitively after trimming; no fuzzy matching.
pub fn normalize_name(name: &str) -> String {
    name.trim().to_lowercase()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemaVersion {
    V1,
}

impl SchemaVersion {
    pub fn parse(tag: &str) -> Result<Self, CorpusError> {
        match tag {
            "v1" | "V1" | "1" => Ok(SchemaVersion::V1),
            other => Err(CorpusError::UnsupportedSchema(other.to_string())),
        }
    }
}

/// A line that failed schema validation, with the 1-based line number.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RejectedLine {
    pub line: usize,
    pub reason: String,
}

/// Counts and reject details from one ingestion run.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct IngestReport {
    pub lines_read: usize,
    pub records_ingested: usize,
    pub blank_lines: usize,
    pub rejects: Vec<RejectedLine>,
}

impl IngestReport {
    /// Rejects as a fraction of non-blank lines.
    pub fn reject_rate(&self) -> f64 {
        let considered = self.lines_read - self.blank_lines;
        if considered == 0 {
            0.0
        } else {
            self.rejects.len() as f64 / considered as f64
        }
    }

    /// Promote the report to a fatal error when the reject rate is above
    /// `threshold` (a fraction, default 0.1 at the CLI).
    pub fn ensure_reject_rate(&self, threshold: f64) -> Result<(), CorpusError> {
        let rate = self.reject_rate();
        if rate > threshold {
            Err(CorpusError::RejectRateExceeded {
                rate: 100.0 * rate,
                threshold: 100.0 * threshold,
                rejected: self.rejects.len(),
                total: self.lines_read - self.blank_lines,
            })
        } else {
            Ok(())
        }
    }

    /// Plain-text summary companion to the JSON form.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("lines read:    {}\n", self.lines_read));
        out.push_str(&format!("records:       {}\n", self.records_ingested));
        out.push_str(&format!("blank lines:   {}\n", self.blank_lines));
        out.push_str(&format!("rejects:       {}\n", self.rejects.len()));
        out.push_str(&format!(
            "reject rate:   {:.2}%\n",
            100.0 * self.reject_rate()
        ));
        for reject in &self.rejects {
            out.push_str(&format!("  line {}: {}\n", reject.line, reject.reason));
        }
        out
    }
}

/// Immutable record collection with per-player, per-role indices.
#[derive(Debug, Clone)]
pub struct CorpusStore {
    records: Vec<CommentaryRecord>,
    by_batsman: BTreeMap<String, Vec<usize>>,
    by_bowler: BTreeMap<String, Vec<usize>>,
    report: IngestReport,
}

impl CorpusStore {
    pub fn from_records(records: Vec<CommentaryRecord>) -> Self {
        let report = IngestReport {
            lines_read: records.len(),
            records_ingested: records.len(),
            ..IngestReport::default()
        };
        Self::build(records, report)
    }

    fn build(records: Vec<CommentaryRecord>, report: IngestReport) -> Self {
        let mut by_batsman: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        let mut by_bowler: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        for (idx, record) in records.iter().enumerate() {
            by_batsman
                .entry(normalize_name(&record.batsman))
                .or_default()
                .push(idx);
            by_bowler
                .entry(normalize_name(&record.bowler))
                .or_default()
                .push(idx);
        }
        Self {
            records,
            by_batsman,
            by_bowler,
            report,
        }
    }

    pub fn records(&self) -> &[CommentaryRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn report(&self) -> &IngestReport {
        &self.report
    }

    /// Normalized names of every player seen in `role`, sorted.
    pub fn players(&self, role: Role) -> Vec<String> {
        let index = match role {
            Role::Batting => &self.by_batsman,
            Role::Bowling => &self.by_bowler,
        };
        index.keys().cloned().collect()
    }

    /// Original spellings (first occurrence) of every player seen in
    /// `role`, ordered by normalized name.
    pub fn player_names(&self, role: Role) -> Vec<String> {
        let index = match role {
            Role::Batting => &self.by_batsman,
            Role::Bowling => &self.by_bowler,
        };
        index
            .values()
            .map(|indices| {
                let record = &self.records[indices[0]];
                match role {
                    Role::Batting => record.batsman.clone(),
                    Role::Bowling => record.bowler.clone(),
                }
            })
            .collect()
    }

    pub fn has_player(&self, name: &str, role: Role) -> bool {
        let key = normalize_name(name);
        match role {
            Role::Batting => self.by_batsman.contains_key(&key),
            Role::Bowling => self.by_bowler.contains_key(&key),
        }
    }

    /// Serialize back to the one-object-per-line corpus format.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for record in &self.records {
            out.push_str(&serde_json::to_string(record).expect("record serializes"));
            out.push('\n');
        }
        out
    }
}

/// Parse and index a corpus stream, using the default execution mode.
pub fn ingest<R: BufRead>(reader: R, schema: SchemaVersion) -> Result<CorpusStore, CorpusError> {
    ingest_with(reader, schema, Execution::default())
}

/// Parse and index a corpus stream.
///
/// Lines may be parsed in parallel; results are merged in line order so the
/// store is identical to sequential ingestion.
pub fn ingest_with<R: BufRead>(
    reader: R,
    schema: SchemaVersion,
    exec: Execution,
) -> Result<CorpusStore, CorpusError> {
    let SchemaVersion::V1 = schema;
    let lines: Vec<String> = reader.lines().collect::<Result<_, _>>()?;
    Ok(ingest_lines(&lines, exec))
}

fn ingest_lines(lines: &[String], exec: Execution) -> CorpusStore {
    enum Parsed {
        Record(Box<CommentaryRecord>),
        Blank,
        Reject(String),
    }

    let parsed = exec::map_slice(exec, lines, |line| {
        if line.trim().is_empty() {
            return Parsed::Blank;
        }
        match serde_json::from_str::<CommentaryRecord>(line) {
            Ok(record) => match record.validate() {
                Ok(()) => Parsed::Record(Box::new(record)),
                Err(reason) => Parsed::Reject(reason),
            },
            Err(err) => Parsed::Reject(err.to_string()),
        }
    });

    let mut report = IngestReport {
        lines_read: lines.len(),
        ..IngestReport::default()
    };
    let mut records = Vec::new();
    for (idx, item) in parsed.into_iter().enumerate() {
        match item {
            Parsed::Record(record) => records.push(*record),
            Parsed::Blank => report.blank_lines += 1,
            Parsed::Reject(reason) => report.rejects.push(RejectedLine {
                line: idx + 1,
                reason,
            }),
        }
    }
    report.records_ingested = records.len();
    CorpusStore::build(records, report)
}

/// The kinds of time window a filter tuple can carry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WindowKind {
    Session,
    Day,
    Innings,
    Match,
    Series,
    Career,
}

impl std::fmt::Display for WindowKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            WindowKind::Session => "session",
            WindowKind::Day => "day",
            WindowKind::Innings => "innings",
            WindowKind::Match => "match",
            WindowKind::Series => "series",
            WindowKind::Career => "career",
        };
        f.write_str(name)
    }
}

impl WindowKind {
    pub fn parse(tag: &str) -> Option<Self> {
        match tag.to_ascii_lowercase().as_str() {
            "session" => Some(WindowKind::Session),
            "day" => Some(WindowKind::Day),
            "innings" => Some(WindowKind::Innings),
            "match" => Some(WindowKind::Match),
            "series" => Some(WindowKind::Series),
            "career" => Some(WindowKind::Career),
            _ => None,
        }
    }
}

/// Opponent selector: everyone, or an explicit set of names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Opponents {
    All,
    Set(Vec<String>),
}

impl Opponents {
    fn matches(&self, name: &str) -> bool {
        match self {
            Opponents::All => true,
            Opponents::Set(names) => {
                let key = normalize_name(name);
                names.iter().any(|n| normalize_name(n) == key)
            }
        }
    }
}

impl Serialize for Opponents {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Opponents::All => serializer.serialize_str("ALL"),
            Opponents::Set(names) => names.serialize(serializer),
        }
    }
}

impl<'de> Deserialize<'de> for Opponents {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Tag(String),
            Set(Vec<String>),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Tag(tag) if tag.eq_ignore_ascii_case("all") => Ok(Opponents::All),
            Raw::Tag(other) => Err(serde::de::Error::custom(format!(
                "expected \"ALL\" or a list of names, found \"{other}\""
            ))),
            Raw::Set(names) => Ok(Opponents::Set(names)),
        }
    }
}

/// Explicit inclusive date range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DateRange {
    pub start: NaiveDate,
    pub end: NaiveDate,
}

/// Selector for the commentary subset a single analysis runs on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterTuple {
    pub player: String,
    pub opponents: Opponents,
    pub window: WindowKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub date_range: Option<DateRange>,
    #[serde(rename = "type")]
    pub role: Role,
}

impl FilterTuple {
    /// Career filter against all opponents, the most common case.
    pub fn career(player: impl Into<String>, role: Role) -> Self {
        Self {
            player: player.into(),
            opponents: Opponents::All,
            window: WindowKind::Career,
            date_range: None,
            role,
        }
    }

    pub fn validate(&self) -> Result<(), CorpusError> {
        if normalize_name(&self.player).is_empty() {
            return Err(CorpusError::EmptyPlayer);
        }
        if let Some(range) = &self.date_range {
            if range.start > range.end {
                return Err(CorpusError::InvalidDateRange {
                    start: range.start,
                    end: range.end,
                });
            }
        }
        Ok(())
    }
}

/// Filtered records plus a flag for "player never appeared at all".
#[derive(Debug, Clone)]
pub struct FilterOutcome {
    pub records: Vec<CommentaryRecord>,
    pub player_known: bool,
}

/// Select the records a filter tuple describes, preserving input order.
pub fn filter_records(
    store: &CorpusStore,
    filter: &FilterTuple,
) -> Result<FilterOutcome, CorpusError> {
    filter.validate()?;
    let player_known = store.has_player(&filter.player, filter.role);
    let records = filter_sequence(store.records(), filter)?;
    Ok(FilterOutcome {
        records,
        player_known,
    })
}

/// Same selection applied to a bare record sequence.
pub fn filter_sequence(
    records: &[CommentaryRecord],
    filter: &FilterTuple,
) -> Result<Vec<CommentaryRecord>, CorpusError> {
    filter.validate()?;
    let player = normalize_name(&filter.player);
    let mut selected: Vec<&CommentaryRecord> = records
        .iter()
        .filter(|record| {
            let (own, opponent) = match filter.role {
                Role::Batting => (&record.batsman, &record.bowler),
                Role::Bowling => (&record.bowler, &record.batsman),
            };
            normalize_name(own) == player && filter.opponents.matches(opponent)
        })
        .collect();

    if let Some(range) = &filter.date_range {
        selected.retain(|record| record.date >= range.start && record.date <= range.end);
    }

    selected = apply_window(selected, filter.window)?;
    Ok(selected.into_iter().cloned().collect())
}

/// Restrict to the most recent unit of play of the given kind.
fn apply_window(
    records: Vec<&CommentaryRecord>,
    window: WindowKind,
) -> Result<Vec<&CommentaryRecord>, CorpusError> {
    if records.is_empty() || window == WindowKind::Career {
        return Ok(records);
    }
    if matches!(window, WindowKind::Session | WindowKind::Day)
        && records.iter().any(|record| record.session.is_none())
    {
        return Err(CorpusError::SessionFieldMissing(window));
    }

    let latest = records
        .iter()
        .enumerate()
        .max_by_key(|(idx, record)| (record.date, record.session, *idx))
        .map(|(_, record)| *record)
        .expect("non-empty");

    let keep: Vec<&CommentaryRecord> = records
        .iter()
        .copied()
        .filter(|record| match window {
            WindowKind::Career => true,
            WindowKind::Series => record.series_id == latest.series_id,
            WindowKind::Match => record.match_id == latest.match_id,
            WindowKind::Innings => {
                record.match_id == latest.match_id && record.innings == latest.innings
            }
            WindowKind::Day => record.date == latest.date,
            WindowKind::Session => record.date == latest.date && record.session == latest.session,
        })
        .collect();
    Ok(keep)
}

/// Split records into train (older) and test (the trailing window).
///
/// Test takes everything dated strictly after `max_date - window_days`; the
/// two halves partition the input and keep its order.
pub fn holdout_split(
    records: &[CommentaryRecord],
    window_days: u32,
) -> Result<(Vec<CommentaryRecord>, Vec<CommentaryRecord>), CorpusError> {
    if window_days == 0 {
        return Err(CorpusError::InvalidWindowDays);
    }
    let Some(max_date) = records.iter().map(|r| r.date).max() else {
        return Ok((Vec::new(), Vec::new()));
    };
    let cutoff = max_date - Days::new(u64::from(window_days));
    let mut train = Vec::new();
    let mut test = Vec::new();
    for record in records {
        if record.date > cutoff {
            test.push(record.clone());
        } else {
            train.push(record.clone());
        }
    }
    Ok((train, test))
}
