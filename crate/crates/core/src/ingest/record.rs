use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use chrono::{DateTime, NaiveDateTime, SecondsFormat, Timelike, Utc};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::IngestError;

/// Upper bound on accepted message bodies. Well above the historical
/// 140 characters so multibyte and over-long exports still parse.
pub const MAX_TEXT_BYTES: usize = 560;

const MAX_USERNAME_LEN: usize = 15;

/// One parsed message.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawRecord {
    pub id: String,
    /// Lowercased, without the leading `@`.
    pub author: String,
    pub timestamp: DateTime<Utc>,
    pub text: String,
}

#[derive(Serialize)]
struct WireOut<'a> {
    id: &'a str,
    user: &'a str,
    created_at: String,
    text: &'a str,
}

impl RawRecord {
    /// Serializes the record in the line-delimited input format.
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(&WireOut {
            id: &self.id,
            user: &self.author,
            created_at: self.timestamp.to_rfc3339_opts(SecondsFormat::Secs, true),
            text: &self.text,
        })
        .expect("record serialization is infallible")
    }
}

/// Normalizes a username: trims, drops one leading `@`, lowercases, and
/// checks it against `[a-z0-9_]{1,15}`.
pub fn normalize_username(raw: &str) -> Result<String, String> {
    let trimmed = raw.trim();
    let name = trimmed.strip_prefix('@').unwrap_or(trimmed);
    if !name.is_ascii() {
        log::warn!("rejecting non-ASCII username {name:?}");
        return Err(format!("non-ASCII username {name:?}"));
    }
    let name = name.to_ascii_lowercase();
    if name.is_empty() || name.len() > MAX_USERNAME_LEN {
        return Err(format!(
            "username {name:?} must be 1-{MAX_USERNAME_LEN} characters"
        ));
    }
    if !name.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_') {
        return Err(format!(
            "username {name:?} contains characters outside [a-z0-9_]"
        ));
    }
    Ok(name)
}

fn parse_timestamp(raw: &str) -> Result<DateTime<Utc>, String> {
    let raw = raw.trim();
    let parsed = DateTime::parse_from_rfc3339(raw)
        .map(|dt| dt.with_timezone(&Utc))
        .or_else(|_| {
            NaiveDateTime::parse_from_str(raw, "%Y-%m-%dT%H:%M:%S").map(|naive| naive.and_utc())
        })
        .map_err(|_| format!("timestamp {raw:?} is not ISO-8601"))?;
    // second precision
    Ok(parsed.with_nanosecond(0).unwrap_or(parsed))
}

fn build_record(
    line_no: usize,
    id: Option<String>,
    user: Option<&str>,
    created_at: Option<&str>,
    text: Option<&str>,
) -> Result<RawRecord, IngestError> {
    let id = id.ok_or(IngestError::MissingField {
        line_no,
        name: "id",
    })?;
    let user = user.ok_or(IngestError::MissingField {
        line_no,
        name: "user",
    })?;
    let created_at = created_at.ok_or(IngestError::MissingField {
        line_no,
        name: "created_at",
    })?;
    let text = text.ok_or(IngestError::MissingField {
        line_no,
        name: "text",
    })?;

    let id = id.trim().to_string();
    if id.is_empty() {
        return Err(IngestError::malformed(line_no, "empty id"));
    }
    let author =
        normalize_username(user).map_err(|reason| IngestError::malformed(line_no, reason))?;
    let timestamp =
        parse_timestamp(created_at).map_err(|reason| IngestError::malformed(line_no, reason))?;
    if text.len() > MAX_TEXT_BYTES {
        return Err(IngestError::malformed(
            line_no,
            format!("text is {} bytes, limit is {MAX_TEXT_BYTES}", text.len()),
        ));
    }
    Ok(RawRecord {
        id,
        author,
        timestamp,
        text: text.to_string(),
    })
}

/// Parses one line-delimited JSON record. `line_no` is 1-based and only
/// used for error reports.
pub fn parse_record(line: &str, line_no: usize) -> Result<RawRecord, IngestError> {
    let value: Value = serde_json::from_str(line)
        .map_err(|e| IngestError::malformed(line_no, format!("invalid JSON: {e}")))?;
    let obj = value
        .as_object()
        .ok_or_else(|| IngestError::malformed(line_no, "record is not a JSON object"))?;

    let id = match obj.get("id") {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) => Some(s.clone()),
        Some(Value::Number(n)) => Some(n.to_string()),
        Some(other) => {
            return Err(IngestError::malformed(
                line_no,
                format!("id has unsupported type: {other}"),
            ))
        }
    };
    let field = |name: &'static str| -> Result<Option<&str>, IngestError> {
        match obj.get(name) {
            None | Some(Value::Null) => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.as_str())),
            Some(_) => Err(IngestError::malformed(
                line_no,
                format!("`{name}` must be a string"),
            )),
        }
    };
    build_record(
        line_no,
        id,
        field("user")?,
        field("created_at")?,
        field("text")?,
    )
}

/// Supported input encodings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    JsonLines,
    /// Delimiter-separated with a header row naming `id,user,created_at,text`.
    Delimited(u8),
}

impl InputFormat {
    pub fn from_path(path: &Path) -> Self {
        match path
            .extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase)
        {
            Some(ext) if ext == "csv" => InputFormat::Delimited(b','),
            Some(ext) if ext == "tsv" => InputFormat::Delimited(b'\t'),
            _ => InputFormat::JsonLines,
        }
    }
}

/// Result of parsing a whole input: every non-blank line lands in exactly
/// one of `records` or `errors`.
#[derive(Debug, Default)]
pub struct ParsedDataset {
    pub records: Vec<RawRecord>,
    pub errors: Vec<IngestError>,
    pub lines: usize,
}

impl ParsedDataset {
    fn from_results(results: Vec<(usize, Result<RawRecord, IngestError>)>) -> Self {
        let lines = results.len();
        let mut seen = HashSet::new();
        let mut records = Vec::with_capacity(lines);
        let mut errors = Vec::new();
        for (line_no, result) in results {
            match result {
                Ok(record) if !seen.insert(record.id.clone()) => {
                    errors.push(IngestError::DuplicateId {
                        line_no,
                        id: record.id,
                    })
                }
                Ok(record) => records.push(record),
                Err(e) => errors.push(e),
            }
        }
        ParsedDataset {
            records,
            errors,
            lines,
        }
    }

    pub fn extend(&mut self, other: ParsedDataset) {
        let mut seen: HashSet<String> = self.records.iter().map(|r| r.id.clone()).collect();
        self.lines += other.lines;
        self.errors.extend(other.errors);
        for record in other.records {
            if seen.insert(record.id.clone()) {
                self.records.push(record);
            } else {
                self.errors.push(IngestError::DuplicateId {
                    line_no: 0,
                    id: record.id,
                });
            }
        }
    }
}

/// Parses line-delimited JSON. Lines are parsed in parallel; the output is
/// identical to a sequential parse. Whitespace-only lines are skipped.
pub fn parse_jsonl<R: BufRead>(reader: R) -> Result<ParsedDataset, IngestError> {
    let mut lines = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if !line.trim().is_empty() {
            lines.push((idx + 1, line));
        }
    }
    let results = lines
        .par_iter()
        .map(|(line_no, line)| (*line_no, parse_record(line, *line_no)))
        .collect();
    Ok(ParsedDataset::from_results(results))
}

/// Parses the delimiter-separated variant. The header row is required.
pub fn parse_delimited<R: Read>(reader: R, delimiter: u8) -> Result<ParsedDataset, IngestError> {
    let mut csv = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .flexible(true)
        .from_reader(reader);
    let headers = csv
        .headers()
        .map_err(|e| IngestError::malformed(1, format!("unreadable header: {e}")))?
        .clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim().eq_ignore_ascii_case(name))
    };
    let (id_col, user_col, ts_col, text_col) = (
        column("id"),
        column("user"),
        column("created_at"),
        column("text"),
    );
    for (col, name) in [
        (id_col, "id"),
        (user_col, "user"),
        (ts_col, "created_at"),
        (text_col, "text"),
    ] {
        if col.is_none() {
            return Err(IngestError::MissingField { line_no: 1, name });
        }
    }

    let mut results = Vec::new();
    for row in csv.records() {
        let line_no = match &row {
            Ok(row) => row.position(),
            Err(e) => e.position(),
        }
        .map_or(0, |p| p.line() as usize);
        let result = match row {
            Ok(row) => {
                let get = |col: Option<usize>| col.and_then(|c| row.get(c));
                build_record(
                    line_no,
                    get(id_col).map(str::to_string),
                    get(user_col),
                    get(ts_col),
                    get(text_col),
                )
            }
            Err(e) => Err(IngestError::malformed(line_no, e.to_string())),
        };
        results.push((line_no, result));
    }
    Ok(ParsedDataset::from_results(results))
}

/// Reads a dataset from disk, picking the format from the file extension.
pub fn read_dataset(path: &Path) -> Result<ParsedDataset, IngestError> {
    let file = File::open(path)?;
    match InputFormat::from_path(path) {
        InputFormat::JsonLines => parse_jsonl(BufReader::new(file)),
        InputFormat::Delimited(delim) => parse_delimited(file, delim),
    }
}

pub fn write_jsonl<W: Write>(records: &[RawRecord], mut out: W) -> std::io::Result<()> {
    for record in records {
        writeln!(out, "{}", record.to_json_line())?;
    }
    Ok(())
}
