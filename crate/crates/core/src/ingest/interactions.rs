use std::fmt;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use super::RawRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InteractionKind {
    Retweet,
    Mention,
    Via,
}

impl fmt::Display for InteractionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InteractionKind::Retweet => "retweet",
            InteractionKind::Mention => "mention",
            InteractionKind::Via => "via",
        })
    }
}

/// A directed author → target relation extracted from one record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interaction {
    pub source: String,
    pub target: String,
    pub kind: InteractionKind,
    pub record_id: String,
    pub timestamp: DateTime<Utc>,
}

fn is_handle_byte(b: u8) -> bool {
    b.is_ascii_alphanumeric() || b == b'_'
}

/// Length of the handle starting at `bytes[start]` (just after the `@`),
/// or `None` when it is empty or longer than a platform username.
fn handle_at(bytes: &[u8], start: usize) -> Option<usize> {
    let len = bytes[start..]
        .iter()
        .take_while(|&&b| is_handle_byte(b))
        .count();
    (1..=15).contains(&len).then_some(len)
}

/// Byte offset of the `@` in a leading `RT @name`, if present.
fn retweet_prefix(text: &str) -> Option<usize> {
    let offset = text.len() - text.trim_start().len();
    let bytes = text.as_bytes();
    let rest = &bytes[offset..];
    if rest.len() < 4 || !rest[..2].eq_ignore_ascii_case(b"rt") || !rest[2].is_ascii_whitespace() {
        return None;
    }
    let gap = rest[2..]
        .iter()
        .take_while(|b| b.is_ascii_whitespace())
        .count();
    let at = offset + 2 + gap;
    (bytes.get(at) == Some(&b'@')).then_some(at)
}

/// True when the word right before `at` is the token `via`.
fn preceded_by_via(bytes: &[u8], at: usize) -> bool {
    let before = &bytes[..at];
    let trimmed_len = before.len()
        - before
            .iter()
            .rev()
            .take_while(|b| b.is_ascii_whitespace())
            .count();
    if trimmed_len == before.len() || trimmed_len < 3 {
        return false;
    }
    let word = &before[trimmed_len - 3..trimmed_len];
    let boundary = trimmed_len == 3 || !is_handle_byte(before[trimmed_len - 4]);
    boundary && word.eq_ignore_ascii_case(b"via")
}

/// Extracts interactions from a record's text.
///
/// A leading `RT @name` yields one retweet. Every other `@name` token is a
/// mention, or a via when the token `via` immediately precedes it.
/// Self-targets are dropped and each (target, kind) pair appears once.
pub fn extract_interactions(record: &RawRecord) -> Vec<Interaction> {
    let text = record.text.as_str();
    let bytes = text.as_bytes();
    let mut found: Vec<(String, InteractionKind)> = Vec::new();
    let mut push = |target: String, kind: InteractionKind| {
        if target != record.author && !found.iter().any(|(t, k)| *t == target && *k == kind) {
            found.push((target, kind));
        }
    };

    let mut skip_at = None;
    if let Some(at) = retweet_prefix(text) {
        if let Some(len) = handle_at(bytes, at + 1) {
            push(
                text[at + 1..at + 1 + len].to_ascii_lowercase(),
                InteractionKind::Retweet,
            );
            skip_at = Some(at);
        }
    }

    for (at, _) in text.match_indices('@') {
        if Some(at) == skip_at {
            continue;
        }
        // `user@example.com` is not a mention
        if at > 0 && is_handle_byte(bytes[at - 1]) {
            continue;
        }
        let Some(len) = handle_at(bytes, at + 1) else {
            continue;
        };
        let target = text[at + 1..at + 1 + len].to_ascii_lowercase();
        let kind = if preceded_by_via(bytes, at) {
            InteractionKind::Via
        } else {
            InteractionKind::Mention
        };
        push(target, kind);
    }

    found
        .into_iter()
        .map(|(target, kind)| Interaction {
            source: record.author.clone(),
            target,
            kind,
            record_id: record.id.clone(),
            timestamp: record.timestamp,
        })
        .collect()
}
