//! Record parsing, interaction extraction and frame filtering.

mod frame;
mod interactions;
mod record;
mod stats;

pub use frame::{
    default_frames, load_frames, match_frame, FrameConfig, FramePattern, MatcherRegistry,
    PatternSpec, TextMatcher,
};
pub use interactions::{extract_interactions, Interaction, InteractionKind};
pub use record::{
    normalize_username, parse_delimited, parse_jsonl, parse_record, read_dataset, write_jsonl,
    InputFormat, ParsedDataset, RawRecord, MAX_TEXT_BYTES,
};
pub use stats::{descriptive_stats, DatasetStats};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("line {line_no}: malformed record: {reason}")]
    MalformedRecord { line_no: usize, reason: String },
    #[error("line {line_no}: missing field `{name}`")]
    MissingField { line_no: usize, name: &'static str },
    #[error("line {line_no}: duplicate record id `{id}`")]
    DuplicateId { line_no: usize, id: String },
    #[error("invalid frame definition: {0}")]
    InvalidFrame(String),
    #[error("unsupported input: {0}")]
    UnsupportedInput(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl IngestError {
    pub(crate) fn malformed(line_no: usize, reason: impl Into<String>) -> Self {
        IngestError::MalformedRecord {
            line_no,
            reason: reason.into(),
        }
    }
}
