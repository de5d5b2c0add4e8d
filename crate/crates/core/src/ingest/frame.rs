use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{IngestError, RawRecord};

/// A text predicate evaluated against lowercased message text.
pub trait TextMatcher: Send + Sync + fmt::Debug {
    fn kind(&self) -> &'static str;
    /// The lowercase pattern value.
    fn value(&self) -> &str;
    fn matches(&self, lowered: &str) -> bool;
}

/// Fires when the needle occurs inside any `#hashtag` token, so `99percent`
/// covers both `#99percent` and `#wearethe99percent`.
#[derive(Debug)]
struct HashtagSubstring {
    needle: String,
}

impl TextMatcher for HashtagSubstring {
    fn kind(&self) -> &'static str {
        "hashtag"
    }

    fn value(&self) -> &str {
        &self.needle
    }

    fn matches(&self, lowered: &str) -> bool {
        let mut rest = lowered;
        while let Some(pos) = rest.find('#') {
            let tail = &rest[pos + 1..];
            let end = tail
                .char_indices()
                .find(|(_, c)| !(c.is_alphanumeric() || *c == '_'))
                .map_or(tail.len(), |(i, _)| i);
            if tail[..end].contains(self.needle.as_str()) {
                return true;
            }
            rest = &tail[end..];
        }
        false
    }
}

/// Case-insensitive whole-phrase match; runs of whitespace compare equal.
#[derive(Debug)]
struct Phrase {
    phrase: String,
}

fn collapse_whitespace(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

impl TextMatcher for Phrase {
    fn kind(&self) -> &'static str {
        "phrase"
    }

    fn value(&self) -> &str {
        &self.phrase
    }

    fn matches(&self, lowered: &str) -> bool {
        let text = collapse_whitespace(lowered);
        text.match_indices(self.phrase.as_str()).any(|(start, m)| {
            let before = text[..start].chars().next_back();
            let after = text[start + m.len()..].chars().next();
            !before.is_some_and(char::is_alphanumeric) && !after.is_some_and(char::is_alphanumeric)
        })
    }
}

type MatcherBuilder = fn(&str) -> Arc<dyn TextMatcher>;

/// Matcher constructors keyed by the `kind` used in frame config files.
pub struct MatcherRegistry {
    builders: BTreeMap<&'static str, MatcherBuilder>,
}

impl Default for MatcherRegistry {
    fn default() -> Self {
        let mut registry = MatcherRegistry {
            builders: BTreeMap::new(),
        };
        registry.register("hashtag", |value| {
            Arc::new(HashtagSubstring {
                needle: value.trim_start_matches('#').to_lowercase(),
            })
        });
        registry.register("phrase", |value| {
            Arc::new(Phrase {
                phrase: collapse_whitespace(&value.to_lowercase()),
            })
        });
        registry
    }
}

impl MatcherRegistry {
    pub fn register(&mut self, kind: &'static str, builder: MatcherBuilder) {
        self.builders.insert(kind, builder);
    }

    pub fn kinds(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.builders.keys().copied()
    }

    pub fn build(&self, spec: &PatternSpec) -> Result<Arc<dyn TextMatcher>, IngestError> {
        let builder = self.builders.get(spec.kind.as_str()).ok_or_else(|| {
            IngestError::InvalidFrame(format!(
                "unknown pattern kind {:?} (known: {})",
                spec.kind,
                self.kinds().collect::<Vec<_>>().join(", ")
            ))
        })?;
        let matcher = builder(&spec.value);
        if matcher.value().is_empty() {
            return Err(IngestError::InvalidFrame(format!(
                "empty {} pattern",
                spec.kind
            )));
        }
        Ok(matcher)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternSpec {
    pub kind: String,
    pub value: String,
}

impl PatternSpec {
    pub fn hashtag(value: &str) -> Self {
        PatternSpec {
            kind: "hashtag".into(),
            value: value.into(),
        }
    }

    pub fn phrase(value: &str) -> Self {
        PatternSpec {
            kind: "phrase".into(),
            value: value.into(),
        }
    }
}

/// A named discourse frame and the matchers that select its records.
#[derive(Debug, Clone)]
pub struct FramePattern {
    pub label: String,
    pub matchers: Vec<Arc<dyn TextMatcher>>,
}

impl FramePattern {
    pub fn new(label: &str, patterns: &[PatternSpec]) -> Result<Self, IngestError> {
        Self::with_registry(label, patterns, &MatcherRegistry::default())
    }

    pub fn with_registry(
        label: &str,
        patterns: &[PatternSpec],
        registry: &MatcherRegistry,
    ) -> Result<Self, IngestError> {
        let label = label.trim();
        if label.is_empty() {
            return Err(IngestError::InvalidFrame("frame label is empty".into()));
        }
        if patterns.is_empty() {
            return Err(IngestError::InvalidFrame(format!(
                "frame {label:?} has no patterns"
            )));
        }
        let matchers = patterns
            .iter()
            .map(|p| registry.build(p))
            .collect::<Result<_, _>>()?;
        Ok(FramePattern {
            label: label.to_string(),
            matchers,
        })
    }

    pub fn patterns(&self) -> Vec<PatternSpec> {
        self.matchers
            .iter()
            .map(|m| PatternSpec {
                kind: m.kind().into(),
                value: m.value().into(),
            })
            .collect()
    }
}

pub fn match_frame(record: &RawRecord, frame: &FramePattern) -> bool {
    if record.text.is_empty() {
        return false;
    }
    let lowered = record.text.to_lowercase();
    frame.matchers.iter().any(|m| m.matches(&lowered))
}

/// On-disk frame definitions (JSON or TOML).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FrameConfig {
    pub frames: Vec<FrameEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FrameEntry {
    pub label: String,
    pub patterns: Vec<PatternSpec>,
}

impl FrameConfig {
    pub fn compile(&self) -> Result<Vec<FramePattern>, IngestError> {
        let registry = MatcherRegistry::default();
        if self.frames.is_empty() {
            return Err(IngestError::InvalidFrame("no frames defined".into()));
        }
        self.frames
            .iter()
            .map(|f| FramePattern::with_registry(&f.label, &f.patterns, &registry))
            .collect()
    }
}

pub fn load_frames(path: &Path) -> Result<Vec<FramePattern>, IngestError> {
    let raw = std::fs::read_to_string(path)?;
    let config: FrameConfig = match path.extension().and_then(|e| e.to_str()) {
        Some("toml") => {
            toml::from_str(&raw).map_err(|e| IngestError::InvalidFrame(e.to_string()))?
        }
        _ => serde_json::from_str(&raw).map_err(|e| IngestError::InvalidFrame(e.to_string()))?,
    };
    config.compile()
}

/// The inequality, public-space and hope frames.
pub fn default_frames() -> Vec<FramePattern> {
    vec![
        FramePattern::new("99percent", &[PatternSpec::hashtag("99percent")]),
        FramePattern::new("public_space", &[PatternSpec::phrase("public space")]),
        FramePattern::new("hope", &[PatternSpec::hashtag("hope")]),
    ]
    .into_iter()
    .collect::<Result<_, _>>()
    .expect("built-in frames are valid")
}
