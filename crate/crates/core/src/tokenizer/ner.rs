//! Entity-recognizer backends. A backend sees the original text (case and
//! punctuation intact) and returns character-offset spans; entity types are
//! discarded. Any implementation of [`NerBackend`] plugs in, including the
//! dictionary backend used for tests and offline runs.

use std::fs;
use std::path::Path;

use crate::error::{CoreError, Result};

use super::CharSpan;

/// Contract for named-entity recognizers.
pub trait NerBackend: Send + Sync {
    /// Character-offset spans of entities detected in `text`. Spans may
    /// overlap; resolution happens downstream.
    fn detect(&self, text: &str) -> Result<Vec<CharSpan>>;

    /// Short name for diagnostics.
    fn name(&self) -> &str;
}

/// Backend that never detects anything; degrades the pipeline to plain
/// whitespace tokenization.
#[derive(Debug, Default)]
pub struct NoopNer;

impl NerBackend for NoopNer {
    fn detect(&self, _text: &str) -> Result<Vec<CharSpan>> {
        Ok(Vec::new())
    }

    fn name(&self) -> &str {
        "none"
    }
}

/// Gazetteer-based recognizer: matches a fixed list of entity surfaces
/// case-insensitively at word boundaries. Longest phrases win at a given
/// start position.
#[derive(Debug)]
pub struct DictionaryNer {
    /// Lowercased phrases, as char vectors, longest first.
    phrases: Vec<Vec<char>>,
}

impl DictionaryNer {
    pub fn new<I: IntoIterator<Item = String>>(phrases: I) -> Self {
        let mut phrases: Vec<Vec<char>> = phrases
            .into_iter()
            .map(|p| p.chars().flat_map(lower_one).collect::<Vec<char>>())
            .filter(|p| !p.is_empty())
            .collect();
        phrases.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        phrases.dedup();
        DictionaryNer { phrases }
    }

    /// Loads one phrase per line; blank lines and `#` comments are skipped.
    pub fn from_file(path: &Path) -> Result<Self> {
        let data = fs::read_to_string(path).map_err(|e| CoreError::io(path, e))?;
        Ok(Self::new(
            data.lines()
                .map(|l| l.trim().to_string())
                .filter(|l| !l.is_empty() && !l.starts_with('#')),
        ))
    }
}

fn lower_one(ch: char) -> Option<char> {
    ch.to_lowercase().next()
}

fn is_word_char(ch: char) -> bool {
    ch.is_alphanumeric()
}

impl NerBackend for DictionaryNer {
    fn detect(&self, text: &str) -> Result<Vec<CharSpan>> {
        let chars: Vec<char> = text.chars().flat_map(lower_one).collect();
        let mut spans = Vec::new();
        let mut pos = 0usize;
        while pos < chars.len() {
            let boundary_before = pos == 0 || !is_word_char(chars[pos - 1]);
            if boundary_before {
                // Phrases are sorted longest first, so the first hit is the
                // longest match at this position.
                for phrase in &self.phrases {
                    let end = pos + phrase.len();
                    if end > chars.len() || chars[pos..end] != phrase[..] {
                        continue;
                    }
                    let boundary_after = end == chars.len() || !is_word_char(chars[end]);
                    if boundary_after {
                        spans.push(CharSpan { start: pos, end });
                        break;
                    }
                }
            }
            pos += 1;
        }
        Ok(spans)
    }

    fn name(&self) -> &str {
        "dictionary"
    }
}

/// Environment variable naming the entity-recognizer backend:
/// `none` (default) or `dict:<gazetteer path>`.
pub const NER_BACKEND_ENV: &str = "HIGHLIGHTS_NER_BACKEND";

/// Builds the backend named by `spec` (same syntax as the environment
/// variable).
pub fn backend_from_spec(spec: &str) -> Result<Box<dyn NerBackend>> {
    if spec == "none" || spec.is_empty() {
        return Ok(Box::new(NoopNer));
    }
    if let Some(path) = spec.strip_prefix("dict:") {
        return Ok(Box::new(DictionaryNer::from_file(Path::new(path))?));
    }
    Err(CoreError::InvalidConfig(format!(
        "unknown NER backend {spec:?}; expected \"none\" or \"dict:<path>\""
    )))
}

/// Reads [`NER_BACKEND_ENV`] and builds the named backend.
pub fn backend_from_env() -> Result<Box<dyn NerBackend>> {
    match std::env::var(NER_BACKEND_ENV) {
        Ok(spec) => backend_from_spec(&spec),
        Err(_) => Ok(Box::new(NoopNer)),
    }
}
