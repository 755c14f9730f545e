//! Entity-merged tokenization: each detected named entity becomes one
//! indivisible token, so the decoder cannot fragment multi-word names.

pub mod align;
pub mod encode;
pub mod ner;
pub mod vocab;

pub use encode::{encode_example, ids_to_tokens, EncodedExample};
pub use ner::{backend_from_env, backend_from_spec, DictionaryNer, NerBackend, NoopNer};
pub use vocab::{build_vocabulary, Vocabulary, PAD_ID, START_ID, STOP_ID, UNK_ID, UNK_TOKEN};

use serde::{Deserialize, Serialize};

/// Character-offset span in original text, as returned by NER backends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharSpan {
    pub start: usize,
    pub end: usize,
}

/// Entity span over the whitespace tokens of the cleaned text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntitySpan {
    /// Token index, inclusive.
    pub start: usize,
    /// Token index, exclusive.
    pub end: usize,
    /// Cleaned entity surface, single spaces between words.
    pub surface: String,
}

/// Token sequence with per-token entity provenance. A merged token holds the
/// entity words joined by single spaces.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenSequence {
    pub tokens: Vec<String>,
    pub is_entity: Vec<bool>,
}

impl TokenSequence {
    pub fn plain(tokens: Vec<String>) -> Self {
        let is_entity = vec![false; tokens.len()];
        TokenSequence { tokens, is_entity }
    }

    /// Plain whitespace tokenization of cleaned text, no merging.
    pub fn from_clean_text(clean: &str) -> Self {
        Self::plain(clean.split_whitespace().map(|w| w.to_string()).collect())
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Display form: tokens joined by single spaces (merged tokens keep
    /// their internal spaces).
    pub fn joined(&self) -> String {
        self.tokens.join(" ")
    }

    /// Appends another sequence, shifting nothing: token indices are dense.
    pub fn extend(&mut self, other: TokenSequence) {
        self.tokens.extend(other.tokens);
        self.is_entity.extend(other.is_entity);
    }

    /// Inserts a single non-entity token.
    pub fn push_plain(&mut self, token: &str) {
        self.tokens.push(token.to_string());
        self.is_entity.push(false);
    }
}

/// Resolves token-index spans to a non-overlapping set by leftmost-longest
/// preference: the span with the smallest start wins; among equal starts the
/// longest wins; anything overlapping a winner is dropped.
pub fn resolve_token_spans(spans: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let mut sorted: Vec<(usize, usize)> = spans
        .iter()
        .copied()
        .filter(|(s, e)| s < e)
        .collect();
    sorted.sort_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)));
    sorted.dedup();
    let mut kept: Vec<(usize, usize)> = Vec::new();
    for span in sorted {
        match kept.last() {
            Some(&(_, last_end)) if span.0 < last_end => {}
            _ => kept.push(span),
        }
    }
    kept
}

/// Runs the backend on the original text, maps its character spans onto the
/// cleaned whitespace tokens, and resolves overlaps leftmost-longest.
/// Backend failure degrades to plain tokenization with a warning.
pub fn detect_entities(original: &str, backend: &dyn NerBackend) -> Vec<EntitySpan> {
    let char_spans = match backend.detect(original) {
        Ok(s) => s,
        Err(e) => {
            log::warn!("NER backend {} failed ({e}); using no entities", backend.name());
            return Vec::new();
        }
    };
    let tokens = align::clean_with_alignment(original);
    let mut token_spans = Vec::new();
    for cs in &char_spans {
        if let Some(ts) = align::char_span_to_token_span(cs, &tokens) {
            token_spans.push(ts);
        }
    }
    resolve_token_spans(&token_spans)
        .into_iter()
        .map(|(start, end)| EntitySpan {
            start,
            end,
            surface: tokens[start..end]
                .iter()
                .map(|t| t.text.as_str())
                .collect::<Vec<_>>()
                .join(" "),
        })
        .collect()
}

/// Replaces the whitespace tokens covered by each span with one merged
/// token. Spans must be resolved (sorted, non-overlapping) and in range;
/// violating that is a programming error.
pub fn tokenize_and_merge(clean: &str, spans: &[EntitySpan]) -> TokenSequence {
    let words: Vec<&str> = clean.split_whitespace().collect();
    merge_words(&words, spans)
}

fn merge_words(words: &[&str], spans: &[EntitySpan]) -> TokenSequence {
    let mut tokens = Vec::with_capacity(words.len());
    let mut is_entity = Vec::with_capacity(words.len());
    let mut span_ix = 0usize;
    let mut i = 0usize;
    while i < words.len() {
        if let Some(span) = spans.get(span_ix) {
            assert!(
                span.start < span.end && span.end <= words.len(),
                "entity span [{}, {}) out of range for {} tokens",
                span.start,
                span.end,
                words.len()
            );
            if span_ix + 1 < spans.len() {
                assert!(
                    spans[span_ix + 1].start >= span.end,
                    "entity spans must be sorted and non-overlapping"
                );
            }
            if i == span.start {
                tokens.push(words[span.start..span.end].join(" "));
                is_entity.push(span.end - span.start > 1);
                i = span.end;
                span_ix += 1;
                continue;
            }
            assert!(i < span.start, "entity spans must be sorted and non-overlapping");
        }
        tokens.push(words[i].to_string());
        is_entity.push(false);
        i += 1;
    }
    assert!(span_ix == spans.len(), "entity span beyond end of sequence");
    TokenSequence { tokens, is_entity }
}

/// First `limit` tokens; merged tokens count as one.
pub fn truncate(seq: &TokenSequence, limit: usize) -> TokenSequence {
    let n = seq.len().min(limit);
    TokenSequence {
        tokens: seq.tokens[..n].to_vec(),
        is_entity: seq.is_entity[..n].to_vec(),
    }
}

/// Expands merged entity tokens back into their constituent words so metrics
/// operate on plain words. `[UNK]` is retained literally.
pub fn unmerge_for_eval(text_with_merged_tokens: &str) -> String {
    text_with_merged_tokens
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
}

/// Token-level counterpart of [`unmerge_for_eval`]: flattens merged tokens
/// into single words.
pub fn unmerge_tokens(tokens: &[String]) -> Vec<String> {
    tokens
        .iter()
        .flat_map(|t| t.split_whitespace())
        .map(|w| w.to_string())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::clean_text;

    struct StubNer(Vec<CharSpan>);
    impl NerBackend for StubNer {
        fn detect(&self, _text: &str) -> crate::Result<Vec<CharSpan>> {
            Ok(self.0.clone())
        }
        fn name(&self) -> &str {
            "stub"
        }
    }

    struct FailingNer;
    impl NerBackend for FailingNer {
        fn detect(&self, _text: &str) -> crate::Result<Vec<CharSpan>> {
            Err(crate::CoreError::InvalidInput("backend down".into()))
        }
        fn name(&self) -> &str {
            "failing"
        }
    }

    fn span(start: usize, end: usize) -> EntitySpan {
        EntitySpan {
            start,
            end,
            surface: String::new(),
        }
    }

    #[test]
    fn detect_entities_empty_backend() {
        assert!(detect_entities("no entities here", &StubNer(vec![])).is_empty());
    }

    #[test]
    fn detect_entities_maps_chars_to_tokens() {
        let text = "artificial neural network improves accuracy";
        let spans = detect_entities(
            text,
            &StubNer(vec![CharSpan {
                start: 0,
                end: "artificial neural network".len(),
            }]),
        );
        assert_eq!(spans.len(), 1);
        assert_eq!((spans[0].start, spans[0].end), (0, 3));
        assert_eq!(spans[0].surface, "artificial neural network");
    }

    #[test]
    fn detect_entities_backend_failure_degrades() {
        assert!(detect_entities("whatever text", &FailingNer).is_empty());
    }

    #[test]
    fn overlapping_spans_resolve_leftmost_longest() {
        assert_eq!(resolve_token_spans(&[(0, 3), (2, 4)]), vec![(0, 3)]);
        assert_eq!(resolve_token_spans(&[(2, 4), (0, 3)]), vec![(0, 3)]);
        // Same start: longest wins.
        assert_eq!(resolve_token_spans(&[(1, 2), (1, 4)]), vec![(1, 4)]);
    }

    /// Direct restatement of the leftmost-longest rule, used as an oracle.
    fn resolve_oracle(mut spans: Vec<(usize, usize)>) -> Vec<(usize, usize)> {
        spans.retain(|(s, e)| s < e);
        let mut kept = Vec::new();
        loop {
            let Some(&min_start) = spans.iter().map(|(s, _)| s).min() else {
                break;
            };
            let winner = spans
                .iter()
                .copied()
                .filter(|(s, _)| *s == min_start)
                .max_by_key(|(_, e)| *e)
                .unwrap();
            kept.push(winner);
            spans.retain(|(s, _)| *s >= winner.1);
        }
        kept
    }

    #[test]
    fn resolution_matches_oracle_on_all_small_arrangements() {
        // Every arrangement of up to 3 spans over 5 tokens.
        let mut all_spans = Vec::new();
        for s in 0..5 {
            for e in (s + 1)..=5 {
                all_spans.push((s, e));
            }
        }
        for &a in &all_spans {
            assert_eq!(resolve_token_spans(&[a]), resolve_oracle(vec![a]));
            for &b in &all_spans {
                assert_eq!(resolve_token_spans(&[a, b]), resolve_oracle(vec![a, b]));
                for &c in &all_spans {
                    assert_eq!(
                        resolve_token_spans(&[a, b, c]),
                        resolve_oracle(vec![a, b, c]),
                        "spans {a:?} {b:?} {c:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn merge_without_spans_is_plain_tokenization() {
        let seq = tokenize_and_merge("the cat", &[]);
        assert_eq!(seq.tokens, vec!["the", "cat"]);
        assert_eq!(seq.is_entity, vec![false, false]);
    }

    #[test]
    fn merge_collapses_entity_tokens() {
        let seq = tokenize_and_merge("artificial neural network works", &[span(0, 3)]);
        assert_eq!(seq.tokens, vec!["artificial neural network", "works"]);
        assert_eq!(seq.is_entity, vec![true, false]);
    }

    #[test]
    fn merge_two_disjoint_spans_over_five_tokens() {
        let seq = tokenize_and_merge("a b c d e", &[span(0, 2), span(2, 4)]);
        assert_eq!(seq.tokens, vec!["a b", "c d", "e"]);
        assert_eq!(seq.len(), 3);
    }

    #[test]
    fn merged_length_matches_span_arithmetic() {
        // count = words - sum(len - 1) over spans; checked over random span sets.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(11);
        let words: Vec<String> = (0..30).map(|i| format!("w{i}")).collect();
        let clean = words.join(" ");
        for _ in 0..200 {
            let mut raw = Vec::new();
            for _ in 0..rng.random_range(0..5) {
                let s = rng.random_range(0..30);
                let e = rng.random_range(s + 1..=30.min(s + 6));
                raw.push((s, e));
            }
            let resolved = resolve_token_spans(&raw);
            let spans: Vec<EntitySpan> = resolved
                .iter()
                .map(|&(start, end)| EntitySpan {
                    start,
                    end,
                    surface: String::new(),
                })
                .collect();
            let merged = tokenize_and_merge(&clean, &spans);
            let expected = 30 - resolved.iter().map(|(s, e)| e - s - 1).sum::<usize>();
            assert_eq!(merged.len(), expected);
        }
    }

    #[test]
    #[should_panic(expected = "out of range")]
    fn merge_with_out_of_range_span_panics() {
        tokenize_and_merge("a b", &[span(1, 5)]);
    }

    #[test]
    fn truncate_cases() {
        let seq = TokenSequence::plain((0..500).map(|i| format!("t{i}")).collect());
        assert_eq!(truncate(&seq, 400).len(), 400);
        let short = TokenSequence::plain((0..90).map(|i| format!("t{i}")).collect());
        assert_eq!(truncate(&short, 400), short);
        let target = TokenSequence::plain((0..120).map(|i| format!("t{i}")).collect());
        assert_eq!(truncate(&target, 100).len(), 100);
    }

    #[test]
    fn unmerge_expands_entity_tokens() {
        let tokens = vec!["artificial neural network".to_string(), "works".to_string()];
        assert_eq!(
            unmerge_tokens(&tokens),
            vec!["artificial", "neural", "network", "works"]
        );
        assert_eq!(
            unmerge_for_eval("artificial neural network works"),
            "artificial neural network works"
        );
    }

    #[test]
    fn unmerge_is_noop_without_merged_tokens() {
        assert_eq!(unmerge_for_eval("plain text here"), "plain text here");
    }

    #[test]
    fn unmerge_keeps_literal_unk() {
        assert_eq!(
            unmerge_for_eval("image acquisition [UNK]"),
            "image acquisition [UNK]"
        );
    }

    #[test]
    fn merge_then_unmerge_round_trips() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(5);
        for _ in 0..300 {
            let n = rng.random_range(1..40);
            let words: Vec<String> = (0..n).map(|i| format!("w{i}")).collect();
            let clean = words.join(" ");
            let mut raw = Vec::new();
            for _ in 0..rng.random_range(0..4) {
                let s = rng.random_range(0..n);
                let e = rng.random_range(s + 1..=n.min(s + 5));
                raw.push((s, e));
            }
            let spans: Vec<EntitySpan> = resolve_token_spans(&raw)
                .into_iter()
                .map(|(start, end)| EntitySpan {
                    start,
                    end,
                    surface: String::new(),
                })
                .collect();
            let merged = tokenize_and_merge(&clean, &spans);
            assert_eq!(unmerge_for_eval(&merged.joined()), clean);
        }
    }
}
