//! Alignment between original text and the whitespace tokens of its cleaned
//! form. Entity recognition runs on original text (case and punctuation
//! intact), so character spans must be mapped onto cleaned-token indices.

use super::CharSpan;

/// One cleaned whitespace token together with the character range (in the
/// original text) it was derived from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlignedToken {
    pub text: String,
    /// Char offset (inclusive) in the original text.
    pub orig_start: usize,
    /// Char offset (exclusive) in the original text.
    pub orig_end: usize,
}

/// Tokenizes exactly like `clean_text(original).split(' ')` while keeping
/// per-token original character ranges: a token is a maximal run of kept
/// characters (letters of any script, ASCII digits).
pub fn clean_with_alignment(original: &str) -> Vec<AlignedToken> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    let mut start = 0usize;
    for (pos, ch) in original.chars().enumerate() {
        if ch.is_alphabetic() || ch.is_ascii_digit() {
            if current.is_empty() {
                start = pos;
            }
            for lower in ch.to_lowercase() {
                if lower.is_alphabetic() || lower.is_ascii_digit() {
                    current.push(lower);
                }
            }
        } else if !current.is_empty() {
            tokens.push(AlignedToken {
                text: std::mem::take(&mut current),
                orig_start: start,
                orig_end: pos,
            });
        }
    }
    if !current.is_empty() {
        tokens.push(AlignedToken {
            text: current,
            orig_start: start,
            orig_end: original.chars().count(),
        });
    }
    tokens
}

/// Maps a character span onto the contiguous run of cleaned tokens it
/// overlaps. Returns `None` when the span covers no kept token.
pub fn char_span_to_token_span(span: &CharSpan, tokens: &[AlignedToken]) -> Option<(usize, usize)> {
    if span.start >= span.end {
        return None;
    }
    let mut first = None;
    let mut last = None;
    for (i, tok) in tokens.iter().enumerate() {
        let overlaps = tok.orig_start < span.end && span.start < tok.orig_end;
        if overlaps {
            if first.is_none() {
                first = Some(i);
            }
            last = Some(i);
        }
    }
    match (first, last) {
        (Some(a), Some(b)) => Some((a, b + 1)),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::clean_text;

    #[test]
    fn alignment_tokens_match_clean_text() {
        let samples = [
            "KOMPSAT-2 (Korea Multi-Purpose Satellite-2)",
            "Multi-Orbit, Long-Term Planning!",
            "  leading and trailing  ",
            "",
            "déjà-vu 3D",
        ];
        for s in samples {
            let aligned: Vec<String> = clean_with_alignment(s)
                .into_iter()
                .map(|t| t.text)
                .collect();
            let cleaned = clean_text(s);
            let expected: Vec<String> =
                cleaned.split_whitespace().map(|w| w.to_string()).collect();
            assert_eq!(aligned, expected, "mismatch for {s:?}");
        }
    }

    #[test]
    fn char_span_maps_to_covered_tokens() {
        let text = "The Artificial Neural Network improves accuracy";
        let tokens = clean_with_alignment(text);
        // Char range of "Artificial Neural Network".
        let start = text.find("Artificial").unwrap();
        let end = start + "Artificial Neural Network".len();
        let span = CharSpan { start, end };
        assert_eq!(char_span_to_token_span(&span, &tokens), Some((1, 4)));
    }

    #[test]
    fn span_over_punctuation_only_maps_to_none() {
        let tokens = clean_with_alignment("a -- b");
        let span = CharSpan { start: 2, end: 4 };
        assert_eq!(char_span_to_token_span(&span, &tokens), None);
    }
}
