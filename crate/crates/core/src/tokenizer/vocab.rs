//! Fixed vocabulary with reserved special ids. Merged entities count as
//! single entries.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::{CoreError, Result};

use super::TokenSequence;

pub const PAD_ID: usize = 0;
pub const UNK_ID: usize = 1;
pub const START_ID: usize = 2;
pub const STOP_ID: usize = 3;

pub const PAD_TOKEN: &str = "[PAD]";
pub const UNK_TOKEN: &str = "[UNK]";
pub const START_TOKEN: &str = "[START]";
pub const STOP_TOKEN: &str = "[STOP]";

const SPECIALS: [&str; 4] = [PAD_TOKEN, UNK_TOKEN, START_TOKEN, STOP_TOKEN];

/// Token-to-id map with specials pinned at ids 0-3. Non-special ids are
/// assigned by descending frequency, ties broken lexicographically, so the
/// same training split always yields a bit-identical vocabulary.
#[derive(Debug, Clone)]
pub struct Vocabulary {
    id_to_token: Vec<String>,
    /// Training-split frequency per non-special entry, aligned with
    /// `id_to_token[4..]`.
    counts: Vec<u64>,
    token_to_id: HashMap<String, usize>,
}

impl Vocabulary {
    fn from_ranked(ranked: Vec<(String, u64)>) -> Self {
        let mut id_to_token: Vec<String> = SPECIALS.iter().map(|s| s.to_string()).collect();
        let mut counts = Vec::with_capacity(ranked.len());
        for (token, count) in ranked {
            id_to_token.push(token);
            counts.push(count);
        }
        let token_to_id = id_to_token
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        Vocabulary {
            id_to_token,
            counts,
            token_to_id,
        }
    }

    /// Total size including the four specials.
    pub fn len(&self) -> usize {
        self.id_to_token.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn id(&self, token: &str) -> Option<usize> {
        self.token_to_id.get(token).copied()
    }

    /// Vocab id or UNK.
    pub fn id_or_unk(&self, token: &str) -> usize {
        self.id(token).unwrap_or(UNK_ID)
    }

    pub fn token(&self, id: usize) -> Option<&str> {
        self.id_to_token.get(id).map(|s| s.as_str())
    }

    /// Serialized form: `token<TAB>count` lines, frequency-descending,
    /// specials omitted (their ids 0-3 are implied).
    pub fn to_file_string(&self) -> String {
        let mut out = String::new();
        for (i, token) in self.id_to_token.iter().enumerate().skip(4) {
            out.push_str(token);
            out.push('\t');
            out.push_str(&self.counts[i - 4].to_string());
            out.push('\n');
        }
        out
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_file_string()).map_err(|e| CoreError::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let data = fs::read_to_string(path).map_err(|e| CoreError::io(path, e))?;
        let mut ranked = Vec::new();
        for (lineno, line) in data.lines().enumerate() {
            if line.is_empty() {
                continue;
            }
            let (token, count) = line.split_once('\t').ok_or_else(|| CoreError::Malformed {
                what: "vocabulary",
                path: path.into(),
                line: lineno + 1,
                message: "expected token<TAB>count".into(),
            })?;
            let count: u64 = count.parse().map_err(|_| CoreError::Malformed {
                what: "vocabulary",
                path: path.into(),
                line: lineno + 1,
                message: format!("bad count {count:?}"),
            })?;
            ranked.push((token.to_string(), count));
        }
        Ok(Self::from_ranked(ranked))
    }

    /// SHA-256 of the serialized vocabulary, used to tie checkpoints to the
    /// exact vocabulary they were trained with.
    pub fn fingerprint(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.to_file_string().as_bytes());
        hex_string(&hasher.finalize())
    }
}

fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Builds the vocabulary from training-split token sequences (source and
/// target sides). Keeps the `max_size - 4` most frequent tokens, ties broken
/// lexicographically.
pub fn build_vocabulary<'a, I>(sequences: I, max_size: usize) -> Vocabulary
where
    I: IntoIterator<Item = &'a TokenSequence>,
{
    assert!(max_size >= 4, "max_size must cover the four special ids");
    let mut freq: HashMap<&str, u64> = HashMap::new();
    let mut any = false;
    for seq in sequences {
        any = true;
        for token in &seq.tokens {
            *freq.entry(token.as_str()).or_insert(0) += 1;
        }
    }
    if !any {
        log::warn!("building vocabulary from no sequences; specials only");
    }
    let mut ranked: Vec<(String, u64)> = freq
        .into_iter()
        .map(|(t, c)| (t.to_string(), c))
        .collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ranked.truncate(max_size - 4);
    Vocabulary::from_ranked(ranked)
}
