//! Id encoding with the per-example extended vocabulary: the j-th distinct
//! source OOV token gets id `V + j`, making it copyable by the pointer
//! mechanism even though it has no embedding row.

use serde::{Deserialize, Serialize};

use super::vocab::{Vocabulary, START_ID, STOP_ID, UNK_ID, UNK_TOKEN};
use super::TokenSequence;

/// One example encoded against a vocabulary.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodedExample {
    /// Source tokens as vocab ids, UNK for OOV. This is what the encoder
    /// embeds.
    pub source_ids: Vec<usize>,
    /// Source tokens over the extended vocabulary: OOVs get `V + j`.
    pub source_ids_extended: Vec<usize>,
    /// Distinct source OOV surfaces in order of first occurrence; slot `j`
    /// corresponds to extended id `V + j`.
    pub oov_tokens: Vec<String>,
    /// `[START]` followed by the target tokens as vocab ids (UNK for any
    /// OOV); what the decoder consumes under teacher forcing.
    pub decoder_input_ids: Vec<usize>,
    /// Target tokens over the extended vocabulary followed by `[STOP]`;
    /// target tokens absent from both vocab and source become UNK.
    pub target_ids_extended: Vec<usize>,
}

impl EncodedExample {
    pub fn oov_count(&self) -> usize {
        self.oov_tokens.len()
    }

    pub fn target_len(&self) -> usize {
        self.target_ids_extended.len()
    }
}

/// Encodes a truncated (source, target) token pair against `vocab`.
pub fn encode_example(
    src: &TokenSequence,
    tgt: &TokenSequence,
    vocab: &Vocabulary,
) -> EncodedExample {
    let v = vocab.len();
    let mut source_ids = Vec::with_capacity(src.len());
    let mut source_ids_extended = Vec::with_capacity(src.len());
    let mut oov_tokens: Vec<String> = Vec::new();

    for token in &src.tokens {
        match vocab.id(token) {
            Some(id) => {
                source_ids.push(id);
                source_ids_extended.push(id);
            }
            None => {
                source_ids.push(UNK_ID);
                let j = match oov_tokens.iter().position(|t| t == token) {
                    Some(j) => j,
                    None => {
                        oov_tokens.push(token.clone());
                        oov_tokens.len() - 1
                    }
                };
                source_ids_extended.push(v + j);
            }
        }
    }

    let mut decoder_input_ids = Vec::with_capacity(tgt.len() + 1);
    let mut target_ids_extended = Vec::with_capacity(tgt.len() + 1);
    decoder_input_ids.push(START_ID);
    for token in &tgt.tokens {
        decoder_input_ids.push(vocab.id_or_unk(token));
        let extended = match vocab.id(token) {
            Some(id) => id,
            None => match oov_tokens.iter().position(|t| t == token) {
                Some(j) => v + j,
                None => UNK_ID,
            },
        };
        target_ids_extended.push(extended);
    }
    target_ids_extended.push(STOP_ID);

    EncodedExample {
        source_ids,
        source_ids_extended,
        oov_tokens,
        decoder_input_ids,
        target_ids_extended,
    }
}

/// Maps extended-vocabulary ids back to token strings. Ids `V + j` resolve
/// through `oov_tokens`; unknown vocab entries render as `[UNK]`. Panics on
/// an id outside `V + len(oov_tokens)`.
pub fn ids_to_tokens(ids: &[usize], vocab: &Vocabulary, oov_tokens: &[String]) -> Vec<String> {
    let v = vocab.len();
    ids.iter()
        .map(|&id| {
            if id < v {
                vocab.token(id).unwrap().to_string()
            } else {
                let j = id - v;
                assert!(
                    j < oov_tokens.len(),
                    "extended id {id} out of range (V={v}, {} OOV slots)",
                    oov_tokens.len()
                );
                oov_tokens[j].clone()
            }
        })
        .collect()
}
