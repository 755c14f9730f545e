//! Abstractive generation of research highlights from scientific-paper
//! sections with pointer-generator networks.
//!
//! The crate covers the full experiment pipeline:
//!
//! - [`corpus`]: record ingestion, text cleaning, example construction and
//!   deterministic train/validation/test splits;
//! - [`tokenizer`]: entity-merged tokenization, the fixed vocabulary and the
//!   per-example extended vocabulary used by the copy mechanism;
//! - [`model`]: the differentiable pointer-generator network (bidirectional
//!   LSTM encoder, attention with optional coverage, copy/generate mixture)
//!   with hand-written gradients;
//! - [`trainer`]: Adagrad training with global-norm gradient clipping,
//!   validation-based selection, checkpointing and coverage fine-tuning;
//! - [`decoder`]: beam search over the extended vocabulary plus repetition
//!   diagnostics;
//! - [`metrics`]: ROUGE-1/2/L, METEOR, BERTScore and bootstrap confidence
//!   intervals, emitted as per-variant reports.
//!
//! Model math is generic over the scalar type ([`scalar::Scalar`]); training
//! runs in `f32`, gradient verification in `f64`.

pub mod corpus;
pub mod decoder;
pub mod error;
pub mod metrics;
pub mod model;
pub mod scalar;
pub mod tokenizer;
pub mod trainer;

pub use error::{CoreError, Result};
pub use scalar::Scalar;

use serde::{Deserialize, Serialize};

/// Model parameters in training precision.
pub type Parameters32 = model::Parameters<f32>;
/// Model parameters in verification precision.
pub type Parameters64 = model::Parameters<f64>;

/// The four experiment variants. The variant fixes whether entity-merged
/// tokenization and the coverage mechanism are active.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Pgm,
    PgmCov,
    NerPgm,
    NerPgmCov,
}

impl Variant {
    pub const ALL: [Variant; 4] = [
        Variant::Pgm,
        Variant::PgmCov,
        Variant::NerPgm,
        Variant::NerPgmCov,
    ];

    pub fn ner_enabled(self) -> bool {
        matches!(self, Variant::NerPgm | Variant::NerPgmCov)
    }

    pub fn coverage_enabled(self) -> bool {
        matches!(self, Variant::PgmCov | Variant::NerPgmCov)
    }

    /// Identifier used in file names and CLI flags.
    pub fn slug(self) -> &'static str {
        match self {
            Variant::Pgm => "pgm",
            Variant::PgmCov => "pgm_cov",
            Variant::NerPgm => "ner_pgm",
            Variant::NerPgmCov => "ner_pgm_cov",
        }
    }

    /// Human-readable name used in report tables.
    pub fn display_name(self) -> &'static str {
        match self {
            Variant::Pgm => "PGM",
            Variant::PgmCov => "PGM + Cov",
            Variant::NerPgm => "NER + PGM",
            Variant::NerPgmCov => "NER + PGM + Cov",
        }
    }

    pub fn parse(s: &str) -> Option<Variant> {
        match s {
            "pgm" => Some(Variant::Pgm),
            "pgm_cov" => Some(Variant::PgmCov),
            "ner_pgm" => Some(Variant::NerPgm),
            "ner_pgm_cov" => Some(Variant::NerPgmCov),
            _ => None,
        }
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.slug())
    }
}
