//! Corpus ingestion, text cleaning, example construction and splits.
//!
//! The dataset file is JSON Lines: one record per line with string fields
//! `id`, `title`, `abstract`, `introduction`, `conclusion` and list field
//! `highlights` (optional `keywords`). Records missing an abstract or
//! highlights are skipped and counted, never silently dropped.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};

/// One paper record as read from the dataset file. All sections carry the
/// original text; cleaning happens downstream so entity recognition can run
/// on the original case and punctuation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Document {
    pub doc_id: String,
    pub title: String,
    pub r#abstract: String,
    pub introduction: String,
    pub conclusion: String,
    /// One entry per author-written highlight bullet.
    pub highlights: Vec<String>,
    #[serde(default)]
    pub keywords: Vec<String>,
}

/// Which sections feed the encoder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputMode {
    Abstract,
    AbstractConclusion,
    IntroductionConclusion,
}

impl InputMode {
    pub const ALL: [InputMode; 3] = [
        InputMode::Abstract,
        InputMode::AbstractConclusion,
        InputMode::IntroductionConclusion,
    ];

    pub fn slug(self) -> &'static str {
        match self {
            InputMode::Abstract => "abstract",
            InputMode::AbstractConclusion => "abstract_conclusion",
            InputMode::IntroductionConclusion => "introduction_conclusion",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            InputMode::Abstract => "abstract only",
            InputMode::AbstractConclusion => "abstract + conclusion",
            InputMode::IntroductionConclusion => "introduction + conclusion",
        }
    }

    pub fn parse(s: &str) -> Option<InputMode> {
        InputMode::ALL.into_iter().find(|m| m.slug() == s)
    }

    /// Source-side truncation limit in tokens.
    pub fn source_limit(self) -> usize {
        match self {
            InputMode::Abstract => 400,
            _ => 1500,
        }
    }
}

impl std::fmt::Display for InputMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.slug())
    }
}

/// Target-side truncation limit in tokens.
pub const TARGET_LIMIT: usize = 100;

/// Token that separates highlight bullets in the flat target string. It is
/// reinstated as a sentence boundary when decoded output is displayed.
pub const SENTENCE_SEPARATOR: &str = ".";

/// One (source, target) training pair in cleaned text form.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Example {
    pub doc_id: String,
    pub source_text: String,
    pub target_text: String,
    pub mode: InputMode,
}

/// Deterministic three-way partition of a corpus.
#[derive(Debug, Clone)]
pub struct CorpusSplit {
    pub train: Vec<Example>,
    pub validation: Vec<Example>,
    pub test: Vec<Example>,
    pub split_seed: u64,
}

/// Outcome of [`ingest_corpus`]: the admitted documents plus skip accounting.
#[derive(Debug)]
pub struct IngestReport {
    pub documents: Vec<Document>,
    pub skipped: usize,
}

#[derive(Deserialize)]
struct RawRecord {
    id: String,
    #[serde(default)]
    title: String,
    #[serde(default, rename = "abstract")]
    abstract_text: Option<String>,
    #[serde(default)]
    introduction: String,
    #[serde(default)]
    conclusion: String,
    #[serde(default)]
    highlights: Option<Vec<String>>,
    #[serde(default)]
    keywords: Vec<String>,
}

/// Reads a JSON Lines dataset file. Records missing an abstract or
/// highlights (or that fail to parse) are skipped with a diagnostic and
/// counted in the report. Duplicate ids are rejected.
pub fn ingest_corpus(path: &Path) -> Result<IngestReport> {
    let data = fs::read_to_string(path).map_err(|e| CoreError::io(path, e))?;
    let mut documents = Vec::new();
    let mut skipped = 0usize;
    let mut seen_ids = BTreeSet::new();

    for (lineno, line) in data.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record: RawRecord = match serde_json::from_str(line) {
            Ok(r) => r,
            Err(e) => {
                log::warn!(
                    "skipping malformed record at {}:{}: {e}",
                    path.display(),
                    lineno + 1
                );
                skipped += 1;
                continue;
            }
        };
        if record.id.is_empty() {
            log::warn!("skipping record with empty id at line {}", lineno + 1);
            skipped += 1;
            continue;
        }
        if !seen_ids.insert(record.id.clone()) {
            return Err(CoreError::InvalidInput(format!(
                "duplicate doc_id {:?} in {}",
                record.id,
                path.display()
            )));
        }
        let abstract_text = record.abstract_text.unwrap_or_default();
        let highlights: Vec<String> = record
            .highlights
            .unwrap_or_default()
            .into_iter()
            .filter(|h| !h.trim().is_empty())
            .collect();
        if abstract_text.trim().is_empty() || highlights.is_empty() {
            log::warn!(
                "skipping record {:?}: missing abstract or highlights",
                record.id
            );
            skipped += 1;
            continue;
        }
        documents.push(Document {
            doc_id: record.id,
            title: record.title,
            r#abstract: abstract_text,
            introduction: record.introduction,
            conclusion: record.conclusion,
            highlights,
            keywords: record.keywords,
        });
    }

    Ok(IngestReport { documents, skipped })
}

/// Lowercases and strips punctuation/special characters, keeping letters of
/// any script and ASCII digits. Every removed character becomes a space and
/// whitespace runs collapse, so word boundaries survive. Idempotent.
pub fn clean_text(raw: &str) -> String {
    let mut out = String::with_capacity(raw.len());
    let mut pending_space = false;
    for ch in raw.chars() {
        if ch.is_alphabetic() || ch.is_ascii_digit() {
            if pending_space && !out.is_empty() {
                out.push(' ');
            }
            pending_space = false;
            for lower in ch.to_lowercase() {
                if lower.is_alphabetic() || lower.is_ascii_digit() {
                    out.push(lower);
                }
            }
        } else {
            pending_space = true;
        }
    }
    out
}

/// A document with every section passed through [`clean_text`].
pub fn clean_document(doc: &Document) -> Document {
    Document {
        doc_id: doc.doc_id.clone(),
        title: clean_text(&doc.title),
        r#abstract: clean_text(&doc.r#abstract),
        introduction: clean_text(&doc.introduction),
        conclusion: clean_text(&doc.conclusion),
        highlights: doc.highlights.iter().map(|h| clean_text(h)).collect(),
        keywords: doc.keywords.clone(),
    }
}

/// Joins cleaned highlight bullets into the flat target string, one sentence
/// separator token between bullets, original order preserved.
pub fn join_highlights(bullets: &[String]) -> String {
    bullets
        .iter()
        .filter(|b| !b.is_empty())
        .cloned()
        .collect::<Vec<_>>()
        .join(&format!(" {SENTENCE_SEPARATOR} "))
}

/// Builds (source, target) pairs for one input mode from cleaned documents.
/// Documents lacking a section the mode requires are skipped with a
/// diagnostic.
pub fn build_examples(docs: &[Document], mode: InputMode) -> Vec<Example> {
    let mut examples = Vec::with_capacity(docs.len());
    for doc in docs {
        let source_text = match mode {
            InputMode::Abstract => doc.r#abstract.clone(),
            InputMode::AbstractConclusion => concat_sections(&doc.r#abstract, &doc.conclusion),
            InputMode::IntroductionConclusion => {
                concat_sections(&doc.introduction, &doc.conclusion)
            }
        };
        let target_text = join_highlights(&doc.highlights);
        let required_present = match mode {
            InputMode::Abstract => !doc.r#abstract.is_empty(),
            InputMode::AbstractConclusion => {
                !doc.r#abstract.is_empty() && !doc.conclusion.is_empty()
            }
            InputMode::IntroductionConclusion => {
                !doc.introduction.is_empty() && !doc.conclusion.is_empty()
            }
        };
        if !required_present || target_text.is_empty() {
            log::warn!(
                "skipping {:?}: missing a section required by mode {mode}",
                doc.doc_id
            );
            continue;
        }
        examples.push(Example {
            doc_id: doc.doc_id.clone(),
            source_text,
            target_text,
            mode,
        });
    }
    examples
}

fn concat_sections(a: &str, b: &str) -> String {
    match (a.is_empty(), b.is_empty()) {
        (true, _) | (_, true) => String::new(),
        _ => format!("{a} {b}"),
    }
}

/// Published split proportions: 8116 train, 1017 validation, 1014 test.
pub const SPLIT_RATIO: (usize, usize, usize) = (8116, 1017, 1014);

/// Split sizes for `n` examples in the published ratio. Validation and test
/// counts are rounded (floored at one each); the remainder goes to train.
pub fn split_sizes(n: usize) -> (usize, usize, usize) {
    let total = (SPLIT_RATIO.0 + SPLIT_RATIO.1 + SPLIT_RATIO.2) as f64;
    let round_share = |part: usize| -> usize {
        ((n as f64 * part as f64 / total).round() as usize).max(1)
    };
    let n_val = round_share(SPLIT_RATIO.1);
    let n_test = round_share(SPLIT_RATIO.2);
    let n_train = n - n_val - n_test;
    (n_train, n_val, n_test)
}

/// Seeded shuffle split in the published ratio. Deterministic for a fixed
/// seed. Fails when fewer than 3 examples are available.
pub fn split_corpus(examples: &[Example], split_seed: u64) -> Result<CorpusSplit> {
    if examples.len() < 3 {
        return Err(CoreError::InvalidInput(format!(
            "cannot form three non-empty splits from {} examples",
            examples.len()
        )));
    }
    let (n_train, n_val, n_test) = split_sizes(examples.len());
    let mut order: Vec<usize> = (0..examples.len()).collect();
    let mut rng = ChaCha20Rng::seed_from_u64(split_seed);
    order.shuffle(&mut rng);

    let pick = |ix: &[usize]| ix.iter().map(|&i| examples[i].clone()).collect::<Vec<_>>();
    Ok(CorpusSplit {
        train: pick(&order[..n_train]),
        validation: pick(&order[n_train..n_train + n_val]),
        test: pick(&order[n_train + n_val..n_train + n_val + n_test]),
        split_seed,
    })
}

/// Doc-id assignments parsed from a split manifest file: `[train]`, `[val]`
/// and `[test]` section headers, one doc_id per line.
#[derive(Debug, Clone, Default)]
pub struct SplitManifest {
    pub train: Vec<String>,
    pub val: Vec<String>,
    pub test: Vec<String>,
}

pub fn read_split_manifest(path: &Path) -> Result<SplitManifest> {
    let data = fs::read_to_string(path).map_err(|e| CoreError::io(path, e))?;
    let mut manifest = SplitManifest::default();
    let mut section: Option<&str> = None;
    for (lineno, line) in data.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match line {
            "[train]" => section = Some("train"),
            "[val]" => section = Some("val"),
            "[test]" => section = Some("test"),
            id => match section {
                Some("train") => manifest.train.push(id.to_string()),
                Some("val") => manifest.val.push(id.to_string()),
                Some("test") => manifest.test.push(id.to_string()),
                _ => {
                    return Err(CoreError::Malformed {
                        what: "split manifest",
                        path: path.into(),
                        line: lineno + 1,
                        message: format!("doc_id {id:?} before any [train]/[val]/[test] header"),
                    })
                }
            },
        }
    }
    Ok(manifest)
}

/// Honors an explicit split manifest exactly. Every example must be assigned
/// to exactly one section; manifest ids absent from the corpus are an error.
pub fn split_with_manifest(examples: &[Example], manifest: &SplitManifest) -> Result<CorpusSplit> {
    let index: std::collections::BTreeMap<&str, &Example> = examples
        .iter()
        .map(|e| (e.doc_id.as_str(), e))
        .collect();
    let mut assigned = BTreeSet::new();
    let mut resolve = |ids: &[String], section: &str| -> Result<Vec<Example>> {
        ids.iter()
            .map(|id| {
                if !assigned.insert(id.clone()) {
                    return Err(CoreError::InvalidInput(format!(
                        "doc_id {id:?} assigned to more than one split section"
                    )));
                }
                index.get(id.as_str()).map(|e| (*e).clone()).ok_or_else(|| {
                    CoreError::InvalidInput(format!(
                        "split manifest {section} section names unknown doc_id {id:?}"
                    ))
                })
            })
            .collect()
    };
    let train = resolve(&manifest.train, "train")?;
    let validation = resolve(&manifest.val, "val")?;
    let test = resolve(&manifest.test, "test")?;
    if train.is_empty() || validation.is_empty() || test.is_empty() {
        return Err(CoreError::InvalidInput(
            "split manifest leaves an empty section".to_string(),
        ));
    }
    Ok(CorpusSplit {
        train,
        validation,
        test,
        split_seed: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn record(id: &str, abstract_text: &str, highlights: &[&str]) -> String {
        serde_json::json!({
            "id": id,
            "title": "t",
            "abstract": abstract_text,
            "introduction": "intro text",
            "conclusion": "conclusion text",
            "highlights": highlights,
        })
        .to_string()
    }

    fn write_lines(lines: &[String]) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        for l in lines {
            writeln!(f, "{l}").unwrap();
        }
        f
    }

    #[test]
    fn ingest_complete_records() {
        let f = write_lines(&[
            record("a", "alpha", &["h1"]),
            record("b", "beta", &["h2"]),
            record("c", "gamma", &["h3"]),
        ]);
        let report = ingest_corpus(f.path()).unwrap();
        assert_eq!(report.documents.len(), 3);
        assert_eq!(report.skipped, 0);
    }

    #[test]
    fn ingest_skips_record_missing_highlights() {
        let no_highlights = serde_json::json!({
            "id": "x", "title": "t", "abstract": "text",
            "introduction": "", "conclusion": ""
        })
        .to_string();
        let f = write_lines(&[record("a", "alpha", &["h"]), no_highlights]);
        let report = ingest_corpus(f.path()).unwrap();
        assert_eq!(report.documents.len(), 1);
        assert_eq!(report.skipped, 1);
    }

    #[test]
    fn ingest_rejects_duplicate_ids() {
        let f = write_lines(&[record("a", "alpha", &["h"]), record("a", "beta", &["h"])]);
        assert!(ingest_corpus(f.path()).is_err());
    }

    #[test]
    fn ingest_missing_file_is_fatal() {
        assert!(ingest_corpus(Path::new("/nonexistent/corpus.jsonl")).is_err());
    }

    #[test]
    fn clean_text_empty() {
        assert_eq!(clean_text(""), "");
    }

    #[test]
    fn clean_text_satellite_example() {
        assert_eq!(
            clean_text("KOMPSAT-2 (Korea Multi-Purpose Satellite-2)"),
            "kompsat 2 korea multi purpose satellite 2"
        );
    }

    #[test]
    fn clean_text_hyphen_comma_removal() {
        assert_eq!(
            clean_text("Multi-Orbit, Long-Term Planning!"),
            "multi orbit long term planning"
        );
    }

    #[test]
    fn clean_text_keeps_digits() {
        assert_eq!(clean_text("3D meshes, 42% better"), "3d meshes 42 better");
    }

    #[test]
    fn clean_text_is_idempotent() {
        for raw in ["A--B  c!", "", "déjà vu 12.5", "x\n\ty"] {
            let once = clean_text(raw);
            assert_eq!(clean_text(&once), once);
        }
    }

    fn doc(id: &str, abs: &str, intro: &str, conc: &str, highlights: &[&str]) -> Document {
        Document {
            doc_id: id.into(),
            title: String::new(),
            r#abstract: abs.into(),
            introduction: intro.into(),
            conclusion: conc.into(),
            highlights: highlights.iter().map(|s| s.to_string()).collect(),
            keywords: vec![],
        }
    }

    #[test]
    fn build_examples_abstract_mode_is_identity() {
        let docs = vec![doc("d", "a b", "i", "c", &["h"])];
        let ex = build_examples(&docs, InputMode::Abstract);
        assert_eq!(ex.len(), 1);
        assert_eq!(ex[0].source_text, "a b");
    }

    #[test]
    fn build_examples_concatenates_abstract_and_conclusion() {
        let docs = vec![doc("d", "x", "i", "y", &["h"])];
        let ex = build_examples(&docs, InputMode::AbstractConclusion);
        assert_eq!(ex[0].source_text, "x y");
    }

    #[test]
    fn build_examples_skips_doc_missing_conclusion() {
        let docs = vec![doc("d", "a", "i", "", &["h"])];
        assert!(build_examples(&docs, InputMode::IntroductionConclusion).is_empty());
    }

    #[test]
    fn build_examples_joins_bullets_in_order() {
        let docs = vec![doc("d", "a", "", "", &["first point", "second point"])];
        let ex = build_examples(&docs, InputMode::Abstract);
        assert_eq!(ex[0].target_text, "first point . second point");
    }

    #[test]
    fn build_examples_empty_input() {
        assert!(build_examples(&[], InputMode::Abstract).is_empty());
    }

    #[test]
    fn build_examples_no_duplicate_doc_ids() {
        let docs: Vec<Document> = (0..20)
            .map(|i| doc(&format!("d{i}"), "a", "i", "c", &["h"]))
            .collect();
        let ex = build_examples(&docs, InputMode::Abstract);
        assert_eq!(ex.len(), docs.len());
        let ids: BTreeSet<_> = ex.iter().map(|e| e.doc_id.clone()).collect();
        assert_eq!(ids.len(), ex.len());
    }

    fn examples(n: usize) -> Vec<Example> {
        (0..n)
            .map(|i| Example {
                doc_id: format!("d{i}"),
                source_text: format!("src {i}"),
                target_text: format!("tgt {i}"),
                mode: InputMode::Abstract,
            })
            .collect()
    }

    #[test]
    fn split_sizes_match_published_counts() {
        assert_eq!(split_sizes(10147), (8116, 1017, 1014));
    }

    #[test]
    fn split_ten_examples_seed_seven() {
        let ex = examples(10);
        let split = split_corpus(&ex, 7).unwrap();
        assert_eq!(
            (split.train.len(), split.validation.len(), split.test.len()),
            (8, 1, 1)
        );
        // Same seed reproduces the same assignment.
        let again = split_corpus(&ex, 7).unwrap();
        let ids = |s: &[Example]| s.iter().map(|e| e.doc_id.clone()).collect::<Vec<_>>();
        assert_eq!(ids(&split.train), ids(&again.train));
        assert_eq!(ids(&split.validation), ids(&again.validation));
        assert_eq!(ids(&split.test), ids(&again.test));
    }

    #[test]
    fn split_two_examples_is_fatal() {
        assert!(split_corpus(&examples(2), 0).is_err());
    }

    #[test]
    fn split_partitions_are_disjoint_and_exhaustive() {
        let ex = examples(37);
        let split = split_corpus(&ex, 123).unwrap();
        let mut all: Vec<String> = split
            .train
            .iter()
            .chain(&split.validation)
            .chain(&split.test)
            .map(|e| e.doc_id.clone())
            .collect();
        assert_eq!(all.len(), 37);
        all.sort();
        all.dedup();
        assert_eq!(all.len(), 37, "split sections overlap");
    }

    #[test]
    fn manifest_split_is_honored_exactly() {
        let ex = examples(5);
        let manifest = SplitManifest {
            train: vec!["d0".into(), "d3".into(), "d4".into()],
            val: vec!["d2".into()],
            test: vec!["d1".into()],
        };
        let split = split_with_manifest(&ex, &manifest).unwrap();
        assert_eq!(split.train.len(), 3);
        assert_eq!(split.validation[0].doc_id, "d2");
        assert_eq!(split.test[0].doc_id, "d1");
    }

    #[test]
    fn manifest_with_unknown_id_is_rejected() {
        let ex = examples(3);
        let manifest = SplitManifest {
            train: vec!["d0".into()],
            val: vec!["d1".into()],
            test: vec!["ghost".into()],
        };
        assert!(split_with_manifest(&ex, &manifest).is_err());
    }

    #[test]
    fn manifest_file_round_trip() {
        let f = write_lines(&[
            "[train]".into(),
            "a".into(),
            "b".into(),
            "[val]".into(),
            "c".into(),
            "[test]".into(),
            "d".into(),
        ]);
        let m = read_split_manifest(f.path()).unwrap();
        assert_eq!(m.train, vec!["a", "b"]);
        assert_eq!(m.val, vec!["c"]);
        assert_eq!(m.test, vec!["d"]);
    }
}
