//! Corpus model and JSONL interchange.
//!
//! A corpus is a stream of [`Document`]s, one JSON object per line with
//! fields `id`, `text`, `source`, and `meta` (a flat string map). Reading
//! is lenient by default: malformed records are counted and skipped. In
//! strict mode the first malformed record aborts the stream with its line
//! number.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Known corpus sources. The set is closed: unknown source names are
/// rejected at ingestion so that per-source policies can never silently
/// fall through to a default.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceKind {
    Web,
    Culturax,
    Madlad,
    Virgool,
    Wikishia,
    BookText,
    PaperText,
    PaperOcr,
    Social,
}

impl SourceKind {
    pub const ALL: [SourceKind; 9] = [
        SourceKind::Web,
        SourceKind::Culturax,
        SourceKind::Madlad,
        SourceKind::Virgool,
        SourceKind::Wikishia,
        SourceKind::BookText,
        SourceKind::PaperText,
        SourceKind::PaperOcr,
        SourceKind::Social,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SourceKind::Web => "web",
            SourceKind::Culturax => "culturax",
            SourceKind::Madlad => "madlad",
            SourceKind::Virgool => "virgool",
            SourceKind::Wikishia => "wikishia",
            SourceKind::BookText => "book_text",
            SourceKind::PaperText => "paper_text",
            SourceKind::PaperOcr => "paper_ocr",
            SourceKind::Social => "social",
        }
    }
}

impl fmt::Display for SourceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SourceKind {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SourceKind::ALL
            .iter()
            .copied()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| CorpusError::UnknownSource { name: s.to_string(), line: 0 })
    }
}

/// One document flowing through the pipeline. `original_text` is the text
/// as ingested, kept for audit; the stages rewrite only `text`. It is not
/// part of the wire format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub source: SourceKind,
    pub text: String,
    #[serde(skip)]
    pub original_text: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub meta: BTreeMap<String, String>,
}

impl Document {
    pub fn new(id: impl Into<String>, source: SourceKind, text: impl Into<String>) -> Self {
        let text = text.into();
        Document {
            id: id.into(),
            source,
            original_text: text.clone(),
            text,
            meta: BTreeMap::new(),
        }
    }
}

/// Why a document was dropped. Exactly one reason accompanies each drop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DropReason {
    TooShort,
    NonPersianMajority,
    RepeatedWords,
    ShortLineMajority,
    OovExcess,
    AvgWordLengthOutOfRange,
    NumericSymbolicExcess,
    StopwordDeficit,
    OcrOovExcess,
    OcrMergedWords,
    Duplicate,
    ShortReply,
    Corrupted,
}

impl DropReason {
    pub fn as_str(self) -> &'static str {
        match self {
            DropReason::TooShort => "too_short",
            DropReason::NonPersianMajority => "non_persian_majority",
            DropReason::RepeatedWords => "repeated_words",
            DropReason::ShortLineMajority => "short_line_majority",
            DropReason::OovExcess => "oov_excess",
            DropReason::AvgWordLengthOutOfRange => "avg_word_length_out_of_range",
            DropReason::NumericSymbolicExcess => "numeric_symbolic_excess",
            DropReason::StopwordDeficit => "stopword_deficit",
            DropReason::OcrOovExcess => "ocr_oov_excess",
            DropReason::OcrMergedWords => "ocr_merged_words",
            DropReason::Duplicate => "duplicate",
            DropReason::ShortReply => "short_reply",
            DropReason::Corrupted => "corrupted",
        }
    }
}

impl fmt::Display for DropReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Verdict of a document filter. A reason is present exactly when the
/// verdict is a drop.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterDecision {
    Keep,
    Drop(DropReason),
}

impl FilterDecision {
    pub fn is_keep(self) -> bool {
        matches!(self, FilterDecision::Keep)
    }
}

/// Per-stage accounting within a run.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageReport {
    pub stage: String,
    pub input_docs: u64,
    pub kept_docs: u64,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub dropped_by_reason: BTreeMap<DropReason, u64>,
}

impl StageReport {
    pub fn dropped_docs(&self) -> u64 {
        self.dropped_by_reason.values().sum()
    }
}

/// Accounting for a whole run: an aggregate stage chain plus the same
/// chain per source. Conservation holds at every stage: input documents
/// equal kept documents plus the sum of drops.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunReport {
    pub stages: Vec<StageReport>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub sources: BTreeMap<String, Vec<StageReport>>,
}

/// A conservation or chaining failure inside a [`RunReport`].
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReportError {
    #[error("stage {stage}: input {input} != kept {kept} + dropped {dropped}")]
    Conservation { stage: String, input: u64, kept: u64, dropped: u64 },
    #[error("stage {stage}: input {input} does not chain from previous kept {prev_kept}")]
    Chaining { stage: String, input: u64, prev_kept: u64 },
    #[error("stage {stage}: aggregate count {aggregate} != sum over sources {sum}")]
    SourceMismatch { stage: String, aggregate: u64, sum: u64 },
    #[error("reports cannot be merged: stage lists differ at {stage}")]
    MergeShape { stage: String },
}

impl RunReport {
    /// Verifies conservation within each stage, chaining between stages,
    /// and agreement between the aggregate chain and the per-source chains.
    pub fn validate(&self) -> Result<(), ReportError> {
        validate_chain(&self.stages)?;
        for chain in self.sources.values() {
            validate_chain(chain)?;
        }
        if !self.sources.is_empty() {
            for (i, stage) in self.stages.iter().enumerate() {
                let (mut input, mut kept) = (0u64, 0u64);
                for chain in self.sources.values() {
                    if let Some(s) = chain.get(i) {
                        input += s.input_docs;
                        kept += s.kept_docs;
                    }
                }
                if input != stage.input_docs {
                    return Err(ReportError::SourceMismatch {
                        stage: stage.stage.clone(),
                        aggregate: stage.input_docs,
                        sum: input,
                    });
                }
                if kept != stage.kept_docs {
                    return Err(ReportError::SourceMismatch {
                        stage: stage.stage.clone(),
                        aggregate: stage.kept_docs,
                        sum: kept,
                    });
                }
            }
        }
        Ok(())
    }

    /// Merges the report of another shard processed with the same stage
    /// list. Counts add; the operation is associative and commutative.
    pub fn merge(&self, other: &RunReport) -> Result<RunReport, ReportError> {
        let stages = merge_chains(&self.stages, &other.stages)?;
        let mut sources = self.sources.clone();
        for (src, chain) in &other.sources {
            match sources.get(src) {
                Some(existing) => {
                    sources.insert(src.clone(), merge_chains(existing, chain)?);
                }
                None => {
                    sources.insert(src.clone(), chain.clone());
                }
            }
        }
        Ok(RunReport { stages, sources })
    }
}

fn validate_chain(stages: &[StageReport]) -> Result<(), ReportError> {
    for stage in stages {
        let dropped = stage.dropped_docs();
        if stage.input_docs != stage.kept_docs + dropped {
            return Err(ReportError::Conservation {
                stage: stage.stage.clone(),
                input: stage.input_docs,
                kept: stage.kept_docs,
                dropped,
            });
        }
    }
    for pair in stages.windows(2) {
        if pair[1].input_docs != pair[0].kept_docs {
            return Err(ReportError::Chaining {
                stage: pair[1].stage.clone(),
                input: pair[1].input_docs,
                prev_kept: pair[0].kept_docs,
            });
        }
    }
    Ok(())
}

fn merge_chains(a: &[StageReport], b: &[StageReport]) -> Result<Vec<StageReport>, ReportError> {
    if a.len() != b.len() {
        return Err(ReportError::MergeShape {
            stage: format!("length {} vs {}", a.len(), b.len()),
        });
    }
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            if x.stage != y.stage {
                return Err(ReportError::MergeShape { stage: format!("{} vs {}", x.stage, y.stage) });
            }
            let mut dropped = x.dropped_by_reason.clone();
            for (reason, count) in &y.dropped_by_reason {
                *dropped.entry(*reason).or_insert(0) += count;
            }
            Ok(StageReport {
                stage: x.stage.clone(),
                input_docs: x.input_docs + y.input_docs,
                kept_docs: x.kept_docs + y.kept_docs,
                dropped_by_reason: dropped,
            })
        })
        .collect()
}

/// Errors raised by corpus IO.
#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("io error on {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("line {line}: invalid UTF-8")]
    InvalidUtf8 { line: u64 },
    #[error("line {line}: malformed record: {message}")]
    Malformed { line: u64, message: String },
    #[error("line {line}: record has empty id")]
    EmptyId { line: u64 },
    #[error("line {line}: duplicate id {id}")]
    DuplicateId { id: String, line: u64 },
    #[error("line {line}: unknown source {name}")]
    UnknownSource { name: String, line: u64 },
}

#[derive(Deserialize)]
struct RawRecord {
    id: String,
    text: String,
    #[serde(default)]
    source: Option<String>,
    #[serde(default)]
    meta: BTreeMap<String, String>,
}

/// Streaming reader over a JSONL corpus file.
///
/// Yields `Ok(Document)` per valid record. In lenient mode (the default)
/// malformed records are skipped and counted; in strict mode the first
/// problem is yielded as an error and the stream ends.
pub struct CorpusReader {
    reader: BufReader<File>,
    path: PathBuf,
    default_source: SourceKind,
    strict: bool,
    line: u64,
    skipped: u64,
    seen_ids: HashSet<String>,
    done: bool,
}

impl CorpusReader {
    /// Records skipped so far in lenient mode.
    pub fn skipped_records(&self) -> u64 {
        self.skipped
    }

    fn parse_line(&mut self, bytes: &[u8]) -> Result<Document, CorpusError> {
        let line = self.line;
        let text = std::str::from_utf8(bytes).map_err(|_| CorpusError::InvalidUtf8 { line })?;
        let raw: RawRecord = serde_json::from_str(text)
            .map_err(|e| CorpusError::Malformed { line, message: e.to_string() })?;
        if raw.id.is_empty() {
            return Err(CorpusError::EmptyId { line });
        }
        if !self.seen_ids.insert(raw.id.clone()) {
            return Err(CorpusError::DuplicateId { id: raw.id, line });
        }
        let source = match raw.source {
            Some(name) => name
                .parse::<SourceKind>()
                .map_err(|_| CorpusError::UnknownSource { name, line })?,
            None => self.default_source,
        };
        Ok(Document {
            id: raw.id,
            source,
            original_text: raw.text.clone(),
            text: raw.text,
            meta: raw.meta,
        })
    }
}

impl Iterator for CorpusReader {
    type Item = Result<Document, CorpusError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        loop {
            let mut buf = Vec::new();
            match self.reader.read_until(b'\n', &mut buf) {
                Ok(0) => return None,
                Ok(_) => {}
                Err(e) => {
                    self.done = true;
                    return Some(Err(CorpusError::Io { path: self.path.clone(), source: e }));
                }
            }
            self.line += 1;
            if buf.last() == Some(&b'\n') {
                buf.pop();
            }
            if buf.last() == Some(&b'\r') {
                buf.pop();
            }
            if buf.is_empty() {
                continue;
            }
            match self.parse_line(&buf) {
                Ok(doc) => return Some(Ok(doc)),
                Err(e) if self.strict => {
                    self.done = true;
                    return Some(Err(e));
                }
                Err(_) => {
                    self.skipped += 1;
                }
            }
        }
    }
}

/// Opens a JSONL corpus for streaming. Records without a `source` field
/// are assigned `default_source`.
pub fn read_corpus(
    path: impl AsRef<Path>,
    default_source: SourceKind,
    strict: bool,
) -> Result<CorpusReader, CorpusError> {
    let path = path.as_ref().to_path_buf();
    let file = File::open(&path).map_err(|e| CorpusError::Io { path: path.clone(), source: e })?;
    Ok(CorpusReader {
        reader: BufReader::new(file),
        path,
        default_source,
        strict,
        line: 0,
        skipped: 0,
        seen_ids: HashSet::new(),
        done: false,
    })
}

/// Reads a whole corpus into memory, returning the documents and the number
/// of records skipped (always 0 in strict mode, which fails instead).
pub fn read_corpus_all(
    path: impl AsRef<Path>,
    default_source: SourceKind,
    strict: bool,
) -> Result<(Vec<Document>, u64), CorpusError> {
    let mut reader = read_corpus(path, default_source, strict)?;
    let mut docs = Vec::new();
    for doc in &mut reader {
        docs.push(doc?);
    }
    Ok((docs, reader.skipped_records()))
}

/// Path of the marker file that flags a partially written corpus.
pub fn partial_marker_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".partial");
    path.with_file_name(name)
}

/// Writes documents as JSONL and returns the count. A `<name>.partial`
/// marker file exists for the duration of the write and is removed on
/// success, so an interrupted write leaves the marker behind.
pub fn write_corpus<'a>(
    docs: impl IntoIterator<Item = &'a Document>,
    path: impl AsRef<Path>,
) -> Result<u64, CorpusError> {
    let path = path.as_ref();
    let io_err = |e: io::Error| CorpusError::Io { path: path.to_path_buf(), source: e };
    let marker = partial_marker_path(path);
    File::create(&marker).map_err(io_err)?;
    let file = File::create(path).map_err(io_err)?;
    let mut writer = BufWriter::new(file);
    let mut count = 0u64;
    for doc in docs {
        serde_json::to_writer(&mut writer, doc)
            .map_err(|e| io_err(io::Error::new(io::ErrorKind::InvalidData, e)))?;
        writer.write_all(b"\n").map_err(io_err)?;
        count += 1;
    }
    writer.flush().map_err(io_err)?;
    std::fs::remove_file(&marker).map_err(io_err)?;
    Ok(count)
}
