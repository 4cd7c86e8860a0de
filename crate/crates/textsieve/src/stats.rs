//! Corpus statistics: per-source document-length distributions and
//! stage-reduction summaries, emitted as plot-ready CSV tables.
//!
//! Lengths are measured in words. Quantiles use the nearest-rank method
//! (the value at rank `ceil(p * n)` of the sorted counts), which is
//! deterministic and easy to verify against its own definition.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::corpus::{Document, ReportError, RunReport};
use crate::text::word_count;

#[derive(Debug, thiserror::Error)]
pub enum StatsError {
    #[error(transparent)]
    Report(#[from] ReportError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

/// Five-number summary plus mean of per-document word counts.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct LengthSummary {
    pub count: u64,
    pub min: u64,
    pub q1: u64,
    pub median: u64,
    pub q3: u64,
    pub max: u64,
    pub mean: f64,
}

/// Length summaries keyed by source name.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct LengthDistribution {
    pub by_source: BTreeMap<String, LengthSummary>,
}

impl LengthDistribution {
    /// True when the corpus had no documents at all.
    pub fn is_empty(&self) -> bool {
        self.by_source.is_empty()
    }
}

/// The value at rank `ceil(p * n)` of an ascending-sorted slice, i.e.
/// the smallest element whose cumulative count reaches a fraction `p`
/// of the data.
pub fn nearest_rank_quantile(sorted: &[u64], p: f64) -> u64 {
    assert!(!sorted.is_empty(), "quantile of an empty slice");
    debug_assert!(sorted.windows(2).all(|w| w[0] <= w[1]));
    let n = sorted.len();
    let rank = (p * n as f64).ceil() as usize;
    sorted[rank.clamp(1, n) - 1]
}

fn summarize(counts: &mut Vec<u64>) -> LengthSummary {
    counts.sort_unstable();
    let n = counts.len() as u64;
    let sum: u64 = counts.iter().sum();
    LengthSummary {
        count: n,
        min: counts[0],
        q1: nearest_rank_quantile(counts, 0.25),
        median: nearest_rank_quantile(counts, 0.50),
        q3: nearest_rank_quantile(counts, 0.75),
        max: *counts.last().expect("nonempty"),
        mean: sum as f64 / n as f64,
    }
}

/// Word-count distribution per source. An empty corpus yields an empty
/// distribution; callers can check [`LengthDistribution::is_empty`].
pub fn length_distribution<'a>(
    docs: impl IntoIterator<Item = &'a Document>,
) -> LengthDistribution {
    let mut counts: BTreeMap<String, Vec<u64>> = BTreeMap::new();
    for doc in docs {
        counts.entry(doc.source.as_str().to_string()).or_default().push(word_count(&doc.text));
    }
    LengthDistribution {
        by_source: counts.into_iter().map(|(src, mut c)| (src, summarize(&mut c))).collect(),
    }
}

/// One logarithmic histogram bin: documents with `lower <= words < upper`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub lower: u64,
    pub upper: u64,
    pub count: u64,
}

/// Doubling-width bins over word counts, for log-scale length plots.
/// Zero-length documents land in the first bin.
pub fn log2_histogram(word_counts: &[u64]) -> Vec<HistogramBin> {
    let Some(&max) = word_counts.iter().max() else {
        return Vec::new();
    };
    let mut bins = Vec::new();
    let mut lower = 0u64;
    let mut upper = 1u64;
    loop {
        bins.push(HistogramBin { lower, upper, count: 0 });
        if upper > max {
            break;
        }
        lower = upper;
        upper *= 2;
    }
    for &c in word_counts {
        let idx = bins
            .iter()
            .position(|b| c >= b.lower && c < b.upper)
            .expect("bins cover 0..=max");
        bins[idx].count += 1;
    }
    bins
}

/// Document survival for one source, split at the dedup barrier.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ReductionRow {
    pub source: String,
    pub initial_docs: u64,
    pub after_preprocessing: u64,
    pub after_dedup: u64,
}

impl ReductionRow {
    fn zero(source: &str) -> ReductionRow {
        ReductionRow {
            source: source.to_string(),
            initial_docs: 0,
            after_preprocessing: 0,
            after_dedup: 0,
        }
    }

    /// Percent of documents surviving all pre-dedup stages; `None` when
    /// nothing came in.
    pub fn preprocessing_pct_kept(&self) -> Option<f64> {
        pct(self.after_preprocessing, self.initial_docs)
    }

    /// Percent of dedup input that was retained; `None` when dedup saw
    /// nothing.
    pub fn dedup_pct_kept(&self) -> Option<f64> {
        pct(self.after_dedup, self.after_preprocessing)
    }

    pub fn overall_pct_kept(&self) -> Option<f64> {
        pct(self.after_dedup, self.initial_docs)
    }
}

fn pct(kept: u64, input: u64) -> Option<f64> {
    (input > 0).then(|| kept as f64 / input as f64 * 100.0)
}

/// Per-source reduction rows plus their sum.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ReductionSummary {
    pub rows: Vec<ReductionRow>,
    pub overall: ReductionRow,
}

/// Folds run reports into per-source before/after counts. Reports are
/// validated first, so inconsistent chains fail with the offending stage
/// named. Preprocessing covers every stage before the one labeled
/// `dedup`; a chain without a dedup stage counts everything as
/// preprocessing.
pub fn reduction_summary(reports: &[RunReport]) -> Result<ReductionSummary, StatsError> {
    for report in reports {
        report.validate()?;
    }
    let mut acc: BTreeMap<String, ReductionRow> = BTreeMap::new();
    for report in reports {
        if report.sources.is_empty() {
            accumulate(&mut acc, "all", &report.stages);
        } else {
            for (source, chain) in &report.sources {
                accumulate(&mut acc, source, chain);
            }
        }
    }

    let mut overall = ReductionRow::zero("overall");
    for row in acc.values() {
        overall.initial_docs += row.initial_docs;
        overall.after_preprocessing += row.after_preprocessing;
        overall.after_dedup += row.after_dedup;
    }
    Ok(ReductionSummary { rows: acc.into_values().collect(), overall })
}

fn accumulate(
    acc: &mut BTreeMap<String, ReductionRow>,
    source: &str,
    chain: &[crate::corpus::StageReport],
) {
    if chain.is_empty() {
        return;
    }
    let initial = chain[0].input_docs;
    let (after_pre, after_dedup) = match chain.iter().rposition(|s| s.stage == "dedup") {
        Some(i) => (chain[i].input_docs, chain[i].kept_docs),
        None => {
            let last = chain.last().expect("nonempty chain").kept_docs;
            (last, last)
        }
    };
    let row =
        acc.entry(source.to_string()).or_insert_with(|| ReductionRow::zero(source));
    row.initial_docs += initial;
    row.after_preprocessing += after_pre;
    row.after_dedup += after_dedup;
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
struct LengthCsvRow {
    source: String,
    count: u64,
    min: u64,
    q1: u64,
    median: u64,
    q3: u64,
    max: u64,
    mean: f64,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
struct ReductionCsvRow {
    source: String,
    stage: String,
    input: u64,
    kept: u64,
    pct_kept: Option<f64>,
}

fn reduction_csv_rows(summary: &ReductionSummary) -> Vec<ReductionCsvRow> {
    let mut out = Vec::new();
    for row in summary.rows.iter().chain(std::iter::once(&summary.overall)) {
        out.push(ReductionCsvRow {
            source: row.source.clone(),
            stage: "preprocessing".into(),
            input: row.initial_docs,
            kept: row.after_preprocessing,
            pct_kept: row.preprocessing_pct_kept(),
        });
        out.push(ReductionCsvRow {
            source: row.source.clone(),
            stage: "dedup".into(),
            input: row.after_preprocessing,
            kept: row.after_dedup,
            pct_kept: row.dedup_pct_kept(),
        });
        out.push(ReductionCsvRow {
            source: row.source.clone(),
            stage: "overall".into(),
            input: row.initial_docs,
            kept: row.after_dedup,
            pct_kept: row.overall_pct_kept(),
        });
    }
    out
}

/// Writes the length table (`source,count,min,q1,median,q3,max,mean`)
/// to `path`. An empty distribution produces a header-only file.
pub fn emit_length_table(
    dist: &LengthDistribution,
    path: impl AsRef<Path>,
) -> Result<(), StatsError> {
    let path = path.as_ref();
    let mut writer = csv::Writer::from_path(path)?;
    if dist.is_empty() {
        writer.write_record(["source", "count", "min", "q1", "median", "q3", "max", "mean"])?;
    }
    for (source, s) in &dist.by_source {
        writer.serialize(LengthCsvRow {
            source: source.clone(),
            count: s.count,
            min: s.min,
            q1: s.q1,
            median: s.median,
            q3: s.q3,
            max: s.max,
            mean: s.mean,
        })?;
    }
    writer.flush().map_err(|source| StatsError::Io { path: path.to_path_buf(), source })
}

/// Writes the reduction table (`source,stage,input,kept,pct_kept`) to
/// `path`, with stage one of `preprocessing`, `dedup`, `overall` and a
/// final `overall` source row group summing all sources. An empty
/// summary produces a header-only file.
pub fn emit_reduction_table(
    summary: &ReductionSummary,
    path: impl AsRef<Path>,
) -> Result<(), StatsError> {
    let path = path.as_ref();
    let mut writer = csv::Writer::from_path(path)?;
    let rows = if summary.rows.is_empty() { Vec::new() } else { reduction_csv_rows(summary) };
    if rows.is_empty() {
        writer.write_record(["source", "stage", "input", "kept", "pct_kept"])?;
    }
    for row in &rows {
        writer.serialize(row)?;
    }
    writer.flush().map_err(|source| StatsError::Io { path: path.to_path_buf(), source })
}

/// Writes `lengths.csv` and `reduction.csv` under `dir` and returns
/// their paths.
pub fn emit_tables(
    dist: &LengthDistribution,
    summary: &ReductionSummary,
    dir: impl AsRef<Path>,
) -> Result<(PathBuf, PathBuf), StatsError> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)
        .map_err(|source| StatsError::Io { path: dir.to_path_buf(), source })?;
    let lengths_path = dir.join("lengths.csv");
    emit_length_table(dist, &lengths_path)?;
    let reduction_path = dir.join("reduction.csv");
    emit_reduction_table(summary, &reduction_path)?;
    Ok((lengths_path, reduction_path))
}
