//! Document-level quality metrics and keep/drop policies.
//!
//! A document is reduced to [`DocStats`], a policy supplies thresholds,
//! and an evaluator checks the criteria in a fixed order, attributing the
//! drop to the first violated criterion. Every comparison is strict, so a
//! document sitting exactly on a threshold is kept.

use std::collections::{HashMap, HashSet};
use std::path::{Path, PathBuf};
use std::sync::{Arc, LazyLock};

use serde::{Deserialize, Serialize};

use crate::corpus::{DropReason, FilterDecision};
use crate::text::{
    char_ratio, is_numeric_char, is_persian_char, is_symbolic_char, lexicon_form, word_count,
    words,
};

/// Per-document quality measurements. Fractions are 0 when their
/// denominator is empty, so an empty document yields all-zero stats.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DocStats {
    pub word_count: u64,
    pub persian_char_ratio: f64,
    pub avg_word_len: f64,
    pub numeric_symbolic_char_ratio: f64,
    /// Fraction of non-blank lines with fewer than the policy's
    /// `short_line_word_count` words.
    pub short_line_frac: f64,
    /// Count of the most frequent word over the word count.
    pub max_word_repetition_frac: f64,
    /// Persian plus Arabic stopwords over the word count.
    pub stopword_frac: f64,
    /// Words absent from the vocabulary, over the word count; 0 when the
    /// lexicons carry no vocabulary.
    pub oov_frac: f64,
    /// Words longer than the policy's `long_word_chars`.
    pub long_word_count: u64,
}

#[derive(Debug, thiserror::Error)]
pub enum LexiconError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("lexicon {name} is empty")]
    Empty { name: &'static str },
}

/// Stopword sets and the optional vocabulary for out-of-vocabulary
/// checks. Lookups happen on the edge-trimmed form of each token, so
/// `کتاب،` matches the entry `کتاب`.
#[derive(Debug, Clone, Default)]
pub struct Lexicons {
    pub stopwords_fa: HashSet<String>,
    pub stopwords_ar: HashSet<String>,
    pub vocabulary: HashSet<String>,
}

fn parse_word_list(src: &str) -> HashSet<String> {
    src.lines()
        .map(|line| line.split('#').next().unwrap_or("").trim())
        .filter(|entry| !entry.is_empty())
        .map(str::to_string)
        .collect()
}

static BUNDLED_LEXICONS: LazyLock<Arc<Lexicons>> = LazyLock::new(|| {
    Arc::new(Lexicons {
        stopwords_fa: parse_word_list(include_str!("../data/stopwords_fa.txt")),
        stopwords_ar: parse_word_list(include_str!("../data/stopwords_ar.txt")),
        vocabulary: HashSet::new(),
    })
});

impl Lexicons {
    /// The stopword lists shipped with the crate; no vocabulary.
    pub fn bundled() -> Arc<Lexicons> {
        Arc::clone(&BUNDLED_LEXICONS)
    }

    /// Loads word lists (one entry per line, `#` comments) from files.
    /// Either stopword path may be omitted to keep the bundled list.
    pub fn from_files(
        stopwords_fa: Option<&Path>,
        stopwords_ar: Option<&Path>,
        vocabulary: Option<&Path>,
    ) -> Result<Lexicons, LexiconError> {
        let read = |path: &Path| -> Result<HashSet<String>, LexiconError> {
            let src = std::fs::read_to_string(path)
                .map_err(|e| LexiconError::Io { path: path.to_path_buf(), source: e })?;
            Ok(parse_word_list(&src))
        };
        let bundled = Lexicons::bundled();
        let mut lex = Lexicons {
            stopwords_fa: bundled.stopwords_fa.clone(),
            stopwords_ar: bundled.stopwords_ar.clone(),
            vocabulary: HashSet::new(),
        };
        if let Some(path) = stopwords_fa {
            lex.stopwords_fa = read(path)?;
            if lex.stopwords_fa.is_empty() {
                return Err(LexiconError::Empty { name: "stopwords_fa" });
            }
        }
        if let Some(path) = stopwords_ar {
            lex.stopwords_ar = read(path)?;
            if lex.stopwords_ar.is_empty() {
                return Err(LexiconError::Empty { name: "stopwords_ar" });
            }
        }
        if let Some(path) = vocabulary {
            lex.vocabulary = read(path)?;
            if lex.vocabulary.is_empty() {
                return Err(LexiconError::Empty { name: "vocabulary" });
            }
        }
        Ok(lex)
    }

    pub fn with_vocabulary(mut self, vocabulary: HashSet<String>) -> Lexicons {
        self.vocabulary = vocabulary;
        self
    }

    pub fn is_stopword(&self, token: &str) -> bool {
        let form = lexicon_form(token);
        self.stopwords_fa.contains(form) || self.stopwords_ar.contains(form)
    }

    pub fn has_vocabulary(&self) -> bool {
        !self.vocabulary.is_empty()
    }

    pub fn in_vocabulary(&self, token: &str) -> bool {
        self.vocabulary.contains(lexicon_form(token))
    }
}

/// Builds a vocabulary from a corpus's own words: every edge-trimmed word
/// occurring at least `min_freq` times across the given texts.
pub fn vocabulary_from_corpus<'a>(
    texts: impl IntoIterator<Item = &'a str>,
    min_freq: u64,
) -> HashSet<String> {
    let mut counts: HashMap<String, u64> = HashMap::new();
    for text in texts {
        for word in words(text) {
            *counts.entry(lexicon_form(word).to_string()).or_insert(0) += 1;
        }
    }
    counts.into_iter().filter(|(_, n)| *n >= min_freq).map(|(w, _)| w).collect()
}

/// Default minimum frequency for a corpus-derived vocabulary.
pub const VOCABULARY_MIN_FREQ: u64 = 5;

/// Thresholds for one source profile. `None` disables a check. The
/// presets carry the published values; fields marked provisional hold
/// defaults chosen here because no number was published for them.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FilterPolicy {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_words: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_nonpersian_char_frac: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_persian_char_frac: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_word_repetition_frac: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_short_line_frac: Option<f64>,
    /// A line is short when it has fewer than this many words; paired
    /// with `max_short_line_frac`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub short_line_word_count: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_oov_frac: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_avg_word_len: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_avg_word_len: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_numeric_symbolic_frac: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_stopword_frac: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_long_words: Option<u64>,
    /// A word is long when it has more than this many characters; paired
    /// with `max_long_words`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub long_word_chars: Option<u64>,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum PolicyError {
    #[error("{frac} is set without its paired {partner}")]
    UnpairedThreshold { frac: &'static str, partner: &'static str },
    #[error("{field} = {value} is outside [0, 1]")]
    FractionOutOfRange { field: &'static str, value: f64 },
    #[error("min_avg_word_len {min} exceeds max_avg_word_len {max}")]
    EmptyAvgWordLenRange { min: f64, max: f64 },
}

impl FilterPolicy {
    /// General web-crawl profile.
    pub fn web() -> Self {
        FilterPolicy {
            min_words: Some(30),
            max_nonpersian_char_frac: Some(0.50),
            max_word_repetition_frac: Some(0.50),
            max_short_line_frac: Some(0.50),
            short_line_word_count: Some(15),
            ..FilterPolicy::default()
        }
    }

    /// Web profile plus the out-of-vocabulary cut used for the CulturaX
    /// snapshot.
    pub fn culturax() -> Self {
        FilterPolicy { max_oov_frac: Some(0.025), ..FilterPolicy::web() }
    }

    /// The MADLAD snapshot uses the plain web profile.
    pub fn madlad() -> Self {
        FilterPolicy::web()
    }

    /// Blog-platform profile: stopword floor added and the short-line
    /// ceiling relaxed so concise posts survive. Both values provisional.
    pub fn virgool() -> Self {
        FilterPolicy {
            min_stopword_frac: Some(0.05),
            max_short_line_frac: Some(0.70),
            ..FilterPolicy::web()
        }
    }

    /// Encyclopedia profile for bilingual Persian/Arabic content: the
    /// Persian-majority requirement is loosened and Arabic stopwords
    /// count toward a lowered stopword floor. Both values provisional.
    pub fn wikishia() -> Self {
        FilterPolicy {
            max_nonpersian_char_frac: Some(0.60),
            min_stopword_frac: Some(0.05),
            ..FilterPolicy::web()
        }
    }

    /// Digitized-book profile.
    pub fn book() -> Self {
        FilterPolicy {
            min_words: Some(150),
            min_persian_char_frac: Some(0.50),
            min_avg_word_len: Some(3.0),
            max_avg_word_len: Some(10.0),
            max_numeric_symbolic_frac: Some(0.80),
            max_short_line_frac: Some(0.80),
            short_line_word_count: Some(4),
            min_stopword_frac: Some(0.10),
            ..FilterPolicy::default()
        }
    }

    /// OCR-extracted paper profile.
    pub fn ocr() -> Self {
        FilterPolicy {
            max_oov_frac: Some(0.05),
            max_long_words: Some(10),
            long_word_chars: Some(15),
            ..FilterPolicy::default()
        }
    }

    /// Social-message profile; the word floor is provisional.
    pub fn social() -> Self {
        FilterPolicy { min_words: Some(8), ..FilterPolicy::default() }
    }

    pub fn validate(&self) -> Result<(), PolicyError> {
        if self.max_short_line_frac.is_some() && self.short_line_word_count.is_none() {
            return Err(PolicyError::UnpairedThreshold {
                frac: "max_short_line_frac",
                partner: "short_line_word_count",
            });
        }
        if self.max_long_words.is_some() && self.long_word_chars.is_none() {
            return Err(PolicyError::UnpairedThreshold {
                frac: "max_long_words",
                partner: "long_word_chars",
            });
        }
        let fractions = [
            ("max_nonpersian_char_frac", self.max_nonpersian_char_frac),
            ("min_persian_char_frac", self.min_persian_char_frac),
            ("max_word_repetition_frac", self.max_word_repetition_frac),
            ("max_short_line_frac", self.max_short_line_frac),
            ("max_oov_frac", self.max_oov_frac),
            ("max_numeric_symbolic_frac", self.max_numeric_symbolic_frac),
            ("min_stopword_frac", self.min_stopword_frac),
        ];
        for (field, value) in fractions {
            if let Some(v) = value {
                if !(0.0..=1.0).contains(&v) {
                    return Err(PolicyError::FractionOutOfRange { field, value: v });
                }
            }
        }
        if let (Some(min), Some(max)) = (self.min_avg_word_len, self.max_avg_word_len) {
            if min > max {
                return Err(PolicyError::EmptyAvgWordLenRange { min, max });
            }
        }
        Ok(())
    }
}

/// Measures a document against the thresholds a policy will need. The
/// text is expected to be character-normalized already.
pub fn compute_stats(text: &str, lex: &Lexicons, policy: &FilterPolicy) -> DocStats {
    let word_tokens: Vec<&str> = words(text).collect();
    let n_words = word_tokens.len() as u64;

    let mut stats = DocStats {
        word_count: n_words,
        persian_char_ratio: char_ratio(text, is_persian_char),
        numeric_symbolic_char_ratio: char_ratio(text, |c| {
            is_numeric_char(c) || is_symbolic_char(c)
        }),
        ..DocStats::default()
    };

    if n_words > 0 {
        let total_chars: u64 = word_tokens.iter().map(|w| w.chars().count() as u64).sum();
        stats.avg_word_len = total_chars as f64 / n_words as f64;

        let mut freq: HashMap<&str, u64> = HashMap::new();
        let mut stopwords = 0u64;
        let mut oov = 0u64;
        for token in &word_tokens {
            *freq.entry(lexicon_form(token)).or_insert(0) += 1;
            if lex.is_stopword(token) {
                stopwords += 1;
            }
            if lex.has_vocabulary() && !lex.in_vocabulary(token) {
                oov += 1;
            }
        }
        let max_freq = freq.values().copied().max().unwrap_or(0);
        stats.max_word_repetition_frac = max_freq as f64 / n_words as f64;
        stats.stopword_frac = stopwords as f64 / n_words as f64;
        if lex.has_vocabulary() {
            stats.oov_frac = oov as f64 / n_words as f64;
        }
    }

    if let Some(t) = policy.short_line_word_count {
        let mut lines = 0u64;
        let mut short = 0u64;
        for line in text.split('\n').filter(|l| !l.trim().is_empty()) {
            lines += 1;
            if word_count(line) < t {
                short += 1;
            }
        }
        if lines > 0 {
            stats.short_line_frac = short as f64 / lines as f64;
        }
    }

    if let Some(l) = policy.long_word_chars {
        stats.long_word_count =
            word_tokens.iter().filter(|w| w.chars().count() as u64 > l).count() as u64;
    }

    stats
}

/// A violated criterion with the measured value and the bound it broke,
/// for drop reporting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub reason: DropReason,
    pub value: f64,
    pub threshold: f64,
}

fn too_short(stats: &DocStats, min_words: Option<u64>) -> Option<Violation> {
    let min = min_words?;
    (stats.word_count < min).then(|| Violation {
        reason: DropReason::TooShort,
        value: stats.word_count as f64,
        threshold: min as f64,
    })
}

fn nonpersian_majority(stats: &DocStats, policy: &FilterPolicy) -> Option<Violation> {
    if let Some(max) = policy.max_nonpersian_char_frac {
        let nonpersian = 1.0 - stats.persian_char_ratio;
        if nonpersian > max {
            return Some(Violation {
                reason: DropReason::NonPersianMajority,
                value: nonpersian,
                threshold: max,
            });
        }
    }
    if let Some(min) = policy.min_persian_char_frac {
        if stats.persian_char_ratio < min {
            return Some(Violation {
                reason: DropReason::NonPersianMajority,
                value: stats.persian_char_ratio,
                threshold: min,
            });
        }
    }
    None
}

fn repeated_words(stats: &DocStats, policy: &FilterPolicy) -> Option<Violation> {
    let max = policy.max_word_repetition_frac?;
    (stats.max_word_repetition_frac > max).then(|| Violation {
        reason: DropReason::RepeatedWords,
        value: stats.max_word_repetition_frac,
        threshold: max,
    })
}

fn short_line_majority(stats: &DocStats, policy: &FilterPolicy) -> Option<Violation> {
    let max = policy.max_short_line_frac?;
    (stats.short_line_frac > max).then(|| Violation {
        reason: DropReason::ShortLineMajority,
        value: stats.short_line_frac,
        threshold: max,
    })
}

fn oov_excess(stats: &DocStats, policy: &FilterPolicy, reason: DropReason) -> Option<Violation> {
    let max = policy.max_oov_frac?;
    (stats.oov_frac > max).then(|| Violation { reason, value: stats.oov_frac, threshold: max })
}

fn stopword_deficit(stats: &DocStats, policy: &FilterPolicy) -> Option<Violation> {
    let min = policy.min_stopword_frac?;
    (stats.stopword_frac < min).then(|| Violation {
        reason: DropReason::StopwordDeficit,
        value: stats.stopword_frac,
        threshold: min,
    })
}

fn avg_word_len_out_of_range(stats: &DocStats, policy: &FilterPolicy) -> Option<Violation> {
    if let Some(min) = policy.min_avg_word_len {
        if stats.avg_word_len < min {
            return Some(Violation {
                reason: DropReason::AvgWordLengthOutOfRange,
                value: stats.avg_word_len,
                threshold: min,
            });
        }
    }
    if let Some(max) = policy.max_avg_word_len {
        if stats.avg_word_len > max {
            return Some(Violation {
                reason: DropReason::AvgWordLengthOutOfRange,
                value: stats.avg_word_len,
                threshold: max,
            });
        }
    }
    None
}

fn numeric_symbolic_excess(stats: &DocStats, policy: &FilterPolicy) -> Option<Violation> {
    let max = policy.max_numeric_symbolic_frac?;
    (stats.numeric_symbolic_char_ratio > max).then(|| Violation {
        reason: DropReason::NumericSymbolicExcess,
        value: stats.numeric_symbolic_char_ratio,
        threshold: max,
    })
}

fn merged_words(stats: &DocStats, policy: &FilterPolicy) -> Option<Violation> {
    let max = policy.max_long_words?;
    (stats.long_word_count > max).then(|| Violation {
        reason: DropReason::OcrMergedWords,
        value: stats.long_word_count as f64,
        threshold: max as f64,
    })
}

/// Web-family criterion order: word floor, Persian majority, repetition,
/// short lines, out-of-vocabulary, then the stopword floor when the
/// policy sets one.
pub fn first_violation_web(stats: &DocStats, policy: &FilterPolicy) -> Option<Violation> {
    too_short(stats, policy.min_words)
        .or_else(|| nonpersian_majority(stats, policy))
        .or_else(|| repeated_words(stats, policy))
        .or_else(|| short_line_majority(stats, policy))
        .or_else(|| oov_excess(stats, policy, DropReason::OovExcess))
        .or_else(|| stopword_deficit(stats, policy))
}

/// Book criterion order: word floor, Persian share, average word length,
/// numeric/symbolic share, short lines, stopword floor.
pub fn first_violation_book(stats: &DocStats, policy: &FilterPolicy) -> Option<Violation> {
    too_short(stats, policy.min_words)
        .or_else(|| nonpersian_majority(stats, policy))
        .or_else(|| avg_word_len_out_of_range(stats, policy))
        .or_else(|| numeric_symbolic_excess(stats, policy))
        .or_else(|| short_line_majority(stats, policy))
        .or_else(|| stopword_deficit(stats, policy))
}

/// OCR criterion order: out-of-vocabulary share, then merged (overlong)
/// words.
pub fn first_violation_ocr(stats: &DocStats, policy: &FilterPolicy) -> Option<Violation> {
    oov_excess(stats, policy, DropReason::OcrOovExcess).or_else(|| merged_words(stats, policy))
}

/// Social messages are dropped only for falling under the word floor.
pub fn first_violation_social(stats: &DocStats, policy: &FilterPolicy) -> Option<Violation> {
    too_short(stats, policy.min_words).map(|v| Violation { reason: DropReason::ShortReply, ..v })
}

/// Which criterion order a pipeline stage applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvaluatorKind {
    Web,
    Book,
    Ocr,
    Social,
}

impl EvaluatorKind {
    pub fn first_violation(self, stats: &DocStats, policy: &FilterPolicy) -> Option<Violation> {
        match self {
            EvaluatorKind::Web => first_violation_web(stats, policy),
            EvaluatorKind::Book => first_violation_book(stats, policy),
            EvaluatorKind::Ocr => first_violation_ocr(stats, policy),
            EvaluatorKind::Social => first_violation_social(stats, policy),
        }
    }

    pub fn evaluate(self, stats: &DocStats, policy: &FilterPolicy) -> FilterDecision {
        match self.first_violation(stats, policy) {
            Some(v) => FilterDecision::Drop(v.reason),
            None => FilterDecision::Keep,
        }
    }
}

pub fn evaluate_web(stats: &DocStats, policy: &FilterPolicy) -> FilterDecision {
    EvaluatorKind::Web.evaluate(stats, policy)
}

pub fn evaluate_book(stats: &DocStats, policy: &FilterPolicy) -> FilterDecision {
    EvaluatorKind::Book.evaluate(stats, policy)
}

pub fn evaluate_ocr(stats: &DocStats, policy: &FilterPolicy) -> FilterDecision {
    EvaluatorKind::Ocr.evaluate(stats, policy)
}

pub fn evaluate_social(stats: &DocStats, policy: &FilterPolicy) -> FilterDecision {
    EvaluatorKind::Social.evaluate(stats, policy)
}
