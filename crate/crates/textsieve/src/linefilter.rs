//! Line-level structural cleanup: markup stripping, ratio-based line
//! drops, repeated-line (watermark) removal, leading short-line handling,
//! and blank-run collapse.
//!
//! Every operation deletes lines or replaces markup spans with line
//! boundaries; surviving lines keep their content and relative order.

use std::collections::HashMap;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::text::{char_ratio, is_numeric_char, is_special_char, is_symbolic_char, word_count};

/// Thresholds for [`drop_ratio_lines`] and friends. A `None` threshold
/// disables that check. Ratios are computed over the line's
/// non-whitespace characters and a line is dropped only when it strictly
/// exceeds the bound, so a line sitting exactly on the threshold stays.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LineFilterPolicy {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub special_ratio_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub numeric_ratio_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub symbolic_ratio_max: Option<f64>,
    pub repeat_line_min: usize,
    pub leading_short_lines: LeadingShortLines,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LeadingShortLines {
    pub enabled: bool,
    pub min_words: usize,
    pub window: usize,
}

impl Default for LeadingShortLines {
    fn default() -> Self {
        LeadingShortLines { enabled: true, min_words: 4, window: 5 }
    }
}

impl Default for LineFilterPolicy {
    fn default() -> Self {
        LineFilterPolicy {
            special_ratio_max: Some(0.85),
            numeric_ratio_max: None,
            symbolic_ratio_max: None,
            repeat_line_min: 3,
            leading_short_lines: LeadingShortLines::default(),
        }
    }
}

impl LineFilterPolicy {
    /// Digitized-book profile: numeric- and symbolic-heavy lines (tables
    /// of contents, page furniture) go too.
    pub fn book() -> Self {
        LineFilterPolicy {
            numeric_ratio_max: Some(0.8),
            symbolic_ratio_max: Some(0.8),
            ..LineFilterPolicy::default()
        }
    }
}

static HTML_TAG: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"(?s)<!--.*?-->|<!\[CDATA\[.*?\]\]>|<!DOCTYPE[^>\n]*>|</?[A-Za-z][^<>\n]*>")
        .expect("markup pattern compiles")
});

static SCRIPT_LINE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(
        r"(?x)
        function\s*[\w$]*\s*\(
        | [\w$]+\s*\([^()\n]*\)\s*\{
        | \b(?:var|let|const)\s+[\w$]+\s*=
        | \b(?:document|window|console|Math|JSON)\s*\.\s*[\w$]+\s*[(=.]
        | \baddEventListener\s*\(
        | javascript:
        | =>\s*[{(]
        ",
    )
    .expect("script pattern compiles")
});

/// Replaces HTML tags (and comments) with line boundaries so the text
/// between tags survives on its own lines, and empties lines that read as
/// script code. Tag-free prose passes through unchanged. Blank lines left
/// behind are the caller's business; chain with [`collapse_blank_runs`].
pub fn strip_markup(text: &str) -> String {
    let untagged = if HTML_TAG.is_match(text) {
        HTML_TAG.replace_all(text, "\n").into_owned()
    } else {
        text.to_string()
    };
    if !SCRIPT_LINE.is_match(&untagged) {
        return untagged;
    }
    let lines: Vec<&str> = untagged
        .split('\n')
        .map(|line| if SCRIPT_LINE.is_match(line) { "" } else { line })
        .collect();
    lines.join("\n")
}

/// Drops lines whose special, numeric, or symbolic character ratio
/// strictly exceeds the corresponding enabled threshold.
pub fn drop_ratio_lines(text: &str, policy: &LineFilterPolicy) -> String {
    let over = |line: &str| {
        let checks = [
            (policy.special_ratio_max, is_special_char as fn(char) -> bool),
            (policy.numeric_ratio_max, is_numeric_char),
            (policy.symbolic_ratio_max, is_symbolic_char),
        ];
        checks
            .iter()
            .any(|(max, pred)| max.is_some_and(|max| char_ratio(line, *pred) > max))
    };
    let kept: Vec<&str> = text.split('\n').filter(|line| !over(line)).collect();
    kept.join("\n")
}

/// Removes every occurrence of any trimmed line appearing at least
/// `min_repeats` times in the document (watermarks, running titles).
/// Trimmed lines shorter than 3 characters are never counted or removed,
/// so legitimate short connectors survive.
pub fn drop_repeated_lines(text: &str, min_repeats: usize) -> String {
    if min_repeats == 0 {
        return text.to_string();
    }
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for line in text.split('\n') {
        let trimmed = line.trim();
        if trimmed.chars().count() >= 3 {
            *counts.entry(trimmed).or_insert(0) += 1;
        }
    }
    let kept: Vec<&str> = text
        .split('\n')
        .filter(|line| counts.get(line.trim()).is_none_or(|&n| n < min_repeats))
        .collect();
    kept.join("\n")
}

/// Within the first `window` lines, removes lines with fewer than
/// `min_words` words (navigation crumbs, bylines). Lines past the window
/// are untouched.
pub fn drop_leading_short_lines(text: &str, policy: &LineFilterPolicy) -> String {
    let p = &policy.leading_short_lines;
    if !p.enabled {
        return text.to_string();
    }
    let kept: Vec<&str> = text
        .split('\n')
        .enumerate()
        .filter(|(idx, line)| *idx >= p.window || word_count(line) >= p.min_words as u64)
        .map(|(_, line)| line)
        .collect();
    kept.join("\n")
}

/// Removes blank lines (and leading/trailing ones), so runs left behind
/// by the other filters collapse to a single line boundary. Line content
/// is untouched.
pub fn collapse_blank_runs(text: &str) -> String {
    let kept: Vec<&str> = text.split('\n').filter(|line| !line.trim().is_empty()).collect();
    kept.join("\n")
}
