//! Character-level normalization.
//!
//! The full pass applies, in order: character mapping (Arabic letter and
//! digit variants to Persian forms, with optional I'rab removal), removal
//! of blocked codepoints, truncation of long same-character runs, and
//! whitespace normalization. The composition is idempotent and never grows
//! the text.

use std::collections::{HashMap, HashSet};
use std::path::{Path, PathBuf};
use std::sync::{Arc, LazyLock};

use serde::{Deserialize, Serialize};

use crate::text::ZWNJ;

/// Arabic vowel marks (I'rab): fathatan through sukun, U+064B..U+0652.
pub fn is_irab(c: char) -> bool {
    matches!(c as u32, 0x064B..=0x0652)
}

fn is_newline_char(c: char) -> bool {
    matches!(c, '\n' | '\u{0B}' | '\u{0C}' | '\u{85}' | '\u{2028}' | '\u{2029}')
}

/// Errors from table parsing or option validation.
#[derive(Debug, thiserror::Error)]
pub enum CharNormError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("line {line}: {message}")]
    BadFormat { line: usize, message: String },
    #[error("{0}")]
    Invalid(String),
}

/// A character mapping table plus a blocked-codepoint set, loaded from the
/// bundled defaults or from data files.
#[derive(Debug, Clone, Default)]
pub struct CharTables {
    map: HashMap<char, char>,
    blocked: HashSet<char>,
}

fn parse_codepoint(token: &str, line: usize) -> Result<char, CharNormError> {
    let hex = token.strip_prefix("U+").ok_or_else(|| CharNormError::BadFormat {
        line,
        message: format!("expected U+XXXX, got {token}"),
    })?;
    let value = u32::from_str_radix(hex, 16).map_err(|_| CharNormError::BadFormat {
        line,
        message: format!("bad hex in {token}"),
    })?;
    char::from_u32(value).ok_or_else(|| CharNormError::BadFormat {
        line,
        message: format!("{token} is not a valid scalar value"),
    })
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(idx) => &line[..idx],
        None => line,
    }
}

impl CharTables {
    /// Parses table sources. Mapping lines are `U+XXXX U+YYYY`, blocklist
    /// lines are `U+XXXX`; `#` starts a comment. Validation guarantees the
    /// map is idempotent: no target is itself a source, no entry maps a
    /// character to itself, and no target is blocked.
    pub fn parse(map_src: &str, block_src: &str) -> Result<CharTables, CharNormError> {
        let mut map = HashMap::new();
        for (i, raw) in map_src.lines().enumerate() {
            let line = strip_comment(raw).trim();
            if line.is_empty() {
                continue;
            }
            let mut tokens = line.split_whitespace();
            let (a, b) = match (tokens.next(), tokens.next(), tokens.next()) {
                (Some(a), Some(b), None) => (a, b),
                _ => {
                    return Err(CharNormError::BadFormat {
                        line: i + 1,
                        message: "mapping lines need exactly two codepoints".into(),
                    })
                }
            };
            let (from, to) = (parse_codepoint(a, i + 1)?, parse_codepoint(b, i + 1)?);
            if from == to {
                return Err(CharNormError::BadFormat {
                    line: i + 1,
                    message: format!("{a} maps to itself"),
                });
            }
            if map.insert(from, to).is_some() {
                return Err(CharNormError::BadFormat {
                    line: i + 1,
                    message: format!("{a} mapped twice"),
                });
            }
        }
        let mut blocked = HashSet::new();
        for (i, raw) in block_src.lines().enumerate() {
            let line = strip_comment(raw).trim();
            if line.is_empty() {
                continue;
            }
            blocked.insert(parse_codepoint(line, i + 1)?);
        }
        for (from, to) in &map {
            if map.contains_key(to) {
                return Err(CharNormError::Invalid(format!(
                    "mapping target U+{:04X} is itself a mapping source",
                    *to as u32
                )));
            }
            if blocked.contains(to) {
                return Err(CharNormError::Invalid(format!(
                    "U+{:04X} maps to blocked codepoint U+{:04X}",
                    *from as u32, *to as u32
                )));
            }
        }
        Ok(CharTables { map, blocked })
    }

    pub fn from_files(
        map_path: impl AsRef<Path>,
        block_path: impl AsRef<Path>,
    ) -> Result<CharTables, CharNormError> {
        let read = |p: &Path| {
            std::fs::read_to_string(p)
                .map_err(|e| CharNormError::Io { path: p.to_path_buf(), source: e })
        };
        CharTables::parse(&read(map_path.as_ref())?, &read(block_path.as_ref())?)
    }

    pub fn map_char(&self, c: char) -> char {
        self.map.get(&c).copied().unwrap_or(c)
    }

    pub fn is_blocked(&self, c: char) -> bool {
        self.blocked.contains(&c)
    }

    pub fn is_mapped(&self, c: char) -> bool {
        self.map.contains_key(&c)
    }
}

static BUNDLED_TABLES: LazyLock<Arc<CharTables>> = LazyLock::new(|| {
    Arc::new(
        CharTables::parse(
            include_str!("../data/char_map.tsv"),
            include_str!("../data/char_blocklist.tsv"),
        )
        .expect("bundled character tables are well-formed"),
    )
});

/// The bundled mapping table and blocklist.
pub fn bundled_tables() -> Arc<CharTables> {
    Arc::clone(&BUNDLED_TABLES)
}

/// Resolved normalization options.
#[derive(Debug, Clone)]
pub struct CharNormOptions {
    /// Keep the Arabic vowel marks (books preserve them; web text does not).
    pub keep_irab: bool,
    /// Longest allowed run of one character; longer runs are truncated.
    pub max_char_run: usize,
    /// Blank lines allowed between paragraphs; 0 collapses every newline
    /// run to a single newline.
    pub max_blank_lines: usize,
    /// Refuse tables that would drop or rewrite the ZWNJ.
    pub preserve_zwnj: bool,
    pub tables: Arc<CharTables>,
}

impl Default for CharNormOptions {
    fn default() -> Self {
        CharNormOptions {
            keep_irab: false,
            max_char_run: 3,
            max_blank_lines: 0,
            preserve_zwnj: true,
            tables: bundled_tables(),
        }
    }
}

impl CharNormOptions {
    /// Defaults for book-like sources, which keep the I'rab.
    pub fn book() -> Self {
        CharNormOptions { keep_irab: true, ..Default::default() }
    }

    pub fn validated(self) -> Result<Self, CharNormError> {
        if self.max_char_run == 0 {
            return Err(CharNormError::Invalid("max_char_run must be at least 1".into()));
        }
        if self.preserve_zwnj && (self.tables.is_blocked(ZWNJ) || self.tables.is_mapped(ZWNJ)) {
            return Err(CharNormError::Invalid(
                "tables touch the ZWNJ but preserve_zwnj is set".into(),
            ));
        }
        Ok(self)
    }
}

/// Serializable form of the options for pipeline spec files. Table paths
/// are resolved against the data directory when relative names are given;
/// when absent, the bundled tables (or the data directory's copies) apply.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CharNormConfig {
    pub keep_irab: bool,
    pub max_char_run: usize,
    pub max_blank_lines: usize,
    pub preserve_zwnj: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mapping_file: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub blocklist_file: Option<PathBuf>,
}

impl Default for CharNormConfig {
    fn default() -> Self {
        CharNormConfig {
            keep_irab: false,
            max_char_run: 3,
            max_blank_lines: 0,
            preserve_zwnj: true,
            mapping_file: None,
            blocklist_file: None,
        }
    }
}

impl CharNormConfig {
    pub fn book() -> Self {
        CharNormConfig { keep_irab: true, ..Default::default() }
    }

    /// Loads tables and validates. `data_dir` supplies default table files
    /// (`char_map.tsv`, `char_blocklist.tsv`) when the config names none.
    pub fn resolve(&self, data_dir: Option<&Path>) -> Result<CharNormOptions, CharNormError> {
        let tables = match (&self.mapping_file, &self.blocklist_file) {
            (None, None) => match data_dir {
                Some(dir)
                    if dir.join("char_map.tsv").exists()
                        && dir.join("char_blocklist.tsv").exists() =>
                {
                    Arc::new(CharTables::from_files(
                        dir.join("char_map.tsv"),
                        dir.join("char_blocklist.tsv"),
                    )?)
                }
                _ => bundled_tables(),
            },
            (map, block) => {
                let locate = |p: &Option<PathBuf>, name: &str| -> PathBuf {
                    match p {
                        Some(path) if path.is_relative() && data_dir.is_some() => {
                            data_dir.unwrap().join(path)
                        }
                        Some(path) => path.clone(),
                        None => data_dir
                            .map(|d| d.join(name))
                            .unwrap_or_else(|| PathBuf::from(name)),
                    }
                };
                Arc::new(CharTables::from_files(
                    locate(map, "char_map.tsv"),
                    locate(block, "char_blocklist.tsv"),
                )?)
            }
        };
        CharNormOptions {
            keep_irab: self.keep_irab,
            max_char_run: self.max_char_run,
            max_blank_lines: self.max_blank_lines,
            preserve_zwnj: self.preserve_zwnj,
            tables,
        }
        .validated()
    }
}

/// Applies the character map; removes I'rab unless `keep_irab` is set.
/// Mapping happens first, so presentation forms of vowel marks are also
/// caught by the I'rab filter.
pub fn map_to_persian(text: &str, opts: &CharNormOptions) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        let mapped = opts.tables.map_char(c);
        if !opts.keep_irab && is_irab(mapped) {
            continue;
        }
        out.push(mapped);
    }
    out
}

/// Removes blocked codepoints, returning the cleaned text and the number
/// of characters removed.
pub fn strip_nonstandard(text: &str, opts: &CharNormOptions) -> (String, u64) {
    let mut out = String::with_capacity(text.len());
    let mut removed = 0u64;
    for c in text.chars() {
        if opts.tables.is_blocked(c) {
            removed += 1;
        } else {
            out.push(c);
        }
    }
    (out, removed)
}

/// Truncates runs of the same character longer than `max_run`. The ZWNJ
/// is exempt: its count stays exactly as written.
pub fn truncate_repeats(text: &str, max_run: usize) -> String {
    let mut out = String::with_capacity(text.len());
    let mut prev: Option<char> = None;
    let mut run = 0usize;
    for c in text.chars() {
        if c == ZWNJ {
            out.push(c);
            prev = Some(c);
            run = 1;
            continue;
        }
        if prev == Some(c) {
            run += 1;
        } else {
            prev = Some(c);
            run = 1;
        }
        if run <= max_run {
            out.push(c);
        }
    }
    out
}

/// Whitespace normalization: every horizontal whitespace variant becomes a
/// plain space, vertical whitespace becomes a newline, lines are trimmed,
/// space runs collapse to one space, and newline runs (including newlines
/// separated only by spaces or tabs) collapse to at most `max_blank_lines`
/// blank lines. The ZWNJ is not whitespace and passes through.
pub fn normalize_whitespace(text: &str, max_blank_lines: usize) -> String {
    let mut canon = String::with_capacity(text.len());
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        if c == '\r' {
            if chars.peek() == Some(&'\n') {
                chars.next();
            }
            canon.push('\n');
        } else if is_newline_char(c) {
            canon.push('\n');
        } else if c.is_whitespace() {
            canon.push(' ');
        } else {
            canon.push(c);
        }
    }

    let mut out = String::with_capacity(canon.len());
    let mut pending_blanks = 0usize;
    let mut wrote_any = false;
    for line in canon.split('\n') {
        let line = line.trim_matches(' ');
        if line.is_empty() {
            if wrote_any {
                pending_blanks += 1;
            }
            continue;
        }
        if wrote_any {
            out.push('\n');
            for _ in 0..pending_blanks.min(max_blank_lines) {
                out.push('\n');
            }
        }
        pending_blanks = 0;
        let mut prev_space = false;
        for c in line.chars() {
            if c == ' ' {
                if !prev_space {
                    out.push(' ');
                }
                prev_space = true;
            } else {
                out.push(c);
                prev_space = false;
            }
        }
        wrote_any = true;
    }
    out
}

/// The full normalization pass: map, strip, truncate, whitespace.
pub fn normalize(text: &str, opts: &CharNormOptions) -> String {
    let mapped = map_to_persian(text, opts);
    let (stripped, _) = strip_nonstandard(&mapped, opts);
    let truncated = truncate_repeats(&stripped, opts.max_char_run);
    normalize_whitespace(&truncated, opts.max_blank_lines)
}
