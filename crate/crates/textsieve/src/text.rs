//! Character classes and tokenization shared by the filter stages.
//!
//! Every ratio in this crate is computed over the same definitions, so the
//! line filters, the document filters, and the statistics module cannot
//! drift apart on what counts as a word or a Persian character.

/// Zero-width non-joiner, the Persian half-space. It is orthographically
/// meaningful (e.g. `می‌رود`) and is never treated as whitespace.
pub const ZWNJ: char = '\u{200C}';

/// Characters counted as Persian for ratio purposes: the Arabic block, the
/// Arabic Supplement block, both presentation-forms blocks, and the ZWNJ.
/// The Arabic block includes the extended Arabic-Indic digits and Arabic
/// punctuation, so digit-heavy Persian text still counts as Persian.
pub fn is_persian_char(c: char) -> bool {
    matches!(c as u32,
        0x0600..=0x06FF | 0x0750..=0x077F | 0xFB50..=0xFDFF | 0xFE70..=0xFEFF)
        || c == ZWNJ
}

/// Latin letters: ASCII plus the Latin-1 supplement and Latin Extended-A/B.
pub fn is_latin_letter(c: char) -> bool {
    c.is_ascii_alphabetic() || (matches!(c as u32, 0x00C0..=0x024F) && c.is_alphabetic())
}

/// Special characters for the line-level ratio: anything that is neither
/// whitespace, nor a Persian character, nor a Latin letter. ASCII digits,
/// emoji, and box-drawing junk all land here.
pub fn is_special_char(c: char) -> bool {
    !c.is_whitespace() && !is_persian_char(c) && !is_latin_letter(c)
}

/// Numeric characters across scripts (ASCII, Arabic-Indic, extended
/// Arabic-Indic, and anything else Unicode classifies as numeric).
pub fn is_numeric_char(c: char) -> bool {
    c.is_numeric()
}

/// Symbolic characters: not whitespace, not a letter, not numeric, and not
/// the ZWNJ. Combining marks fall in here, as do punctuation and emoji.
pub fn is_symbolic_char(c: char) -> bool {
    !c.is_whitespace() && !c.is_alphabetic() && !c.is_numeric() && c != ZWNJ
}

/// A word is a whitespace-separated token that is neither purely numeric
/// nor purely symbolic; operationally, a token containing at least one
/// alphabetic character.
pub fn is_word_token(token: &str) -> bool {
    token.chars().any(char::is_alphabetic)
}

/// Iterates the word tokens of `text` (see [`is_word_token`]).
pub fn words(text: &str) -> impl Iterator<Item = &str> {
    text.split_whitespace().filter(|t| is_word_token(t))
}

/// Number of word tokens in `text`.
pub fn word_count(text: &str) -> u64 {
    words(text).count() as u64
}

/// A token stripped of leading and trailing symbolic characters, for
/// lexicon lookups: `است.` matches the lexicon entry `است`.
pub fn lexicon_form(token: &str) -> &str {
    token.trim_matches(|c: char| is_symbolic_char(c))
}

/// Fraction of non-whitespace characters satisfying `pred`, or 0.0 when the
/// text has no non-whitespace characters.
pub fn char_ratio(text: &str, pred: impl Fn(char) -> bool) -> f64 {
    let mut total = 0u64;
    let mut hits = 0u64;
    for c in text.chars() {
        if c.is_whitespace() {
            continue;
        }
        total += 1;
        if pred(c) {
            hits += 1;
        }
    }
    if total == 0 {
        0.0
    } else {
        hits as f64 / total as f64
    }
}
