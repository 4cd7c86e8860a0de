//! Pattern scrubbing: ordered, named deletion rules plus the specialized
//! passes for PII, page artifacts, social-media noise, and OCR front
//! matter.
//!
//! Rules apply in declaration order and deletion is the only action; after
//! any deletion the whitespace is re-normalized. Rule application iterates
//! to a fixpoint so that matches made adjacent by an earlier deletion are
//! still caught, which keeps every rule set idempotent. A scrub that
//! removes nothing returns the input unchanged, byte for byte.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashSet};
use std::path::{Path, PathBuf};
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::charnorm::normalize_whitespace;

const MAX_PASSES: usize = 8;

/// What to do with a match.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScrubAction {
    /// Delete the matched span.
    DeleteMatch,
    /// Delete every line containing a match.
    DeleteLine,
}

/// Where a pattern may match.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScrubScope {
    #[default]
    Anywhere,
    LineStart,
    LineEnd,
    /// For `delete_match`, the match must sit at the end of the document;
    /// for `delete_line`, the maximal suffix of matching lines (blank lines
    /// between them included) is removed.
    DocumentTail,
}

/// One named deletion rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScrubRule {
    pub name: String,
    pub pattern: String,
    pub action: ScrubAction,
    #[serde(default)]
    pub scope: ScrubScope,
}

#[derive(Debug, thiserror::Error)]
pub enum ScrubError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("rule file parse error: {0}")]
    Parse(String),
    #[error("rule {name}: {source}")]
    BadPattern { name: String, source: regex::Error },
    #[error("rule {name}: pattern matches the empty string")]
    EmptyMatch { name: String },
    #[error("duplicate rule name {name}")]
    DuplicateName { name: String },
    #[error("unknown bundled rule set {name}")]
    UnknownSet { name: String },
}

#[derive(Debug, Clone)]
struct CompiledRule {
    rule: ScrubRule,
    /// Regex applied to the whole text (delete_match) or to one line
    /// (delete_line), with the scope anchoring baked in.
    re: Regex,
}

#[derive(Deserialize)]
struct RuleFile {
    rules: Vec<ScrubRule>,
}

/// An ordered, validated set of scrub rules.
#[derive(Debug, Clone)]
pub struct ScrubRuleSet {
    rules: Vec<CompiledRule>,
}

impl ScrubRuleSet {
    pub fn from_rules(rules: Vec<ScrubRule>) -> Result<ScrubRuleSet, ScrubError> {
        let mut names = HashSet::new();
        let mut compiled = Vec::with_capacity(rules.len());
        for rule in rules {
            if !names.insert(rule.name.clone()) {
                return Err(ScrubError::DuplicateName { name: rule.name });
            }
            let wrapped = match (rule.action, rule.scope) {
                (ScrubAction::DeleteMatch, ScrubScope::Anywhere) => rule.pattern.clone(),
                (ScrubAction::DeleteMatch, ScrubScope::LineStart) => {
                    format!("(?m)^(?:{})", rule.pattern)
                }
                (ScrubAction::DeleteMatch, ScrubScope::LineEnd) => {
                    format!("(?m)(?:{})$", rule.pattern)
                }
                (ScrubAction::DeleteMatch, ScrubScope::DocumentTail) => {
                    format!("(?:{})\\s*\\z", rule.pattern)
                }
                (ScrubAction::DeleteLine, ScrubScope::Anywhere) => rule.pattern.clone(),
                (ScrubAction::DeleteLine, ScrubScope::LineStart) => {
                    format!("^(?:{})", rule.pattern)
                }
                (ScrubAction::DeleteLine, ScrubScope::LineEnd) => {
                    format!("(?:{})$", rule.pattern)
                }
                (ScrubAction::DeleteLine, ScrubScope::DocumentTail) => {
                    format!("^(?:{})$", rule.pattern)
                }
            };
            let re = Regex::new(&wrapped)
                .map_err(|e| ScrubError::BadPattern { name: rule.name.clone(), source: e })?;
            if re.is_match("") {
                return Err(ScrubError::EmptyMatch { name: rule.name });
            }
            compiled.push(CompiledRule { rule, re });
        }
        Ok(ScrubRuleSet { rules: compiled })
    }

    /// Parses a TOML rule file (`[[rules]]` entries with name, pattern,
    /// action, scope).
    pub fn parse(src: &str) -> Result<ScrubRuleSet, ScrubError> {
        let file: RuleFile = toml::from_str(src).map_err(|e| ScrubError::Parse(e.to_string()))?;
        ScrubRuleSet::from_rules(file.rules)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<ScrubRuleSet, ScrubError> {
        let path = path.as_ref();
        let src = std::fs::read_to_string(path)
            .map_err(|e| ScrubError::Io { path: path.to_path_buf(), source: e })?;
        ScrubRuleSet::parse(&src)
    }

    pub fn rule_names(&self) -> impl Iterator<Item = &str> {
        self.rules.iter().map(|r| r.rule.name.as_str())
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }
}

macro_rules! bundled_set {
    ($static_name:ident, $file:literal) => {
        static $static_name: LazyLock<ScrubRuleSet> = LazyLock::new(|| {
            ScrubRuleSet::parse(include_str!(concat!("../data/", $file)))
                .expect(concat!("bundled ", $file, " is well-formed"))
        });
    };
}

bundled_set!(RULES_WEB, "rules_web.toml");
bundled_set!(RULES_BOOKS, "rules_books.toml");
bundled_set!(RULES_SOCIAL, "rules_social.toml");
bundled_set!(RULES_OCR, "rules_ocr.toml");
bundled_set!(RULES_PII, "rules_pii.toml");

/// Names accepted by [`bundled`].
pub const BUNDLED_SET_NAMES: [&str; 5] =
    ["rules_web", "rules_books", "rules_social", "rules_ocr", "rules_pii"];

/// Returns a bundled rule set by name.
pub fn bundled(name: &str) -> Result<&'static ScrubRuleSet, ScrubError> {
    match name {
        "rules_web" => Ok(&RULES_WEB),
        "rules_books" => Ok(&RULES_BOOKS),
        "rules_social" => Ok(&RULES_SOCIAL),
        "rules_ocr" => Ok(&RULES_OCR),
        "rules_pii" => Ok(&RULES_PII),
        _ => Err(ScrubError::UnknownSet { name: name.to_string() }),
    }
}

/// Resolves a rule-set reference: a bundled name (overridable by a
/// `<name>.toml` file in `data_dir`) or a path to a rule file.
pub fn load_rule_set(name: &str, data_dir: Option<&Path>) -> Result<ScrubRuleSet, ScrubError> {
    if BUNDLED_SET_NAMES.contains(&name) {
        if let Some(dir) = data_dir {
            let candidate = dir.join(format!("{name}.toml"));
            if candidate.exists() {
                return ScrubRuleSet::from_file(candidate);
            }
        }
        return bundled(name).cloned();
    }
    let path = Path::new(name);
    let resolved = match data_dir {
        Some(dir) if path.is_relative() && !path.exists() => dir.join(path),
        _ => path.to_path_buf(),
    };
    ScrubRuleSet::from_file(resolved)
}

/// Result of a scrub pass: the (possibly) rewritten text and the number of
/// deletions per rule name. An empty map means the text is the input,
/// unchanged.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ScrubOutcome {
    pub text: String,
    pub removals: BTreeMap<String, u64>,
}

impl ScrubOutcome {
    pub fn total_removals(&self) -> u64 {
        self.removals.values().sum()
    }

    fn count(&mut self, name: &str, n: u64) {
        if n == 0 {
            return;
        }
        match self.removals.entry(name.to_string()) {
            Entry::Occupied(mut e) => *e.get_mut() += n,
            Entry::Vacant(e) => {
                e.insert(n);
            }
        }
    }
}

fn delete_matching_lines(text: &str, re: &Regex) -> (String, u64) {
    let mut removed = 0u64;
    let mut kept: Vec<&str> = Vec::new();
    for line in text.split('\n') {
        if re.is_match(line) {
            removed += 1;
        } else {
            kept.push(line);
        }
    }
    if removed == 0 {
        (text.to_string(), 0)
    } else {
        (kept.join("\n"), removed)
    }
}

/// Deletes the maximal suffix of lines matching `re`, with blank lines
/// between matched lines included. Nothing is deleted unless at least one
/// non-blank line matches. Returns the new text and the matched-line count.
fn delete_tail_lines(text: &str, re: &Regex) -> (String, u64) {
    let lines: Vec<&str> = text.split('\n').collect();
    let mut cut = lines.len();
    let mut matched = 0u64;
    let mut pending_blanks = 0usize;
    for (idx, line) in lines.iter().enumerate().rev() {
        if line.trim().is_empty() {
            pending_blanks += 1;
            continue;
        }
        if re.is_match(line) {
            matched += 1;
            cut = idx;
            pending_blanks = 0;
        } else {
            break;
        }
    }
    let _ = pending_blanks;
    if matched == 0 {
        (text.to_string(), 0)
    } else {
        (lines[..cut].join("\n"), matched)
    }
}

/// Applies the rule set in declaration order, iterating to a fixpoint.
/// Whitespace is re-normalized only when something was deleted.
pub fn scrub(text: &str, rules: &ScrubRuleSet) -> ScrubOutcome {
    let mut outcome = ScrubOutcome { text: text.to_string(), removals: BTreeMap::new() };
    for _ in 0..MAX_PASSES {
        let mut changed = false;
        for rule in &rules.rules {
            match rule.rule.action {
                ScrubAction::DeleteMatch => {
                    let n = rule.re.find_iter(&outcome.text).count() as u64;
                    if n > 0 {
                        let replaced = rule.re.replace_all(&outcome.text, "");
                        if replaced != outcome.text {
                            outcome.text = replaced.into_owned();
                            changed = true;
                        }
                        outcome.count(&rule.rule.name, n);
                    }
                }
                ScrubAction::DeleteLine => {
                    let (next, n) = match rule.rule.scope {
                        ScrubScope::DocumentTail => delete_tail_lines(&outcome.text, &rule.re),
                        _ => delete_matching_lines(&outcome.text, &rule.re),
                    };
                    if n > 0 {
                        outcome.text = next;
                        outcome.count(&rule.rule.name, n);
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
        outcome.text = normalize_whitespace(&outcome.text, 0);
    }
    outcome
}

/// Scrubs personally identifying information with the bundled `rules_pii`
/// set: emails, Iranian and international phone numbers, 16-digit card
/// numbers, and Shaba (IR + 24 digits) account numbers.
pub fn scrub_pii(text: &str) -> ScrubOutcome {
    scrub(text, &RULES_PII)
}

/// Scrubs social-media noise with the bundled `rules_social` set: channel
/// handles, URLs, and the trailing hashtag block. Hashtags inside the
/// running text are kept.
pub fn scrub_social(text: &str) -> ScrubOutcome {
    scrub(text, &RULES_SOCIAL)
}

static PAGE_NUMBER_LINE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(
        r"^\s*(?:صفحه|ص)\s*[0-9۰-۹٠-٩]+(?:\s*از(?:\s*[0-9۰-۹٠-٩]+)?(?:\s*کتاب\b.*)?)?\s*$",
    )
    .expect("page-number pattern compiles")
});

/// Deletes page-number lines (`صفحه ۱`, `ص۳`, `صفحه۱ از ۲۰۰`, `صفحه ۱ از
/// کتاب ...`) and, when the document title is known, running-title lines:
/// every line equal to the title after its first occurrence. A line that
/// merely mentions صفحه without an adjacent number is content and stays.
pub fn scrub_page_artifacts(text: &str, title: Option<&str>) -> ScrubOutcome {
    let mut outcome = ScrubOutcome { text: text.to_string(), removals: BTreeMap::new() };
    let title = title.map(str::trim).filter(|t| !t.is_empty());
    let mut kept: Vec<&str> = Vec::new();
    let mut page_lines = 0u64;
    let mut title_lines = 0u64;
    let mut title_seen = false;
    for line in text.split('\n') {
        if PAGE_NUMBER_LINE.is_match(line) {
            page_lines += 1;
            continue;
        }
        if let Some(t) = title {
            if line.trim() == t {
                if title_seen {
                    title_lines += 1;
                    continue;
                }
                title_seen = true;
            }
        }
        kept.push(line);
    }
    outcome.count("page_number", page_lines);
    outcome.count("title_repeat", title_lines);
    if outcome.total_removals() > 0 {
        outcome.text = normalize_whitespace(&kept.join("\n"), 0);
    }
    outcome
}

/// Default front-matter markers for OCR'd papers.
pub const FRONT_MATTER_MARKERS: [&str; 3] = ["کلیدواژه", "واژگان کلیدی", "چکیده"];

/// Cuts everything before the earliest marker occurrence. Returns the
/// (possibly trimmed) text and whether a marker was found; without a
/// marker the text comes back unchanged and the caller decides what to do
/// with the flag.
pub fn trim_front_matter(text: &str, markers: &[impl AsRef<str>]) -> (String, bool) {
    let mut first: Option<usize> = None;
    for marker in markers {
        let marker = marker.as_ref();
        if marker.is_empty() {
            continue;
        }
        if let Some(pos) = text.find(marker) {
            first = Some(first.map_or(pos, |f| f.min(pos)));
        }
    }
    match first {
        Some(pos) => (text[pos..].to_string(), true),
        None => (text.to_string(), false),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rule(name: &str, pattern: &str, action: ScrubAction, scope: ScrubScope) -> ScrubRule {
        ScrubRule { name: name.into(), pattern: pattern.into(), action, scope }
    }

    #[test]
    fn counts_each_deleted_match() {
        let set = ScrubRuleSet::from_rules(vec![rule(
            "unknown",
            r"\bUNKNOWN\b",
            ScrubAction::DeleteMatch,
            ScrubScope::Anywhere,
        )])
        .unwrap();
        let out = scrub("الف UNKNOWN ب UNKNOWN ج UNKNOWN", &set);
        assert_eq!(out.text, "الف ب ج");
        assert_eq!(out.removals.get("unknown"), Some(&3));
    }

    #[test]
    fn no_matches_means_identical_text() {
        let set = bundled("rules_pii").unwrap();
        // Odd spacing must survive untouched when nothing matches.
        let input = "  الف   ب  \n\n\nج ";
        let out = scrub(input, set);
        assert_eq!(out.text, input);
        assert_eq!(out.total_removals(), 0);
    }

    #[test]
    fn declaration_order_matches_sequential_oracle() {
        let a = rule("a", "قلم قرمز", ScrubAction::DeleteMatch, ScrubScope::Anywhere);
        let b = rule("b", "قرمز آبی", ScrubAction::DeleteMatch, ScrubScope::Anywhere);
        let both = ScrubRuleSet::from_rules(vec![a.clone(), b.clone()]).unwrap();
        let only_a = ScrubRuleSet::from_rules(vec![a]).unwrap();
        let only_b = ScrubRuleSet::from_rules(vec![b]).unwrap();
        let input = "قلم قرمز آبی روشن";
        let combined = scrub(input, &both);
        let sequential = scrub(&scrub(input, &only_a).text, &only_b);
        // First-declared rule wins the overlapping span.
        assert_eq!(combined.text, "آبی روشن");
        assert_eq!(combined.text, sequential.text);
        assert_eq!(combined.removals.get("a"), Some(&1));
        assert_eq!(combined.removals.get("b"), None);
    }

    #[test]
    fn fixpoint_catches_matches_created_by_deletion() {
        let set = ScrubRuleSet::from_rules(vec![rule(
            "x",
            "ab",
            ScrubAction::DeleteMatch,
            ScrubScope::Anywhere,
        )])
        .unwrap();
        // Deleting the middle "ab" glues a new "ab" together.
        let out = scrub("aabb", &set);
        assert_eq!(out.text, "");
        assert_eq!(out.removals.get("x"), Some(&2));
    }

    #[test]
    fn delete_line_removes_whole_lines() {
        let set = ScrubRuleSet::from_rules(vec![rule(
            "noise",
            "تبلیغات",
            ScrubAction::DeleteLine,
            ScrubScope::Anywhere,
        )])
        .unwrap();
        let out = scrub("سطر اول\nاینجا تبلیغات است\nسطر آخر", &set);
        assert_eq!(out.text, "سطر اول\nسطر آخر");
        assert_eq!(out.removals.get("noise"), Some(&1));
    }

    #[test]
    fn line_start_and_end_scopes_anchor() {
        let start = ScrubRuleSet::from_rules(vec![rule(
            "s",
            "منبع:",
            ScrubAction::DeleteMatch,
            ScrubScope::LineStart,
        )])
        .unwrap();
        let out = scrub("منبع: خبر\nاین منبع: نیست", &start);
        assert_eq!(out.text, "خبر\nاین منبع: نیست");

        let end = ScrubRuleSet::from_rules(vec![rule(
            "e",
            "ادامه دارد",
            ScrubAction::DeleteMatch,
            ScrubScope::LineEnd,
        )])
        .unwrap();
        let out = scrub("داستان ادامه دارد\nادامه دارد اما اینجا نه", &end);
        assert_eq!(out.text, "داستان\nادامه دارد اما اینجا نه");
    }

    #[test]
    fn document_tail_match_only_at_end() {
        let set = ScrubRuleSet::from_rules(vec![rule(
            "sig",
            "با احترام.*",
            ScrubAction::DeleteMatch,
            ScrubScope::DocumentTail,
        )])
        .unwrap();
        let out = scrub("با احترام شروع شد\nمتن اصلی\nبا احترام، نویسنده", &set);
        assert_eq!(out.text, "با احترام شروع شد\nمتن اصلی");
    }

    #[test]
    fn social_trailing_hashtags_removed_inline_kept() {
        let out = scrub_social("متن پیام درباره #ورزش امروز\n#خبر #فوری\n#ورزشی");
        assert_eq!(out.text, "متن پیام درباره #ورزش امروز");
        let out = scrub_social("فقط متن ساده بدون برچسب");
        assert_eq!(out.text, "فقط متن ساده بدون برچسب");
        assert_eq!(out.total_removals(), 0);
    }

    #[test]
    fn social_channel_ids_and_urls_deleted() {
        let out = scrub_social("به کانال ما سر بزنید @mychannel https://t.me/mychannel");
        assert_eq!(out.text, "به کانال ما سر بزنید");
        assert!(out.removals.get("channel_id").is_some());
        assert!(out.removals.get("url").is_some());
    }

    #[test]
    fn pii_email_and_phones() {
        let out = scrub_pii("تماس: ali.rezai@example.com یا ۰۹۱۲ ۳۴۵ ۶۷۸۹ در ساعات اداری");
        assert_eq!(out.text, "تماس: یا در ساعات اداری");
        let out = scrub_pii("دفتر: 021-88776655 داخلی ۳");
        assert_eq!(out.text, "دفتر: داخلی ۳");
        let out = scrub_pii("واتساپ +98 912 345 6789 پاسخگو است");
        assert_eq!(out.text, "واتساپ پاسخگو است");
    }

    #[test]
    fn pii_shaba_and_card() {
        // The Shaba fixture is checksum-valid; the acceptance suite verifies
        // that with an independent mod-97 oracle.
        let out = scrub_pii("شماره شبا: IR062960000000100324200001 اعلام شد");
        assert_eq!(out.text, "شماره اعلام شد");
        let out = scrub_pii("کارت ۶۰۳۷-۹۹۱۲-۳۴۵۶-۷۸۹۰ فعال است");
        assert_eq!(out.text, "کارت فعال است");
        let out = scrub_pii("کارت 6037991234567890 فعال است");
        assert_eq!(out.text, "کارت فعال است");
    }

    #[test]
    fn pii_leaves_dates_and_prices_alone() {
        for text in [
            "قیمت ۲۵۰۰۰ تومان است",
            "تاریخ 1402/05/06 ثبت شد",
            "سال ۱۳۹۸ بود",
            "کد پستی ۱۲۳۴۵ نیست", // five digits, too short for any rule
        ] {
            let out = scrub_pii(text);
            assert_eq!(out.text, text, "false positive on {text}");
            assert_eq!(out.total_removals(), 0);
        }
    }

    #[test]
    fn page_number_lines_deleted_content_kept() {
        let text = "عنوان فصل\nصفحه ۱\nمتن اصلی کتاب اینجاست\nصفحه۲ از ۲۰۰\nص۳\nصفحه ۴ از کتاب تاریخ ایران\nدر این صفحه از زندگی او می‌خوانیم";
        let out = scrub_page_artifacts(text, None);
        assert_eq!(
            out.text,
            "عنوان فصل\nمتن اصلی کتاب اینجاست\nدر این صفحه از زندگی او می‌خوانیم"
        );
        assert_eq!(out.removals.get("page_number"), Some(&4));
    }

    #[test]
    fn repeated_title_lines_deleted_after_first() {
        let text = "تاریخ بیهقی\nمتن آغازین\nتاریخ بیهقی\nادامه متن\nتاریخ بیهقی";
        let out = scrub_page_artifacts(text, Some("تاریخ بیهقی"));
        assert_eq!(out.text, "تاریخ بیهقی\nمتن آغازین\nادامه متن");
        assert_eq!(out.removals.get("title_repeat"), Some(&2));
    }

    #[test]
    fn books_rules_cover_media_and_unknown() {
        let set = bundled("rules_books").unwrap();
        let text = "متن کتاب\nYour browser does not support the audio tag.\nشکل UNKNOWN در ادامه";
        let out = scrub(text, set);
        assert_eq!(out.text, "متن کتاب\nشکل در ادامه");
    }

    #[test]
    fn front_matter_trims_at_earliest_marker() {
        let text = "نام دانشگاه\nاستاد راهنما\nچکیده\nاین پژوهش به بررسی";
        let (out, found) = trim_front_matter(text, &FRONT_MATTER_MARKERS);
        assert!(found);
        assert_eq!(out, "چکیده\nاین پژوهش به بررسی");

        let text = "سرآغاز\nواژگان کلیدی: الف\nچکیده بعدی";
        let (out, found) = trim_front_matter(text, &FRONT_MATTER_MARKERS);
        assert!(found);
        assert!(out.starts_with("واژگان کلیدی"));
    }

    #[test]
    fn front_matter_without_marker_is_untouched() {
        let text = "متن بدون نشانه";
        let (out, found) = trim_front_matter(text, &FRONT_MATTER_MARKERS);
        assert!(!found);
        assert_eq!(out, text);
    }

    #[test]
    fn rule_validation_rejects_bad_sets() {
        let dup = vec![
            rule("x", "الف", ScrubAction::DeleteMatch, ScrubScope::Anywhere),
            rule("x", "ب", ScrubAction::DeleteMatch, ScrubScope::Anywhere),
        ];
        assert!(matches!(
            ScrubRuleSet::from_rules(dup),
            Err(ScrubError::DuplicateName { .. })
        ));
        let empty = vec![rule("e", "ا*", ScrubAction::DeleteMatch, ScrubScope::Anywhere)];
        assert!(matches!(ScrubRuleSet::from_rules(empty), Err(ScrubError::EmptyMatch { .. })));
        let bad = vec![rule("b", "(", ScrubAction::DeleteMatch, ScrubScope::Anywhere)];
        assert!(matches!(ScrubRuleSet::from_rules(bad), Err(ScrubError::BadPattern { .. })));
    }

    #[test]
    fn bundled_sets_parse_and_are_idempotent_on_fixtures() {
        let fixtures = [
            "متن ساده",
            "ایمیل a@b.co و شماره ۰۹۱۲۳۴۵۶۷۸۹\n#پایان",
            "صفحه ۱\nYour browser does not support the audio tag.\nUNKNOWN",
            "   فاصله\u{200C}ها  \n\n\n#تگ #تگ",
        ];
        for name in BUNDLED_SET_NAMES {
            let set = bundled(name).unwrap();
            assert!(!set.is_empty());
            for fixture in fixtures {
                let once = scrub(fixture, set);
                let twice = scrub(&once.text, set);
                assert_eq!(once.text, twice.text, "set {name} not idempotent on {fixture:?}");
                assert_eq!(twice.total_removals(), 0);
            }
        }
    }
}
