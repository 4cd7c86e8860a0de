//! Per-source pipeline assembly and execution. A pipeline is declarative
//! data: an ordered stage list that can be dumped to TOML, edited, and
//! loaded back without touching code. The runner applies stages in order,
//! drops documents only at evaluation and dedup stages, and keeps
//! per-stage, per-source accounting that satisfies the report
//! conservation rules.
//!
//! Builtin presets encode the per-source orderings: book-like sources
//! evaluate documents before any character or line work so hopeless
//! documents skip the expensive stages, while web-family sources
//! normalize characters first and evaluate only after line cleanup.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::charnorm::{self, CharNormConfig, CharNormError};
use crate::corpus::{Document, DropReason, ReportError, RunReport, SourceKind, StageReport};
use crate::dedup::{
    dedup_corpus, DedupConfig, DedupError, DedupMode, DuplicateReport,
};
use crate::docfilter::{
    compute_stats, vocabulary_from_corpus, EvaluatorKind, FilterPolicy, Lexicons, PolicyError,
    Violation, VOCABULARY_MIN_FREQ,
};
use crate::linefilter::{
    collapse_blank_runs, drop_leading_short_lines, drop_ratio_lines, drop_repeated_lines,
    strip_markup, LineFilterPolicy,
};
use crate::scrub::{self, ScrubError, FRONT_MATTER_MARKERS};

fn default_min_repeats() -> usize {
    3
}

/// One pipeline stage. Spec files carry these as a flat list of tables,
/// each tagged with an `op` name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Stage {
    Charnorm {
        #[serde(default)]
        config: CharNormConfig,
    },
    StripMarkup,
    /// Applies a named rule set; bundled names or a file under the data
    /// directory.
    Scrub {
        rules: String,
    },
    ScrubPii,
    ScrubSocial,
    /// Page-number and repeated-title removal; the title comes from the
    /// document's `title` metadata when present.
    ScrubPageArtifacts,
    /// Cuts everything before the first marker and records whether one
    /// was found under the `front_matter` metadata key. Empty `markers`
    /// means the standard abstract/keyword markers.
    TrimFrontMatter {
        #[serde(default)]
        markers: Vec<String>,
    },
    DropRatioLines {
        #[serde(default)]
        policy: LineFilterPolicy,
    },
    DropRepeatedLines {
        #[serde(default = "default_min_repeats")]
        min_repeats: usize,
    },
    DropLeadingShortLines {
        #[serde(default)]
        policy: LineFilterPolicy,
    },
    CollapseBlankRuns,
    Evaluate {
        kind: EvaluatorKind,
        #[serde(default)]
        policy: FilterPolicy,
    },
    Dedup {
        #[serde(default)]
        config: DedupConfig,
    },
}

impl Stage {
    /// Label used in reports and drop records. Unique within every
    /// builtin spec.
    pub fn name(&self) -> String {
        match self {
            Stage::Charnorm { .. } => "charnorm".into(),
            Stage::StripMarkup => "strip_markup".into(),
            Stage::Scrub { rules } => format!("scrub:{rules}"),
            Stage::ScrubPii => "scrub_pii".into(),
            Stage::ScrubSocial => "scrub_social".into(),
            Stage::ScrubPageArtifacts => "scrub_page_artifacts".into(),
            Stage::TrimFrontMatter { .. } => "trim_front_matter".into(),
            Stage::DropRatioLines { .. } => "drop_ratio_lines".into(),
            Stage::DropRepeatedLines { .. } => "drop_repeated_lines".into(),
            Stage::DropLeadingShortLines { .. } => "drop_leading_short_lines".into(),
            Stage::CollapseBlankRuns => "collapse_blank_runs".into(),
            Stage::Evaluate { kind, .. } => format!("evaluate_{}", evaluator_name(*kind)),
            Stage::Dedup { .. } => "dedup".into(),
        }
    }

    /// True for stages that rewrite text. Evaluation, dedup, and the
    /// front-matter trim are exempt from the document-first ordering
    /// rule; everything else counts as processing work.
    fn is_processing(&self) -> bool {
        !matches!(
            self,
            Stage::Evaluate { .. } | Stage::Dedup { .. } | Stage::TrimFrontMatter { .. }
        )
    }

    /// Line-structure stages that must precede document evaluation in
    /// web-family specs. Blank-run collapse is cosmetic and may follow.
    fn is_line_stage(&self) -> bool {
        matches!(
            self,
            Stage::StripMarkup
                | Stage::DropRatioLines { .. }
                | Stage::DropRepeatedLines { .. }
                | Stage::DropLeadingShortLines { .. }
        )
    }
}

fn evaluator_name(kind: EvaluatorKind) -> &'static str {
    match kind {
        EvaluatorKind::Web => "web",
        EvaluatorKind::Book => "book",
        EvaluatorKind::Ocr => "ocr",
        EvaluatorKind::Social => "social",
    }
}

/// A source's full stage list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineSpec {
    pub source: SourceKind,
    pub stages: Vec<Stage>,
}

impl PipelineSpec {
    pub fn from_toml(text: &str) -> Result<PipelineSpec, PipelineError> {
        toml::from_str(text).map_err(|e| PipelineError::Parse(e.to_string()))
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<PipelineSpec, PipelineError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|source| PipelineError::Io { path: path.to_path_buf(), source })?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String, PipelineError> {
        toml::to_string_pretty(self).map_err(|e| PipelineError::Serialize(e.to_string()))
    }
}

/// The preset stage list for a source. Every threshold comes from the
/// policy presets in the module that owns it, so the numbers live in one
/// place.
pub fn builtin_spec(source: SourceKind) -> PipelineSpec {
    let stages = match source {
        SourceKind::Web => web_stages(FilterPolicy::web()),
        SourceKind::Culturax => web_stages(FilterPolicy::culturax()),
        SourceKind::Madlad => web_stages(FilterPolicy::madlad()),
        SourceKind::Virgool => virgool_stages(),
        SourceKind::Wikishia => wikishia_stages(),
        SourceKind::BookText | SourceKind::PaperText => book_stages(),
        SourceKind::PaperOcr => ocr_stages(),
        SourceKind::Social => social_stages(),
    };
    PipelineSpec { source, stages }
}

fn web_stages(policy: FilterPolicy) -> Vec<Stage> {
    vec![
        Stage::Charnorm { config: CharNormConfig::default() },
        Stage::StripMarkup,
        Stage::Scrub { rules: "rules_web".into() },
        Stage::DropRatioLines { policy: LineFilterPolicy::default() },
        Stage::DropRepeatedLines { min_repeats: default_min_repeats() },
        Stage::DropLeadingShortLines { policy: LineFilterPolicy::default() },
        Stage::Evaluate { kind: EvaluatorKind::Web, policy },
        Stage::CollapseBlankRuns,
        Stage::Dedup { config: DedupConfig::default() },
    ]
}

/// Blog posts: PII scrubbing added, the numeric/symbolic line cuts
/// bypassed (posts quote code and prices), thresholds relaxed via the
/// policy preset.
fn virgool_stages() -> Vec<Stage> {
    vec![
        Stage::Charnorm { config: CharNormConfig::default() },
        Stage::StripMarkup,
        Stage::Scrub { rules: "rules_web".into() },
        Stage::ScrubPii,
        Stage::DropRepeatedLines { min_repeats: default_min_repeats() },
        Stage::DropLeadingShortLines { policy: LineFilterPolicy::default() },
        Stage::Evaluate { kind: EvaluatorKind::Web, policy: FilterPolicy::virgool() },
        Stage::CollapseBlankRuns,
        Stage::Dedup { config: DedupConfig::default() },
    ]
}

/// Encyclopedia articles: web stages with the bilingual policy, and
/// near-exact dedup that keeps numbers and dates significant.
fn wikishia_stages() -> Vec<Stage> {
    let mut stages = web_stages(FilterPolicy::wikishia());
    let last = stages.last_mut().expect("web stage list ends with dedup");
    *last = Stage::Dedup {
        config: DedupConfig {
            mode: DedupMode::Exact,
            canonicalize_numbers: false,
            canonicalize_weekdays: false,
            ..DedupConfig::default()
        },
    };
    stages
}

fn book_stages() -> Vec<Stage> {
    vec![
        Stage::Evaluate { kind: EvaluatorKind::Book, policy: FilterPolicy::book() },
        Stage::Charnorm { config: CharNormConfig::book() },
        Stage::Scrub { rules: "rules_books".into() },
        Stage::ScrubPageArtifacts,
        Stage::ScrubPii,
        Stage::DropRatioLines { policy: LineFilterPolicy::book() },
        Stage::DropRepeatedLines { min_repeats: default_min_repeats() },
        Stage::CollapseBlankRuns,
        Stage::Dedup { config: DedupConfig::default() },
    ]
}

fn ocr_stages() -> Vec<Stage> {
    vec![
        Stage::TrimFrontMatter { markers: Vec::new() },
        Stage::Evaluate { kind: EvaluatorKind::Ocr, policy: FilterPolicy::ocr() },
        Stage::Charnorm { config: CharNormConfig::book() },
        Stage::Scrub { rules: "rules_ocr".into() },
        Stage::ScrubPii,
        Stage::DropRatioLines { policy: LineFilterPolicy::book() },
        Stage::DropRepeatedLines { min_repeats: default_min_repeats() },
        Stage::CollapseBlankRuns,
        Stage::Dedup { config: DedupConfig::default() },
    ]
}

/// Short messages: hashtag/URL/channel scrubbing before evaluation, so
/// length is judged on what would actually be kept.
fn social_stages() -> Vec<Stage> {
    vec![
        Stage::Charnorm { config: CharNormConfig::default() },
        Stage::ScrubSocial,
        Stage::Evaluate { kind: EvaluatorKind::Social, policy: FilterPolicy::social() },
        Stage::Dedup { config: DedupConfig::default() },
    ]
}

/// One broken spec rule. The code is stable and machine-checkable; the
/// message carries the specifics.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecViolation {
    pub code: String,
    pub message: String,
}

impl SpecViolation {
    fn new(code: &str, message: impl Into<String>) -> SpecViolation {
        SpecViolation { code: code.into(), message: message.into() }
    }
}

impl fmt::Display for SpecViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}", self.code, self.message)
    }
}

/// Checks ordering and parameter rules without touching documents.
/// Returns every violation found; an empty list means `spec` can run.
pub fn validate_spec(spec: &PipelineSpec) -> Vec<SpecViolation> {
    let mut out = Vec::new();
    let stages = &spec.stages;

    for (i, stage) in stages.iter().enumerate() {
        if matches!(stage, Stage::Dedup { .. }) && i + 1 != stages.len() {
            out.push(SpecViolation::new(
                "dedup-last",
                format!("dedup at position {i} is followed by other stages"),
            ));
        }
        match stage {
            Stage::Dedup { config } => {
                if let Err(e) = config.validate() {
                    let code = match e {
                        DedupError::Divisibility { .. } => "divisibility",
                        _ => "threshold-range",
                    };
                    out.push(SpecViolation::new(code, e.to_string()));
                }
            }
            Stage::Evaluate { policy, .. } => {
                if let Err(e) = policy.validate() {
                    out.push(SpecViolation::new("threshold-range", e.to_string()));
                }
            }
            Stage::DropRatioLines { policy } | Stage::DropLeadingShortLines { policy } => {
                for (field, value) in [
                    ("special_ratio_max", policy.special_ratio_max),
                    ("numeric_ratio_max", policy.numeric_ratio_max),
                    ("symbolic_ratio_max", policy.symbolic_ratio_max),
                ] {
                    if let Some(v) = value {
                        if !(0.0..=1.0).contains(&v) {
                            out.push(SpecViolation::new(
                                "threshold-range",
                                format!("{field} = {v} is outside [0, 1]"),
                            ));
                        }
                    }
                }
            }
            Stage::DropRepeatedLines { min_repeats } => {
                if *min_repeats < 2 {
                    out.push(SpecViolation::new(
                        "threshold-range",
                        format!("min_repeats = {min_repeats} would drop unrepeated lines"),
                    ));
                }
            }
            Stage::Charnorm { config } => {
                if config.max_char_run == 0 {
                    out.push(SpecViolation::new(
                        "threshold-range",
                        "max_char_run must be at least 1",
                    ));
                }
            }
            _ => {}
        }
    }

    match spec.source {
        SourceKind::BookText | SourceKind::PaperText | SourceKind::PaperOcr => {
            if let Some(eval_pos) =
                stages.iter().position(|s| matches!(s, Stage::Evaluate { .. }))
            {
                for (i, stage) in stages[..eval_pos].iter().enumerate() {
                    if stage.is_processing() {
                        out.push(SpecViolation::new(
                            "document-stage-first",
                            format!(
                                "{} evaluates documents before other work, but {} sits at position {i}",
                                spec.source,
                                stage.name(),
                            ),
                        ));
                    }
                }
            }
        }
        _ => {
            if let Some(first) = stages.first() {
                if !matches!(first, Stage::Charnorm { .. }) {
                    out.push(SpecViolation::new(
                        "charnorm-first",
                        format!(
                            "{} starts with {}, but character normalization must come first",
                            spec.source,
                            first.name(),
                        ),
                    ));
                }
            }
            if let Some(eval_pos) =
                stages.iter().position(|s| matches!(s, Stage::Evaluate { .. }))
            {
                for (i, stage) in stages.iter().enumerate().skip(eval_pos + 1) {
                    if stage.is_line_stage() {
                        out.push(SpecViolation::new(
                            "line-stage-after-evaluation",
                            format!("{} at position {i} follows document evaluation", stage.name()),
                        ));
                    }
                }
            }
        }
    }

    out
}

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("invalid pipeline spec: {}", list_violations(.0))]
    InvalidSpec(Vec<SpecViolation>),
    #[error(transparent)]
    CharNorm(#[from] CharNormError),
    #[error(transparent)]
    Scrub(#[from] ScrubError),
    #[error(transparent)]
    Dedup(#[from] DedupError),
    #[error(transparent)]
    Policy(#[from] PolicyError),
    #[error(transparent)]
    Report(#[from] ReportError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("spec parse error: {0}")]
    Parse(String),
    #[error("spec serialize error: {0}")]
    Serialize(String),
}

fn list_violations(violations: &[SpecViolation]) -> String {
    violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
}

/// Shared resources for a run. The lexicons back stopword and
/// out-of-vocabulary checks; `data_dir` overrides bundled rule sets and
/// character tables.
#[derive(Debug, Clone)]
pub struct RunContext {
    pub lexicons: Arc<Lexicons>,
    pub data_dir: Option<PathBuf>,
}

impl Default for RunContext {
    fn default() -> Self {
        RunContext { lexicons: Lexicons::bundled(), data_dir: None }
    }
}

/// Sidecar record for one dropped document: where it fell and why, with
/// the measured value and the bound it broke when the stage computed one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DropRecord {
    pub id: String,
    pub source: SourceKind,
    pub stage: String,
    pub reason: DropReason,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
}

/// Everything a run produces: surviving documents, stage accounting, the
/// drop sidecar, and the duplicate components.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunOutcome {
    pub docs: Vec<Document>,
    pub report: RunReport,
    pub drops: Vec<DropRecord>,
    pub duplicates: DuplicateReport,
}

enum Prepared {
    Transform { name: String, apply: Box<dyn Fn(&mut Document) + Send + Sync> },
    Evaluate { name: String, kind: EvaluatorKind, policy: FilterPolicy },
    Dedup { config: DedupConfig },
}

fn transform(name: String, f: impl Fn(&mut Document) + Send + Sync + 'static) -> Prepared {
    Prepared::Transform { name, apply: Box::new(f) }
}

/// Resolves one stage's resources so missing files or bad parameters
/// fail before any document is processed.
fn prepare(stage: &Stage, ctx: &RunContext) -> Result<Prepared, PipelineError> {
    let name = stage.name();
    let data_dir = ctx.data_dir.as_deref();
    let prepared = match stage {
        Stage::Charnorm { config } => {
            let opts = config.resolve(data_dir)?;
            transform(name, move |doc| doc.text = charnorm::normalize(&doc.text, &opts))
        }
        Stage::StripMarkup => transform(name, |doc| doc.text = strip_markup(&doc.text)),
        Stage::Scrub { rules } => {
            let set = scrub::load_rule_set(rules, data_dir)?;
            transform(name, move |doc| doc.text = scrub::scrub(&doc.text, &set).text)
        }
        Stage::ScrubPii => transform(name, |doc| doc.text = scrub::scrub_pii(&doc.text).text),
        Stage::ScrubSocial => {
            transform(name, |doc| doc.text = scrub::scrub_social(&doc.text).text)
        }
        Stage::ScrubPageArtifacts => transform(name, |doc| {
            let title = doc.meta.get("title").map(String::as_str);
            let scrubbed = scrub::scrub_page_artifacts(&doc.text, title).text;
            doc.text = scrubbed;
        }),
        Stage::TrimFrontMatter { markers } => {
            let markers: Vec<String> = if markers.is_empty() {
                FRONT_MATTER_MARKERS.iter().map(|m| m.to_string()).collect()
            } else {
                markers.clone()
            };
            transform(name, move |doc| {
                let (text, found) = scrub::trim_front_matter(&doc.text, &markers);
                doc.text = text;
                doc.meta.insert(
                    "front_matter".into(),
                    if found { "found" } else { "missing" }.into(),
                );
            })
        }
        Stage::DropRatioLines { policy } => {
            let policy = policy.clone();
            transform(name, move |doc| doc.text = drop_ratio_lines(&doc.text, &policy))
        }
        Stage::DropRepeatedLines { min_repeats } => {
            let min = *min_repeats;
            transform(name, move |doc| doc.text = drop_repeated_lines(&doc.text, min))
        }
        Stage::DropLeadingShortLines { policy } => {
            let policy = policy.clone();
            transform(name, move |doc| doc.text = drop_leading_short_lines(&doc.text, &policy))
        }
        Stage::CollapseBlankRuns => {
            transform(name, |doc| doc.text = collapse_blank_runs(&doc.text))
        }
        Stage::Evaluate { kind, policy } => {
            policy.validate()?;
            Prepared::Evaluate { name, kind: *kind, policy: policy.clone() }
        }
        Stage::Dedup { config } => {
            config.validate()?;
            Prepared::Dedup { config: config.clone() }
        }
    };
    Ok(prepared)
}

fn stage_label(p: &Prepared) -> &str {
    match p {
        Prepared::Transform { name, .. } => name,
        Prepared::Evaluate { name, .. } => name,
        Prepared::Dedup { .. } => "dedup",
    }
}

/// Per-stage tallies keyed by source, folded into [`StageReport`] rows.
struct StageCounter {
    stage: String,
    input: BTreeMap<String, u64>,
    kept: BTreeMap<String, u64>,
    dropped: BTreeMap<String, BTreeMap<DropReason, u64>>,
}

impl StageCounter {
    fn new(stage: &str, sources: &BTreeSet<String>) -> StageCounter {
        let zero: BTreeMap<String, u64> = sources.iter().map(|s| (s.clone(), 0)).collect();
        StageCounter {
            stage: stage.to_string(),
            input: zero.clone(),
            kept: zero,
            dropped: BTreeMap::new(),
        }
    }

    fn saw(&mut self, source: SourceKind) {
        *self.input.get_mut(source.as_str()).expect("source known to the run") += 1;
    }

    fn keep(&mut self, source: SourceKind) {
        *self.kept.get_mut(source.as_str()).expect("source known to the run") += 1;
    }

    fn drop_doc(&mut self, source: SourceKind, reason: DropReason) {
        *self
            .dropped
            .entry(source.as_str().to_string())
            .or_default()
            .entry(reason)
            .or_insert(0) += 1;
    }

    fn aggregate(&self) -> StageReport {
        let mut by_reason: BTreeMap<DropReason, u64> = BTreeMap::new();
        for reasons in self.dropped.values() {
            for (&reason, &n) in reasons {
                *by_reason.entry(reason).or_insert(0) += n;
            }
        }
        StageReport {
            stage: self.stage.clone(),
            input_docs: self.input.values().sum(),
            kept_docs: self.kept.values().sum(),
            dropped_by_reason: by_reason,
        }
    }

    fn for_source(&self, source: &str) -> StageReport {
        StageReport {
            stage: self.stage.clone(),
            input_docs: self.input.get(source).copied().unwrap_or(0),
            kept_docs: self.kept.get(source).copied().unwrap_or(0),
            dropped_by_reason: self.dropped.get(source).cloned().unwrap_or_default(),
        }
    }
}

fn needs_vocabulary(spec: &PipelineSpec) -> bool {
    spec.stages
        .iter()
        .any(|s| matches!(s, Stage::Evaluate { policy, .. } if policy.max_oov_frac.is_some()))
}

/// When an evaluation stage checks out-of-vocabulary rates and the
/// context's lexicons carry no vocabulary, calibrate one from the input
/// corpus itself at the standard frequency floor.
fn calibrated_lexicons(docs: &[Document], spec: &PipelineSpec, ctx: &RunContext) -> Arc<Lexicons> {
    if needs_vocabulary(spec) && !ctx.lexicons.has_vocabulary() {
        let vocabulary =
            vocabulary_from_corpus(docs.iter().map(|d| d.text.as_str()), VOCABULARY_MIN_FREQ);
        Arc::new(ctx.lexicons.as_ref().clone().with_vocabulary(vocabulary))
    } else {
        Arc::clone(&ctx.lexicons)
    }
}

/// Applies `spec` to `docs`. `spec` is validated and every stage's
/// resources are resolved before the first document is touched, so
/// configuration mistakes are fatal up front. Documents dropped at a
/// stage do not reach later stages; survivors keep their input order.
pub fn run(
    docs: Vec<Document>,
    spec: &PipelineSpec,
    ctx: &RunContext,
) -> Result<RunOutcome, PipelineError> {
    let violations = validate_spec(spec);
    if !violations.is_empty() {
        return Err(PipelineError::InvalidSpec(violations));
    }
    let prepared: Vec<Prepared> =
        spec.stages.iter().map(|s| prepare(s, ctx)).collect::<Result<_, _>>()?;

    let lexicons = calibrated_lexicons(&docs, spec, ctx);
    let source_names: BTreeSet<String> =
        docs.iter().map(|d| d.source.as_str().to_string()).collect();

    let mut current = docs;
    let mut report = RunReport::default();
    for name in &source_names {
        report.sources.insert(name.clone(), Vec::new());
    }
    let mut drops: Vec<DropRecord> = Vec::new();
    let mut duplicates = DuplicateReport::default();

    for stage in &prepared {
        let mut counter = StageCounter::new(stage_label(stage), &source_names);
        for doc in &current {
            counter.saw(doc.source);
        }
        match stage {
            Prepared::Transform { apply, .. } => {
                current.par_iter_mut().for_each(|doc| apply(doc));
                for doc in &current {
                    counter.keep(doc.source);
                }
            }
            Prepared::Evaluate { name, kind, policy } => {
                let verdicts: Vec<Option<Violation>> = current
                    .par_iter()
                    .map(|doc| {
                        let stats = compute_stats(&doc.text, &lexicons, policy);
                        kind.first_violation(&stats, policy)
                    })
                    .collect();
                let mut kept = Vec::with_capacity(current.len());
                for (doc, verdict) in current.drain(..).zip(verdicts) {
                    match verdict {
                        None => {
                            counter.keep(doc.source);
                            kept.push(doc);
                        }
                        Some(v) => {
                            counter.drop_doc(doc.source, v.reason);
                            drops.push(DropRecord {
                                id: doc.id,
                                source: doc.source,
                                stage: name.clone(),
                                reason: v.reason,
                                value: Some(v.value),
                                threshold: Some(v.threshold),
                            });
                        }
                    }
                }
                current = kept;
            }
            Prepared::Dedup { config } => {
                let inputs: Vec<(String, SourceKind)> =
                    current.iter().map(|d| (d.id.clone(), d.source)).collect();
                let (retained, dup_report) = dedup_corpus(std::mem::take(&mut current), config)?;
                let threshold = match config.mode {
                    DedupMode::Exact => Some(config.exact_similarity_min),
                    DedupMode::Canonical => None,
                };
                {
                    let dropped_ids = dup_report.dropped_ids();
                    let similarity: HashMap<&str, f64> = dup_report
                        .components
                        .iter()
                        .flat_map(|c| {
                            c.members.iter().map(move |m| (m.as_str(), c.max_similarity))
                        })
                        .collect();
                    for (id, source) in &inputs {
                        if dropped_ids.contains(id.as_str()) {
                            counter.drop_doc(*source, DropReason::Duplicate);
                            drops.push(DropRecord {
                                id: id.clone(),
                                source: *source,
                                stage: "dedup".into(),
                                reason: DropReason::Duplicate,
                                value: similarity.get(id.as_str()).copied(),
                                threshold,
                            });
                        } else {
                            counter.keep(*source);
                        }
                    }
                }
                current = retained;
                duplicates = dup_report;
            }
        }
        report.stages.push(counter.aggregate());
        for name in &source_names {
            report
                .sources
                .get_mut(name)
                .expect("chain created for every source")
                .push(counter.for_source(name));
        }
    }

    report.validate()?;
    Ok(RunOutcome { docs: current, report, drops, duplicates })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::FilterDecision;
    use crate::docfilter::evaluate_web;

    /// Spells a number with Persian letters so tokens survive digit
    /// canonicalization and character mapping untouched.
    fn fa_num(mut n: usize) -> String {
        const LETTERS: [char; 10] = ['ا', 'ب', 'پ', 'ت', 'ث', 'ج', 'چ', 'ح', 'خ', 'د'];
        let mut out = String::new();
        loop {
            out.push(LETTERS[n % 10]);
            n /= 10;
            if n == 0 {
                return out;
            }
        }
    }

    fn words_text(range: std::ops::Range<usize>) -> String {
        range.map(fa_num).collect::<Vec<_>>().join(" ")
    }

    fn doc(id: &str, source: SourceKind, text: &str) -> Document {
        Document::new(id, source, text)
    }

    #[test]
    fn builtin_specs_have_zero_violations() {
        for source in SourceKind::ALL {
            let spec = builtin_spec(source);
            let violations = validate_spec(&spec);
            assert!(violations.is_empty(), "{source}: {violations:?}");
        }
    }

    #[test]
    fn book_preset_evaluates_before_any_processing() {
        for source in [SourceKind::BookText, SourceKind::PaperText] {
            let spec = builtin_spec(source);
            assert!(
                matches!(&spec.stages[0], Stage::Evaluate { kind: EvaluatorKind::Book, .. }),
                "{source} must start with book evaluation"
            );
        }
        let ocr = builtin_spec(SourceKind::PaperOcr);
        assert!(matches!(&ocr.stages[0], Stage::TrimFrontMatter { .. }));
        assert!(matches!(&ocr.stages[1], Stage::Evaluate { kind: EvaluatorKind::Ocr, .. }));
    }

    #[test]
    fn wikishia_preset_uses_near_exact_dedup() {
        let spec = builtin_spec(SourceKind::Wikishia);
        let Some(Stage::Dedup { config }) = spec.stages.last() else {
            panic!("wikishia ends with dedup");
        };
        assert_eq!(config.mode, DedupMode::Exact);
        assert_eq!(config.exact_similarity_min, 0.98);
        assert!(!config.canonicalize_numbers);
        assert!(!config.canonicalize_weekdays);
    }

    #[test]
    fn culturax_checks_oov_and_madlad_does_not() {
        let oov_of = |source: SourceKind| {
            builtin_spec(source).stages.iter().find_map(|s| match s {
                Stage::Evaluate { policy, .. } => Some(policy.max_oov_frac),
                _ => None,
            })
        };
        assert_eq!(oov_of(SourceKind::Culturax), Some(Some(0.025)));
        assert_eq!(oov_of(SourceKind::Madlad), Some(None));
    }

    #[test]
    fn virgool_preset_bypasses_ratio_lines_and_scrubs_pii() {
        let spec = builtin_spec(SourceKind::Virgool);
        assert!(!spec.stages.iter().any(|s| matches!(s, Stage::DropRatioLines { .. })));
        assert!(spec.stages.iter().any(|s| matches!(s, Stage::ScrubPii)));
        let policy = spec
            .stages
            .iter()
            .find_map(|s| match s {
                Stage::Evaluate { policy, .. } => Some(policy.clone()),
                _ => None,
            })
            .unwrap();
        assert_eq!(policy, FilterPolicy::virgool());
    }

    #[test]
    fn preset_thresholds_match_policy_presets() {
        let eval_policy = |source: SourceKind| {
            builtin_spec(source)
                .stages
                .iter()
                .find_map(|s| match s {
                    Stage::Evaluate { policy, .. } => Some(policy.clone()),
                    _ => None,
                })
                .unwrap()
        };
        let web = eval_policy(SourceKind::Web);
        assert_eq!(web, FilterPolicy::web());
        assert_eq!(web.min_words, Some(30));
        assert_eq!(web.max_nonpersian_char_frac, Some(0.50));
        assert_eq!(web.max_word_repetition_frac, Some(0.50));
        assert_eq!(web.max_short_line_frac, Some(0.50));
        assert_eq!(web.short_line_word_count, Some(15));

        let book = eval_policy(SourceKind::BookText);
        assert_eq!(book, FilterPolicy::book());
        assert_eq!(book.min_words, Some(150));
        assert_eq!(book.min_persian_char_frac, Some(0.50));
        assert_eq!(book.min_avg_word_len, Some(3.0));
        assert_eq!(book.max_avg_word_len, Some(10.0));
        assert_eq!(book.max_numeric_symbolic_frac, Some(0.80));
        assert_eq!(book.max_short_line_frac, Some(0.80));
        assert_eq!(book.short_line_word_count, Some(4));
        assert_eq!(book.min_stopword_frac, Some(0.10));

        let ocr = eval_policy(SourceKind::PaperOcr);
        assert_eq!(ocr, FilterPolicy::ocr());
        assert_eq!(ocr.max_oov_frac, Some(0.05));
        assert_eq!(ocr.max_long_words, Some(10));
        assert_eq!(ocr.long_word_chars, Some(15));

        let social = eval_policy(SourceKind::Social);
        assert_eq!(social.min_words, Some(8));

        let Some(Stage::Dedup { config }) = builtin_spec(SourceKind::Web).stages.last().cloned()
        else {
            panic!("web ends with dedup");
        };
        assert_eq!(config.shingle_k, 13);
        assert_eq!(config.num_hashes, 128);
        assert_eq!(config.num_bands, 8);
        assert_eq!(config.exact_similarity_min, 0.98);
    }

    #[test]
    fn misordered_book_spec_is_flagged() {
        let mut spec = builtin_spec(SourceKind::BookText);
        spec.stages.swap(0, 1);
        let violations = validate_spec(&spec);
        assert!(
            violations.iter().any(|v| v.code == "document-stage-first"),
            "{violations:?}"
        );
    }

    #[test]
    fn indivisible_band_scheme_is_flagged() {
        let mut spec = builtin_spec(SourceKind::Web);
        *spec.stages.last_mut().unwrap() = Stage::Dedup {
            config: DedupConfig { num_hashes: 100, num_bands: 8, ..DedupConfig::default() },
        };
        let violations = validate_spec(&spec);
        assert!(violations.iter().any(|v| v.code == "divisibility"), "{violations:?}");
    }

    #[test]
    fn stage_after_dedup_is_flagged() {
        let mut spec = builtin_spec(SourceKind::Web);
        spec.stages.push(Stage::CollapseBlankRuns);
        let violations = validate_spec(&spec);
        assert!(violations.iter().any(|v| v.code == "dedup-last"), "{violations:?}");
    }

    #[test]
    fn out_of_range_thresholds_are_flagged() {
        let mut spec = builtin_spec(SourceKind::Web);
        for stage in &mut spec.stages {
            if let Stage::Evaluate { policy, .. } = stage {
                policy.max_oov_frac = Some(1.5);
            }
        }
        let violations = validate_spec(&spec);
        assert!(violations.iter().any(|v| v.code == "threshold-range"), "{violations:?}");

        let spec = PipelineSpec {
            source: SourceKind::Web,
            stages: vec![
                Stage::Charnorm { config: CharNormConfig::default() },
                Stage::DropRatioLines {
                    policy: LineFilterPolicy {
                        special_ratio_max: Some(1.2),
                        ..LineFilterPolicy::default()
                    },
                },
            ],
        };
        assert!(validate_spec(&spec).iter().any(|v| v.code == "threshold-range"));

        let spec = PipelineSpec {
            source: SourceKind::Web,
            stages: vec![
                Stage::Charnorm { config: CharNormConfig::default() },
                Stage::DropRepeatedLines { min_repeats: 1 },
            ],
        };
        assert!(validate_spec(&spec).iter().any(|v| v.code == "threshold-range"));
    }

    #[test]
    fn web_spec_must_normalize_characters_first() {
        let spec = PipelineSpec {
            source: SourceKind::Web,
            stages: vec![Stage::StripMarkup, Stage::Charnorm { config: CharNormConfig::default() }],
        };
        assert!(validate_spec(&spec).iter().any(|v| v.code == "charnorm-first"));
    }

    #[test]
    fn line_stage_after_evaluation_is_flagged_for_web() {
        let mut spec = builtin_spec(SourceKind::Web);
        let eval_pos =
            spec.stages.iter().position(|s| matches!(s, Stage::Evaluate { .. })).unwrap();
        let line_stage = spec.stages.remove(3);
        assert!(matches!(line_stage, Stage::DropRatioLines { .. }));
        spec.stages.insert(eval_pos, line_stage);
        let violations = validate_spec(&spec);
        assert!(
            violations.iter().any(|v| v.code == "line-stage-after-evaluation"),
            "{violations:?}"
        );
    }

    #[test]
    fn run_rejects_an_invalid_spec_before_processing() {
        let mut spec = builtin_spec(SourceKind::Web);
        spec.stages.push(Stage::CollapseBlankRuns);
        let err = run(vec![doc("a", SourceKind::Web, "متن")], &spec, &RunContext::default())
            .unwrap_err();
        assert!(matches!(err, PipelineError::InvalidSpec(_)), "{err}");
    }

    /// Ten documents through the web preset: three fall at evaluation
    /// for being short, two exact copies fall at dedup, five survive.
    /// Every count is checked against the stage rows and drop records.
    #[test]
    fn ten_doc_web_run_accounts_for_every_document() {
        let mut docs = Vec::new();
        for i in 0..5 {
            docs.push(doc(
                &format!("keep-{i}"),
                SourceKind::Web,
                &words_text(i * 100..i * 100 + 35),
            ));
        }
        for i in 0..3 {
            docs.push(doc(
                &format!("short-{i}"),
                SourceKind::Web,
                &words_text(1000 + i * 50..1000 + i * 50 + 8),
            ));
        }
        let original = docs[0].text.clone();
        docs.push(doc("dupe-a", SourceKind::Web, &original));
        docs.push(doc("dupe-b", SourceKind::Web, &original));

        let spec = builtin_spec(SourceKind::Web);
        let outcome = run(docs, &spec, &RunContext::default()).unwrap();

        let mut retained: Vec<&str> = outcome.docs.iter().map(|d| d.id.as_str()).collect();
        retained.sort_unstable();
        assert_eq!(retained, ["dupe-a", "keep-1", "keep-2", "keep-3", "keep-4"]);

        outcome.report.validate().unwrap();
        let eval = outcome
            .report
            .stages
            .iter()
            .find(|s| s.stage == "evaluate_web")
            .expect("evaluation row present");
        assert_eq!(eval.input_docs, 10);
        assert_eq!(eval.kept_docs, 7);
        assert_eq!(eval.dropped_by_reason.get(&DropReason::TooShort), Some(&3));

        let dedup = outcome.report.stages.iter().find(|s| s.stage == "dedup").unwrap();
        assert_eq!(dedup.input_docs, 7);
        assert_eq!(dedup.kept_docs, 5);
        assert_eq!(dedup.dropped_by_reason.get(&DropReason::Duplicate), Some(&2));

        for row in &outcome.report.stages {
            if row.stage != "evaluate_web" && row.stage != "dedup" {
                assert_eq!(row.input_docs, row.kept_docs, "{} must not drop", row.stage);
            }
        }

        let eval_drops: Vec<&DropRecord> =
            outcome.drops.iter().filter(|d| d.stage == "evaluate_web").collect();
        assert_eq!(eval_drops.len(), 3);
        for record in eval_drops {
            assert!(record.id.starts_with("short-"));
            assert_eq!(record.reason, DropReason::TooShort);
            assert_eq!(record.value, Some(8.0));
            assert_eq!(record.threshold, Some(30.0));
        }
        let dedup_drops: Vec<&DropRecord> =
            outcome.drops.iter().filter(|d| d.stage == "dedup").collect();
        assert_eq!(dedup_drops.len(), 2);
        for record in dedup_drops {
            assert!(record.id == "keep-0" || record.id == "dupe-b");
            assert_eq!(record.reason, DropReason::Duplicate);
            assert_eq!(record.value, Some(1.0));
            assert_eq!(record.threshold, None);
        }

        assert_eq!(outcome.duplicates.components.len(), 1);
        assert_eq!(outcome.duplicates.components[0].representative, "dupe-a");

        let web_chain = &outcome.report.sources["web"];
        assert_eq!(web_chain.len(), outcome.report.stages.len());
        assert_eq!(web_chain, &outcome.report.stages.iter().cloned().collect::<Vec<_>>());
    }

    #[test]
    fn empty_corpus_yields_empty_output_and_zero_rows() {
        let spec = builtin_spec(SourceKind::Web);
        let outcome = run(Vec::new(), &spec, &RunContext::default()).unwrap();
        assert!(outcome.docs.is_empty());
        assert!(outcome.drops.is_empty());
        assert!(outcome.duplicates.components.is_empty());
        assert_eq!(outcome.report.stages.len(), spec.stages.len());
        for row in &outcome.report.stages {
            assert_eq!(row.input_docs, 0);
            assert_eq!(row.kept_docs, 0);
            assert!(row.dropped_by_reason.is_empty());
        }
        outcome.report.validate().unwrap();
    }

    /// Five documents holding the same 45 words in stride-permuted
    /// orders put every word at frequency five, so the calibrated
    /// vocabulary covers them; a sixth document smuggling two one-off
    /// words crosses the 2.5% bound. The plain web profile keeps it.
    #[test]
    fn oov_calibration_feeds_the_culturax_check() {
        let vocab: Vec<String> = (0..45).map(|w| fa_num(2000 + w)).collect();
        let permuted = |stride: usize| -> String {
            (0..45).map(|j| vocab[(j * stride) % 45].clone()).collect::<Vec<_>>().join(" ")
        };
        let junk_text = {
            let mut words: Vec<String> = vocab[..39].to_vec();
            words.push(fa_num(7001));
            words.push(fa_num(7013));
            words.join(" ")
        };

        let build = |source: SourceKind| -> Vec<Document> {
            let mut docs: Vec<Document> = [2usize, 4, 7, 8, 11]
                .iter()
                .enumerate()
                .map(|(i, &stride)| doc(&format!("full-{i}"), source, &permuted(stride)))
                .collect();
            docs.push(doc("junky", source, &junk_text));
            docs
        };

        let outcome = run(
            build(SourceKind::Culturax),
            &builtin_spec(SourceKind::Culturax),
            &RunContext::default(),
        )
        .unwrap();
        assert_eq!(outcome.docs.len(), 5);
        assert_eq!(outcome.drops.len(), 1);
        assert_eq!(outcome.drops[0].id, "junky");
        assert_eq!(outcome.drops[0].reason, DropReason::OovExcess);
        let oov = outcome.drops[0].value.unwrap();
        assert!((oov - 2.0 / 41.0).abs() < 1e-12, "measured {oov}");

        let madlad = run(
            build(SourceKind::Madlad),
            &builtin_spec(SourceKind::Madlad),
            &RunContext::default(),
        )
        .unwrap();
        assert_eq!(madlad.docs.len(), 6);

        let mut full_vocab: std::collections::HashSet<String> =
            vocab.iter().cloned().collect();
        full_vocab.insert(fa_num(7001));
        full_vocab.insert(fa_num(7013));
        let ctx = RunContext {
            lexicons: Arc::new(
                Lexicons::bundled().as_ref().clone().with_vocabulary(full_vocab),
            ),
            data_dir: None,
        };
        let covered =
            run(build(SourceKind::Culturax), &builtin_spec(SourceKind::Culturax), &ctx).unwrap();
        assert_eq!(covered.docs.len(), 6);
    }

    #[test]
    fn ocr_run_trims_front_matter_and_flags_it() {
        let mut body_lines = Vec::new();
        for line in 0..30 {
            let words: Vec<String> =
                (0..7).map(|w| fa_num(3000 + (line * 7 + w) % 30)).collect();
            body_lines.push(words.join(" "));
        }
        let text = format!(
            "عنوان مقاله\nنویسنده نامدار\nچکیده\n{}",
            body_lines.join("\n")
        );
        let docs = vec![doc("p-1", SourceKind::PaperOcr, &text)];
        let outcome =
            run(docs, &builtin_spec(SourceKind::PaperOcr), &RunContext::default()).unwrap();
        assert_eq!(outcome.docs.len(), 1);
        let kept = &outcome.docs[0];
        assert!(kept.text.starts_with("چکیده"), "got {:?}", &kept.text[..20.min(kept.text.len())]);
        assert!(!kept.text.contains("نویسنده"));
        assert_eq!(kept.meta.get("front_matter").map(String::as_str), Some("found"));
        outcome.report.validate().unwrap();
    }

    #[test]
    fn book_run_scrubs_page_furniture_and_pii() {
        let base = "کتابخانه بزرگ و روشن در شهرستان تاریخی به دانشجویان علاقه\u{200C}مند";
        let mut lines = vec!["تاریخ جهان".to_string()];
        for i in 0..15 {
            lines.push(format!("{base} {}", fa_num(4000 + i)));
            if i % 5 == 4 {
                lines.push(format!("صفحه {}", "۱۲"));
                lines.push("تاریخ جهان".to_string());
            }
        }
        lines.push("تماس: admin@nashr.ir".to_string());
        let mut book = doc("b-1", SourceKind::BookText, &lines.join("\n"));
        book.meta.insert("title".into(), "تاریخ جهان".into());

        let outcome =
            run(vec![book], &builtin_spec(SourceKind::BookText), &RunContext::default()).unwrap();
        assert_eq!(outcome.docs.len(), 1, "drops: {:?}", outcome.drops);
        let kept = &outcome.docs[0];
        assert_eq!(kept.text.matches("تاریخ جهان").count(), 1);
        assert!(!kept.text.contains("صفحه"));
        assert!(!kept.text.contains("admin@nashr.ir"));
        outcome.report.validate().unwrap();
    }

    #[test]
    fn social_run_drops_short_replies_and_restores_duplicate_text() {
        let price = |id: &str, amount: &str| {
            doc(
                id,
                SourceKind::Social,
                &format!("قیمت دلار امروز در بازار آزاد تهران {amount} تومان اعلام شد"),
            )
        };
        let docs = vec![
            price("m-1", "۱۲۳۴"),
            price("m-2", "۵۶۷۸"),
            doc("m-3", SourceKind::Social, "سلام #خبر\nhttps://t.me/kanal"),
        ];
        let outcome =
            run(docs, &builtin_spec(SourceKind::Social), &RunContext::default()).unwrap();

        let mut retained: Vec<&str> = outcome.docs.iter().map(|d| d.id.as_str()).collect();
        retained.sort_unstable();
        assert_eq!(retained, ["m-1"]);
        assert!(outcome.docs[0].text.contains("۱۲۳۴"), "numbers restored in survivor");

        let reasons: BTreeMap<&str, DropReason> =
            outcome.drops.iter().map(|d| (d.id.as_str(), d.reason)).collect();
        assert_eq!(reasons["m-2"], DropReason::Duplicate);
        assert_eq!(reasons["m-3"], DropReason::ShortReply);
        outcome.report.validate().unwrap();
    }

    #[test]
    fn mixed_source_corpus_gets_per_source_chains() {
        let text = words_text(0..35);
        let docs = vec![
            doc("w-1", SourceKind::Web, &text),
            doc("c-1", SourceKind::Culturax, &text),
            doc("w-2", SourceKind::Web, &words_text(100..135)),
        ];
        let outcome = run(docs, &builtin_spec(SourceKind::Web), &RunContext::default()).unwrap();
        assert_eq!(outcome.docs.len(), 3, "same text in different sources is not a duplicate");
        assert_eq!(outcome.report.sources.len(), 2);
        let web = &outcome.report.sources["web"];
        let culturax = &outcome.report.sources["culturax"];
        assert_eq!(web[0].input_docs, 2);
        assert_eq!(culturax[0].input_docs, 1);
        outcome.report.validate().unwrap();
    }

    #[test]
    fn outcome_is_identical_across_thread_counts() {
        let mut docs = Vec::new();
        for i in 0..40 {
            let len = 25 + (i * 7) % 20;
            docs.push(doc(&format!("d-{i:02}"), SourceKind::Web, &words_text(i * 60..i * 60 + len)));
        }
        for i in 0..6 {
            docs.push(doc(&format!("copy-{i}"), SourceKind::Web, &docs[i * 3].text.clone()));
        }
        let spec = builtin_spec(SourceKind::Web);
        let ctx = RunContext::default();

        let run_with = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            pool.install(|| run(docs.clone(), &spec, &ctx).unwrap())
        };
        let one = run_with(1);
        let four = run_with(4);
        let eight = run_with(8);
        assert_eq!(one, four);
        assert_eq!(one, eight);
    }

    /// With exact-copy duplicates an evaluation stage can only shrink
    /// what survives: copies share one verdict, so a component is kept
    /// or cleared as a unit.
    #[test]
    fn removing_the_evaluation_stage_never_shrinks_the_retained_set() {
        let mut state = 0xfeed_beefu64;
        let mut rand = move |bound: usize| {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) as usize) % bound
        };
        let mut templates: Vec<String> = Vec::new();
        let mut docs = Vec::new();
        for i in 0..80 {
            let reuse = !templates.is_empty() && rand(100) < 30;
            let text = if reuse {
                templates[rand(templates.len())].clone()
            } else {
                let len = 10 + rand(50);
                let base = 10_000 + i * 100;
                let fresh = words_text(base..base + len);
                templates.push(fresh.clone());
                fresh
            };
            docs.push(doc(&format!("r-{i:02}"), SourceKind::Web, &text));
        }

        let full = builtin_spec(SourceKind::Web);
        let mut relaxed = full.clone();
        relaxed.stages.retain(|s| !matches!(s, Stage::Evaluate { .. }));

        let ctx = RunContext::default();
        let with_eval = run(docs.clone(), &full, &ctx).unwrap();
        let without_eval = run(docs, &relaxed, &ctx).unwrap();

        let kept_with: BTreeSet<&str> = with_eval.docs.iter().map(|d| d.id.as_str()).collect();
        let kept_without: BTreeSet<&str> =
            without_eval.docs.iter().map(|d| d.id.as_str()).collect();
        assert!(
            kept_with.is_subset(&kept_without),
            "extra survivors: {:?}",
            kept_with.difference(&kept_without).collect::<Vec<_>>()
        );
        assert!(kept_with.len() < kept_without.len(), "the evaluation stage must bite");
    }

    #[test]
    fn specs_round_trip_through_toml() {
        for source in SourceKind::ALL {
            let spec = builtin_spec(source);
            let text = spec.to_toml().unwrap();
            let parsed = PipelineSpec::from_toml(&text).unwrap();
            assert_eq!(parsed, spec, "{source} spec round-trips");
        }
    }

    #[test]
    fn hand_written_spec_parses_with_defaults() {
        let text = r#"
            source = "web"

            [[stages]]
            op = "charnorm"

            [[stages]]
            op = "strip_markup"

            [[stages]]
            op = "drop_repeated_lines"

            [[stages]]
            op = "evaluate"
            kind = "web"

            [stages.policy]
            min_words = 30
            max_nonpersian_char_frac = 0.5

            [[stages]]
            op = "dedup"

            [stages.config]
            num_hashes = 64
            num_bands = 8
        "#;
        let spec = PipelineSpec::from_toml(text).unwrap();
        assert_eq!(spec.source, SourceKind::Web);
        assert_eq!(spec.stages.len(), 5);
        assert!(matches!(
            &spec.stages[0],
            Stage::Charnorm { config } if *config == CharNormConfig::default()
        ));
        assert!(
            matches!(&spec.stages[2], Stage::DropRepeatedLines { min_repeats } if *min_repeats == 3)
        );
        let Stage::Evaluate { kind, policy } = &spec.stages[3] else {
            panic!("evaluate stage parses");
        };
        assert_eq!(*kind, EvaluatorKind::Web);
        assert_eq!(policy.min_words, Some(30));
        assert_eq!(policy.max_oov_frac, None);
        let Stage::Dedup { config } = &spec.stages[4] else {
            panic!("dedup stage parses");
        };
        assert_eq!(config.num_hashes, 64);
        assert_eq!(config.shingle_k, 13);
        assert!(validate_spec(&spec).is_empty());
    }

    #[test]
    fn evaluation_matches_the_standalone_evaluator() {
        let texts = [words_text(0..35), words_text(500..508), words_text(600..660)];
        let policy = FilterPolicy::web();
        let lex = Lexicons::bundled();
        for (i, text) in texts.iter().enumerate() {
            let stats = compute_stats(text, &lex, &policy);
            let direct = evaluate_web(&stats, &policy);
            let docs = vec![doc(&format!("x-{i}"), SourceKind::Web, text)];
            let outcome =
                run(docs, &builtin_spec(SourceKind::Web), &RunContext::default()).unwrap();
            assert_eq!(
                outcome.docs.len(),
                if direct == FilterDecision::Keep { 1 } else { 0 },
                "doc {i} verdicts agree"
            );
        }
    }
}
