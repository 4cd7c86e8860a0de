//! Command-line front end: reproducible batch runs over JSONL corpora.
//!
//! Subcommands: `process` (full per-source pipeline), `dedup`
//! (standalone near-duplicate elimination), `stats` (plot-ready CSV
//! tables), `inspect-drops` (drop-log summaries), and `validate-config`
//! (spec checking without a run).
//!
//! Exit codes: 0 success, 1 input/output error, 2 configuration error.
//! A run manifest is written before any document is processed, so every
//! output directory records exactly what produced it. Outputs depend
//! only on inputs and manifest fields, never on the worker count.

use std::collections::{BTreeMap, HashSet};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::corpus::{
    read_corpus, write_corpus, CorpusError, Document, SourceKind,
};
use crate::dedup::{dedup_corpus, DedupConfig, DedupMode};
use crate::docfilter::{LexiconError, Lexicons};
use crate::pipeline::{
    self, builtin_spec, validate_spec, PipelineError, PipelineSpec, RunContext, Stage,
};
use crate::scrub::ScrubError;
use crate::stats::{
    emit_length_table, emit_reduction_table, length_distribution, reduction_summary, StatsError,
};

#[derive(Parser)]
#[command(
    name = "textsieve",
    version,
    about = "Cleaning, filtering, and near-duplicate removal for Persian text corpora"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Directory with data files (rule sets, character tables, stopword
    /// lists); overrides the bundled copies.
    #[arg(long, global = true, env = "TEXTSIEVE_DATA_DIR")]
    data_dir: Option<PathBuf>,
    /// Worker threads; 0 or absent means one per core. Outputs do not
    /// depend on this.
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a source's pipeline over a corpus; write the retained
    /// documents, drop log, run report, and manifest.
    Process(ProcessArgs),
    /// Near-duplicate elimination over an already-cleaned corpus.
    Dedup(DedupArgs),
    /// Emit length and reduction CSV tables from corpora and reports.
    Stats(StatsArgs),
    /// Summarize or filter a drop log from a previous run.
    InspectDrops(InspectDropsArgs),
    /// Parse a pipeline spec and report violations without running it.
    ValidateConfig(ValidateConfigArgs),
}

fn parse_source(s: &str) -> Result<SourceKind, String> {
    s.parse().map_err(|_| {
        let valid: Vec<&str> = SourceKind::ALL.iter().map(|k| k.as_str()).collect();
        format!("unknown source {s:?}; valid kinds: {}", valid.join(", "))
    })
}

#[derive(Args)]
struct ProcessArgs {
    /// Input corpus files (JSONL records: id, text, optional source and
    /// meta).
    #[arg(long = "in", required = true, num_args = 1..)]
    inputs: Vec<PathBuf>,
    /// Source preset to apply; also the default source for records
    /// without one.
    #[arg(long, value_parser = parse_source, required_unless_present = "spec")]
    source: Option<SourceKind>,
    /// Pipeline spec file (TOML). Takes precedence over the --source
    /// preset; --seed still overrides its dedup seed.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Seed for the dedup stage.
    #[arg(long)]
    seed: Option<u64>,
    /// Fail on the first malformed input record instead of skipping it.
    #[arg(long)]
    strict: bool,
}

#[derive(Args)]
struct DedupArgs {
    #[arg(long = "in", required = true, num_args = 1..)]
    inputs: Vec<PathBuf>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Words per shingle.
    #[arg(long, default_value_t = 13)]
    k: usize,
    /// MinHash functions per signature.
    #[arg(long, default_value_t = 128)]
    hashes: usize,
    /// Bands the signature is split into.
    #[arg(long, default_value_t = 8)]
    bands: usize,
    /// canonical: any band collision is an edge, with numbers and
    /// weekdays unified before matching. exact: collisions must also
    /// reach --min-sim, and the text is matched as written.
    #[arg(long, default_value = "canonical", value_parser = ["canonical", "exact"])]
    mode: String,
    /// Minimum estimated similarity for an edge in exact mode.
    #[arg(long = "min-sim", default_value_t = 0.98)]
    min_sim: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Default source for records without one; dedup never crosses
    /// source boundaries.
    #[arg(long, value_parser = parse_source, default_value = "web")]
    source: SourceKind,
    #[arg(long)]
    strict: bool,
}

#[derive(Args)]
struct StatsArgs {
    /// Corpus files to measure.
    #[arg(long = "in", num_args = 1..)]
    inputs: Vec<PathBuf>,
    /// report.json files from previous runs.
    #[arg(long = "report", num_args = 1..)]
    reports: Vec<PathBuf>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Default source for records without one.
    #[arg(long, value_parser = parse_source, default_value = "web")]
    source: SourceKind,
    #[arg(long)]
    strict: bool,
}

#[derive(Args)]
struct InspectDropsArgs {
    /// drops.jsonl file from a previous run.
    #[arg(long = "in")]
    input: PathBuf,
    /// Print matching records instead of the summary table.
    #[arg(long)]
    list: bool,
    /// Only records with this drop reason (snake_case name).
    #[arg(long)]
    reason: Option<String>,
    /// Only records from this stage.
    #[arg(long)]
    stage: Option<String>,
    /// Maximum records printed in list mode.
    #[arg(long, default_value_t = 20)]
    limit: usize,
}

#[derive(Args)]
struct ValidateConfigArgs {
    /// Spec file to check.
    #[arg(long, required_unless_present = "source")]
    spec: Option<PathBuf>,
    /// Check a builtin preset instead.
    #[arg(long, value_parser = parse_source)]
    source: Option<SourceKind>,
}

/// What one invocation ran with; written to the output directory before
/// processing starts. Identical inputs plus an identical manifest give
/// identical outputs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub command: String,
    pub inputs: Vec<PathBuf>,
    pub source: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec_file: Option<PathBuf>,
    pub seed: u64,
    /// Requested worker count; 0 means one per core.
    pub jobs: usize,
    pub output_dir: PathBuf,
    /// SHA-256 over the resolved configuration's JSON form.
    pub config_hash: String,
}

enum CliError {
    Io(String),
    Config(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Io(m) | CliError::Config(m) => m,
        }
    }
}

impl From<CorpusError> for CliError {
    fn from(e: CorpusError) -> CliError {
        CliError::Io(e.to_string())
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> CliError {
        match &e {
            PipelineError::Io { .. }
            | PipelineError::Scrub(ScrubError::Io { .. })
            | PipelineError::CharNorm(crate::charnorm::CharNormError::Io { .. }) => {
                CliError::Io(e.to_string())
            }
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<LexiconError> for CliError {
    fn from(e: LexiconError) -> CliError {
        match &e {
            LexiconError::Io { .. } => CliError::Io(e.to_string()),
            LexiconError::Empty { .. } => CliError::Config(e.to_string()),
        }
    }
}

impl From<StatsError> for CliError {
    fn from(e: StatsError) -> CliError {
        CliError::Io(e.to_string())
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

/// Entry point for the binary. Returns the process exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap handles --help/--version as "errors" with exit 0.
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = match &cli.command {
        Command::Process(args) => cmd_process(args, &cli),
        Command::Dedup(args) => cmd_dedup(args, &cli),
        Command::Stats(args) => cmd_stats(args),
        Command::InspectDrops(args) => cmd_inspect_drops(args),
        Command::ValidateConfig(args) => cmd_validate_config(args),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.code()
        }
    }
}

fn build_pool(jobs: Option<usize>) -> Result<rayon::ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Config(e.to_string()))
}

/// Reads every input file, keeping ids unique across files. In lenient
/// mode cross-file duplicates and malformed records are skipped and
/// counted; in strict mode they fail the run.
fn read_inputs(
    paths: &[PathBuf],
    default_source: SourceKind,
    strict: bool,
) -> Result<(Vec<Document>, u64), CliError> {
    let mut docs: Vec<Document> = Vec::new();
    let mut seen: HashSet<String> = HashSet::new();
    let mut skipped = 0u64;
    for path in paths {
        let mut reader = read_corpus(path, default_source, strict)?;
        for item in &mut reader {
            let doc = item?;
            if !seen.insert(doc.id.clone()) {
                if strict {
                    return Err(CliError::Io(format!(
                        "{}: duplicate id {} across input files",
                        path.display(),
                        doc.id
                    )));
                }
                skipped += 1;
                continue;
            }
            docs.push(doc);
        }
        skipped += reader.skipped_records();
    }
    Ok((docs, skipped))
}

fn load_lexicons(data_dir: Option<&Path>) -> Result<Arc<Lexicons>, CliError> {
    let Some(dir) = data_dir else {
        return Ok(Lexicons::bundled());
    };
    let candidate = |name: &str| {
        let p = dir.join(name);
        p.exists().then_some(p)
    };
    let fa = candidate("stopwords_fa.txt");
    let ar = candidate("stopwords_ar.txt");
    let vocab = candidate("vocabulary.txt");
    if fa.is_none() && ar.is_none() && vocab.is_none() {
        return Ok(Lexicons::bundled());
    }
    let lex = Lexicons::from_files(fa.as_deref(), ar.as_deref(), vocab.as_deref())?;
    Ok(Arc::new(lex))
}

fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<(), CliError> {
    let mut body = serde_json::to_string_pretty(value).map_err(|e| io_err(path, e))?;
    body.push('\n');
    std::fs::write(path, body).map_err(|e| io_err(path, e))
}

fn write_jsonl<T: Serialize>(items: &[T], path: &Path) -> Result<(), CliError> {
    let mut body = String::new();
    for item in items {
        body.push_str(&serde_json::to_string(item).map_err(|e| io_err(path, e))?);
        body.push('\n');
    }
    std::fs::write(path, body).map_err(|e| io_err(path, e))
}

fn config_hash<T: Serialize>(config: &T) -> String {
    let json = serde_json::to_string(config).expect("configs serialize");
    let digest = Sha256::digest(json.as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

fn ensure_out_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))
}

fn spec_seed(spec: &PipelineSpec) -> u64 {
    spec.stages
        .iter()
        .find_map(|s| match s {
            Stage::Dedup { config } => Some(config.seed),
            _ => None,
        })
        .unwrap_or(0)
}

fn cmd_process(args: &ProcessArgs, cli: &Cli) -> Result<(), CliError> {
    let mut spec = match &args.spec {
        Some(path) => PipelineSpec::from_file(path)?,
        None => builtin_spec(args.source.expect("clap enforces spec or source")),
    };
    if let Some(seed) = args.seed {
        for stage in &mut spec.stages {
            if let Stage::Dedup { config } = stage {
                config.seed = seed;
            }
        }
    }
    let violations = validate_spec(&spec);
    if !violations.is_empty() {
        for v in &violations {
            eprintln!("{v}");
        }
        return Err(CliError::Config(format!(
            "spec for {} has {} violation(s)",
            spec.source,
            violations.len()
        )));
    }

    let ctx = RunContext {
        lexicons: load_lexicons(cli.data_dir.as_deref())?,
        data_dir: cli.data_dir.clone(),
    };
    // Resolve every stage's resources now so a bad table or rule file is
    // a config error before the manifest claims a run happened.
    pipeline::run(Vec::new(), &spec, &ctx)?;

    ensure_out_dir(&args.out)?;
    let manifest = RunManifest {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        command: "process".into(),
        inputs: args.inputs.clone(),
        source: spec.source.to_string(),
        spec_file: args.spec.clone(),
        seed: spec_seed(&spec),
        jobs: cli.jobs.unwrap_or(0),
        output_dir: args.out.clone(),
        config_hash: config_hash(&spec),
    };
    write_json(&manifest, &args.out.join("manifest.json"))?;

    let default_source = args.source.unwrap_or(spec.source);
    let (docs, skipped) = read_inputs(&args.inputs, default_source, args.strict)?;
    if skipped > 0 {
        eprintln!("skipped {skipped} malformed or duplicate input record(s)");
    }
    let input_count = docs.len();

    let pool = build_pool(cli.jobs)?;
    let outcome = pool.install(|| pipeline::run(docs, &spec, &ctx))?;

    write_corpus(outcome.docs.iter(), args.out.join("retained.jsonl"))?;
    write_jsonl(&outcome.drops, &args.out.join("drops.jsonl"))?;
    write_json(&outcome.report, &args.out.join("report.json"))?;

    for row in &outcome.report.stages {
        println!(
            "{:<28} in {:>7}  kept {:>7}  dropped {:>6}",
            row.stage,
            row.input_docs,
            row.kept_docs,
            row.dropped_docs()
        );
    }
    println!(
        "retained {} of {} document(s); {} drop record(s); outputs in {}",
        outcome.docs.len(),
        input_count,
        outcome.drops.len(),
        args.out.display()
    );
    Ok(())
}

fn cmd_dedup(args: &DedupArgs, cli: &Cli) -> Result<(), CliError> {
    let mode = match args.mode.as_str() {
        "exact" => DedupMode::Exact,
        _ => DedupMode::Canonical,
    };
    let canonical = mode == DedupMode::Canonical;
    let config = DedupConfig {
        shingle_k: args.k,
        num_hashes: args.hashes,
        num_bands: args.bands,
        seed: args.seed,
        mode,
        exact_similarity_min: args.min_sim,
        canonicalize_numbers: canonical,
        canonicalize_weekdays: canonical,
        band_stride: None,
    };
    config.validate().map_err(|e| CliError::Config(e.to_string()))?;

    ensure_out_dir(&args.out)?;
    let manifest = RunManifest {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        command: "dedup".into(),
        inputs: args.inputs.clone(),
        source: args.source.to_string(),
        spec_file: None,
        seed: args.seed,
        jobs: cli.jobs.unwrap_or(0),
        output_dir: args.out.clone(),
        config_hash: config_hash(&config),
    };
    write_json(&manifest, &args.out.join("manifest.json"))?;

    let (docs, skipped) = read_inputs(&args.inputs, args.source, args.strict)?;
    if skipped > 0 {
        eprintln!("skipped {skipped} malformed or duplicate input record(s)");
    }
    let input_count = docs.len();

    let pool = build_pool(cli.jobs)?;
    let (retained, report) = pool
        .install(|| dedup_corpus(docs, &config))
        .map_err(|e| CliError::Config(e.to_string()))?;

    write_corpus(retained.iter(), args.out.join("retained.jsonl"))?;
    write_json(&report, &args.out.join("duplicates.json"))?;

    println!(
        "retained {} of {} document(s); {} duplicate component(s), {} dropped; outputs in {}",
        retained.len(),
        input_count,
        report.components.len(),
        report.duplicate_docs(),
        args.out.display()
    );
    Ok(())
}

fn cmd_stats(args: &StatsArgs) -> Result<(), CliError> {
    if args.inputs.is_empty() && args.reports.is_empty() {
        return Err(CliError::Config(
            "stats needs at least one --in corpus or --report file".into(),
        ));
    }
    ensure_out_dir(&args.out)?;

    let mut written: Vec<PathBuf> = Vec::new();
    if !args.inputs.is_empty() {
        let (docs, skipped) = read_inputs(&args.inputs, args.source, args.strict)?;
        if skipped > 0 {
            eprintln!("skipped {skipped} malformed or duplicate input record(s)");
        }
        let dist = length_distribution(&docs);
        let path = args.out.join("lengths.csv");
        emit_length_table(&dist, &path)?;
        written.push(path);
    }
    if !args.reports.is_empty() {
        let mut reports = Vec::new();
        for path in &args.reports {
            let body = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
            let report: crate::corpus::RunReport =
                serde_json::from_str(&body).map_err(|e| io_err(path, e))?;
            reports.push(report);
        }
        let summary = reduction_summary(&reports)?;
        let path = args.out.join("reduction.csv");
        emit_reduction_table(&summary, &path)?;
        written.push(path);
    }
    for path in &written {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn cmd_inspect_drops(args: &InspectDropsArgs) -> Result<(), CliError> {
    let body = std::fs::read_to_string(&args.input).map_err(|e| io_err(&args.input, e))?;
    let mut records: Vec<pipeline::DropRecord> = Vec::new();
    for (i, line) in body.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record: pipeline::DropRecord = serde_json::from_str(line)
            .map_err(|e| CliError::Io(format!("{}:{}: {e}", args.input.display(), i + 1)))?;
        records.push(record);
    }
    let matches = |r: &pipeline::DropRecord| {
        args.reason.as_deref().map_or(true, |want| r.reason.as_str() == want)
            && args.stage.as_deref().map_or(true, |want| r.stage == want)
    };

    if args.list {
        for record in records.iter().filter(|r| matches(r)).take(args.limit) {
            println!("{}", serde_json::to_string(record).expect("records serialize"));
        }
        return Ok(());
    }

    let mut counts: BTreeMap<(String, &'static str), u64> = BTreeMap::new();
    let mut total = 0u64;
    for record in records.iter().filter(|r| matches(r)) {
        *counts.entry((record.stage.clone(), record.reason.as_str())).or_insert(0) += 1;
        total += 1;
    }
    println!("{:<28} {:<28} {:>7}", "stage", "reason", "count");
    for ((stage, reason), n) in &counts {
        println!("{stage:<28} {reason:<28} {n:>7}");
    }
    println!("{:<28} {:<28} {total:>7}", "total", "");
    Ok(())
}

fn cmd_validate_config(args: &ValidateConfigArgs) -> Result<(), CliError> {
    let spec = match (&args.spec, args.source) {
        (Some(path), _) => PipelineSpec::from_file(path)?,
        (None, Some(source)) => builtin_spec(source),
        (None, None) => unreachable!("clap enforces spec or source"),
    };
    let violations = validate_spec(&spec);
    if violations.is_empty() {
        println!("ok: {} spec with {} stage(s)", spec.source, spec.stages.len());
        Ok(())
    } else {
        for v in &violations {
            eprintln!("{v}");
        }
        Err(CliError::Config(format!(
            "spec for {} has {} violation(s)",
            spec.source,
            violations.len()
        )))
    }
}
