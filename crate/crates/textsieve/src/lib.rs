//! Streaming refinement for Persian text corpora: character
//! normalization, boilerplate and PII scrubbing, line and document
//! filters with per-source policies, MinHash/LSH near-duplicate
//! elimination, and reduction accounting.
//!
//! The crate is organized as a pipeline over [`corpus::Document`]
//! values:
//!
//! - [`charnorm`] folds Arabic-presentation and compatibility forms
//!   into canonical Persian, normalizes whitespace while protecting the
//!   ZWNJ, and truncates character floods.
//! - [`scrub`] removes patterned junk (URLs, emails, phone numbers,
//!   page furniture) with named, testable rule sets.
//! - [`linefilter`] drops markup, navigation stubs, and repeated-line
//!   boilerplate inside a document.
//! - [`docfilter`] accepts or rejects whole documents against a
//!   [`docfilter::FilterPolicy`], with presets per source.
//! - [`dedup`] sketches documents with MinHash, buckets them with LSH
//!   bands, and keeps one representative per duplicate component; the
//!   canonical mode unifies digits and weekday names before matching
//!   and restores the original text afterwards.
//! - [`pipeline`] wires the stages into per-source presets, tracks a
//!   conserving [`corpus::RunReport`], and records every dropped id.
//! - [`stats`] summarizes length distributions and stage-by-stage
//!   reduction into plot-ready CSV tables.
//! - [`cli`] exposes all of it as a batch command line over JSONL
//!   files.
//!
//! Everything is deterministic given the inputs and the configured
//! seeds; worker-thread counts never change outputs.

pub mod charnorm;
pub mod cli;
pub mod corpus;
pub mod dedup;
pub mod docfilter;
pub mod linefilter;
pub mod pipeline;
pub mod scrub;
pub mod stats;
pub mod text;

pub use corpus::{Document, DropReason, RunReport, SourceKind};
pub use dedup::{dedup_corpus, DedupConfig, DedupMode, DuplicateReport};
pub use docfilter::{FilterPolicy, Lexicons};
pub use pipeline::{builtin_spec, run, PipelineSpec, RunContext, RunOutcome};
