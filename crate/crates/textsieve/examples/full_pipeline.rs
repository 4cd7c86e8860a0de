//! The whole refinement pipeline on an in-memory web corpus: character
//! normalization, markup stripping, scrubbing, line filters, document
//! evaluation, and near-duplicate elimination, with per-stage
//! accounting and a drop log.
//!
//! ```sh
//! cargo run --example full_pipeline
//! ```

use textsieve::corpus::{Document, SourceKind};
use textsieve::pipeline::{builtin_spec, run, RunContext};

fn doc(id: &str, text: impl Into<String>) -> Document {
    Document::new(id, SourceKind::Web, text.into())
}

fn main() -> anyhow::Result<()> {
    let body: String = (0..36)
        .map(|i| format!("بند {i} این یادداشت به بررسی وضعیت اقتصادی کشور می‌پردازد"))
        .collect::<Vec<_>>()
        .join(" ");

    let docs = vec![
        doc("clean", &body),
        doc("tagged", format!("<html><body><p>{body}</p><script>var x = 1;</script></body></html>")),
        doc("copy", &body),
        doc("stub", "خانه | ورزشی | اقتصادی"),
        doc(
            "english",
            "This entire article is written in English from start to finish \
             and keeps going long enough to pass the length check easily, \
             sentence after sentence, without a single Persian word anywhere",
        ),
    ];

    let spec = builtin_spec(SourceKind::Web);
    let outcome = run(docs, &spec, &RunContext::default())?;

    println!("{:<26} {:>6} {:>6} {:>8}", "stage", "in", "kept", "dropped");
    for row in &outcome.report.stages {
        println!(
            "{:<26} {:>6} {:>6} {:>8}",
            row.stage,
            row.input_docs,
            row.kept_docs,
            row.dropped_docs()
        );
    }

    println!();
    for drop in &outcome.drops {
        println!("dropped {:<8} at {:<14} because {}", drop.id, drop.stage, drop.reason.as_str());
    }

    println!();
    for doc in &outcome.docs {
        let head: String = doc.text.chars().take(40).collect();
        println!("retained {:<8} {head}…", doc.id);
    }

    // Conservation: every input document is retained or logged, never
    // both, never neither.
    assert_eq!(outcome.docs.len() + outcome.drops.len(), 5);
    Ok(())
}
