//! Corpus measurement: length quartiles per source and the
//! stage-by-stage reduction a pipeline run produced, exported as the
//! same CSV tables the command line writes.
//!
//! ```sh
//! cargo run --example corpus_stats
//! ```

use textsieve::corpus::{Document, SourceKind};
use textsieve::pipeline::{builtin_spec, run, RunContext};
use textsieve::stats::{emit_tables, length_distribution, reduction_summary};

/// A distinct pronounceable marker per document, so the fixture is not
/// one article repeated with different numerals (which near-duplicate
/// elimination would rightly collapse).
fn marker(mut n: usize) -> String {
    const SYLLABLES: [&str; 10] =
        ["با", "دا", "کا", "ما", "نا", "یا", "زا", "سا", "تا", "پا"];
    let mut word = String::new();
    loop {
        word.push_str(SYLLABLES[n % 10]);
        n /= 10;
        if n == 0 {
            return word;
        }
    }
}

fn main() -> anyhow::Result<()> {
    let mut docs = Vec::new();
    for i in 0..60 {
        let key = marker(i);
        let sentences = 3 + (i * 7) % 50;
        let text: String = (0..sentences)
            .map(|s| format!("گزارش {key} درباره رویداد شماره {s} هفته گذشته شهر"))
            .collect::<Vec<_>>()
            .join(" ");
        docs.push(Document::new(format!("doc-{i:02}"), SourceKind::Web, text));
    }
    for i in 0..6 {
        docs.push(Document::new(format!("copy-{i}"), SourceKind::Web, docs[i].text.clone()));
    }

    let dist = length_distribution(&docs);
    let spec = builtin_spec(SourceKind::Web);
    let outcome = run(docs, &spec, &RunContext::default())?;
    for (source, s) in &dist.by_source {
        println!(
            "{source}: {} docs, words min {} / q1 {} / median {} / q3 {} / max {}, mean {:.1}",
            s.count, s.min, s.q1, s.median, s.q3, s.max, s.mean
        );
    }

    let summary = reduction_summary(std::slice::from_ref(&outcome.report))?;
    println!();
    for row in summary.rows.iter().chain(std::iter::once(&summary.overall)) {
        let pct = |v: Option<f64>| v.map_or("n/a".to_string(), |p| format!("{p:.1}%"));
        println!(
            "{}: {} -> {} after filters ({}) -> {} after dedup ({}), overall {}",
            row.source,
            row.initial_docs,
            row.after_preprocessing,
            pct(row.preprocessing_pct_kept()),
            row.after_dedup,
            pct(row.dedup_pct_kept()),
            pct(row.overall_pct_kept()),
        );
    }

    let dir = std::env::temp_dir().join("textsieve-corpus-stats");
    let (lengths, reduction) = emit_tables(&dist, &summary, &dir)?;
    println!("\nwrote {}", lengths.display());
    println!("wrote {}", reduction.display());
    Ok(())
}
