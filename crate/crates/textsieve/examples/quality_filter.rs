//! Document-level quality filtering: each source profile checks a text
//! against its thresholds and reports the first violation with the
//! measured value.
//!
//! ```sh
//! cargo run --example quality_filter
//! ```

use textsieve::docfilter::{compute_stats, EvaluatorKind, FilterPolicy, Lexicons};

fn main() {
    let policy = FilterPolicy::web();
    let lex = Lexicons::bundled();

    let long_article: String = (0..40)
        .map(|i| format!("جمله شماره {i} از این گزارش خبری درباره اوضاع شهر است"))
        .collect::<Vec<_>>()
        .join(" ");

    let samples: &[(&str, &str)] = &[
        ("full-length article", &long_article),
        ("navigation stub", "خانه | تماس با ما | درباره ما"),
        ("mostly English", "Breaking news coverage about فوتبال continues in English for the \
          entire article body, sentence after sentence, paragraph after \
          paragraph, until the piece ends without ever switching back into \
          Persian prose at any point in the whole text"),
        ("keyword stuffing", &"خرید خرید خرید خرید خرید ".repeat(12)),
    ];

    for (label, text) in samples {
        let stats = compute_stats(text, &lex, &policy);
        match EvaluatorKind::Web.first_violation(&stats, &policy) {
            None => println!("{label:<22} kept ({} words)", stats.word_count),
            Some(v) => println!(
                "{label:<22} dropped: {} (measured {:.3}, threshold {:.3})",
                v.reason.as_str(),
                v.value,
                v.threshold
            ),
        }
    }

    // The book profile expects longer, prose-heavy documents.
    let policy = FilterPolicy::book();
    let stats = compute_stats(&long_article, &lex, &policy);
    match EvaluatorKind::Book.first_violation(&stats, &policy) {
        None => println!("{:<22} kept by the book profile", "full-length article"),
        Some(v) => println!(
            "{:<22} dropped by the book profile: {} (measured {:.3}, threshold {:.3})",
            "full-length article",
            v.reason.as_str(),
            v.value,
            v.threshold
        ),
    }
}
