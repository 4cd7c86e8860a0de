//! End-to-end checks for `pipeline::run`: spec round-tripping, per-source
//! dedup partitioning, data-dir resource overrides, untouched-text
//! restoration, and report merging across batches.

use std::fs;
use std::sync::Arc;

use textsieve::charnorm::{normalize, CharNormConfig};
use textsieve::corpus::{Document, DropReason, SourceKind};
use textsieve::docfilter::Lexicons;
use textsieve::pipeline::{self, builtin_spec, PipelineSpec, RunContext};

const FA_LETTERS: [char; 10] = ['ا', 'ب', 'پ', 'ت', 'ث', 'ج', 'چ', 'ح', 'خ', 'د'];

fn fa_word(i: usize, len: usize) -> String {
    (0..len).map(|p| FA_LETTERS[(i / 10usize.pow(p as u32)) % 10]).collect()
}

fn fa_number(n: usize) -> String {
    n.to_string()
        .chars()
        .map(|c| char::from_u32(0x06F0 + c.to_digit(10).unwrap()).unwrap())
        .collect()
}

/// Two lines of eighteen distinct Persian words each; passes the web
/// policy with room to spare on every axis.
fn article(seed: usize) -> String {
    let words: Vec<String> = (0..36).map(|k| fa_word(seed * 100 + k, 5)).collect();
    format!("{}\n{}", words[..18].join(" "), words[18..].join(" "))
}

/// Like `article`, but with a price token embedded mid-line so that two
/// copies differing only in the price canonicalize to identical text.
fn priced_article(seed: usize, price: usize) -> String {
    let words: Vec<String> = (0..36).map(|k| fa_word(seed * 100 + k, 5)).collect();
    let mut first: Vec<&str> = words[..18].iter().map(String::as_str).collect();
    let price = fa_number(price);
    first.insert(9, &price);
    format!("{}\n{}", first.join(" "), words[18..].join(" "))
}

#[test]
fn spec_toml_round_trip_preserves_behavior() {
    let spec = builtin_spec(SourceKind::Web);
    let toml_text = spec.to_toml().unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("web.toml");
    fs::write(&path, &toml_text).unwrap();
    let reloaded = PipelineSpec::from_file(&path).unwrap();
    assert_eq!(reloaded, spec, "spec must survive a TOML round trip");

    let docs = vec![
        Document::new("r0", SourceKind::Web, priced_article(40, 61_250)),
        Document::new("r1", SourceKind::Web, priced_article(40, 88_400)),
        Document::new("r2", SourceKind::Web, article(41)),
        Document::new("r3", SourceKind::Web, article(42)),
        Document::new("r4", SourceKind::Web, "کوتاه بود و رفت"),
    ];
    let ctx = RunContext::default();
    let original = pipeline::run(docs.clone(), &spec, &ctx).unwrap();
    let reran = pipeline::run(docs, &reloaded, &ctx).unwrap();
    assert_eq!(original, reran, "reloaded spec must reproduce the run exactly");

    assert_eq!(original.docs.len(), 3);
    assert!(original.drops.iter().any(|d| d.id == "r1" && d.reason == DropReason::Duplicate));
    assert!(original.drops.iter().any(|d| d.id == "r4" && d.reason == DropReason::TooShort));
}

#[test]
fn dedup_never_crosses_source_boundaries() {
    let twin = priced_article(7, 100);
    let docs = vec![
        Document::new("wa", SourceKind::Web, twin.clone()),
        Document::new("wb", SourceKind::Web, priced_article(7, 237)),
        Document::new("wc", SourceKind::Web, article(8)),
        Document::new("ca", SourceKind::Culturax, twin),
        Document::new("cb", SourceKind::Culturax, article(9)),
    ];
    let spec = builtin_spec(SourceKind::Web);
    let outcome = pipeline::run(docs, &spec, &RunContext::default()).unwrap();
    outcome.report.validate().unwrap();

    let retained: Vec<&str> = outcome.docs.iter().map(|d| d.id.as_str()).collect();
    assert_eq!(retained, vec!["wa", "wc", "ca", "cb"]);

    assert_eq!(outcome.drops.len(), 1);
    let drop = &outcome.drops[0];
    assert_eq!(drop.id, "wb");
    assert_eq!(drop.stage, "dedup");
    assert_eq!(drop.reason, DropReason::Duplicate);
    assert_eq!(drop.source, SourceKind::Web);

    assert_eq!(outcome.duplicates.components.len(), 1);
    assert_eq!(outcome.duplicates.components[0].members, vec!["wa", "wb"]);

    let sources: Vec<&str> = outcome.report.sources.keys().map(String::as_str).collect();
    assert_eq!(sources, vec!["culturax", "web"]);
    let web_dedup = outcome.report.sources["web"]
        .iter()
        .find(|s| s.stage == "dedup")
        .unwrap();
    assert_eq!(web_dedup.dropped_docs(), 1);
    let cx_dedup = outcome.report.sources["culturax"]
        .iter()
        .find(|s| s.stage == "dedup")
        .unwrap();
    assert_eq!(cx_dedup.dropped_docs(), 0, "the cross-source copy must survive");
}

#[test]
fn data_dir_rule_set_overrides_bundled_rules() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("rules_web.toml"),
        "[[rules]]\nname = \"ad_line\"\npattern = 'تبلیغ'\naction = \"delete_line\"\nscope = \"anywhere\"\n",
    )
    .unwrap();

    let text = format!("{}\nتبلیغ ویژه خرید اینترنتی", article(12));
    let docs = vec![Document::new("d0", SourceKind::Web, text)];
    let spec = builtin_spec(SourceKind::Web);

    let bundled = pipeline::run(docs.clone(), &spec, &RunContext::default()).unwrap();
    assert_eq!(bundled.docs.len(), 1);
    assert!(
        bundled.docs[0].text.contains("تبلیغ"),
        "bundled web rules have no opinion about this line"
    );

    let ctx = RunContext {
        lexicons: Lexicons::bundled(),
        data_dir: Some(dir.path().to_path_buf()),
    };
    let overridden = pipeline::run(docs, &spec, &ctx).unwrap();
    assert_eq!(overridden.docs.len(), 1);
    assert!(
        !overridden.docs[0].text.contains("تبلیغ"),
        "the replacement rule set must delete the ad line"
    );
    assert_eq!(overridden.docs[0].text, article(12));
}

#[test]
fn data_dir_char_tables_require_both_files() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("char_map.tsv"), "U+0051\tU+06CC\n").unwrap();

    let partial = CharNormConfig::default().resolve(Some(dir.path())).unwrap();
    assert_eq!(
        normalize("Q", &partial),
        "Q",
        "a lone char_map.tsv must not displace the bundled tables"
    );

    fs::write(dir.path().join("char_blocklist.tsv"), "U+005A\n").unwrap();
    let custom = CharNormConfig::default().resolve(Some(dir.path())).unwrap();
    assert_eq!(normalize("Q", &custom), "ی");
    assert_eq!(normalize("ZQZ", &custom), "ی");

    let bundled = CharNormConfig::default().resolve(None).unwrap();
    assert_eq!(normalize("QZ", &bundled), "QZ");
}

#[test]
fn social_pipeline_returns_retained_text_untouched() {
    let skeleton = |price: usize| {
        format!(
            "قیمت دلار امروز در بازار تهران به {} تومان رسید و فعالان بازار آرام بودند و معامله\u{200C}ها عادی بود",
            fa_number(price)
        )
    };
    let kept = skeleton(61_250);
    let docs = vec![
        Document::new("m0", SourceKind::Social, kept.clone()),
        Document::new("m1", SourceKind::Social, skeleton(69_900)),
        Document::new("m2", SourceKind::Social, article(33)),
    ];
    let outcome =
        pipeline::run(docs, &builtin_spec(SourceKind::Social), &RunContext::default()).unwrap();

    let retained: Vec<&str> = outcome.docs.iter().map(|d| d.id.as_str()).collect();
    assert_eq!(retained, vec!["m0", "m2"]);
    assert_eq!(
        outcome.docs[0].text, kept,
        "the surviving variant must come back byte for byte, digits intact"
    );
    assert_eq!(outcome.drops.len(), 1);
    assert_eq!(outcome.drops[0].id, "m1");
    assert_eq!(outcome.drops[0].reason, DropReason::Duplicate);
}

#[test]
fn reports_from_separate_batches_merge_cleanly() {
    let spec = builtin_spec(SourceKind::Web);
    let ctx = RunContext { lexicons: Arc::clone(&RunContext::default().lexicons), data_dir: None };

    let batch_a: Vec<Document> = (0..6)
        .map(|i| {
            let source = if i % 3 == 0 { SourceKind::Culturax } else { SourceKind::Web };
            let text = if i == 5 { "کوتاه ماند".to_string() } else { article(50 + i) };
            Document::new(format!("a{i}"), source, text)
        })
        .collect();
    let batch_b: Vec<Document> = (0..5)
        .map(|i| {
            let text = if i == 0 { "باز هم کوتاه".to_string() } else { article(70 + i) };
            Document::new(format!("b{i}"), SourceKind::Web, text)
        })
        .collect();

    let out_a = pipeline::run(batch_a, &spec, &ctx).unwrap();
    let out_b = pipeline::run(batch_b, &spec, &ctx).unwrap();

    let merged = out_a.report.merge(&out_b.report).unwrap();
    merged.validate().unwrap();
    assert_eq!(merged, out_b.report.merge(&out_a.report).unwrap(), "merge order must not matter");

    assert_eq!(merged.stages.len(), out_a.report.stages.len());
    for (m, (a, b)) in merged
        .stages
        .iter()
        .zip(out_a.report.stages.iter().zip(out_b.report.stages.iter()))
    {
        assert_eq!(m.stage, a.stage);
        assert_eq!(m.input_docs, a.input_docs + b.input_docs);
        assert_eq!(m.kept_docs, a.kept_docs + b.kept_docs);
    }
    assert_eq!(merged.stages[0].input_docs, 11);
    assert_eq!(
        merged.stages.last().unwrap().kept_docs,
        (out_a.docs.len() + out_b.docs.len()) as u64
    );

    let merged_sources: Vec<&str> = merged.sources.keys().map(String::as_str).collect();
    assert_eq!(merged_sources, vec!["culturax", "web"]);

    let split = textsieve::stats::reduction_summary(&[out_a.report, out_b.report]).unwrap();
    let joined = textsieve::stats::reduction_summary(std::slice::from_ref(&merged)).unwrap();
    assert_eq!(split, joined, "summaries must agree whether batches merge before or after");
}
