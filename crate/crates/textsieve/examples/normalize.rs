//! Character normalization: Arabic variants fold into canonical
//! Persian, condensed whitespace and character floods are tamed, and
//! the ZWNJ survives untouched.
//!
//! ```sh
//! cargo run --example normalize
//! ```

use textsieve::charnorm::{normalize, CharNormConfig};

fn main() -> anyhow::Result<()> {
    let opts = CharNormConfig::default().resolve(None)?;

    let samples: &[(&str, &str)] = &[
        ("Arabic yeh and kaf", "علي در مكتب كتاب می\u{200C}خواند"),
        ("Arabic-Indic digits", "سال ١٣٩٨ برابر ۱۳۹۸ است"),
        ("I'rab vowel marks", "مَدرَسه و کتابِ خوب"),
        ("alef maksura", "موسی گاهی موس\u{0649} نوشته می\u{200C}شود"),
        ("character flood", "عالییییییی بود!!!!!!!"),
        ("scattered whitespace", "این\u{00A0}متن   با\tفاصله\u{2009}های عجیب"),
    ];

    for (label, before) in samples {
        let after = normalize(before, &opts);
        println!("{label}");
        println!("  before  {}", visible(before));
        println!("  after   {}", visible(&after));
        println!();
    }

    let zwnj_text = "می\u{200C}روم و خانه\u{200C}ها";
    assert_eq!(normalize(zwnj_text, &opts), zwnj_text);
    println!("ZWNJ-joined words pass through byte for byte.");
    Ok(())
}

/// Makes the invisible characters in a sample printable.
fn visible(text: &str) -> String {
    text.replace('\u{200C}', "⟨zwnj⟩").replace('\t', "⟨tab⟩").replace('\u{00A0}', "⟨nbsp⟩")
}
