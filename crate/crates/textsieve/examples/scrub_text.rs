//! Pattern scrubbing with named rule sets: web boilerplate, personally
//! identifying information, and social-media noise.
//!
//! ```sh
//! cargo run --example scrub_text
//! ```

use textsieve::scrub::{bundled, scrub, scrub_pii, scrub_social};

fn main() -> anyhow::Result<()> {
    let web_rules = bundled("rules_web")?;
    let page = "شورای شهر در نشست امروز خود بودجه سال آینده را تصویب کرد.\n\
                ادامه مطلب …\n\
                کلیه حقوق این پایگاه محفوظ است\n\
                منبع: https://news.example.ir/a?id=42";
    let outcome = scrub(page, web_rules);
    println!("web rules");
    println!("  before  {:?}", page);
    println!("  after   {:?}", outcome.text);
    for (rule, n) in &outcome.removals {
        println!("  removed {n} match(es) of {rule}");
    }
    println!();

    let letter = "برای پیگیری با شماره ۰۹۱۲۳۴۵۶۷۸۹ تماس بگیرید \
                  یا به کد ملی ۰۰۱۲۳۴۵۶۷۸ اشاره کنید.";
    let outcome = scrub_pii(letter);
    println!("PII rules");
    println!("  before  {letter}");
    println!("  after   {}", outcome.text);
    println!();

    let post = "نتیجه بازی امشب فوق‌العاده بود و تیم ما برد\n\
                @sports_channel\n#فوتبال #ورزش #لیگ_برتر";
    let outcome = scrub_social(post);
    println!("social rules");
    println!("  before  {:?}", post);
    println!("  after   {:?}", outcome.text);
    println!();

    // Scrubbing is idempotent: a second pass finds nothing new.
    let again = scrub(&outcome.text, bundled("rules_social")?);
    assert_eq!(again.text, outcome.text);
    assert_eq!(again.total_removals(), 0);
    println!("second pass over scrubbed text removes nothing.");
    Ok(())
}
