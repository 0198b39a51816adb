//! Segments vowelized Arabic into graphemes and round-trips it through
//! Buckwalter transliteration.
//!
//! cargo run --example transliterate -- "مُدَرِّسَة"

use proncoach::arabic::{parse, transliterate, transliterate_inverse};

fn main() -> anyhow::Result<()> {
    let text = std::env::args().nth(1).unwrap_or_else(|| "السَّلَامُ عَلَيْكُم".to_owned());
    let graphemes = parse(&text)?;
    for (i, g) in graphemes.iter().enumerate() {
        if g.is_space() {
            println!("{i:>3}  (space)");
        } else {
            println!("{i:>3}  {}  base U+{:04X}  {:?}", g.to_text(), g.base() as u32, g.diacritics());
        }
    }
    let bw = transliterate(&graphemes);
    println!("buckwalter: {bw}");
    let back = transliterate_inverse(&bw)?;
    println!("inverse:    {}", back.to_text());
    assert_eq!(back, graphemes);
    Ok(())
}
