//! Loads the bundled corpus, draws a few seeded random items and shows
//! where each practiced word sits in its example sentence.

use std::path::PathBuf;

use proncoach::content::load_corpus;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> anyhow::Result<()> {
    let data = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data");
    let corpus = load_corpus(&data.join("corpus.json"), &data.join("assets"))?;
    println!("{} items", corpus.len());
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..5 {
        let item = corpus.random_item(&mut rng)?;
        let (s, e) = item.highlight_span().expect("validated items have a span");
        println!(
            "{}  {}  {}  {:?}\n    {}[{}]{}\n    slow audio: {}",
            item.id,
            item.vowelized_text,
            item.transliteration,
            item.translation_en,
            &item.example_sentence_ar[..s],
            &item.example_sentence_ar[s..e],
            &item.example_sentence_ar[e..],
            item.audio_slow_ref.as_deref().unwrap_or("none (client rate 0.6)"),
        );
    }
    let item = corpus.get_item("cur-001")?;
    for (field, r) in item.asset_refs() {
        println!("{field}: {}", corpus.resolve_asset(r).expect("safe path").display());
    }
    Ok(())
}
