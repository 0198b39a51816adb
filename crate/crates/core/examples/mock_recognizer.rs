//! Seeded mock recognizer: corrupts a reference at configurable rates and
//! shows what was injected.

use proncoach::acoustic::{corrupt, mock_recognize, ErrorRates};
use proncoach::arabic::{parse, transliterate};
use proncoach::content::PracticeItem;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> anyhow::Result<()> {
    let reference = parse("السَّلَامُ عَلَيْكُم")?;
    let rates = ErrorRates { p_sub_full: 0.1, p_sub_diac: 0.15, p_del: 0.1, p_ins: 0.05 };
    println!("reference {}  {}", reference.to_text(), transliterate(&reference));
    for seed in 0..5 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = corrupt(&reference, &rates, &mut rng)?;
        let injected: Vec<String> = c.injected.iter().map(|e| format!("{:?}@{}", e.kind, e.ref_index)).collect();
        println!(
            "seed {seed}  {}  {:<24} {}",
            c.hypothesis.graphemes.to_text(),
            transliterate(&c.hypothesis.graphemes),
            injected.join(" ")
        );
    }

    let item = PracticeItem {
        id: "demo".into(),
        surface_text: "سلام".into(),
        vowelized_text: "سَلَام".into(),
        transliteration: String::new(),
        translation_en: "peace".into(),
        image_ref: "img/peace.svg".into(),
        audio_normal_ref: "audio/peace.wav".into(),
        audio_slow_ref: None,
        example_sentence_ar: "سلام عليكم".into(),
        example_sentence_en: "Peace be upon you".into(),
        example_audio_ref: "audio/peace.wav".into(),
        graphophonic_note: String::new(),
    };
    let h = mock_recognize(&item, &ErrorRates { p_sub_full: 0.5, ..ErrorRates::default() }, 42)?;
    println!("seed 42, p_sub_full 0.5: {} {:?}", transliterate(&h.graphemes), h.confidences);
    Ok(())
}
