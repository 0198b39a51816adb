//! Synthetic corpus generation.

use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::acoustic::{encode_wav, tone};
use crate::arabic::{self, Diacritics, Grapheme, GraphemeString, Vowel};
use crate::content::PracticeItem;

use super::EvalError;

/// Number of distinct reference tones in the generated asset pool.
pub const TONE_POOL: usize = 12;
/// Number of placeholder images in the generated asset pool.
pub const IMAGE_POOL: usize = 6;

pub fn tone_ref(k: usize) -> String {
    format!("audio/tone_{:02}.wav", k % TONE_POOL)
}

pub fn slow_tone_ref(k: usize) -> String {
    format!("audio/tone_{:02}_slow.wav", k % TONE_POOL)
}

pub fn example_ref(k: usize) -> String {
    format!("audio/example_{:02}.wav", k % TONE_POOL)
}

pub fn image_ref(k: usize) -> String {
    format!("images/card_{:02}.svg", k % IMAGE_POOL)
}

fn tone_freq(k: usize) -> f64 {
    220.0 * 2f64.powf(k as f64 / TONE_POOL as f64)
}

/// Writes the shared pool of beep WAVs and placeholder images.
pub fn write_asset_pool(asset_root: &Path) -> Result<(), EvalError> {
    std::fs::create_dir_all(asset_root.join("audio"))?;
    std::fs::create_dir_all(asset_root.join("images"))?;
    for k in 0..TONE_POOL {
        let f = tone_freq(k);
        std::fs::write(asset_root.join(tone_ref(k)), encode_wav(&tone(f, 0.6, 0.4)))?;
        std::fs::write(asset_root.join(slow_tone_ref(k)), encode_wav(&tone(f, 1.0, 0.4)))?;
        let mut example = tone(f, 0.4, 0.4);
        example.extend(vec![0.0; 1600]);
        example.extend(tone(f * 1.5, 0.4, 0.4));
        std::fs::write(asset_root.join(example_ref(k)), encode_wav(&example))?;
    }
    for k in 0..IMAGE_POOL {
        let hue = k * 360 / IMAGE_POOL;
        let svg = format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"240\" height=\"160\" viewBox=\"0 0 240 160\">\
             <rect width=\"240\" height=\"160\" rx=\"16\" fill=\"hsl({hue},60%,85%)\"/>\
             <circle cx=\"120\" cy=\"80\" r=\"44\" fill=\"hsl({hue},55%,55%)\"/></svg>\n"
        );
        std::fs::write(asset_root.join(image_ref(k)), svg)?;
    }
    Ok(())
}

fn random_diacritics<R: Rng + ?Sized>(rng: &mut R, word_final: bool) -> Diacritics {
    let vowels: &[Vowel] = if word_final {
        &[Vowel::Fatha, Vowel::Damma, Vowel::Kasra, Vowel::Sukun, Vowel::Fathatan, Vowel::Dammatan, Vowel::Kasratan]
    } else {
        &[Vowel::Fatha, Vowel::Damma, Vowel::Kasra, Vowel::Sukun]
    };
    let vowel = if rng.random_bool(0.9) {
        Some(vowels[rng.random_range(0..vowels.len())])
    } else {
        None
    };
    Diacritics {
        shadda: rng.random_bool(0.1),
        vowel,
    }
}

/// Random vowelized phrase of one or two words with all-distinct bases.
pub fn random_phrase<R: Rng + ?Sized>(rng: &mut R) -> GraphemeString {
    let mut pool: Vec<char> = arabic::letters().collect();
    pool.shuffle(rng);
    let word_count = if rng.random_bool(0.2) { 2 } else { 1 };
    let mut out = Vec::new();
    let mut next = pool.into_iter();
    for w in 0..word_count {
        if w > 0 {
            out.push(Grapheme::space());
        }
        let len = rng.random_range(2..=6);
        for i in 0..len {
            let base = next.next().expect("37 letters cover 12 positions");
            let d = random_diacritics(rng, i + 1 == len);
            out.push(Grapheme::new(base, d).expect("valid letter"));
        }
    }
    GraphemeString::new(out)
}

/// Builds one synthetic item around a vowelized phrase.
pub fn synthetic_item(index: usize, phrase: &GraphemeString) -> PracticeItem {
    let surface = arabic::strip_diacritics(phrase).to_text();
    let translit = arabic::transliterate(phrase);
    let note = phrase
        .words()
        .iter()
        .map(|w| {
            w.iter()
                .map(|g| arabic::transliterate(&GraphemeString::new(vec![*g])))
                .collect::<Vec<_>>()
                .join("-")
        })
        .collect::<Vec<_>>()
        .join(" / ");
    PracticeItem {
        id: format!("syn-{index:04}"),
        surface_text: surface.clone(),
        vowelized_text: phrase.to_text(),
        transliteration: translit.clone(),
        translation_en: format!("synthetic practice item {index}"),
        image_ref: image_ref(index),
        audio_normal_ref: tone_ref(index),
        audio_slow_ref: index.is_multiple_of(3).then(|| slow_tone_ref(index)),
        example_sentence_ar: format!("{surface} كلمة للتدريب على النطق"),
        example_sentence_en: format!("\"{translit}\" is a word for pronunciation practice."),
        example_audio_ref: example_ref(index),
        graphophonic_note: format!("Sound it out one letter at a time: {note}."),
    }
}

/// `n` synthetic items, deterministic per seed.
pub fn synthetic_items(n: usize, seed: u64) -> Vec<PracticeItem> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (1..=n).map(|i| synthetic_item(i, &random_phrase(&mut rng))).collect()
}

/// Writes `n` synthetic items (after any `extra` items) and the asset
/// pool. Returns the items written.
pub fn generate_corpus(
    n: usize,
    seed: u64,
    extra: Vec<PracticeItem>,
    corpus_path: &Path,
    asset_root: &Path,
) -> Result<Vec<PracticeItem>, EvalError> {
    if n == 0 {
        return Err(EvalError::Usage("item count must be at least 1".into()));
    }
    write_asset_pool(asset_root)?;
    let mut items = extra;
    for item in &mut items {
        item.validate()
            .map_err(|e| EvalError::Usage(format!("included item: {e}")))?;
    }
    items.extend(synthetic_items(n, seed));
    if let Some(parent) = corpus_path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    let mut json = serde_json::to_string_pretty(&items).map_err(|e| EvalError::Usage(e.to_string()))?;
    json.push('\n');
    std::fs::write(corpus_path, json)?;
    Ok(items)
}
