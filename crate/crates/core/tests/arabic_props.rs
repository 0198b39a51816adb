mod common;

use common::{any_grapheme_string, bundled_corpus};
use proncoach::arabic::{
    normalize, segment_graphemes, strip_diacritics, transliterate, transliterate_inverse, SHADDA, TATWEEL,
};
use proptest::prelude::*;

proptest! {
    #[test]
    fn transliteration_round_trips(g in any_grapheme_string()) {
        let t = transliterate(&g);
        prop_assert!(t.is_ascii());
        prop_assert_eq!(t.chars().count(), g.codepoint_count());
        let back = transliterate_inverse(&t).unwrap();
        prop_assert_eq!(&back, &g);
        prop_assert_eq!(transliterate(&back), t);
    }

    #[test]
    fn segmentation_reproduces_normalized_text(g in any_grapheme_string()) {
        let text = g.to_text();
        prop_assert_eq!(normalize(&text), text.clone());
        let seg = segment_graphemes(&text).unwrap();
        prop_assert_eq!(seg.to_text(), text);
        prop_assert_eq!(seg, g);
    }

    #[test]
    fn normalize_is_idempotent(s in "\\PC{0,40}") {
        let once = normalize(&s);
        prop_assert_eq!(normalize(&once), once);
    }

    #[test]
    fn normalize_idempotent_on_arabic_noise(
        s in prop::collection::vec(prop::sample::select(vec![
            'ب', 'ت', 'ا', ' ', '\u{00A0}', '\t', '\u{0640}', '\u{064E}', '\u{064F}', '\u{0650}',
            '\u{0651}', '\u{0652}', '\u{064B}', '\u{0653}', '\u{0654}', 'أ', '\u{2003}',
        ]), 0..30)
    ) {
        let s: String = s.into_iter().collect();
        let once = normalize(&s);
        prop_assert_eq!(normalize(&once), once.clone());
        prop_assert!(!once.contains(TATWEEL), "tatweel kept");
        prop_assert!(!once.starts_with(' ') && !once.ends_with(' ') && !once.contains("  "));
    }

    #[test]
    fn canonical_mark_order(g in any_grapheme_string()) {
        let seg = segment_graphemes(&g.to_text()).unwrap();
        for gr in seg.iter() {
            let marks: Vec<char> = gr.diacritics().canonical_marks().collect();
            if let Some(pos) = marks.iter().position(|&c| c == SHADDA) {
                prop_assert_eq!(pos, 0);
            }
            prop_assert!(marks.len() <= 2);
        }
    }

    #[test]
    fn strip_keeps_bases(g in any_grapheme_string()) {
        let s = strip_diacritics(&g);
        prop_assert_eq!(s.bases(), g.bases());
        prop_assert!(s.iter().all(|x| x.diacritics().is_empty()));
    }
}

#[test]
fn corpus_transliterations_round_trip() {
    for item in bundled_corpus().items() {
        let back = transliterate_inverse(&item.transliteration).unwrap();
        assert_eq!(back, item.reference().unwrap(), "{}", item.id);
    }
}
