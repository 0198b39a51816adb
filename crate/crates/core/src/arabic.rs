//! Arabic text handling: normalization, grapheme segmentation and a
//! reversible Buckwalter romanization.
//!
//! A [`Grapheme`] is one base letter (or a word-separating space) together
//! with the diacritics attached to it. It is the unit every score in this
//! crate is reported against.
//!
//! Diacritics are stored structurally (an optional shadda plus at most one
//! vowel, tanwin or sukun mark), so the canonical order "shadda, then
//! vowel" is enforced by the type. Two orders exist on the way out:
//!
//! * [`GraphemeString::to_text`] emits codepoints in Unicode canonical
//!   (NFC) order, so segmenting normalized text and writing it back is the
//!   identity. Under NFC the short vowels and tanwin sort *before* shadda
//!   while sukun sorts *after* it.
//! * [`transliterate`] emits shadda first, the usual Buckwalter convention.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use unicode_normalization::UnicodeNormalization;

pub const SPACE: char = ' ';
pub const TATWEEL: char = '\u{0640}';
pub const SHADDA: char = '\u{0651}';

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TextError {
    #[error("malformed text at codepoint {index}: {reason}")]
    MalformedText { index: usize, reason: String },
    #[error("unknown transliteration symbol {symbol:?} at position {index}")]
    UnknownSymbol { index: usize, symbol: char },
}

fn malformed(index: usize, reason: impl Into<String>) -> TextError {
    TextError::MalformedText {
        index,
        reason: reason.into(),
    }
}

/// Vowel, tanwin or sukun mark. At most one per grapheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Vowel {
    Fathatan,
    Dammatan,
    Kasratan,
    Fatha,
    Damma,
    Kasra,
    Sukun,
}

impl Vowel {
    pub const ALL: [Vowel; 7] = [
        Vowel::Fathatan,
        Vowel::Dammatan,
        Vowel::Kasratan,
        Vowel::Fatha,
        Vowel::Damma,
        Vowel::Kasra,
        Vowel::Sukun,
    ];

    pub fn codepoint(self) -> char {
        match self {
            Vowel::Fathatan => '\u{064B}',
            Vowel::Dammatan => '\u{064C}',
            Vowel::Kasratan => '\u{064D}',
            Vowel::Fatha => '\u{064E}',
            Vowel::Damma => '\u{064F}',
            Vowel::Kasra => '\u{0650}',
            Vowel::Sukun => '\u{0652}',
        }
    }

    pub fn from_codepoint(c: char) -> Option<Vowel> {
        Vowel::ALL.into_iter().find(|v| v.codepoint() == c)
    }

    fn symbol(self) -> char {
        match self {
            Vowel::Fathatan => 'F',
            Vowel::Dammatan => 'N',
            Vowel::Kasratan => 'K',
            Vowel::Fatha => 'a',
            Vowel::Damma => 'u',
            Vowel::Kasra => 'i',
            Vowel::Sukun => 'o',
        }
    }

    fn from_symbol(s: char) -> Option<Vowel> {
        Vowel::ALL.into_iter().find(|v| v.symbol() == s)
    }
}

/// Diacritics attached to one base letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Diacritics {
    pub shadda: bool,
    pub vowel: Option<Vowel>,
}

impl Diacritics {
    pub const NONE: Diacritics = Diacritics {
        shadda: false,
        vowel: None,
    };

    pub fn is_empty(&self) -> bool {
        !self.shadda && self.vowel.is_none()
    }

    /// Every valid diacritic combination (2 × 8 = 16), bare first.
    pub fn all() -> Vec<Diacritics> {
        let vowels = std::iter::once(None).chain(Vowel::ALL.into_iter().map(Some));
        vowels
            .flat_map(|vowel| [false, true].map(|shadda| Diacritics { shadda, vowel }))
            .collect()
    }

    /// Marks in canonical storage order: shadda, then the vowel mark.
    pub fn canonical_marks(&self) -> impl Iterator<Item = char> {
        self.shadda
            .then_some(SHADDA)
            .into_iter()
            .chain(self.vowel.map(Vowel::codepoint))
    }

    /// Marks in Unicode canonical (NFC) order.
    fn nfc_marks(&self) -> impl Iterator<Item = char> {
        let vowel_first = self.vowel.filter(|v| *v != Vowel::Sukun);
        let sukun = self.vowel.filter(|v| *v == Vowel::Sukun);
        vowel_first
            .map(Vowel::codepoint)
            .into_iter()
            .chain(self.shadda.then_some(SHADDA))
            .chain(sukun.map(Vowel::codepoint))
    }

    pub fn mark_count(&self) -> usize {
        usize::from(self.shadda) + usize::from(self.vowel.is_some())
    }
}

/// Base letters accepted for scoring, in Buckwalter table order.
const LETTERS: [(char, char); 37] = [
    ('\u{0621}', '\''),
    ('\u{0622}', '|'),
    ('\u{0623}', '>'),
    ('\u{0624}', '&'),
    ('\u{0625}', '<'),
    ('\u{0626}', '}'),
    ('\u{0627}', 'A'),
    ('\u{0628}', 'b'),
    ('\u{0629}', 'p'),
    ('\u{062A}', 't'),
    ('\u{062B}', 'v'),
    ('\u{062C}', 'j'),
    ('\u{062D}', 'H'),
    ('\u{062E}', 'x'),
    ('\u{062F}', 'd'),
    ('\u{0630}', '*'),
    ('\u{0631}', 'r'),
    ('\u{0632}', 'z'),
    ('\u{0633}', 's'),
    ('\u{0634}', '$'),
    ('\u{0635}', 'S'),
    ('\u{0636}', 'D'),
    ('\u{0637}', 'T'),
    ('\u{0638}', 'Z'),
    ('\u{0639}', 'E'),
    ('\u{063A}', 'g'),
    ('\u{0641}', 'f'),
    ('\u{0642}', 'q'),
    ('\u{0643}', 'k'),
    ('\u{0644}', 'l'),
    ('\u{0645}', 'm'),
    ('\u{0646}', 'n'),
    ('\u{0647}', 'h'),
    ('\u{0648}', 'w'),
    ('\u{0649}', 'Y'),
    ('\u{064A}', 'y'),
    ('\u{0671}', '{'),
];

/// All supported base letters (spaces excluded).
pub fn letters() -> impl Iterator<Item = char> {
    LETTERS.iter().map(|&(c, _)| c)
}

pub fn is_letter(c: char) -> bool {
    letter_symbol(c).is_some()
}

fn letter_symbol(c: char) -> Option<char> {
    LETTERS.iter().find(|&&(l, _)| l == c).map(|&(_, s)| s)
}

fn letter_from_symbol(s: char) -> Option<char> {
    LETTERS.iter().find(|&&(_, sym)| sym == s).map(|&(l, _)| l)
}

/// One base letter plus its diacritics, or a word separator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Grapheme {
    base: char,
    diacritics: Diacritics,
}

impl Grapheme {
    /// Builds a grapheme, rejecting unsupported bases and marked spaces.
    pub fn new(base: char, diacritics: Diacritics) -> Result<Self, TextError> {
        if base == SPACE {
            if !diacritics.is_empty() {
                return Err(malformed(0, "space cannot carry diacritics"));
            }
        } else if !is_letter(base) {
            return Err(malformed(
                0,
                format!("unsupported base letter U+{:04X}", base as u32),
            ));
        }
        Ok(Grapheme { base, diacritics })
    }

    pub fn bare(base: char) -> Result<Self, TextError> {
        Grapheme::new(base, Diacritics::NONE)
    }

    pub fn space() -> Self {
        Grapheme {
            base: SPACE,
            diacritics: Diacritics::NONE,
        }
    }

    pub fn base(&self) -> char {
        self.base
    }

    pub fn diacritics(&self) -> Diacritics {
        self.diacritics
    }

    pub fn is_space(&self) -> bool {
        self.base == SPACE
    }

    pub fn same_base(&self, other: &Grapheme) -> bool {
        self.base == other.base
    }

    pub fn with_diacritics(self, diacritics: Diacritics) -> Result<Self, TextError> {
        Grapheme::new(self.base, diacritics)
    }

    pub fn stripped(self) -> Self {
        Grapheme {
            base: self.base,
            diacritics: Diacritics::NONE,
        }
    }

    pub fn codepoint_count(&self) -> usize {
        1 + self.diacritics.mark_count()
    }

    /// Display form: base letter followed by marks in NFC order.
    pub fn to_text(&self) -> String {
        let mut s = String::with_capacity(6);
        self.write_text(&mut s);
        s
    }

    fn write_text(&self, out: &mut String) {
        out.push(self.base);
        out.extend(self.diacritics.nfc_marks());
    }

    fn write_translit(&self, out: &mut String) {
        if self.is_space() {
            out.push(SPACE);
            return;
        }
        out.push(letter_symbol(self.base).expect("validated base"));
        if self.diacritics.shadda {
            out.push('~');
        }
        if let Some(v) = self.diacritics.vowel {
            out.push(v.symbol());
        }
    }
}

impl fmt::Display for Grapheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Ordered sequence of graphemes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct GraphemeString {
    graphemes: Vec<Grapheme>,
}

impl GraphemeString {
    pub fn new(graphemes: Vec<Grapheme>) -> Self {
        GraphemeString { graphemes }
    }

    pub fn as_slice(&self) -> &[Grapheme] {
        &self.graphemes
    }

    pub fn len(&self) -> usize {
        self.graphemes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphemes.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Grapheme> {
        self.graphemes.iter()
    }

    pub fn into_vec(self) -> Vec<Grapheme> {
        self.graphemes
    }

    /// Concatenated codepoints in NFC order.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for g in &self.graphemes {
            g.write_text(&mut s);
        }
        s
    }

    pub fn codepoint_count(&self) -> usize {
        self.graphemes.iter().map(Grapheme::codepoint_count).sum()
    }

    /// Non-space graphemes, i.e. the units that are scored.
    pub fn letters(&self) -> Vec<Grapheme> {
        self.graphemes.iter().copied().filter(|g| !g.is_space()).collect()
    }

    /// Splits on space graphemes. Repeated or edge spaces yield empty
    /// words so that word positions survive whole-word deletions; an empty
    /// string has no words.
    pub fn words(&self) -> Vec<&[Grapheme]> {
        if self.graphemes.is_empty() {
            return Vec::new();
        }
        self.graphemes.split(Grapheme::is_space).collect()
    }

    pub fn bases(&self) -> Vec<char> {
        self.graphemes.iter().map(Grapheme::base).collect()
    }
}

impl From<Vec<Grapheme>> for GraphemeString {
    fn from(graphemes: Vec<Grapheme>) -> Self {
        GraphemeString { graphemes }
    }
}

impl FromIterator<Grapheme> for GraphemeString {
    fn from_iter<I: IntoIterator<Item = Grapheme>>(iter: I) -> Self {
        GraphemeString {
            graphemes: iter.into_iter().collect(),
        }
    }
}

impl<'a> IntoIterator for &'a GraphemeString {
    type Item = &'a Grapheme;
    type IntoIter = std::slice::Iter<'a, Grapheme>;

    fn into_iter(self) -> Self::IntoIter {
        self.graphemes.iter()
    }
}

impl fmt::Display for GraphemeString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// NFC-normalizes, drops tatweel, collapses whitespace runs to a single
/// space and trims the ends.
pub fn normalize(text: &str) -> String {
    let composed: String = text.chars().filter(|&c| c != TATWEEL).nfc().collect();
    let mut out = String::with_capacity(composed.len());
    for word in composed.split_whitespace() {
        if !out.is_empty() {
            out.push(SPACE);
        }
        out.push_str(word);
    }
    out
}

/// Segments normalized text into graphemes.
///
/// Each diacritic attaches to the nearest preceding base letter. A mark
/// with no base, a mark after a space, a second shadda, a second vowel
/// mark or any unsupported codepoint is rejected.
pub fn segment_graphemes(text: &str) -> Result<GraphemeString, TextError> {
    let mut out: Vec<Grapheme> = Vec::with_capacity(text.len() / 2);
    for (index, c) in text.chars().enumerate() {
        if c == SPACE {
            out.push(Grapheme::space());
        } else if is_letter(c) {
            out.push(Grapheme {
                base: c,
                diacritics: Diacritics::NONE,
            });
        } else if c == SHADDA || Vowel::from_codepoint(c).is_some() {
            let Some(last) = out.last_mut() else {
                return Err(malformed(index, "diacritic without a base letter"));
            };
            if last.is_space() {
                return Err(malformed(index, "diacritic attached to a space"));
            }
            let d = &mut last.diacritics;
            if c == SHADDA {
                if d.shadda {
                    return Err(malformed(index, "repeated shadda"));
                }
                d.shadda = true;
            } else {
                if d.vowel.is_some() {
                    return Err(malformed(index, "more than one vowel mark"));
                }
                d.vowel = Vowel::from_codepoint(c);
            }
        } else {
            return Err(malformed(
                index,
                format!("unsupported codepoint U+{:04X}", c as u32),
            ));
        }
    }
    Ok(GraphemeString::new(out))
}

/// Normalizes then segments.
pub fn parse(text: &str) -> Result<GraphemeString, TextError> {
    segment_graphemes(&normalize(text))
}

/// Buckwalter romanization, one ASCII symbol per codepoint.
pub fn transliterate(gs: &GraphemeString) -> String {
    let mut out = String::with_capacity(gs.codepoint_count());
    for g in gs {
        g.write_translit(&mut out);
    }
    out
}

/// Inverse of [`transliterate`].
///
/// Marks must follow their letter in canonical order (`~` before the
/// vowel symbol) so that the round trip is exact in both directions.
pub fn transliterate_inverse(s: &str) -> Result<GraphemeString, TextError> {
    let mut out: Vec<Grapheme> = Vec::with_capacity(s.len());
    for (index, sym) in s.chars().enumerate() {
        if sym == SPACE {
            out.push(Grapheme::space());
            continue;
        }
        if let Some(base) = letter_from_symbol(sym) {
            out.push(Grapheme {
                base,
                diacritics: Diacritics::NONE,
            });
            continue;
        }
        let vowel = Vowel::from_symbol(sym);
        if sym != '~' && vowel.is_none() {
            return Err(TextError::UnknownSymbol { index, symbol: sym });
        }
        let Some(last) = out.last_mut().filter(|g| !g.is_space()) else {
            return Err(malformed(index, "diacritic symbol without a base letter"));
        };
        let d = &mut last.diacritics;
        match vowel {
            None if d.shadda || d.vowel.is_some() => {
                return Err(malformed(index, "shadda must precede the vowel mark once"));
            }
            None => d.shadda = true,
            Some(_) if d.vowel.is_some() => {
                return Err(malformed(index, "more than one vowel mark"));
            }
            Some(v) => d.vowel = Some(v),
        }
    }
    Ok(GraphemeString::new(out))
}

/// Same bases, all diacritics removed.
pub fn strip_diacritics(gs: &GraphemeString) -> GraphemeString {
    gs.iter().map(|g| g.stripped()).collect()
}
