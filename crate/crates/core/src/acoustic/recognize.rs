use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::wav::AudioClip;
use crate::align::OpKind;
use crate::arabic::{self, Diacritics, Grapheme, GraphemeString, TextError};
use crate::content::PracticeItem;

/// Confidence given to graphemes the mock recognizer left untouched.
pub const CONFIDENCE_CLEAN: f64 = 1.0;
/// Confidence given to corrupted or inserted graphemes.
pub const CONFIDENCE_CORRUPTED: f64 = 0.3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RecognizeError {
    #[error("invalid error rates: {0}")]
    InvalidRates(String),
    #[error("no hypothesis text supplied")]
    MissingHypothesis,
    #[error("no audio supplied")]
    MissingAudio,
    #[error(transparent)]
    Text(#[from] TextError),
}

/// Recognizer output.
#[derive(Debug, Clone, PartialEq)]
pub struct Hypothesis {
    pub graphemes: GraphemeString,
    pub confidences: Option<Vec<f64>>,
}

impl Hypothesis {
    pub fn new(graphemes: GraphemeString) -> Self {
        Hypothesis {
            graphemes,
            confidences: None,
        }
    }

    pub fn parse(text: &str) -> Result<Self, TextError> {
        arabic::parse(text).map(Hypothesis::new)
    }
}

/// What the learner submitted for one item.
#[derive(Debug, Clone, Default)]
pub struct Attempt {
    pub audio: Option<AudioClip>,
    pub hypothesis_text: Option<String>,
}

/// Stand-in for a speech recognizer producing a grapheme hypothesis.
///
/// Implementations must be deterministic for identical inputs and safe to
/// call concurrently.
pub trait Recognizer: Send + Sync {
    fn recognize(&self, attempt: &Attempt, item: &PracticeItem) -> Result<Hypothesis, RecognizeError>;
}

/// Reads the hypothesis from the `hypothesis_text` field of the attempt,
/// letting any external ASR feed the scorer.
#[derive(Debug, Clone, Copy, Default)]
pub struct SidecarRecognizer;

impl Recognizer for SidecarRecognizer {
    fn recognize(&self, attempt: &Attempt, _item: &PracticeItem) -> Result<Hypothesis, RecognizeError> {
        let text = attempt
            .hypothesis_text
            .as_deref()
            .ok_or(RecognizeError::MissingHypothesis)?;
        Ok(Hypothesis::parse(text)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErrorRates {
    #[serde(default)]
    pub p_sub_full: f64,
    #[serde(default)]
    pub p_sub_diac: f64,
    #[serde(default)]
    pub p_del: f64,
    #[serde(default)]
    pub p_ins: f64,
}

impl ErrorRates {
    pub fn validate(&self) -> Result<(), RecognizeError> {
        let all = [self.p_sub_full, self.p_sub_diac, self.p_del, self.p_ins];
        if all.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(RecognizeError::InvalidRates(format!(
                "every rate must lie in [0, 1]: {self:?}"
            )));
        }
        if self.p_sub_full + self.p_sub_diac + self.p_del > 1.0 + 1e-12 {
            return Err(RecognizeError::InvalidRates(
                "p_sub_full + p_sub_diac + p_del exceeds 1".into(),
            ));
        }
        Ok(())
    }
}

/// One corruption applied to the reference, as ground truth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct InjectedError {
    pub kind: OpKind,
    /// Scored (space-free) reference index. For insertions, the index the
    /// inserted grapheme follows.
    pub ref_index: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Corruption {
    pub hypothesis: Hypothesis,
    pub injected: Vec<InjectedError>,
}

pub fn random_letter<R: Rng + ?Sized>(rng: &mut R) -> char {
    let letters: Vec<char> = arabic::letters().collect();
    letters[rng.random_range(0..letters.len())]
}

/// Uniform over letters other than `base`.
pub fn other_letter<R: Rng + ?Sized>(rng: &mut R, base: char) -> char {
    let letters: Vec<char> = arabic::letters().filter(|&c| c != base).collect();
    letters[rng.random_range(0..letters.len())]
}

/// Uniform over diacritic sets other than `current`.
pub fn other_diacritics<R: Rng + ?Sized>(rng: &mut R, current: Diacritics) -> Diacritics {
    let sets: Vec<Diacritics> = Diacritics::all().into_iter().filter(|&d| d != current).collect();
    sets[rng.random_range(0..sets.len())]
}

pub fn random_grapheme<R: Rng + ?Sized>(rng: &mut R) -> Grapheme {
    let base = random_letter(rng);
    let sets = Diacritics::all();
    let d = sets[rng.random_range(0..sets.len())];
    Grapheme::new(base, d).expect("letters and diacritic sets are valid")
}

/// Corrupts a reference grapheme sequence, keeping the ground truth.
///
/// Each letter gets at most one of substitution, diacritic substitution or
/// deletion (one categorical draw), then independently an inserted random
/// grapheme after it with probability `p_ins`. Spaces are kept as is.
pub fn corrupt<R: Rng + ?Sized>(
    reference: &GraphemeString,
    rates: &ErrorRates,
    rng: &mut R,
) -> Result<Corruption, RecognizeError> {
    rates.validate()?;
    let mut graphemes = Vec::with_capacity(reference.len() + 4);
    let mut confidences = Vec::with_capacity(reference.len() + 4);
    let mut injected = Vec::new();
    let mut ref_index = 0;
    let t_full = rates.p_sub_full;
    let t_diac = t_full + rates.p_sub_diac;
    let t_del = t_diac + rates.p_del;
    for g in reference {
        if g.is_space() {
            graphemes.push(*g);
            confidences.push(CONFIDENCE_CLEAN);
            continue;
        }
        let u: f64 = rng.random();
        let ins: f64 = rng.random();
        if u < t_full {
            let base = other_letter(rng, g.base());
            graphemes.push(Grapheme::new(base, g.diacritics()).expect("valid letter"));
            confidences.push(CONFIDENCE_CORRUPTED);
            injected.push(InjectedError { kind: OpKind::SubFull, ref_index });
        } else if u < t_diac {
            let d = other_diacritics(rng, g.diacritics());
            graphemes.push(g.with_diacritics(d).expect("letters take any diacritics"));
            confidences.push(CONFIDENCE_CORRUPTED);
            injected.push(InjectedError { kind: OpKind::SubDiacritic, ref_index });
        } else if u < t_del {
            injected.push(InjectedError { kind: OpKind::Del, ref_index });
        } else {
            graphemes.push(*g);
            confidences.push(CONFIDENCE_CLEAN);
        }
        if ins < rates.p_ins {
            graphemes.push(random_grapheme(rng));
            confidences.push(CONFIDENCE_CORRUPTED);
            injected.push(InjectedError { kind: OpKind::Ins, ref_index });
        }
        ref_index += 1;
    }
    Ok(Corruption {
        hypothesis: Hypothesis {
            graphemes: GraphemeString::new(graphemes),
            confidences: Some(confidences),
        },
        injected,
    })
}

/// Simulates a recognizer by corrupting the item's reference text.
pub fn mock_recognize(item: &PracticeItem, rates: &ErrorRates, seed: u64) -> Result<Hypothesis, RecognizeError> {
    let reference = item.reference()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    corrupt(&reference, rates, &mut rng).map(|c| c.hypothesis)
}

/// Seeded test double for a real recognizer. Requires audio, ignores its
/// content.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MockRecognizer {
    pub rates: ErrorRates,
    pub seed: u64,
}

impl MockRecognizer {
    pub fn new(rates: ErrorRates, seed: u64) -> Result<Self, RecognizeError> {
        rates.validate()?;
        Ok(MockRecognizer { rates, seed })
    }
}

impl Recognizer for MockRecognizer {
    fn recognize(&self, attempt: &Attempt, item: &PracticeItem) -> Result<Hypothesis, RecognizeError> {
        if attempt.audio.is_none() {
            return Err(RecognizeError::MissingAudio);
        }
        mock_recognize(item, &self.rates, self.seed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::content::tests::item;

    fn salam() -> PracticeItem {
        item("w1", "سلام", "سَلَام")
    }

    #[test]
    fn zero_rates_is_identity() {
        let h = mock_recognize(&salam(), &ErrorRates::default(), 7).unwrap();
        assert_eq!(h.graphemes, salam().reference().unwrap());
        assert_eq!(h.confidences, Some(vec![1.0; 4]));
    }

    #[test]
    fn full_deletion_empties_hypothesis() {
        let rates = ErrorRates { p_del: 1.0, ..Default::default() };
        let h = mock_recognize(&salam(), &rates, 3).unwrap();
        assert!(h.graphemes.is_empty());
        assert_eq!(h.confidences, Some(vec![]));
    }

    #[test]
    fn invalid_rates() {
        let too_big = ErrorRates { p_sub_full: 0.6, p_del: 0.6, ..Default::default() };
        assert!(matches!(too_big.validate(), Err(RecognizeError::InvalidRates(_))));
        let negative = ErrorRates { p_ins: -0.1, ..Default::default() };
        assert!(negative.validate().is_err());
        assert!(MockRecognizer::new(too_big, 1).is_err());
        assert!(mock_recognize(&salam(), &too_big, 1).is_err());
    }

    #[test]
    fn corruption_ground_truth_is_consistent() {
        let rates = ErrorRates { p_sub_full: 0.2, p_sub_diac: 0.2, p_del: 0.2, p_ins: 0.3 };
        let reference = arabic::parse("مَدْرَسَة كَبِيرَة").unwrap();
        for seed in 0..50 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let c = corrupt(&reference, &rates, &mut rng).unwrap();
            let n_ins = c.injected.iter().filter(|e| e.kind == OpKind::Ins).count();
            let n_del = c.injected.iter().filter(|e| e.kind == OpKind::Del).count();
            assert_eq!(c.hypothesis.graphemes.len(), reference.len() - n_del + n_ins);
            assert_eq!(c.hypothesis.confidences.as_ref().unwrap().len(), c.hypothesis.graphemes.len());
            // spaces untouched
            assert_eq!(c.hypothesis.graphemes.iter().filter(|g| g.is_space()).count(), 1);
            let mut last = None;
            for e in c.injected.iter().filter(|e| e.kind != OpKind::Ins) {
                assert!(Some(e.ref_index) > last);
                last = Some(e.ref_index);
            }
        }
    }

    #[test]
    fn mock_is_deterministic_and_needs_audio() {
        let rates = ErrorRates { p_sub_full: 0.5, ..Default::default() };
        let m = MockRecognizer::new(rates, 42).unwrap();
        let attempt = Attempt { audio: Some(AudioClip::new(vec![0.0; 400])), hypothesis_text: None };
        let a = m.recognize(&attempt, &salam()).unwrap();
        let b = m.recognize(&attempt, &salam()).unwrap();
        assert_eq!(a, b);
        assert_eq!(m.recognize(&Attempt::default(), &salam()), Err(RecognizeError::MissingAudio));
    }

    #[test]
    fn sidecar_parses_text() {
        let attempt = Attempt { audio: None, hypothesis_text: Some("سَلَام".into()) };
        let h = SidecarRecognizer.recognize(&attempt, &salam()).unwrap();
        assert_eq!(h.graphemes, salam().reference().unwrap());
        assert_eq!(SidecarRecognizer.recognize(&Attempt::default(), &salam()), Err(RecognizeError::MissingHypothesis));
        let bad = Attempt { audio: None, hypothesis_text: Some("َب".into()) };
        assert!(matches!(SidecarRecognizer.recognize(&bad, &salam()), Err(RecognizeError::Text(_))));
    }

    #[test]
    fn substitution_helpers_avoid_current_value() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            assert_ne!(other_letter(&mut rng, 'ب'), 'ب');
            assert_ne!(other_diacritics(&mut rng, Diacritics::NONE), Diacritics::NONE);
        }
    }
}
