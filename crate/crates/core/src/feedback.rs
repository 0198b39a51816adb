//! Feedback payload returned for one attempt: graded characters, the
//! omitted/added/mispronounced diff, audio cues and assistant content.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::acoustic::{fuse_scores, FusionWeights, Hypothesis};
use crate::align::{
    self, insertion_anchors, score_characters, utterance_score, Band, CharLabel, CharacterScore, OpKind,
    PhraseAlignment, ScoreError, UtteranceScore,
};
use crate::arabic::{transliterate, GraphemeString, TextError};
use crate::content::PracticeItem;

/// Playback rate the client applies when no slowed recording exists.
pub const CLIENT_SLOW_RATE: f64 = 0.6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FeedbackError {
    #[error("inconsistent feedback inputs: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Text(#[from] TextError),
    #[error(transparent)]
    Score(#[from] ScoreError),
}

fn inconsistent(reason: impl Into<String>) -> FeedbackError {
    FeedbackError::Inconsistent(reason.into())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharacterFeedback {
    #[serde(flatten)]
    pub score: CharacterScore,
    /// Codepoints of the reference grapheme.
    pub display: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Insertion {
    /// Reference index the inserted grapheme follows; `None` when it comes
    /// before the first reference character.
    pub after_ref_index: Option<usize>,
    pub display: String,
}

/// Score of one reference word, `[start, end)` over character indices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WordScore {
    pub start: usize,
    pub end: usize,
    pub value: f64,
    pub stars: u8,
}

/// Utterance score after optional fusion with acoustic similarity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverallScore {
    pub value: f64,
    pub stars: u8,
    pub acoustic_similarity: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AudioCue {
    pub normal_ref: String,
    pub slow_ref: Option<String>,
    /// Set when `slow_ref` is absent.
    pub client_rate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssistantCue {
    pub example_sentence_ar: String,
    /// Byte offsets `[start, end)` of the practiced word in the sentence.
    pub highlight_span: [usize; 2],
    pub example_sentence_en: String,
    pub example_audio_ref: String,
    pub graphophonic_note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttemptFeedback {
    pub item_id: String,
    pub utterance: UtteranceScore,
    pub overall: OverallScore,
    pub words: Vec<WordScore>,
    pub characters: Vec<CharacterFeedback>,
    pub hypothesis_text: String,
    pub hypothesis_transliteration: String,
    pub insertions: Vec<Insertion>,
    pub omitted: Vec<usize>,
    pub mispronounced: Vec<usize>,
    pub audio: AudioCue,
    pub assistant: AssistantCue,
}

impl AttemptFeedback {
    /// Fuses an acoustic similarity into the overall score.
    pub fn with_acoustic(mut self, similarity: f64, weights: FusionWeights) -> Result<Self, ScoreError> {
        let value = fuse_scores(self.utterance.value, Some(similarity), weights)?;
        self.overall = OverallScore {
            value,
            stars: align::stars(value)?,
            acoustic_similarity: Some(similarity),
        };
        Ok(self)
    }
}

/// Assembles the feedback payload from already-computed pieces, checking
/// that they describe the same attempt.
pub fn build_feedback(
    item: &PracticeItem,
    hyp: &Hypothesis,
    alignment: &PhraseAlignment,
    chars: &[CharacterScore],
    utt: &UtteranceScore,
) -> Result<AttemptFeedback, FeedbackError> {
    let reference = item.reference()?;
    if reference.letters() != alignment.reference {
        return Err(inconsistent("alignment reference differs from the item text"));
    }
    if hyp.graphemes.letters() != alignment.hypothesis {
        return Err(inconsistent("alignment hypothesis differs from the recognizer output"));
    }
    let expected = score_characters(&alignment.ops, alignment.reference.len())?;
    if expected != chars {
        return Err(inconsistent("character scores do not follow from the alignment"));
    }
    let insertion_count = alignment.insertion_count();
    if utt.insertion_count != insertion_count {
        return Err(inconsistent(format!(
            "utterance has {} insertions, alignment has {insertion_count}",
            utt.insertion_count
        )));
    }
    let recomputed = utterance_score(chars, insertion_count);
    if (recomputed.value - utt.value).abs() > 1e-12 || recomputed.stars != utt.stars {
        return Err(inconsistent("utterance score does not follow from the characters"));
    }
    let (start, end) = item
        .highlight_span()
        .ok_or_else(|| inconsistent("example sentence does not contain the practiced word"))?;

    let characters = chars
        .iter()
        .zip(&alignment.reference)
        .map(|(c, g)| CharacterFeedback {
            score: *c,
            display: g.to_text(),
        })
        .collect();
    let insertions = insertion_anchors(&alignment.ops)
        .into_iter()
        .map(|(after_ref_index, h)| Insertion {
            after_ref_index,
            display: alignment.hypothesis[h].to_text(),
        })
        .collect();
    let indices_with = |pred: fn(CharLabel) -> bool| {
        chars
            .iter()
            .filter(|c| pred(c.label))
            .map(|c| c.ref_index)
            .collect::<Vec<_>>()
    };

    Ok(AttemptFeedback {
        item_id: item.id.clone(),
        utterance: *utt,
        overall: OverallScore {
            value: utt.value,
            stars: utt.stars,
            acoustic_similarity: None,
        },
        words: word_scores(alignment, chars),
        characters,
        hypothesis_text: hyp.graphemes.to_text(),
        hypothesis_transliteration: transliterate(&hyp.graphemes),
        insertions,
        omitted: indices_with(|l| l == CharLabel::Deleted),
        mispronounced: indices_with(|l| matches!(l, CharLabel::DiacriticError | CharLabel::Substituted)),
        audio: AudioCue {
            normal_ref: item.audio_normal_ref.clone(),
            slow_ref: item.audio_slow_ref.clone(),
            client_rate: item.audio_slow_ref.is_none().then_some(CLIENT_SLOW_RATE),
        },
        assistant: AssistantCue {
            example_sentence_ar: item.example_sentence_ar.clone(),
            highlight_span: [start, end],
            example_sentence_en: item.example_sentence_en.clone(),
            example_audio_ref: item.example_audio_ref.clone(),
            graphophonic_note: item.graphophonic_note.clone(),
        },
    })
}

/// Per-word scores: insertions count against the word whose hypothesis
/// counterpart they fall in. Surplus hypothesis words only affect the
/// utterance score.
fn word_scores(alignment: &PhraseAlignment, chars: &[CharacterScore]) -> Vec<WordScore> {
    alignment
        .ref_words
        .iter()
        .enumerate()
        .map(|(k, span)| {
            let inserted = alignment.hyp_words.get(k).map_or(0, |h| {
                alignment
                    .ops
                    .iter()
                    .filter(|op| op.kind == OpKind::Ins)
                    .filter_map(|op| op.hyp_index)
                    .filter(|&i| i >= h.start && i < h.end)
                    .count()
            });
            let u = utterance_score(&chars[span.start..span.end], inserted);
            WordScore {
                start: span.start,
                end: span.end,
                value: u.value,
                stars: u.stars,
            }
        })
        .collect()
}

/// Full textual pipeline: align, grade and assemble.
pub fn score_hypothesis(item: &PracticeItem, hyp: &Hypothesis) -> Result<AttemptFeedback, FeedbackError> {
    let reference: GraphemeString = item.reference()?;
    let alignment = align::align_words(&reference, &hyp.graphemes);
    let chars = score_characters(&alignment.ops, alignment.reference.len())?;
    let utt = utterance_score(&chars, alignment.insertion_count());
    build_feedback(item, hyp, &alignment, &chars, &utt)
}

/// Character indices per band, handy for rendering summaries.
pub fn band_counts(fb: &AttemptFeedback) -> [usize; 5] {
    let mut out = [0; 5];
    for c in &fb.characters {
        let i = match c.score.band {
            Band::Red => 0,
            Band::Orange => 1,
            Band::Yellow => 2,
            Band::LightGreen => 3,
            Band::Green => 4,
        };
        out[i] += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::align::{align_words, AlignmentOp};
    use crate::arabic::parse;
    use crate::content::tests::item;

    fn salam() -> PracticeItem {
        let mut it = item("w1", "سلام", "سَلَام");
        it.validate().unwrap();
        it
    }

    #[test]
    fn perfect_attempt() {
        let fb = score_hypothesis(&salam(), &Hypothesis::parse("سَلَام").unwrap()).unwrap();
        assert_eq!(fb.utterance.stars, 5);
        assert_eq!(fb.utterance.value, 1.0);
        assert_eq!(band_counts(&fb), [0, 0, 0, 0, 4]);
        assert!(fb.omitted.is_empty() && fb.mispronounced.is_empty() && fb.insertions.is_empty());
        assert_eq!(fb.hypothesis_transliteration, "salaAm");
        assert_eq!(fb.characters[0].display, "سَ");
        assert_eq!(fb.audio.client_rate, Some(0.6));
        let [s, e] = fb.assistant.highlight_span;
        assert_eq!(&fb.assistant.example_sentence_ar[s..e], "سلام");
    }

    #[test]
    fn deleted_final_letter() {
        let fb = score_hypothesis(&salam(), &Hypothesis::parse("سَلَا").unwrap()).unwrap();
        assert_eq!(fb.omitted, vec![3]);
        assert_eq!(fb.utterance.value, 0.75);
        assert_eq!(fb.utterance.stars, 4);
    }

    #[test]
    fn insertion_and_substitution() {
        let fb = score_hypothesis(&salam(), &Hypothesis::parse("سِلَاتم").unwrap()).unwrap();
        assert_eq!(fb.mispronounced, vec![0]);
        assert_eq!(fb.insertions, vec![Insertion { after_ref_index: Some(2), display: "ت".into() }]);
        assert_eq!(fb.utterance.insertion_count, 1);
        assert_eq!(fb.utterance.value, 3.5 / 5.0);
    }

    #[test]
    fn slow_asset_present() {
        let mut it = salam();
        it.audio_slow_ref = Some("slow.wav".into());
        let fb = score_hypothesis(&it, &Hypothesis::parse("سَلَام").unwrap()).unwrap();
        assert_eq!(fb.audio.slow_ref.as_deref(), Some("slow.wav"));
        assert_eq!(fb.audio.client_rate, None);
    }

    #[test]
    fn inconsistent_inputs_rejected() {
        let it = salam();
        let hyp = Hypothesis::parse("سَلَام").unwrap();
        let other = Hypothesis::parse("بَيْت").unwrap();
        let reference = it.reference().unwrap();
        let a = align_words(&reference, &hyp.graphemes);
        let chars = score_characters(&a.ops, 4).unwrap();
        let utt = utterance_score(&chars, 0);
        assert!(build_feedback(&it, &hyp, &a, &chars, &utt).is_ok());
        assert!(matches!(build_feedback(&it, &other, &a, &chars, &utt), Err(FeedbackError::Inconsistent(_))));
        let bad_utt = utterance_score(&chars, 1);
        assert!(build_feedback(&it, &hyp, &a, &chars, &bad_utt).is_err());
        let mut bad_chars = chars.clone();
        bad_chars[0] = CharacterScore::new(0, CharLabel::Deleted);
        assert!(build_feedback(&it, &hyp, &a, &bad_chars, &utt).is_err());
        let mut bad_align = a.clone();
        bad_align.ops[3] = AlignmentOp::del(3);
        assert!(build_feedback(&it, &hyp, &bad_align, &chars, &utt).is_err());
    }

    #[test]
    fn word_scores_for_phrase() {
        let mut it = item("p1", "صباح الخير", "صَبَاحُ الْخَيْرِ");
        it.validate().unwrap();
        let hyp = Hypothesis::parse("صَبَاحُ الْخَيْرِ").unwrap();
        let fb = score_hypothesis(&it, &hyp).unwrap();
        assert_eq!(fb.words.len(), 2);
        assert_eq!((fb.words[0].start, fb.words[0].end, fb.words[1].end), (0, 4, 9));

        let fb = score_hypothesis(&it, &Hypothesis::parse("صَبَاحُ").unwrap()).unwrap();
        assert_eq!(fb.words[0].value, 1.0);
        assert_eq!(fb.words[1].value, 0.0);
        assert_eq!(fb.omitted, (4..9).collect::<Vec<_>>());
    }

    #[test]
    fn acoustic_fusion_sets_overall() {
        let fb = score_hypothesis(&salam(), &Hypothesis::parse("سَلَا").unwrap()).unwrap();
        let fused = fb.clone().with_acoustic(0.5, FusionWeights::default()).unwrap();
        assert!((fused.overall.value - (0.7 * 0.75 + 0.3 * 0.5)).abs() < 1e-12);
        assert_eq!(fused.utterance, fb.utterance);
        assert_eq!(fused.overall.acoustic_similarity, Some(0.5));
    }

    #[test]
    fn json_field_names() {
        let fb = score_hypothesis(&salam(), &parse("سَلَام").map(Hypothesis::new).unwrap()).unwrap();
        let v = serde_json::to_value(&fb).unwrap();
        let c = &v["characters"][0];
        for key in ["ref_index", "label", "score", "band", "display"] {
            assert!(c.get(key).is_some(), "{key}");
        }
        assert_eq!(c["band"], "green");
        assert_eq!(v["assistant"]["highlight_span"].as_array().unwrap().len(), 2);
        let back: AttemptFeedback = serde_json::from_value(v).unwrap();
        assert_eq!(back, fb);
    }
}
