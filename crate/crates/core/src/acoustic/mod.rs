//! Audio side of the pipeline: WAV I/O, MFCC features, DTW similarity
//! against reference audio, recognizers and score fusion.

mod dtw;
mod mfcc;
mod recognize;
mod wav;

use serde::{Deserialize, Serialize};

pub use dtw::{dtw, dtw_similarity, DtwAlignment};
pub use mfcc::{frame_count, mfcc, FeatureError, FeatureMatrix, Mfcc, HOP_MS, NUM_COEFFS, NUM_FILTERS, WINDOW_MS};
pub use recognize::{
    corrupt, mock_recognize, other_diacritics, other_letter, random_grapheme, random_letter, Attempt, Corruption,
    ErrorRates, Hypothesis, InjectedError, MockRecognizer, RecognizeError, Recognizer, SidecarRecognizer,
    CONFIDENCE_CLEAN, CONFIDENCE_CORRUPTED,
};
pub use wav::{decode_wav, encode_wav, tone, AudioClip, WavError, MAX_SECONDS, SAMPLE_RATE};

use crate::align::ScoreError;

/// Weights for combining textual and acoustic utterance scores.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FusionWeights {
    pub textual: f64,
    pub acoustic: f64,
}

impl Default for FusionWeights {
    fn default() -> Self {
        FusionWeights {
            textual: 0.7,
            acoustic: 0.3,
        }
    }
}

impl FusionWeights {
    pub fn validate(&self) -> Result<(), ScoreError> {
        for w in [self.textual, self.acoustic] {
            if !(0.0..=1.0).contains(&w) {
                return Err(ScoreError::OutOfRange(w));
            }
        }
        let sum = self.textual + self.acoustic;
        if (sum - 1.0).abs() > 1e-9 {
            return Err(ScoreError::OutOfRange(sum));
        }
        Ok(())
    }
}

/// Weighted mean of the textual score and, when present, the acoustic
/// similarity.
pub fn fuse_scores(textual: f64, acoustic: Option<f64>, weights: FusionWeights) -> Result<f64, ScoreError> {
    if !(0.0..=1.0).contains(&textual) {
        return Err(ScoreError::OutOfRange(textual));
    }
    match acoustic {
        None => Ok(textual),
        Some(a) if a > 0.0 && a <= 1.0 => {
            Ok((weights.textual * textual + weights.acoustic * a).clamp(0.0, 1.0))
        }
        Some(a) => Err(ScoreError::OutOfRange(a)),
    }
}
