//! Batch and evaluation tooling behind the `validate`, `generate`,
//! `evaluate` and `score` subcommands.

mod batch;
mod detect;
mod generate;

use thiserror::Error;

pub use batch::{score_attempts, validate_corpus, AttemptLine, ErrorLine, ValidationReport};
pub use detect::{
    evaluate, inject_single, kind_name, render_table, single_error_recovery, DetectionReport, InjectionSpec,
    RecoveryCase, RecoveryReport, TypeMetrics, WorstCase,
};
pub use generate::{
    example_ref, generate_corpus, image_ref, random_phrase, slow_tone_ref, synthetic_item, synthetic_items,
    tone_ref, write_asset_pool, IMAGE_POOL, TONE_POOL,
};

use crate::acoustic::RecognizeError;
use crate::arabic::TextError;
use crate::feedback::FeedbackError;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Recognize(#[from] RecognizeError),
    #[error(transparent)]
    Text(#[from] TextError),
    #[error(transparent)]
    Feedback(#[from] FeedbackError),
}
