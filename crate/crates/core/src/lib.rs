//! Character-level pronunciation scoring for vowelized Arabic practice
//! items.
//!
//! The pipeline: a [`content::Corpus`] serves [`content::PracticeItem`]s;
//! a [`acoustic::Recognizer`] turns an attempt into a grapheme
//! [`acoustic::Hypothesis`]; [`align`] aligns it against the reference and
//! grades every character; [`feedback`] assembles the payload the practice
//! UI renders. [`service`] exposes all of this over HTTP and [`eval`]
//! holds the batch and benchmark tooling.

pub mod acoustic;
pub mod align;
pub mod arabic;
pub mod content;
pub mod eval;
pub mod feedback;
pub mod service;

pub use acoustic::{Hypothesis, Recognizer};
pub use align::{align, align_words, AlignmentOp, CharacterScore, OpKind, UtteranceScore};
pub use arabic::{Grapheme, GraphemeString};
pub use content::{Corpus, PracticeItem};
pub use feedback::{score_hypothesis, AttemptFeedback};
