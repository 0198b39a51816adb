//! Weighted edit alignment between a reference and a hypothesis grapheme
//! sequence, and the scores derived from it.
//!
//! Costs are kept in half-units internally so that tie detection during
//! the backtrace is exact.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arabic::{Grapheme, GraphemeString};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScoreError {
    #[error("alignment does not cover reference indices 0..{ref_len}: {reason}")]
    InconsistentAlignment { ref_len: usize, reason: String },
    #[error("value {0} outside [0, 1]")]
    OutOfRange(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OpKind {
    Match,
    SubDiacritic,
    SubFull,
    Del,
    Ins,
}

impl OpKind {
    /// Cost in half-units: match 0, diacritic substitution 0.5, everything
    /// else 1.0.
    fn half_cost(self) -> u32 {
        match self {
            OpKind::Match => 0,
            OpKind::SubDiacritic => 1,
            OpKind::SubFull | OpKind::Del | OpKind::Ins => 2,
        }
    }

    pub fn cost(self) -> f64 {
        f64::from(self.half_cost()) / 2.0
    }

    /// Kind of the diagonal step pairing `r` with `h`.
    pub fn pairing(r: &Grapheme, h: &Grapheme) -> OpKind {
        if r == h {
            OpKind::Match
        } else if r.same_base(h) {
            OpKind::SubDiacritic
        } else {
            OpKind::SubFull
        }
    }

    pub fn is_error(self) -> bool {
        self != OpKind::Match
    }
}

/// One alignment step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AlignmentOp {
    pub kind: OpKind,
    pub ref_index: Option<usize>,
    pub hyp_index: Option<usize>,
}

impl AlignmentOp {
    pub fn pair(kind: OpKind, r: usize, h: usize) -> Self {
        AlignmentOp {
            kind,
            ref_index: Some(r),
            hyp_index: Some(h),
        }
    }

    pub fn del(r: usize) -> Self {
        AlignmentOp {
            kind: OpKind::Del,
            ref_index: Some(r),
            hyp_index: None,
        }
    }

    pub fn ins(h: usize) -> Self {
        AlignmentOp {
            kind: OpKind::Ins,
            ref_index: None,
            hyp_index: Some(h),
        }
    }

    fn offset(self, r: usize, h: usize) -> Self {
        AlignmentOp {
            kind: self.kind,
            ref_index: self.ref_index.map(|i| i + r),
            hyp_index: self.hyp_index.map(|i| i + h),
        }
    }
}

/// Total cost of an op sequence.
pub fn ops_cost(ops: &[AlignmentOp]) -> f64 {
    f64::from(ops.iter().map(|op| op.kind.half_cost()).sum::<u32>()) / 2.0
}

#[derive(Debug, Clone, PartialEq)]
pub struct Alignment {
    pub ops: Vec<AlignmentOp>,
    pub cost: f64,
}

impl Alignment {
    pub fn insertion_count(&self) -> usize {
        self.ops.iter().filter(|op| op.kind == OpKind::Ins).count()
    }
}

fn cost_table(reference: &[Grapheme], hypothesis: &[Grapheme]) -> Vec<Vec<u32>> {
    let (n, m) = (reference.len(), hypothesis.len());
    let mut d = vec![vec![0u32; m + 1]; n + 1];
    for i in 1..=n {
        d[i][0] = d[i - 1][0] + OpKind::Del.half_cost();
    }
    for j in 1..=m {
        d[0][j] = d[0][j - 1] + OpKind::Ins.half_cost();
    }
    for i in 1..=n {
        for j in 1..=m {
            let diag = d[i - 1][j - 1]
                + OpKind::pairing(&reference[i - 1], &hypothesis[j - 1]).half_cost();
            let up = d[i - 1][j] + OpKind::Del.half_cost();
            let left = d[i][j - 1] + OpKind::Ins.half_cost();
            d[i][j] = diag.min(up).min(left);
        }
    }
    d
}

/// Minimal-cost alignment of two grapheme sequences.
///
/// Ties in the backtrace (which runs from the sequence ends) are broken
/// by preferring the diagonal step, then deletion, then insertion. Spaces,
/// if present, are treated as ordinary graphemes; use [`align_words`] for
/// phrases.
pub fn align(reference: &[Grapheme], hypothesis: &[Grapheme]) -> Alignment {
    let d = cost_table(reference, hypothesis);
    let (mut i, mut j) = (reference.len(), hypothesis.len());
    let total = d[i][j];
    let mut ops = Vec::with_capacity(i.max(j));
    while i > 0 || j > 0 {
        if i > 0 && j > 0 {
            let kind = OpKind::pairing(&reference[i - 1], &hypothesis[j - 1]);
            if d[i - 1][j - 1] + kind.half_cost() == d[i][j] {
                ops.push(AlignmentOp::pair(kind, i - 1, j - 1));
                i -= 1;
                j -= 1;
                continue;
            }
        }
        if i > 0 && d[i - 1][j] + OpKind::Del.half_cost() == d[i][j] {
            ops.push(AlignmentOp::del(i - 1));
            i -= 1;
        } else {
            ops.push(AlignmentOp::ins(j - 1));
            j -= 1;
        }
    }
    ops.reverse();
    Alignment {
        ops,
        cost: f64::from(total) / 2.0,
    }
}

/// Number of distinct minimal-cost alignments, saturating at `u64::MAX`.
pub fn count_optimal_alignments(reference: &[Grapheme], hypothesis: &[Grapheme]) -> u64 {
    let d = cost_table(reference, hypothesis);
    let (n, m) = (reference.len(), hypothesis.len());
    let mut count = vec![vec![0u64; m + 1]; n + 1];
    count[0][0] = 1;
    for i in 0..=n {
        for j in 0..=m {
            if i == 0 && j == 0 {
                continue;
            }
            let mut c = 0u64;
            if i > 0 && j > 0 {
                let kind = OpKind::pairing(&reference[i - 1], &hypothesis[j - 1]);
                if d[i - 1][j - 1] + kind.half_cost() == d[i][j] {
                    c = c.saturating_add(count[i - 1][j - 1]);
                }
            }
            if i > 0 && d[i - 1][j] + OpKind::Del.half_cost() == d[i][j] {
                c = c.saturating_add(count[i - 1][j]);
            }
            if j > 0 && d[i][j - 1] + OpKind::Ins.half_cost() == d[i][j] {
                c = c.saturating_add(count[i][j - 1]);
            }
            count[i][j] = c;
        }
    }
    count[n][m]
}

/// Index range `[start, end)` of one reference word within the scored
/// (space-free) character sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordSpan {
    pub start: usize,
    pub end: usize,
}

/// Word-by-word alignment of two phrases.
#[derive(Debug, Clone, PartialEq)]
pub struct PhraseAlignment {
    /// Ops over the space-free sequences; indices are global.
    pub ops: Vec<AlignmentOp>,
    pub cost: f64,
    /// Space-free reference graphemes.
    pub reference: Vec<Grapheme>,
    /// Space-free hypothesis graphemes.
    pub hypothesis: Vec<Grapheme>,
    pub ref_words: Vec<WordSpan>,
    pub hyp_words: Vec<WordSpan>,
}

impl PhraseAlignment {
    pub fn insertion_count(&self) -> usize {
        self.ops.iter().filter(|op| op.kind == OpKind::Ins).count()
    }

    /// Number of ambiguous word pairings, i.e. pairs with more than one
    /// minimal-cost explanation.
    pub fn ambiguous_words(&self) -> usize {
        self.ref_words
            .iter()
            .zip(&self.hyp_words)
            .filter(|(r, h)| {
                count_optimal_alignments(
                    &self.reference[r.start..r.end],
                    &self.hypothesis[h.start..h.end],
                ) > 1
            })
            .count()
    }
}

fn spans(words: &[&[Grapheme]]) -> Vec<WordSpan> {
    let mut start = 0;
    words
        .iter()
        .map(|w| {
            let span = WordSpan {
                start,
                end: start + w.len(),
            };
            start = span.end;
            span
        })
        .collect()
}

/// Splits both phrases on spaces, pairs words by position and aligns each
/// pair. Surplus reference words become deletion runs and surplus
/// hypothesis words insertion runs.
pub fn align_words(reference: &GraphemeString, hypothesis: &GraphemeString) -> PhraseAlignment {
    let ref_words = reference.words();
    let hyp_words = hypothesis.words();
    let ref_spans = spans(&ref_words);
    let hyp_spans = spans(&hyp_words);
    let mut ops = Vec::new();
    for k in 0..ref_words.len().max(hyp_words.len()) {
        match (ref_spans.get(k), hyp_spans.get(k)) {
            (Some(r), Some(h)) => {
                let a = align(ref_words[k], hyp_words[k]);
                ops.extend(a.ops.into_iter().map(|op| op.offset(r.start, h.start)));
            }
            (Some(r), None) => ops.extend((r.start..r.end).map(AlignmentOp::del)),
            (None, Some(h)) => ops.extend((h.start..h.end).map(AlignmentOp::ins)),
            (None, None) => unreachable!(),
        }
    }
    let cost = ops_cost(&ops);
    PhraseAlignment {
        ops,
        cost,
        reference: reference.letters(),
        hypothesis: hypothesis.letters(),
        ref_words: ref_spans,
        hyp_words: hyp_spans,
    }
}

/// Reference index after which each insertion sits (`None` = before the
/// first reference character), in op order.
pub fn insertion_anchors(ops: &[AlignmentOp]) -> Vec<(Option<usize>, usize)> {
    let mut last_ref = None;
    let mut out = Vec::new();
    for op in ops {
        if let Some(r) = op.ref_index {
            last_ref = Some(r);
        }
        if op.kind == OpKind::Ins {
            out.push((last_ref, op.hyp_index.expect("insertion carries hyp index")));
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CharLabel {
    Correct,
    DiacriticError,
    Substituted,
    Deleted,
}

impl CharLabel {
    pub fn score(self) -> f64 {
        match self {
            CharLabel::Correct => 1.0,
            CharLabel::DiacriticError => 0.5,
            CharLabel::Substituted | CharLabel::Deleted => 0.0,
        }
    }

    fn from_op(kind: OpKind) -> Option<CharLabel> {
        match kind {
            OpKind::Match => Some(CharLabel::Correct),
            OpKind::SubDiacritic => Some(CharLabel::DiacriticError),
            OpKind::SubFull => Some(CharLabel::Substituted),
            OpKind::Del => Some(CharLabel::Deleted),
            OpKind::Ins => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Band {
    Red,
    Orange,
    Yellow,
    LightGreen,
    Green,
}

// Products like 5 × 0.7 can land a hair under the exact boundary.
const BOUNDARY_EPS: f64 = 1e-9;

fn check_unit(value: f64) -> Result<f64, ScoreError> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(ScoreError::OutOfRange(value))
    }
}

/// Five 0.2-wide bands, left-inclusive, with 1.0 in the top band.
pub fn color_band(score: f64) -> Result<Band, ScoreError> {
    let score = check_unit(score)?;
    let bands = [Band::Red, Band::Orange, Band::Yellow, Band::LightGreen, Band::Green];
    let idx = ((score * 5.0 + BOUNDARY_EPS).floor() as usize).min(4);
    Ok(bands[idx])
}

/// Star rating: `floor(5 · value + 0.5)`, i.e. round half up.
pub fn stars(value: f64) -> Result<u8, ScoreError> {
    let value = check_unit(value)?;
    Ok(((value * 5.0 + 0.5 + BOUNDARY_EPS).floor() as u8).min(5))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CharacterScore {
    pub ref_index: usize,
    pub label: CharLabel,
    pub score: f64,
    pub band: Band,
}

impl CharacterScore {
    pub fn new(ref_index: usize, label: CharLabel) -> Self {
        let score = label.score();
        CharacterScore {
            ref_index,
            label,
            score,
            band: color_band(score).expect("label scores are in range"),
        }
    }
}

/// One score per reference index. Insertions carry no reference index and
/// are not represented.
pub fn score_characters(
    ops: &[AlignmentOp],
    ref_len: usize,
) -> Result<Vec<CharacterScore>, ScoreError> {
    let inconsistent = |reason: String| ScoreError::InconsistentAlignment { ref_len, reason };
    let mut labels: Vec<Option<CharLabel>> = vec![None; ref_len];
    for op in ops {
        let Some(label) = CharLabel::from_op(op.kind) else {
            continue;
        };
        let r = op
            .ref_index
            .ok_or_else(|| inconsistent(format!("{:?} op without reference index", op.kind)))?;
        let slot = labels
            .get_mut(r)
            .ok_or_else(|| inconsistent(format!("reference index {r} out of range")))?;
        if slot.replace(label).is_some() {
            return Err(inconsistent(format!("reference index {r} covered twice")));
        }
    }
    labels
        .into_iter()
        .enumerate()
        .map(|(i, label)| {
            label
                .map(|l| CharacterScore::new(i, l))
                .ok_or_else(|| inconsistent(format!("reference index {i} not covered")))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UtteranceScore {
    pub value: f64,
    pub stars: u8,
    pub insertion_count: usize,
}

/// Mean character score with insertions added to the denominator. An
/// empty reference with no insertions counts as perfect.
pub fn utterance_score(chars: &[CharacterScore], insertion_count: usize) -> UtteranceScore {
    let denom = chars.len() + insertion_count;
    let value = if denom == 0 {
        1.0
    } else {
        chars.iter().map(|c| c.score).sum::<f64>() / denom as f64
    };
    UtteranceScore {
        value,
        stars: stars(value).expect("mean of unit scores"),
        insertion_count,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arabic::segment_graphemes;

    fn gs(s: &str) -> Vec<Grapheme> {
        segment_graphemes(s).unwrap().into_vec()
    }

    #[test]
    fn identical_sequences_all_match() {
        let salam = gs("سَلَام");
        let a = align(&salam, &salam);
        assert_eq!(a.cost, 0.0);
        assert_eq!(a.ops.len(), 4);
        assert!(a.ops.iter().all(|op| op.kind == OpKind::Match));
    }

    #[test]
    fn diacritic_substitution() {
        let a = align(&gs("بَيْت"), &gs("بِيْت"));
        assert_eq!(
            a.ops,
            vec![
                AlignmentOp::pair(OpKind::SubDiacritic, 0, 0),
                AlignmentOp::pair(OpKind::Match, 1, 1),
                AlignmentOp::pair(OpKind::Match, 2, 2),
            ]
        );
        assert_eq!(a.cost, 0.5);
    }

    #[test]
    fn dropped_final_letter() {
        let a = align(&gs("سَلَام"), &gs("سَلَا"));
        assert_eq!(a.cost, 1.0);
        assert_eq!(a.ops[3], AlignmentOp::del(3));
        assert_eq!(a.ops.iter().filter(|o| o.kind == OpKind::Match).count(), 3);
    }

    #[test]
    fn empty_inputs() {
        assert!(align(&[], &[]).ops.is_empty());
        let b = gs("بَ");
        assert_eq!(align(&b, &[]).ops, vec![AlignmentOp::del(0)]);
        assert_eq!(align(&[], &b).ops, vec![AlignmentOp::ins(0)]);
    }

    #[test]
    fn tie_prefers_diagonal_then_deletion() {
        // ref "ab" hyp "ba": cost 2 either as two substitutions or del+ins.
        let a = align(&gs("بت"), &gs("تب"));
        assert_eq!(a.cost, 2.0);
        assert!(a.ops.iter().all(|o| o.kind == OpKind::SubFull));
        // ref "b", hyp "t": substitution beats del+ins (cost 1 vs 2)
        let b = align(&gs("ب"), &gs("ت"));
        assert_eq!(b.ops, vec![AlignmentOp::pair(OpKind::SubFull, 0, 0)]);
    }

    #[test]
    fn repeated_insertion_is_ambiguous() {
        let r = gs("بت");
        let h = gs("ببت");
        assert_eq!(count_optimal_alignments(&r, &h), 2);
        assert_eq!(count_optimal_alignments(&r, &r), 1);
    }

    #[test]
    fn word_by_word_alignment() {
        let r = segment_graphemes("بَيْت سَلَام").unwrap();
        let h = segment_graphemes("بَيْت").unwrap();
        let a = align_words(&r, &h);
        assert_eq!(a.ref_words, vec![WordSpan { start: 0, end: 3 }, WordSpan { start: 3, end: 7 }]);
        assert_eq!(a.ops.len(), 7);
        assert!(a.ops[3..].iter().all(|o| o.kind == OpKind::Del));
        assert_eq!(a.cost, 4.0);

        let extra = align_words(&h, &r);
        assert_eq!(extra.insertion_count(), 4);
        assert_eq!(extra.ops[3..].iter().map(|o| o.hyp_index).collect::<Vec<_>>(), vec![Some(3), Some(4), Some(5), Some(6)]);
    }

    #[test]
    fn anchors_for_insertions() {
        let ops = vec![
            AlignmentOp::ins(0),
            AlignmentOp::pair(OpKind::Match, 0, 1),
            AlignmentOp::ins(2),
            AlignmentOp::del(1),
            AlignmentOp::ins(3),
        ];
        assert_eq!(insertion_anchors(&ops), vec![(None, 0), (Some(0), 2), (Some(1), 3)]);
    }

    #[test]
    fn score_characters_examples() {
        let ops: Vec<_> = (0..4).map(|i| AlignmentOp::pair(OpKind::Match, i, i)).collect();
        let chars = score_characters(&ops, 4).unwrap();
        assert!(chars.iter().all(|c| c.label == CharLabel::Correct && c.score == 1.0 && c.band == Band::Green));

        let ops = vec![
            AlignmentOp::pair(OpKind::SubDiacritic, 0, 0),
            AlignmentOp::pair(OpKind::Match, 1, 1),
            AlignmentOp::del(2),
        ];
        let chars = score_characters(&ops, 3).unwrap();
        let summary: Vec<_> = chars.iter().map(|c| (c.label, c.score, c.band)).collect();
        assert_eq!(
            summary,
            vec![
                (CharLabel::DiacriticError, 0.5, Band::Yellow),
                (CharLabel::Correct, 1.0, Band::Green),
                (CharLabel::Deleted, 0.0, Band::Red),
            ]
        );
    }

    #[test]
    fn score_characters_rejects_gaps_and_overlaps() {
        let gap = vec![AlignmentOp::pair(OpKind::Match, 0, 0), AlignmentOp::pair(OpKind::Match, 2, 1)];
        assert!(matches!(score_characters(&gap, 3), Err(ScoreError::InconsistentAlignment { .. })));
        let dup = vec![AlignmentOp::del(0), AlignmentOp::del(0)];
        assert!(score_characters(&dup, 1).is_err());
        let out = vec![AlignmentOp::del(5)];
        assert!(score_characters(&out, 1).is_err());
    }

    #[test]
    fn utterance_examples() {
        let full: Vec<_> = (0..4).map(|i| CharacterScore::new(i, CharLabel::Correct)).collect();
        let u = utterance_score(&full, 0);
        assert_eq!((u.value, u.stars), (1.0, 5));

        let mixed = vec![
            CharacterScore::new(0, CharLabel::Correct),
            CharacterScore::new(1, CharLabel::DiacriticError),
            CharacterScore::new(2, CharLabel::Correct),
            CharacterScore::new(3, CharLabel::Deleted),
        ];
        let u = utterance_score(&mixed, 1);
        assert_eq!((u.value, u.stars, u.insertion_count), (0.5, 3, 1));

        let u = utterance_score(&[], 0);
        assert_eq!((u.value, u.stars), (1.0, 5));
        assert_eq!(utterance_score(&[], 2).value, 0.0);
    }

    #[test]
    fn star_examples() {
        assert_eq!(stars(1.0), Ok(5));
        assert_eq!(stars(0.0), Ok(0));
        assert_eq!(stars(0.5), Ok(3));
        assert_eq!(stars(0.89), Ok(4));
        assert_eq!(stars(0.7), Ok(4));
        assert_eq!(stars(7.0 / 10.0), Ok(4));
        assert!(matches!(stars(1.01), Err(ScoreError::OutOfRange(_))));
        assert!(stars(-0.1).is_err());
        assert!(stars(f64::NAN).is_err());
    }

    #[test]
    fn band_examples() {
        assert_eq!(color_band(0.0), Ok(Band::Red));
        assert_eq!(color_band(1.0), Ok(Band::Green));
        assert_eq!(color_band(0.5), Ok(Band::Yellow));
        assert_eq!(color_band(0.2), Ok(Band::Orange));
        assert_eq!(color_band(0.199), Ok(Band::Red));
        assert_eq!(color_band(0.6), Ok(Band::LightGreen));
        assert_eq!(color_band(0.8), Ok(Band::Green));
        assert!(color_band(1.5).is_err());
    }
}
