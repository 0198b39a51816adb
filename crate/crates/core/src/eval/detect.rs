//! Error-injection benchmark: corrupt references with known errors, score
//! the corrupted hypotheses and measure how well the alignment recovers the
//! injected errors.

use std::collections::{BTreeMap, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::acoustic::{corrupt, other_diacritics, random_grapheme, ErrorRates, InjectedError};
use crate::align::{align_words, insertion_anchors, AlignmentOp, CharLabel, OpKind, PhraseAlignment};
use crate::arabic::{Grapheme, GraphemeString};
use crate::content::Corpus;
use crate::feedback::score_hypothesis;

use super::EvalError;

const ERROR_KINDS: [OpKind; 4] = [OpKind::SubFull, OpKind::SubDiacritic, OpKind::Del, OpKind::Ins];

pub fn kind_name(kind: OpKind) -> &'static str {
    match kind {
        OpKind::Match => "match",
        OpKind::SubDiacritic => "sub_diac",
        OpKind::SubFull => "sub_full",
        OpKind::Del => "del",
        OpKind::Ins => "ins",
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InjectionSpec {
    pub rates: ErrorRates,
    pub trials: usize,
    pub seed: u64,
}

/// An error located on the reference. Insertions are keyed by the
/// reference index they follow (`None` = before the first character).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Located {
    kind: OpKind,
    at: Option<usize>,
}

fn predicted_errors(ops: &[AlignmentOp]) -> Vec<Located> {
    let mut out: Vec<Located> = ops
        .iter()
        .filter(|op| op.kind.is_error() && op.kind != OpKind::Ins)
        .map(|op| Located {
            kind: op.kind,
            at: op.ref_index,
        })
        .collect();
    out.extend(insertion_anchors(ops).into_iter().map(|(at, _)| Located {
        kind: OpKind::Ins,
        at,
    }));
    out
}

fn injected_errors(injected: &[InjectedError]) -> Vec<Located> {
    injected
        .iter()
        .map(|e| Located {
            kind: e.kind,
            at: Some(e.ref_index),
        })
        .collect()
}

/// Size of the multiset intersection.
fn overlap(a: &[Located], b: &[Located]) -> usize {
    let mut counts: HashMap<Located, usize> = HashMap::new();
    for x in a {
        *counts.entry(*x).or_default() += 1;
    }
    b.iter()
        .filter(|y| match counts.get_mut(y) {
            Some(c) if *c > 0 => {
                *c -= 1;
                true
            }
            _ => false,
        })
        .count()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct TypeMetrics {
    pub injected: usize,
    pub predicted: usize,
    pub true_positive: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Set when nothing of this type was injected; recall is then reported
    /// as 1.0.
    pub no_injections: bool,
}

impl TypeMetrics {
    fn finish(injected: usize, predicted: usize, true_positive: usize) -> Self {
        let ratio = |num: usize, den: usize| if den == 0 { 1.0 } else { num as f64 / den as f64 };
        let precision = ratio(true_positive, predicted);
        let recall = ratio(true_positive, injected);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        TypeMetrics {
            injected,
            predicted,
            true_positive,
            precision,
            recall,
            f1,
            no_injections: injected == 0,
        }
    }

    pub fn false_negative(&self) -> usize {
        self.injected - self.true_positive
    }

    pub fn false_positive(&self) -> usize {
        self.predicted - self.true_positive
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorstCase {
    pub item_id: String,
    pub trial: usize,
    pub value: f64,
    pub injected: usize,
    pub hypothesis_transliteration: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionReport {
    pub spec: InjectionSpec,
    pub items: usize,
    pub attempts: usize,
    /// Position-and-type exact matching.
    pub exact: BTreeMap<String, TypeMetrics>,
    /// Type-only matching, per attempt.
    pub type_only: BTreeMap<String, TypeMetrics>,
    /// Injected type → what the scorer reported at that position.
    pub confusion: BTreeMap<String, BTreeMap<String, usize>>,
    pub star_histogram: [usize; 6],
    pub mean_utterance: f64,
    pub worst: Vec<WorstCase>,
}

struct AttemptOutcome {
    item: usize,
    trial: usize,
    injected: Vec<Located>,
    predicted: Vec<Located>,
    labels_at_injection: Vec<(OpKind, String)>,
    value: f64,
    stars: u8,
    transliteration: String,
}

fn label_name(label: CharLabel) -> &'static str {
    match label {
        CharLabel::Correct => "correct",
        CharLabel::DiacriticError => "diacritic_error",
        CharLabel::Substituted => "substituted",
        CharLabel::Deleted => "deleted",
    }
}

/// Runs the benchmark. Each (item, trial) pair draws from its own ChaCha
/// stream, so results do not depend on evaluation order.
pub fn evaluate(corpus: &Corpus, spec: &InjectionSpec) -> Result<DetectionReport, EvalError> {
    spec.rates.validate()?;
    let trials = spec.trials.max(1);
    let jobs: Vec<(usize, usize)> = (0..corpus.len())
        .flat_map(|i| (0..trials).map(move |t| (i, t)))
        .collect();
    let outcomes = jobs
        .par_iter()
        .map(|&(i, t)| {
            let item = &corpus.items()[i];
            let reference = item.reference()?;
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            rng.set_stream((i * trials + t) as u64);
            let c = corrupt(&reference, &spec.rates, &mut rng)?;
            let fb = score_hypothesis(item, &c.hypothesis)?;
            let alignment = align_words(&reference, &c.hypothesis.graphemes);
            let predicted = predicted_errors(&alignment.ops);
            let injected = injected_errors(&c.injected);
            let labels_at_injection = injected
                .iter()
                .map(|e| {
                    let seen = match (e.kind, e.at) {
                        (OpKind::Ins, at) => {
                            if predicted.iter().any(|p| p.kind == OpKind::Ins && p.at == at) {
                                "inserted".to_owned()
                            } else {
                                "missed".to_owned()
                            }
                        }
                        (_, Some(r)) => label_name(fb.characters[r].score.label).to_owned(),
                        (_, None) => unreachable!("substitutions and deletions carry an index"),
                    };
                    (e.kind, seen)
                })
                .collect();
            Ok(AttemptOutcome {
                item: i,
                trial: t,
                injected,
                predicted,
                labels_at_injection,
                value: fb.utterance.value,
                stars: fb.utterance.stars,
                transliteration: fb.hypothesis_transliteration,
            })
        })
        .collect::<Result<Vec<_>, EvalError>>()?;

    let mut exact_counts: BTreeMap<&str, (usize, usize, usize)> = BTreeMap::new();
    let mut type_counts: BTreeMap<&str, (usize, usize, usize)> = BTreeMap::new();
    let mut confusion: BTreeMap<String, BTreeMap<String, usize>> = BTreeMap::new();
    let mut star_histogram = [0usize; 6];
    let mut value_sum = 0.0;
    for o in &outcomes {
        for kind in ERROR_KINDS {
            let inj: Vec<Located> = o.injected.iter().copied().filter(|e| e.kind == kind).collect();
            let pred: Vec<Located> = o.predicted.iter().copied().filter(|e| e.kind == kind).collect();
            let e = exact_counts.entry(kind_name(kind)).or_default();
            e.0 += inj.len();
            e.1 += pred.len();
            e.2 += overlap(&inj, &pred);
            let t = type_counts.entry(kind_name(kind)).or_default();
            t.0 += inj.len();
            t.1 += pred.len();
            t.2 += inj.len().min(pred.len());
        }
        for (kind, seen) in &o.labels_at_injection {
            *confusion
                .entry(kind_name(*kind).to_owned())
                .or_default()
                .entry(seen.clone())
                .or_default() += 1;
        }
        star_histogram[usize::from(o.stars)] += 1;
        value_sum += o.value;
    }
    let finish = |m: BTreeMap<&str, (usize, usize, usize)>| {
        m.into_iter()
            .map(|(k, (i, p, tp))| (k.to_owned(), TypeMetrics::finish(i, p, tp)))
            .collect()
    };

    let mut ranked: Vec<&AttemptOutcome> = outcomes.iter().collect();
    ranked.sort_by(|a, b| {
        a.value
            .total_cmp(&b.value)
            .then_with(|| corpus.items()[a.item].id.cmp(&corpus.items()[b.item].id))
            .then(a.trial.cmp(&b.trial))
    });
    let worst = ranked
        .into_iter()
        .filter(|o| !o.injected.is_empty())
        .take(10)
        .map(|o| WorstCase {
            item_id: corpus.items()[o.item].id.clone(),
            trial: o.trial,
            value: o.value,
            injected: o.injected.len(),
            hypothesis_transliteration: o.transliteration.clone(),
        })
        .collect();

    Ok(DetectionReport {
        spec: InjectionSpec { trials, ..*spec },
        items: corpus.len(),
        attempts: outcomes.len(),
        exact: finish(exact_counts),
        type_only: finish(type_counts),
        confusion,
        star_histogram,
        mean_utterance: if outcomes.is_empty() {
            1.0
        } else {
            value_sum / outcomes.len() as f64
        },
        worst,
    })
}

/// Plain-text summary table of a report.
pub fn render_table(report: &DetectionReport) -> String {
    let mut out = format!(
        "{} items x {} trials = {} attempts, mean utterance {:.4}\n",
        report.items, report.spec.trials, report.attempts, report.mean_utterance
    );
    out.push_str(&format!(
        "{:<10}{:>10}{:>10}{:>10}{:>10}{:>10}{:>10}\n",
        "type", "injected", "predicted", "tp", "precision", "recall", "f1"
    ));
    for (name, m) in &report.exact {
        out.push_str(&format!(
            "{:<10}{:>10}{:>10}{:>10}{:>10.4}{:>10.4}{:>10.4}{}\n",
            name,
            m.injected,
            m.predicted,
            m.true_positive,
            m.precision,
            m.recall,
            m.f1,
            if m.no_injections { "  (no injections)" } else { "" }
        ));
    }
    out.push_str(&format!("stars 0..5: {:?}\n", report.star_histogram));
    out
}

/// One single-error injection and whether it was recovered.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecoveryCase {
    pub item_id: String,
    pub kind: String,
    pub ref_index: usize,
    pub distinct_bases: bool,
    /// More than one minimal-cost alignment exists.
    pub ambiguous: bool,
    pub exact: bool,
    pub type_only: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryReport {
    pub cases: usize,
    pub distinct_base_items: usize,
    pub non_ambiguous: usize,
    pub non_ambiguous_exact: usize,
    pub type_only_recovered: usize,
    pub type_only_recall: f64,
    pub ambiguous: Vec<RecoveryCase>,
    /// Non-ambiguous cases that were not recovered exactly.
    pub failures: Vec<RecoveryCase>,
}

impl RecoveryReport {
    pub fn exact_rate_non_ambiguous(&self) -> f64 {
        if self.non_ambiguous == 0 {
            1.0
        } else {
            self.non_ambiguous_exact as f64 / self.non_ambiguous as f64
        }
    }
}

/// Injects exactly one error of `kind` at scored position `pos`.
///
/// Full substitutions pick a base absent from the whole reference.
pub fn inject_single<R: Rng + ?Sized>(
    reference: &GraphemeString,
    kind: OpKind,
    pos: usize,
    rng: &mut R,
) -> GraphemeString {
    let used: Vec<char> = reference.letters().iter().map(Grapheme::base).collect();
    let mut out = Vec::with_capacity(reference.len() + 1);
    let mut scored = 0;
    for g in reference {
        if g.is_space() {
            out.push(*g);
            continue;
        }
        if scored != pos {
            out.push(*g);
        } else {
            match kind {
                OpKind::SubFull => {
                    let fresh: Vec<char> = crate::arabic::letters().filter(|c| !used.contains(c)).collect();
                    let base = fresh[rng.random_range(0..fresh.len())];
                    out.push(Grapheme::new(base, g.diacritics()).expect("valid letter"));
                }
                OpKind::SubDiacritic => {
                    let d = other_diacritics(rng, g.diacritics());
                    out.push(g.with_diacritics(d).expect("valid diacritics"));
                }
                OpKind::Del => {}
                OpKind::Ins => {
                    out.push(*g);
                    out.push(random_grapheme(rng));
                }
                OpKind::Match => out.push(*g),
            }
        }
        scored += 1;
    }
    GraphemeString::new(out)
}

fn has_distinct_bases(reference: &GraphemeString) -> bool {
    let mut bases: Vec<char> = reference.letters().iter().map(Grapheme::base).collect();
    let n = bases.len();
    bases.sort_unstable();
    bases.dedup();
    bases.len() == n
}

fn recovery_case(
    item_id: &str,
    reference: &GraphemeString,
    kind: OpKind,
    pos: usize,
    rng: &mut ChaCha8Rng,
) -> RecoveryCase {
    let hyp = inject_single(reference, kind, pos, rng);
    let alignment: PhraseAlignment = align_words(reference, &hyp);
    let predicted = predicted_errors(&alignment.ops);
    let expected = Located { kind, at: Some(pos) };
    RecoveryCase {
        item_id: item_id.to_owned(),
        kind: kind_name(kind).to_owned(),
        ref_index: pos,
        distinct_bases: has_distinct_bases(reference),
        ambiguous: alignment.ambiguous_words() > 0,
        exact: predicted == [expected],
        type_only: predicted.iter().any(|p| p.kind == kind),
    }
}

/// Injects one substitution, diacritic substitution, deletion and
/// insertion into every corpus item and checks each is recovered.
pub fn single_error_recovery(corpus: &Corpus, seed: u64) -> Result<RecoveryReport, EvalError> {
    let cases = corpus
        .items()
        .par_iter()
        .enumerate()
        .map(|(i, item)| {
            let reference = item.reference()?;
            let n = reference.letters().len();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            Ok(ERROR_KINDS
                .iter()
                .map(|&kind| {
                    let pos = rng.random_range(0..n);
                    recovery_case(&item.id, &reference, kind, pos, &mut rng)
                })
                .collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>, EvalError>>()?
        .into_iter()
        .flatten()
        .collect::<Vec<_>>();

    let distinct_base_items = corpus
        .items()
        .iter()
        .filter(|it| it.reference().map(|r| has_distinct_bases(&r)).unwrap_or(false))
        .count();
    let non_ambiguous = cases.iter().filter(|c| !c.ambiguous).count();
    let non_ambiguous_exact = cases.iter().filter(|c| !c.ambiguous && c.exact).count();
    let type_only_recovered = cases.iter().filter(|c| c.type_only).count();
    Ok(RecoveryReport {
        cases: cases.len(),
        distinct_base_items,
        non_ambiguous,
        non_ambiguous_exact,
        type_only_recovered,
        type_only_recall: if cases.is_empty() {
            1.0
        } else {
            type_only_recovered as f64 / cases.len() as f64
        },
        ambiguous: cases.iter().filter(|c| c.ambiguous).cloned().collect(),
        failures: cases.into_iter().filter(|c| !c.ambiguous && !c.exact).collect(),
    })
}
