//! Corpus validation and offline batch scoring.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::acoustic::Hypothesis;
use crate::content::{load_corpus_report, Corpus, CorpusError};
use crate::feedback::score_hypothesis;

/// Result of validating a corpus file.
#[derive(Debug)]
pub struct ValidationReport {
    pub items: usize,
    pub errors: Vec<CorpusError>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.errors.is_empty()
    }

    pub fn render(&self) -> String {
        if self.is_valid() {
            return format!("ok: {} items\n", self.items);
        }
        let mut out = String::new();
        for e in &self.errors {
            out.push_str(&format!("error: {e}\n"));
        }
        out.push_str(&format!("{} problem(s) found\n", self.errors.len()));
        out
    }
}

pub fn validate_corpus(corpus: &Path, assets: &Path) -> ValidationReport {
    match load_corpus_report(corpus, assets) {
        Ok(c) => ValidationReport {
            items: c.len(),
            errors: vec![],
        },
        Err(errors) => ValidationReport { items: 0, errors },
    }
}

/// One line of a batch-scoring input file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttemptLine {
    pub item_id: String,
    pub hypothesis_text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorLine {
    pub line: usize,
    pub item_id: Option<String>,
    pub error: String,
}

/// Scores a JSONL file of attempts against the corpus. Output has one line
/// per non-blank input line, in order; the count of error lines is
/// returned alongside.
pub fn score_attempts(corpus: &Corpus, input: &str) -> (String, usize) {
    let mut out = String::new();
    let mut errors = 0;
    for (n, line) in input.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let result = serde_json::from_str::<AttemptLine>(line)
            .map_err(|e| (None, format!("invalid attempt line: {e}")))
            .and_then(|a| {
                let item = corpus
                    .get_item(&a.item_id)
                    .map_err(|e| (Some(a.item_id.clone()), e.to_string()))?;
                let hyp = Hypothesis::parse(&a.hypothesis_text)
                    .map_err(|e| (Some(a.item_id.clone()), e.to_string()))?;
                score_hypothesis(item, &hyp).map_err(|e| (Some(a.item_id.clone()), e.to_string()))
            });
        let json = match result {
            Ok(fb) => serde_json::to_string(&fb),
            Err((item_id, error)) => {
                errors += 1;
                serde_json::to_string(&ErrorLine {
                    line: n + 1,
                    item_id,
                    error,
                })
            }
        };
        out.push_str(&json.expect("feedback serializes"));
        out.push('\n');
    }
    (out, errors)
}
