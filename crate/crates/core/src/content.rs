//! Practice-item corpus: loading, validation and selection.

use std::collections::{BTreeMap, HashSet};
use std::path::{Component, Path, PathBuf};

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arabic::{self, GraphemeString};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read corpus {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("corpus parse error: {0}")]
    Parse(String),
    #[error("item {id}: {reason}")]
    Validation { id: String, reason: String },
    #[error("missing asset {}", .path.display())]
    MissingAsset { path: PathBuf },
    #[error("item {0:?} not found")]
    NotFound(String),
    #[error("corpus is empty")]
    EmptyCorpus,
}

fn invalid(id: &str, reason: impl Into<String>) -> CorpusError {
    CorpusError::Validation {
        id: id.to_owned(),
        reason: reason.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PracticeItem {
    pub id: String,
    pub surface_text: String,
    pub vowelized_text: String,
    /// Regenerated from `vowelized_text` on load when empty.
    #[serde(default)]
    pub transliteration: String,
    pub translation_en: String,
    pub image_ref: String,
    pub audio_normal_ref: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub audio_slow_ref: Option<String>,
    pub example_sentence_ar: String,
    pub example_sentence_en: String,
    pub example_audio_ref: String,
    pub graphophonic_note: String,
}

impl PracticeItem {
    /// Graphemes of the vowelized reference text.
    pub fn reference(&self) -> Result<GraphemeString, arabic::TextError> {
        arabic::parse(&self.vowelized_text)
    }

    /// Asset references with the field they come from.
    pub fn asset_refs(&self) -> Vec<(&'static str, &str)> {
        let mut refs = vec![
            ("image_ref", self.image_ref.as_str()),
            ("audio_normal_ref", self.audio_normal_ref.as_str()),
            ("example_audio_ref", self.example_audio_ref.as_str()),
        ];
        if let Some(slow) = &self.audio_slow_ref {
            refs.push(("audio_slow_ref", slow.as_str()));
        }
        refs
    }

    /// Byte range of the first occurrence of `surface_text` in the
    /// example sentence.
    pub fn highlight_span(&self) -> Option<(usize, usize)> {
        if self.surface_text.is_empty() {
            return None;
        }
        self.example_sentence_ar
            .find(&self.surface_text)
            .map(|start| (start, start + self.surface_text.len()))
    }

    /// Checks every content invariant except asset existence, filling in a
    /// missing transliteration.
    pub fn validate(&mut self) -> Result<(), CorpusError> {
        let id = self.id.clone();
        if id.is_empty() {
            return Err(invalid(&id, "empty id"));
        }
        let vowelized = self
            .reference()
            .map_err(|e| invalid(&id, format!("vowelized_text: {e}")))?;
        if vowelized.letters().is_empty() {
            return Err(invalid(&id, "vowelized_text has no letters"));
        }
        let surface = arabic::parse(&self.surface_text)
            .map_err(|e| invalid(&id, format!("surface_text: {e}")))?;
        if arabic::strip_diacritics(&vowelized).bases() != surface.bases() {
            return Err(invalid(
                &id,
                "vowelized_text base letters differ from surface_text",
            ));
        }
        let expected = arabic::transliterate(&vowelized);
        if self.transliteration.is_empty() {
            self.transliteration = expected;
        } else if self.transliteration != expected {
            return Err(invalid(
                &id,
                format!(
                    "transliteration {:?} does not match {:?}",
                    self.transliteration, expected
                ),
            ));
        }
        if self.highlight_span().is_none() {
            return Err(invalid(
                &id,
                "example_sentence_ar does not contain surface_text",
            ));
        }
        for (field, r) in self.asset_refs() {
            if safe_relative(r).is_none() {
                return Err(invalid(&id, format!("{field} {r:?} is not a relative path")));
            }
        }
        Ok(())
    }
}

/// Returns the path if it is relative and never climbs above its root.
pub fn safe_relative(r: &str) -> Option<&Path> {
    let p = Path::new(r);
    let ok = !r.is_empty()
        && p.components()
            .all(|c| matches!(c, Component::Normal(_) | Component::CurDir));
    ok.then_some(p)
}

/// Immutable, validated set of practice items ordered by id.
#[derive(Debug, Clone)]
pub struct Corpus {
    items: Vec<PracticeItem>,
    index: BTreeMap<String, usize>,
    asset_root: PathBuf,
}

impl Corpus {
    /// Builds a corpus from already-validated items.
    fn from_items(mut items: Vec<PracticeItem>, asset_root: PathBuf) -> Self {
        items.sort_by(|a, b| a.id.cmp(&b.id));
        let index = items
            .iter()
            .enumerate()
            .map(|(i, item)| (item.id.clone(), i))
            .collect();
        Corpus {
            items,
            index,
            asset_root,
        }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn items(&self) -> &[PracticeItem] {
        &self.items
    }

    pub fn asset_root(&self) -> &Path {
        &self.asset_root
    }

    pub fn get_item(&self, id: &str) -> Result<&PracticeItem, CorpusError> {
        self.index
            .get(id)
            .map(|&i| &self.items[i])
            .ok_or_else(|| CorpusError::NotFound(id.to_owned()))
    }

    /// Uniform draw over items in id order.
    pub fn random_item<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<&PracticeItem, CorpusError> {
        if self.items.is_empty() {
            return Err(CorpusError::EmptyCorpus);
        }
        Ok(&self.items[rng.random_range(0..self.items.len())])
    }

    pub fn resolve_asset(&self, r: &str) -> Option<PathBuf> {
        safe_relative(r).map(|p| self.asset_root.join(p))
    }
}

pub fn parse_items(json: &str) -> Result<Vec<PracticeItem>, CorpusError> {
    serde_json::from_str(json).map_err(|e| CorpusError::Parse(e.to_string()))
}

/// Validates items and assets, collecting every problem found.
pub fn check_items(
    items: Vec<PracticeItem>,
    asset_root: &Path,
) -> (Vec<PracticeItem>, Vec<CorpusError>) {
    let mut errors = Vec::new();
    let mut seen = HashSet::new();
    let mut valid = Vec::with_capacity(items.len());
    for mut item in items {
        if !seen.insert(item.id.clone()) {
            errors.push(invalid(&item.id, "duplicate id"));
            continue;
        }
        if let Err(e) = item.validate() {
            errors.push(e);
            continue;
        }
        let missing: Vec<_> = item
            .asset_refs()
            .into_iter()
            .map(|(_, r)| asset_root.join(r))
            .filter(|p| std::fs::File::open(p).is_err() || !p.is_file())
            .collect();
        if missing.is_empty() {
            valid.push(item);
        } else {
            errors.extend(missing.into_iter().map(|path| CorpusError::MissingAsset { path }));
        }
    }
    (valid, errors)
}

/// Loads and validates a corpus file, returning every problem found.
pub fn load_corpus_report(path: &Path, asset_root: &Path) -> Result<Corpus, Vec<CorpusError>> {
    let text = std::fs::read_to_string(path).map_err(|source| {
        vec![CorpusError::Io {
            path: path.to_owned(),
            source,
        }]
    })?;
    let items = parse_items(&text).map_err(|e| vec![e])?;
    let (valid, errors) = check_items(items, asset_root);
    if errors.is_empty() {
        Ok(Corpus::from_items(valid, asset_root.to_owned()))
    } else {
        Err(errors)
    }
}

/// Loads and validates a corpus file, failing on the first problem.
pub fn load_corpus(path: &Path, asset_root: &Path) -> Result<Corpus, CorpusError> {
    load_corpus_report(path, asset_root).map_err(|mut errors| errors.swap_remove(0))
}

impl Corpus {
    /// In-memory corpus, validated the same way as a file.
    pub fn from_validated(
        items: Vec<PracticeItem>,
        asset_root: &Path,
    ) -> Result<Corpus, Vec<CorpusError>> {
        let (valid, errors) = check_items(items, asset_root);
        if errors.is_empty() {
            Ok(Corpus::from_items(valid, asset_root.to_owned()))
        } else {
            Err(errors)
        }
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn item(id: &str, surface: &str, vowelized: &str) -> PracticeItem {
        PracticeItem {
            id: id.into(),
            surface_text: surface.into(),
            vowelized_text: vowelized.into(),
            transliteration: String::new(),
            translation_en: "t".into(),
            image_ref: "img.svg".into(),
            audio_normal_ref: "a.wav".into(),
            audio_slow_ref: None,
            example_sentence_ar: format!("هذا {surface} هنا"),
            example_sentence_en: "e".into(),
            example_audio_ref: "a.wav".into(),
            graphophonic_note: "n".into(),
        }
    }

    pub(crate) fn asset_dir() -> tempfile::TempDir {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("img.svg"), "<svg/>").unwrap();
        std::fs::write(dir.path().join("a.wav"), b"RIFF").unwrap();
        dir
    }

    #[test]
    fn validate_fills_transliteration() {
        let mut it = item("w1", "سلام", "سَلَام");
        it.validate().unwrap();
        assert_eq!(it.transliteration, "salaAm");
    }

    #[test]
    fn base_mismatch_is_rejected() {
        let mut it = item("w1", "سلم", "سَلَام");
        let err = it.validate().unwrap_err();
        assert!(matches!(err, CorpusError::Validation { ref id, .. } if id == "w1"), "{err}");
    }

    #[test]
    fn wrong_transliteration_is_rejected() {
        let mut it = item("w1", "سلام", "سَلَام");
        it.transliteration = "salam".into();
        assert!(it.validate().is_err());
    }

    #[test]
    fn example_must_contain_surface() {
        let mut it = item("w1", "سلام", "سَلَام");
        it.example_sentence_ar = "مرحبا".into();
        assert!(it.validate().is_err());
    }

    #[test]
    fn absolute_and_escaping_refs_rejected() {
        assert!(safe_relative("../secret").is_none());
        assert!(safe_relative("/etc/passwd").is_none());
        assert!(safe_relative("a/../../b").is_none());
        assert!(safe_relative("").is_none());
        assert!(safe_relative("audio/x.wav").is_some());
        let mut it = item("w1", "سلام", "سَلَام");
        it.image_ref = "../x.svg".into();
        assert!(it.validate().is_err());
    }

    #[test]
    fn duplicate_ids_reported() {
        let dir = asset_dir();
        let items = vec![item("w001", "سلام", "سَلَام"), item("w001", "بيت", "بَيْت")];
        let errs = Corpus::from_validated(items, dir.path()).unwrap_err();
        assert_eq!(errs.len(), 1);
        assert!(errs[0].to_string().contains("w001: duplicate id"));
    }

    #[test]
    fn missing_asset_reported() {
        let dir = asset_dir();
        let mut it = item("w1", "سلام", "سَلَام");
        it.audio_slow_ref = Some("slow.wav".into());
        let errs = Corpus::from_validated(vec![it], dir.path()).unwrap_err();
        assert!(matches!(&errs[0], CorpusError::MissingAsset { path } if path.ends_with("slow.wav")));
    }

    #[test]
    fn load_from_file_and_lookup() {
        let dir = asset_dir();
        let items = vec![
            item("w003", "سلام", "سَلَام"),
            item("w001", "بيت", "بَيْت"),
            item("w002", "باب", "بَاب"),
        ];
        let path = dir.path().join("corpus.json");
        std::fs::write(&path, serde_json::to_string(&items).unwrap()).unwrap();
        let corpus = load_corpus(&path, dir.path()).unwrap();
        assert_eq!(corpus.len(), 3);
        assert_eq!(corpus.items()[0].id, "w001");
        assert_eq!(corpus.get_item("w002").unwrap().transliteration, "baAb");
        assert!(matches!(corpus.get_item("nope"), Err(CorpusError::NotFound(_))));
        assert!(corpus.get_item("").is_err());
    }

    #[test]
    fn unknown_fields_and_bad_json_rejected() {
        let dir = asset_dir();
        let path = dir.path().join("c.json");
        let mut v = serde_json::to_value(vec![item("w1", "سلام", "سَلَام")]).unwrap();
        v[0]["extra"] = serde_json::json!(1);
        std::fs::write(&path, v.to_string()).unwrap();
        assert!(matches!(load_corpus(&path, dir.path()), Err(CorpusError::Parse(_))));
        std::fs::write(&path, "{not json").unwrap();
        assert!(matches!(load_corpus(&path, dir.path()), Err(CorpusError::Parse(_))));
        assert!(matches!(
            load_corpus(&dir.path().join("absent.json"), dir.path()),
            Err(CorpusError::Io { .. })
        ));
    }

    #[test]
    fn random_item_cases() {
        let dir = asset_dir();
        let empty = Corpus::from_validated(vec![], dir.path()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(matches!(empty.random_item(&mut rng), Err(CorpusError::EmptyCorpus)));

        let one = Corpus::from_validated(vec![item("only", "سلام", "سَلَام")], dir.path()).unwrap();
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            assert_eq!(one.random_item(&mut rng).unwrap().id, "only");
        }
    }

    #[test]
    fn random_item_counts_within_binomial_bound() {
        let dir = asset_dir();
        let items = ["سلام", "بيت", "باب", "قلم"]
            .iter()
            .zip(["سَلَام", "بَيْت", "بَاب", "قَلَم"])
            .enumerate()
            .map(|(i, (s, v))| item(&format!("w{i}"), s, v))
            .collect();
        let corpus = Corpus::from_validated(items, dir.path()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let mut counts = BTreeMap::new();
        for _ in 0..10_000 {
            *counts.entry(corpus.random_item(&mut rng).unwrap().id.clone()).or_insert(0) += 1;
        }
        assert_eq!(counts.len(), 4);
        for (id, n) in counts {
            assert!((2300..=2700).contains(&n), "{id}: {n}");
        }
    }
}
