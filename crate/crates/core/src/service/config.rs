use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::acoustic::{ErrorRates, FusionWeights};

/// Environment variable naming a config file; wins over `--config`.
pub const CONFIG_ENV: &str = "PRONCOACH_CONFIG";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {}: {source}", .path.display())]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum RecognizerKind {
    /// Seeded corruption of the reference text; needs an audio upload.
    #[default]
    Mock,
    /// Uses the `hypothesis_text` form field supplied by the client.
    Sidecar,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServiceConfig {
    pub listen: String,
    pub port: u16,
    pub corpus: PathBuf,
    pub assets: PathBuf,
    pub recognizer: RecognizerKind,
    pub mock_rates: ErrorRates,
    pub fusion: FusionWeights,
    /// Seeds both random item selection and the mock recognizer.
    pub seed: Option<u64>,
    /// Append-only JSONL log of scored attempts.
    pub attempt_log: Option<PathBuf>,
    pub cors_origins: Vec<String>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            listen: "127.0.0.1".into(),
            port: 8080,
            corpus: PathBuf::from("data/corpus.json"),
            assets: PathBuf::from("data/assets"),
            recognizer: RecognizerKind::Mock,
            mock_rates: ErrorRates {
                p_sub_full: 0.05,
                p_sub_diac: 0.1,
                p_del: 0.05,
                p_ins: 0.03,
            },
            fusion: FusionWeights::default(),
            seed: None,
            attempt_log: None,
            cors_origins: Vec::new(),
        }
    }
}

impl ServiceConfig {
    pub fn from_toml_str(s: &str) -> Result<Self, ConfigError> {
        toml::from_str(s).map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_owned(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    /// Range checks plus existence of the corpus and asset paths.
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.mock_rates
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        self.fusion
            .validate()
            .map_err(|e| ConfigError::Invalid(format!("fusion weights: {e}")))?;
        if !self.corpus.is_file() {
            return Err(ConfigError::Invalid(format!(
                "corpus file {} does not exist",
                self.corpus.display()
            )));
        }
        if !self.assets.is_dir() {
            return Err(ConfigError::Invalid(format!(
                "asset directory {} does not exist",
                self.assets.display()
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_partial_toml_with_defaults() {
        let c = ServiceConfig::from_toml_str(
            r#"
            port = 9000
            recognizer = "sidecar"
            seed = 42
            cors_origins = ["http://localhost:5173"]
            [mock_rates]
            p_del = 0.2
            "#,
        )
        .unwrap();
        assert_eq!(c.port, 9000);
        assert_eq!(c.recognizer, RecognizerKind::Sidecar);
        assert_eq!(c.seed, Some(42));
        assert_eq!(c.mock_rates.p_del, 0.2);
        assert_eq!(c.mock_rates.p_ins, 0.0);
        assert_eq!(c.fusion, FusionWeights::default());
        assert_eq!(c.listen, "127.0.0.1");
    }

    #[test]
    fn rejects_unknown_keys_and_bad_ranges() {
        assert!(ServiceConfig::from_toml_str("colour = 1").is_err());
        let dir = tempfile::tempdir().unwrap();
        let corpus = dir.path().join("c.json");
        std::fs::write(&corpus, "[]").unwrap();
        let mut c = ServiceConfig {
            corpus,
            assets: dir.path().to_owned(),
            ..Default::default()
        };
        assert!(c.validate().is_ok());
        c.mock_rates.p_sub_full = 2.0;
        assert!(c.validate().is_err());
        c.mock_rates.p_sub_full = 0.0;
        c.fusion.textual = 0.9;
        assert!(c.validate().is_err());
        c.fusion.textual = 0.7;
        c.assets = dir.path().join("missing");
        assert!(c.validate().is_err());
    }
}
