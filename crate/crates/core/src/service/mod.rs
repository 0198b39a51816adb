//! HTTP JSON API: random and by-id item fetch, asset download and attempt
//! scoring.
//!
//! Shared state is the immutable corpus (set once loading finishes), the
//! item-selection PRNG and the optional attempt log, the latter two behind
//! mutexes. Scoring itself is pure per request.

mod config;

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, OnceLock};

use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, Multipart, Path as UrlPath, State};
use axum::http::{header, HeaderValue, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use tower_http::cors::{AllowOrigin, CorsLayer};

pub use config::{ConfigError, RecognizerKind, ServiceConfig, CONFIG_ENV};

use crate::acoustic::{
    decode_wav, dtw_similarity, mfcc, Attempt, AudioClip, FeatureMatrix, FusionWeights, MockRecognizer,
    RecognizeError, Recognizer, SidecarRecognizer,
};
use crate::content::{load_corpus, safe_relative, Corpus, CorpusError, PracticeItem};
use crate::feedback::{score_hypothesis, AttemptFeedback};

/// Largest request body accepted; comfortably above 30 s of 16 kHz audio.
pub const MAX_BODY_BYTES: usize = 8 * 1024 * 1024;

#[derive(Debug)]
pub enum ApiError {
    NotReady,
    EmptyCorpus,
    NotFound(String),
    PathEscape,
    BadRequest { kind: &'static str, message: String },
    TooLarge(String),
    Internal(String),
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    error: &'a str,
    message: String,
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, kind, message) = match self {
            ApiError::NotReady => (StatusCode::SERVICE_UNAVAILABLE, "not_ready", "corpus is loading".into()),
            ApiError::EmptyCorpus => (StatusCode::SERVICE_UNAVAILABLE, "empty_corpus", "corpus has no items".into()),
            ApiError::NotFound(what) => (StatusCode::NOT_FOUND, "not_found", what),
            ApiError::PathEscape => (
                StatusCode::FORBIDDEN,
                "path_escape",
                "asset reference resolves outside the asset root".into(),
            ),
            ApiError::BadRequest { kind, message } => (StatusCode::BAD_REQUEST, kind, message),
            ApiError::TooLarge(message) => (StatusCode::PAYLOAD_TOO_LARGE, "too_large", message),
            ApiError::Internal(message) => (StatusCode::INTERNAL_SERVER_ERROR, "internal", message),
        };
        (status, Json(ErrorBody { error: kind, message })).into_response()
    }
}

fn bad_request(kind: &'static str, message: impl ToString) -> ApiError {
    ApiError::BadRequest {
        kind,
        message: message.to_string(),
    }
}

/// How attempts are turned into hypotheses and scores.
#[derive(Debug, Clone, Copy)]
pub struct ScoringSettings {
    pub recognizer: RecognizerKind,
    pub mock: MockRecognizer,
    pub fusion: FusionWeights,
}

pub struct AppState {
    corpus: OnceLock<Arc<Corpus>>,
    rng: Mutex<ChaCha8Rng>,
    scoring: ScoringSettings,
    attempt_log: Option<Mutex<File>>,
    reference_features: Mutex<HashMap<String, Option<Arc<FeatureMatrix>>>>,
}

impl AppState {
    pub fn new(scoring: ScoringSettings, seed: Option<u64>, attempt_log: Option<File>) -> Self {
        let rng = match seed {
            Some(s) => ChaCha8Rng::seed_from_u64(s),
            None => ChaCha8Rng::from_os_rng(),
        };
        AppState {
            corpus: OnceLock::new(),
            rng: Mutex::new(rng),
            scoring,
            attempt_log: attempt_log.map(Mutex::new),
            reference_features: Mutex::new(HashMap::new()),
        }
    }

    /// State with an already-loaded corpus.
    pub fn with_corpus(corpus: Corpus, scoring: ScoringSettings, seed: Option<u64>) -> Self {
        let state = AppState::new(scoring, seed, None);
        state.set_corpus(corpus);
        state
    }

    /// Marks the service ready. Later calls are ignored.
    pub fn set_corpus(&self, corpus: Corpus) {
        let _ = self.corpus.set(Arc::new(corpus));
    }

    pub fn is_ready(&self) -> bool {
        self.corpus.get().is_some()
    }

    fn corpus(&self) -> Result<Arc<Corpus>, ApiError> {
        self.corpus.get().cloned().ok_or(ApiError::NotReady)
    }

    fn reference_features(&self, corpus: &Corpus, item: &PracticeItem) -> Option<Arc<FeatureMatrix>> {
        if let Some(hit) = self.reference_features.lock().expect("cache lock").get(&item.audio_normal_ref) {
            return hit.clone();
        }
        let features = corpus
            .resolve_asset(&item.audio_normal_ref)
            .and_then(|p| std::fs::read(p).ok())
            .and_then(|bytes| decode_wav(&bytes).ok())
            .and_then(|clip| mfcc(&clip).ok())
            .map(Arc::new);
        if features.is_none() {
            tracing::warn!(asset = %item.audio_normal_ref, "reference audio unusable; skipping acoustic score");
        }
        self.reference_features
            .lock()
            .expect("cache lock")
            .insert(item.audio_normal_ref.clone(), features.clone());
        features
    }

    fn log_attempt(&self, attempt: &Attempt, fb: &AttemptFeedback) {
        let Some(log) = &self.attempt_log else {
            return;
        };
        let ts = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let line = serde_json::json!({
            "ts": ts,
            "item_id": fb.item_id,
            "hypothesis_text": attempt.hypothesis_text,
            "audio_seconds": attempt.audio.as_ref().map(AudioClip::duration_secs),
            "utterance": fb.utterance,
            "overall": fb.overall,
        });
        let mut file = log.lock().expect("log lock");
        if let Err(e) = writeln!(file, "{line}") {
            tracing::warn!(error = %e, "failed to append attempt log");
        }
    }

    /// Runs the full scoring pipeline for one attempt.
    pub fn score_attempt(&self, item_id: &str, attempt: &Attempt) -> Result<AttemptFeedback, ApiError> {
        let corpus = self.corpus()?;
        let item = corpus
            .get_item(item_id)
            .map_err(|e| ApiError::NotFound(e.to_string()))?;
        if let Some(audio) = &attempt.audio {
            if audio.exceeds_limit() {
                return Err(ApiError::TooLarge(format!(
                    "audio is {:.1} s, limit is {} s",
                    audio.duration_secs(),
                    crate::acoustic::MAX_SECONDS
                )));
            }
        }
        let hypothesis = if attempt.hypothesis_text.is_some() {
            SidecarRecognizer.recognize(attempt, item)
        } else {
            match self.scoring.recognizer {
                RecognizerKind::Mock => self.scoring.mock.recognize(attempt, item),
                RecognizerKind::Sidecar => Err(RecognizeError::MissingHypothesis),
            }
        }
        .map_err(|e| match e {
            RecognizeError::Text(t) => bad_request("malformed_text", t),
            RecognizeError::MissingAudio | RecognizeError::MissingHypothesis => {
                bad_request("missing_input", format!("{e}: send an audio part or hypothesis_text"))
            }
            RecognizeError::InvalidRates(m) => ApiError::Internal(m),
        })?;
        let mut fb = score_hypothesis(item, &hypothesis).map_err(|e| ApiError::Internal(e.to_string()))?;

        if let Some(audio) = &attempt.audio {
            let features = mfcc(audio).map_err(|e| bad_request("unsupported_format", e))?;
            if let Some(reference) = self.reference_features(&corpus, item) {
                let similarity =
                    dtw_similarity(&features, &reference).map_err(|e| ApiError::Internal(e.to_string()))?;
                fb = fb
                    .with_acoustic(similarity, self.scoring.fusion)
                    .map_err(|e| ApiError::Internal(e.to_string()))?;
            }
        }
        self.log_attempt(attempt, &fb);
        Ok(fb)
    }
}

async fn healthz(State(state): State<Arc<AppState>>) -> (StatusCode, &'static str) {
    if state.is_ready() {
        (StatusCode::OK, "ok")
    } else {
        (StatusCode::SERVICE_UNAVAILABLE, "loading")
    }
}

async fn random_item(State(state): State<Arc<AppState>>) -> Result<Json<PracticeItem>, ApiError> {
    let corpus = state.corpus()?;
    let mut rng = state.rng.lock().expect("rng lock");
    match corpus.random_item(&mut *rng) {
        Ok(item) => Ok(Json(item.clone())),
        Err(CorpusError::EmptyCorpus) => Err(ApiError::EmptyCorpus),
        Err(e) => Err(ApiError::Internal(e.to_string())),
    }
}

async fn get_item(
    State(state): State<Arc<AppState>>,
    UrlPath(id): UrlPath<String>,
) -> Result<Json<PracticeItem>, ApiError> {
    let corpus = state.corpus()?;
    corpus
        .get_item(&id)
        .map(|item| Json(item.clone()))
        .map_err(|e| ApiError::NotFound(e.to_string()))
}

pub fn content_type(path: &Path) -> &'static str {
    match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
        Some("wav") => "audio/wav",
        Some("png") => "image/png",
        Some("jpg" | "jpeg") => "image/jpeg",
        Some("gif") => "image/gif",
        Some("webp") => "image/webp",
        Some("svg") => "image/svg+xml",
        Some("json") => "application/json",
        _ => "application/octet-stream",
    }
}

/// Resolves an asset reference, refusing anything outside `root`.
pub fn resolve_within(root: &Path, reference: &str) -> Result<PathBuf, ApiError> {
    let rel = safe_relative(reference).ok_or(ApiError::PathEscape)?;
    let root = root
        .canonicalize()
        .map_err(|e| ApiError::Internal(format!("asset root: {e}")))?;
    let full = root
        .join(rel)
        .canonicalize()
        .map_err(|_| ApiError::NotFound(format!("asset {reference:?}")))?;
    if !full.starts_with(&root) {
        return Err(ApiError::PathEscape);
    }
    if !full.is_file() {
        return Err(ApiError::NotFound(format!("asset {reference:?}")));
    }
    Ok(full)
}

async fn get_asset(
    State(state): State<Arc<AppState>>,
    UrlPath(reference): UrlPath<String>,
) -> Result<Response, ApiError> {
    let corpus = state.corpus()?;
    let path = resolve_within(corpus.asset_root(), &reference)?;
    let bytes = tokio::fs::read(&path)
        .await
        .map_err(|_| ApiError::NotFound(format!("asset {reference:?}")))?;
    Ok(([(header::CONTENT_TYPE, content_type(&path))], bytes).into_response())
}

async fn read_attempt(mut multipart: Multipart) -> Result<Attempt, ApiError> {
    let mut audio: Option<Bytes> = None;
    let mut hypothesis_text = None;
    let field_error = |e: axum::extract::multipart::MultipartError| {
        if e.status() == StatusCode::PAYLOAD_TOO_LARGE {
            ApiError::TooLarge(e.body_text())
        } else {
            bad_request("bad_multipart", e.body_text())
        }
    };
    while let Some(field) = multipart.next_field().await.map_err(field_error)? {
        match field.name() {
            Some("audio") => audio = Some(field.bytes().await.map_err(field_error)?),
            Some("hypothesis_text") => hypothesis_text = Some(field.text().await.map_err(field_error)?),
            _ => {}
        }
    }
    let audio = audio
        .map(|bytes| decode_wav(&bytes))
        .transpose()
        .map_err(|e| bad_request("unsupported_format", e))?;
    Ok(Attempt { audio, hypothesis_text })
}

async fn post_attempt(
    State(state): State<Arc<AppState>>,
    UrlPath(id): UrlPath<String>,
    multipart: Multipart,
) -> Result<Json<AttemptFeedback>, ApiError> {
    let corpus = state.corpus()?;
    corpus
        .get_item(&id)
        .map_err(|e| ApiError::NotFound(e.to_string()))?;
    let attempt = read_attempt(multipart).await?;
    let fb = tokio::task::spawn_blocking(move || state.score_attempt(&id, &attempt))
        .await
        .map_err(|e| ApiError::Internal(e.to_string()))??;
    Ok(Json(fb))
}

/// Builds the router. An empty origin list disables CORS headers.
pub fn router(state: Arc<AppState>, cors_origins: &[String]) -> Router {
    let app = Router::new()
        .route("/healthz", get(healthz))
        .route("/api/v1/items/random", get(random_item))
        .route("/api/v1/items/{id}", get(get_item))
        .route("/api/v1/items/{id}/attempts", post(post_attempt))
        .route("/api/v1/assets/{*reference}", get(get_asset))
        .layer(DefaultBodyLimit::max(MAX_BODY_BYTES))
        .with_state(state);
    let origins: Vec<HeaderValue> = cors_origins
        .iter()
        .filter_map(|o| HeaderValue::from_str(o).ok())
        .collect();
    if origins.is_empty() {
        return app;
    }
    app.layer(
        CorsLayer::new()
            .allow_origin(AllowOrigin::list(origins))
            .allow_methods([Method::GET, Method::POST])
            .allow_headers([header::CONTENT_TYPE]),
    )
}

/// Shared state and router for a config, without loading the corpus.
pub fn build(config: &ServiceConfig) -> anyhow::Result<(Arc<AppState>, Router)> {
    let scoring = ScoringSettings {
        recognizer: config.recognizer,
        mock: MockRecognizer::new(config.mock_rates, config.seed.unwrap_or(0))?,
        fusion: config.fusion,
    };
    let log = config
        .attempt_log
        .as_ref()
        .map(|p| OpenOptions::new().create(true).append(true).open(p))
        .transpose()?;
    let state = Arc::new(AppState::new(scoring, config.seed, log));
    let app = router(state.clone(), &config.cors_origins);
    Ok((state, app))
}

/// Binds, starts answering (503 until the corpus is loaded) and serves
/// until Ctrl-C.
pub async fn run(config: ServiceConfig) -> anyhow::Result<()> {
    config.validate()?;
    let (state, app) = build(&config)?;
    let listener = tokio::net::TcpListener::bind((config.listen.as_str(), config.port)).await?;
    tracing::info!(addr = %listener.local_addr()?, "listening");

    let (corpus_path, assets) = (config.corpus.clone(), config.assets.clone());
    let loader = tokio::task::spawn_blocking(move || load_corpus(&corpus_path, &assets));
    let loading_state = state.clone();
    tokio::spawn(async move {
        match loader.await {
            Ok(Ok(corpus)) => {
                tracing::info!(items = corpus.len(), "corpus loaded");
                loading_state.set_corpus(corpus);
            }
            Ok(Err(e)) => {
                tracing::error!(error = %e, "corpus failed to load");
                std::process::exit(1);
            }
            Err(e) => tracing::error!(error = %e, "corpus loader panicked"),
        }
    });

    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
