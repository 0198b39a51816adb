#![allow(dead_code)]

use std::path::PathBuf;

use proncoach::arabic::{self, Diacritics, Grapheme, GraphemeString};
use proncoach::content::{load_corpus, Corpus};
use proptest::prelude::*;

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

pub fn bundled_corpus() -> Corpus {
    let dir = data_dir();
    load_corpus(&dir.join("corpus.json"), &dir.join("assets")).expect("bundled corpus loads")
}

pub fn any_diacritics() -> impl Strategy<Value = Diacritics> {
    (0..16usize).prop_map(|i| Diacritics::all()[i])
}

pub fn any_letter() -> impl Strategy<Value = char> {
    let letters: Vec<char> = arabic::letters().collect();
    (0..letters.len()).prop_map(move |i| letters[i])
}

pub fn any_grapheme() -> impl Strategy<Value = Grapheme> {
    (any_letter(), any_diacritics()).prop_map(|(b, d)| Grapheme::new(b, d).unwrap())
}

/// Valid grapheme strings: words of letters separated by single spaces.
pub fn any_grapheme_string() -> impl Strategy<Value = GraphemeString> {
    prop::collection::vec(prop::collection::vec(any_grapheme(), 1..6), 0..4).prop_map(|words| {
        let mut out = Vec::new();
        for (i, w) in words.into_iter().enumerate() {
            if i > 0 {
                out.push(Grapheme::space());
            }
            out.extend(w);
        }
        GraphemeString::new(out)
    })
}

pub mod audio {
    use proncoach::acoustic::{mfcc, tone, AudioClip, FeatureMatrix, NUM_COEFFS, SAMPLE_RATE};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub fn random_matrix(rng: &mut ChaCha8Rng) -> FeatureMatrix {
        let n = rng.random_range(1..40);
        let frames = (0..n)
            .map(|_| {
                let mut f = [0.0; NUM_COEFFS];
                for x in &mut f {
                    *x = rng.random_range(-20.0..20.0);
                }
                f
            })
            .collect();
        FeatureMatrix { frames }
    }

    /// (tone vs 50 ms-shifted tone, tone vs white noise) similarities.
    pub fn shifted_and_noise_similarity() -> (f64, f64) {
        let base = tone(440.0, 1.0, 0.5);
        let shift = SAMPLE_RATE as usize / 20;
        let mut shifted = vec![0.0f32; shift];
        shifted.extend_from_slice(&base[..base.len() - shift]);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let noise: Vec<f32> = (0..base.len()).map(|_| rng.random_range(-0.5..0.5)).collect();
        let a = mfcc(&AudioClip::new(base)).unwrap();
        let b = mfcc(&AudioClip::new(shifted)).unwrap();
        let n = mfcc(&AudioClip::new(noise)).unwrap();
        (
            proncoach::acoustic::dtw_similarity(&a, &b).unwrap(),
            proncoach::acoustic::dtw_similarity(&a, &n).unwrap(),
        )
    }
}

pub mod http {
    use std::sync::Arc;

    use axum::body::{to_bytes, Body};
    use axum::http::{Request, Response, StatusCode};
    use axum::Router;
    use proncoach::acoustic::{ErrorRates, FusionWeights, MockRecognizer};
    use proncoach::content::Corpus;
    use proncoach::service::{router, AppState, RecognizerKind, ScoringSettings};
    use tower::ServiceExt;

    pub const BOUNDARY: &str = "proncoach-test-boundary";

    pub fn scoring(recognizer: RecognizerKind) -> ScoringSettings {
        let rates = ErrorRates { p_sub_full: 0.05, p_sub_diac: 0.1, p_del: 0.05, p_ins: 0.03 };
        ScoringSettings {
            recognizer,
            mock: MockRecognizer::new(rates, 3).unwrap(),
            fusion: FusionWeights::default(),
        }
    }

    pub fn app_with(corpus: Corpus, seed: u64) -> (Arc<AppState>, Router) {
        let state = Arc::new(AppState::with_corpus(corpus, scoring(RecognizerKind::Mock), Some(seed)));
        let app = router(state.clone(), &["http://localhost:5173".to_owned()]);
        (state, app)
    }

    pub fn app(seed: u64) -> Router {
        app_with(super::bundled_corpus(), seed).1
    }

    /// multipart/form-data body with optional audio and text parts.
    pub fn multipart(audio: Option<&[u8]>, text: Option<&str>) -> Vec<u8> {
        let mut body = Vec::new();
        if let Some(a) = audio {
            body.extend_from_slice(
                format!(
                    "--{BOUNDARY}\r\nContent-Disposition: form-data; name=\"audio\"; filename=\"a.wav\"\r\n\
                     Content-Type: audio/wav\r\n\r\n"
                )
                .as_bytes(),
            );
            body.extend_from_slice(a);
            body.extend_from_slice(b"\r\n");
        }
        if let Some(t) = text {
            body.extend_from_slice(
                format!(
                    "--{BOUNDARY}\r\nContent-Disposition: form-data; name=\"hypothesis_text\"\r\n\
                     Content-Type: text/plain; charset=utf-8\r\n\r\n{t}\r\n"
                )
                .as_bytes(),
            );
        }
        body.extend_from_slice(format!("--{BOUNDARY}--\r\n").as_bytes());
        body
    }

    pub fn attempt_request(id: &str, body: Vec<u8>) -> Request<Body> {
        Request::post(format!("/api/v1/items/{id}/attempts"))
            .header("content-type", format!("multipart/form-data; boundary={BOUNDARY}"))
            .body(Body::from(body))
            .unwrap()
    }

    pub fn get(uri: &str) -> Request<Body> {
        Request::get(uri).body(Body::empty()).unwrap()
    }

    pub async fn send(app: &Router, req: Request<Body>) -> (StatusCode, Response<()>, Vec<u8>) {
        let resp = app.clone().oneshot(req).await.unwrap();
        let (parts, body) = resp.into_parts();
        let bytes = to_bytes(body, usize::MAX).await.unwrap().to_vec();
        (parts.status, Response::from_parts(parts, ()), bytes)
    }

    pub async fn send_json(app: &Router, req: Request<Body>) -> (StatusCode, serde_json::Value) {
        let (status, _, body) = send(app, req).await;
        (status, serde_json::from_slice(&body).unwrap_or(serde_json::Value::Null))
    }
}

pub mod oracle {
    use proncoach::arabic::{Diacritics, Grapheme, Vowel};

    /// Eight graphemes over three bases so that all pairing kinds occur often.
    pub fn alphabet() -> Vec<Grapheme> {
        let v = |vowel| Diacritics { shadda: false, vowel: Some(vowel) };
        vec![
            Grapheme::new('ب', v(Vowel::Fatha)).unwrap(),
            Grapheme::new('ب', v(Vowel::Kasra)).unwrap(),
            Grapheme::new('ب', Diacritics::NONE).unwrap(),
            Grapheme::new('ت', v(Vowel::Fatha)).unwrap(),
            Grapheme::new('ت', v(Vowel::Sukun)).unwrap(),
            Grapheme::new('س', v(Vowel::Fatha)).unwrap(),
            Grapheme::new('س', Diacritics { shadda: true, vowel: Some(Vowel::Damma) }).unwrap(),
            Grapheme::new('م', Diacritics::NONE).unwrap(),
        ]
    }

    fn step_cost(r: &Grapheme, h: &Grapheme) -> u32 {
        if r == h {
            0
        } else if r.base() == h.base() {
            1
        } else {
            2
        }
    }

    /// Enumerates every alignment path explicitly, returning (min cost, number
    /// of paths achieving it) in half-units.
    pub fn brute_force(a: &[Grapheme], b: &[Grapheme]) -> (u32, u64) {
        fn go(a: &[Grapheme], b: &[Grapheme], acc: u32, best: &mut (u32, u64)) {
            if a.is_empty() && b.is_empty() {
                if acc < best.0 {
                    *best = (acc, 1);
                } else if acc == best.0 {
                    best.1 += 1;
                }
                return;
            }
            if !a.is_empty() && !b.is_empty() {
                go(&a[1..], &b[1..], acc + step_cost(&a[0], &b[0]), best);
            }
            if !a.is_empty() {
                go(&a[1..], b, acc + 2, best);
            }
            if !b.is_empty() {
                go(a, &b[1..], acc + 2, best);
            }
        }
        let mut best = (u32::MAX, 0);
        go(a, b, 0, &mut best);
        best
    }
}
