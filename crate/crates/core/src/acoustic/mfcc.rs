use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use thiserror::Error;

use super::wav::AudioClip;

pub const NUM_COEFFS: usize = 13;
pub const NUM_FILTERS: usize = 26;
pub const WINDOW_MS: usize = 25;
pub const HOP_MS: usize = 10;
const FFT_SIZE: usize = 512;
const PRE_EMPHASIS: f64 = 0.97;
const LOG_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FeatureError {
    #[error("audio too short: {samples} samples, need at least {needed}")]
    TooShort { samples: usize, needed: usize },
    #[error("feature matrix is empty")]
    EmptyFeatures,
}

/// One 13-coefficient vector per 10 ms frame.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub frames: Vec<[f64; NUM_COEFFS]>,
}

impl FeatureMatrix {
    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }
}

/// Closed-form frame count for `num_samples` at `sample_rate`.
pub fn frame_count(num_samples: usize, sample_rate: u32) -> usize {
    let window = window_samples(sample_rate);
    if num_samples < window {
        0
    } else {
        (num_samples - window) / hop_samples(sample_rate) + 1
    }
}

fn window_samples(rate: u32) -> usize {
    rate as usize * WINDOW_MS / 1000
}

fn hop_samples(rate: u32) -> usize {
    rate as usize * HOP_MS / 1000
}

fn hz_to_mel(hz: f64) -> f64 {
    2595.0 * (1.0 + hz / 700.0).log10()
}

fn mel_to_hz(mel: f64) -> f64 {
    700.0 * (10f64.powf(mel / 2595.0) - 1.0)
}

/// MFCC extractor with precomputed window, filter bank and DCT basis.
pub struct Mfcc {
    sample_rate: u32,
    window: Vec<f64>,
    filters: Vec<Vec<f64>>,
    dct: Vec<Vec<f64>>,
    fft: Arc<dyn Fft<f64>>,
}

impl Mfcc {
    pub fn new(sample_rate: u32) -> Self {
        let wlen = window_samples(sample_rate);
        let window = (0..wlen)
            .map(|n| 0.54 - 0.46 * (std::f64::consts::TAU * n as f64 / (wlen - 1) as f64).cos())
            .collect();

        let bins = FFT_SIZE / 2 + 1;
        let nyquist = f64::from(sample_rate) / 2.0;
        let (lo, hi) = (hz_to_mel(0.0), hz_to_mel(nyquist.min(8000.0)));
        let edges: Vec<f64> = (0..NUM_FILTERS + 2)
            .map(|i| mel_to_hz(lo + (hi - lo) * i as f64 / (NUM_FILTERS + 1) as f64))
            .collect();
        let filters = (0..NUM_FILTERS)
            .map(|m| {
                let (left, center, right) = (edges[m], edges[m + 1], edges[m + 2]);
                (0..bins)
                    .map(|k| {
                        let f = k as f64 * f64::from(sample_rate) / FFT_SIZE as f64;
                        if f <= left || f >= right {
                            0.0
                        } else if f <= center {
                            (f - left) / (center - left)
                        } else {
                            (right - f) / (right - center)
                        }
                    })
                    .collect()
            })
            .collect();

        let n = NUM_FILTERS as f64;
        let dct = (0..NUM_COEFFS)
            .map(|k| {
                let scale = if k == 0 { (1.0 / n).sqrt() } else { (2.0 / n).sqrt() };
                (0..NUM_FILTERS)
                    .map(|m| {
                        scale
                            * (std::f64::consts::PI * k as f64 * (m as f64 + 0.5) / n).cos()
                    })
                    .collect()
            })
            .collect();

        Mfcc {
            sample_rate,
            window,
            filters,
            dct,
            fft: FftPlanner::new().plan_fft_forward(FFT_SIZE),
        }
    }

    pub fn compute(&self, audio: &AudioClip) -> Result<FeatureMatrix, FeatureError> {
        let wlen = self.window.len();
        let hop = hop_samples(self.sample_rate);
        let samples = &audio.samples;
        if samples.len() < wlen {
            return Err(FeatureError::TooShort {
                samples: samples.len(),
                needed: wlen,
            });
        }
        let emphasized: Vec<f64> = samples
            .iter()
            .enumerate()
            .map(|(i, &s)| {
                let prev = if i == 0 { 0.0 } else { f64::from(samples[i - 1]) };
                f64::from(s) - PRE_EMPHASIS * prev
            })
            .collect();

        let count = frame_count(samples.len(), self.sample_rate);
        let mut buf = vec![Complex::new(0.0, 0.0); FFT_SIZE];
        let mut power = vec![0.0; FFT_SIZE / 2 + 1];
        let mut log_mel = [0.0; NUM_FILTERS];
        let mut frames = Vec::with_capacity(count);
        for f in 0..count {
            let start = f * hop;
            for (i, slot) in buf.iter_mut().enumerate() {
                let v = if i < wlen { emphasized[start + i] * self.window[i] } else { 0.0 };
                *slot = Complex::new(v, 0.0);
            }
            self.fft.process(&mut buf);
            for (p, c) in power.iter_mut().zip(&buf) {
                *p = c.norm_sqr() / FFT_SIZE as f64;
            }
            for (out, filter) in log_mel.iter_mut().zip(&self.filters) {
                let e: f64 = filter.iter().zip(&power).map(|(w, p)| w * p).sum();
                *out = e.max(LOG_FLOOR).ln();
            }
            let mut coeffs = [0.0; NUM_COEFFS];
            for (c, basis) in coeffs.iter_mut().zip(&self.dct) {
                *c = basis.iter().zip(&log_mel).map(|(b, x)| b * x).sum();
            }
            frames.push(coeffs);
        }
        Ok(FeatureMatrix { frames })
    }
}

/// MFCC features with the default 16 kHz configuration.
pub fn mfcc(audio: &AudioClip) -> Result<FeatureMatrix, FeatureError> {
    Mfcc::new(audio.sample_rate).compute(audio)
}
