use std::io::Cursor;

use thiserror::Error;

pub const SAMPLE_RATE: u32 = 16_000;
/// Longest clip accepted for scoring, in seconds.
pub const MAX_SECONDS: usize = 30;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WavError {
    #[error("unsupported audio format: {0}")]
    UnsupportedFormat(String),
    #[error("corrupt WAV file: {0}")]
    CorruptFile(String),
}

/// Mono 16 kHz audio with samples in [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct AudioClip {
    pub samples: Vec<f32>,
    pub sample_rate: u32,
}

impl AudioClip {
    pub fn new(samples: Vec<f32>) -> Self {
        AudioClip {
            samples,
            sample_rate: SAMPLE_RATE,
        }
    }

    pub fn duration_secs(&self) -> f64 {
        self.samples.len() as f64 / f64::from(self.sample_rate)
    }

    pub fn exceeds_limit(&self) -> bool {
        self.samples.len() > MAX_SECONDS * self.sample_rate as usize
    }
}

/// Decodes PCM s16le mono 16 kHz WAV. Anything else is rejected.
pub fn decode_wav(bytes: &[u8]) -> Result<AudioClip, WavError> {
    let reader = hound::WavReader::new(Cursor::new(bytes)).map_err(classify)?;
    let spec = reader.spec();
    if spec.sample_format != hound::SampleFormat::Int || spec.bits_per_sample != 16 {
        return Err(WavError::UnsupportedFormat(format!(
            "expected 16-bit integer PCM, got {:?} {}-bit",
            spec.sample_format, spec.bits_per_sample
        )));
    }
    if spec.channels != 1 {
        return Err(WavError::UnsupportedFormat(format!(
            "expected mono, got {} channels",
            spec.channels
        )));
    }
    if spec.sample_rate != SAMPLE_RATE {
        return Err(WavError::UnsupportedFormat(format!(
            "expected {SAMPLE_RATE} Hz, got {} Hz",
            spec.sample_rate
        )));
    }
    let samples = reader
        .into_samples::<i16>()
        .map(|s| s.map(|v| f32::from(v) / 32768.0))
        .collect::<Result<Vec<_>, _>>()
        .map_err(classify)?;
    Ok(AudioClip::new(samples))
}

fn classify(err: hound::Error) -> WavError {
    match err {
        hound::Error::Unsupported => WavError::UnsupportedFormat("unsupported WAV encoding".into()),
        other => WavError::CorruptFile(other.to_string()),
    }
}

/// Encodes samples as PCM s16le mono 16 kHz WAV.
pub fn encode_wav(samples: &[f32]) -> Vec<u8> {
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate: SAMPLE_RATE,
        bits_per_sample: 16,
        sample_format: hound::SampleFormat::Int,
    };
    let mut buf = Cursor::new(Vec::with_capacity(44 + samples.len() * 2));
    {
        let mut writer = hound::WavWriter::new(&mut buf, spec).expect("in-memory writer");
        for &s in samples {
            let v = (s.clamp(-1.0, 1.0) * 32767.0).round() as i16;
            writer.write_sample(v).expect("in-memory write");
        }
        writer.finalize().expect("in-memory finalize");
    }
    buf.into_inner()
}

/// Sine tone with a short linear fade at both ends.
pub fn tone(freq_hz: f64, seconds: f64, amplitude: f64) -> Vec<f32> {
    let n = (seconds * f64::from(SAMPLE_RATE)).round() as usize;
    let fade = (SAMPLE_RATE as usize / 100).min(n / 2).max(1);
    (0..n)
        .map(|i| {
            let t = i as f64 / f64::from(SAMPLE_RATE);
            let env = (i.min(n - 1 - i) as f64 / fade as f64).min(1.0);
            (amplitude * env * (std::f64::consts::TAU * freq_hz * t).sin()) as f32
        })
        .collect()
}
