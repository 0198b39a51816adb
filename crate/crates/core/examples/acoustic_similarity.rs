//! MFCC features and DTW similarity between synthetic signals, or between
//! two 16 kHz mono WAV files given on the command line.

use proncoach::acoustic::{decode_wav, dtw, mfcc, tone, AudioClip};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn load(path: &str) -> anyhow::Result<AudioClip> {
    Ok(decode_wav(&std::fs::read(path)?)?)
}

fn report(name: &str, a: &AudioClip, b: &AudioClip) -> anyhow::Result<()> {
    let (fa, fb) = (mfcc(a)?, mfcc(b)?);
    let d = dtw(&fa, &fb)?;
    println!(
        "{name:<22} frames {:>4} x {:>4}  path {:>4}  mean cost {:>8.3}  similarity {:.4}",
        fa.len(),
        fb.len(),
        d.path.len(),
        d.mean_cost(),
        d.similarity()
    );
    Ok(())
}

fn main() -> anyhow::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if let [a, b] = args.as_slice() {
        return report("files", &load(a)?, &load(b)?);
    }
    let base = tone(440.0, 1.0, 0.5);
    let mut shifted = vec![0.0; 800];
    shifted.extend_from_slice(&base[..base.len() - 800]);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let noise: Vec<f32> = (0..base.len()).map(|_| rng.random_range(-0.5..0.5)).collect();

    let clip = AudioClip::new(base.clone());
    report("self", &clip, &clip)?;
    report("shifted 50 ms", &clip, &AudioClip::new(shifted))?;
    report("slower (1.6 s)", &clip, &AudioClip::new(tone(440.0, 1.6, 0.5)))?;
    report("octave up", &clip, &AudioClip::new(tone(880.0, 1.0, 0.5)))?;
    report("white noise", &clip, &AudioClip::new(noise))?;
    Ok(())
}
