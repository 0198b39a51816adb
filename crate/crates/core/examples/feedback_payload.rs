//! Full feedback payload for one attempt on a bundled corpus item, as the
//! HTTP service would return it.
//!
//! cargo run --example feedback_payload -- cur-001 "سَلَم"

use std::path::PathBuf;

use proncoach::acoustic::{dtw_similarity, mfcc, tone, AudioClip, FusionWeights, Hypothesis};
use proncoach::content::load_corpus;
use proncoach::feedback::score_hypothesis;

fn main() -> anyhow::Result<()> {
    let data = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data");
    let corpus = load_corpus(&data.join("corpus.json"), &data.join("assets"))?;
    let mut args = std::env::args().skip(1);
    let id = args.next().unwrap_or_else(|| "cur-001".to_owned());
    let item = corpus.get_item(&id)?;
    let text = args.next().unwrap_or_else(|| "سَلَم".to_owned());

    let fb = score_hypothesis(item, &Hypothesis::parse(&text)?)?;
    let a = mfcc(&AudioClip::new(tone(440.0, 0.8, 0.4)))?;
    let b = mfcc(&AudioClip::new(tone(450.0, 0.7, 0.4)))?;
    let fb = fb.with_acoustic(dtw_similarity(&a, &b)?, FusionWeights::default())?;
    println!("{}", serde_json::to_string_pretty(&fb)?);
    Ok(())
}
