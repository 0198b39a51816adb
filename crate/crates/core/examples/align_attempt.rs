//! Aligns a hypothesis against a reference and prints the per-character
//! verdicts and the utterance score.
//!
//! cargo run --example align_attempt -- "بَيْت كَبِير" "بِيت كَبِيرَة"

use proncoach::align::{align_words, score_characters, utterance_score, OpKind};
use proncoach::arabic::parse;

fn main() -> anyhow::Result<()> {
    let mut args = std::env::args().skip(1);
    let reference = parse(&args.next().unwrap_or_else(|| "بَيْت كَبِير".to_owned()))?;
    let hypothesis = parse(&args.next().unwrap_or_else(|| "بِيت كَبِيرَة".to_owned()))?;

    let alignment = align_words(&reference, &hypothesis);
    println!("cost {}", alignment.cost);
    for op in &alignment.ops {
        let r = op.ref_index.map(|i| alignment.reference[i].to_text()).unwrap_or_default();
        let h = op.hyp_index.map(|i| alignment.hypothesis[i].to_text()).unwrap_or_default();
        println!("{:<13} {:>4} {:>4}", format!("{:?}", op.kind), r, h);
    }

    let chars = score_characters(&alignment.ops, alignment.reference.len())?;
    for c in &chars {
        println!(
            "{:>2} {}  {:?} {:.1} {:?}",
            c.ref_index,
            alignment.reference[c.ref_index].to_text(),
            c.label,
            c.score,
            c.band
        );
    }
    let utt = utterance_score(&chars, alignment.insertion_count());
    let errors = alignment.ops.iter().filter(|o| o.kind != OpKind::Match).count();
    println!("{errors} errors, value {:.3}, {} stars", utt.value, utt.stars);
    Ok(())
}
