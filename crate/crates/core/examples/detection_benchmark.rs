//! Error-injection benchmark over the bundled corpus, followed by the
//! single-error recovery check.

use std::path::PathBuf;

use proncoach::acoustic::ErrorRates;
use proncoach::content::load_corpus;
use proncoach::eval::{evaluate, render_table, single_error_recovery, InjectionSpec};

fn main() -> anyhow::Result<()> {
    let data = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data");
    let corpus = load_corpus(&data.join("corpus.json"), &data.join("assets"))?;
    let spec = InjectionSpec {
        rates: ErrorRates { p_sub_full: 0.1, p_sub_diac: 0.1, p_del: 0.1, p_ins: 0.1 },
        trials: 5,
        seed: 11,
    };
    let report = evaluate(&corpus, &spec)?;
    print!("{}", render_table(&report));
    for w in report.worst.iter().take(3) {
        println!("worst: {w:?}");
    }

    let recovery = single_error_recovery(&corpus, 1)?;
    println!(
        "single-error recovery: {}/{} non-ambiguous exact, type-only recall {:.4}, {} ambiguous",
        recovery.non_ambiguous_exact,
        recovery.non_ambiguous,
        recovery.type_only_recall,
        recovery.ambiguous.len()
    );
    for c in &recovery.ambiguous {
        println!("  ambiguous: {} {} at {}", c.item_id, c.kind, c.ref_index);
    }
    Ok(())
}
