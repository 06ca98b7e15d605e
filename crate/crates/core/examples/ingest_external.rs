//! Import plan files in the nested per-trajectory JSON layout.
//!
//! Pass a directory to import it; with no argument a small synthetic tree is
//! written to a temporary directory first.

use plankit::dataset::{corpus_to_jsonl, import_external, ImportSchema};
use plankit::synth::{synth_plans, write_external_layout, SynthConfig};

fn main() -> anyhow::Result<()> {
    let source = match std::env::args().nth(1) {
        Some(dir) => std::path::PathBuf::from(dir),
        None => {
            let dir = std::env::temp_dir().join("plankit-ingest-example");
            let _ = std::fs::remove_dir_all(&dir);
            write_external_layout(&synth_plans(&SynthConfig { plans: 14, ..SynthConfig::default() }), &dir, 3)?;
            dir
        }
    };
    let (corpus, report) = import_external(&source, &ImportSchema::default())?;
    println!("{} files, {} plans, {} records, {} lint findings", report.files, report.plans, report.records, report.lints.len());
    for line in corpus_to_jsonl(corpus.records()).lines().take(2) {
        println!("{line}");
    }
    Ok(())
}
