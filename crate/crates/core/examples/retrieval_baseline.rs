//! Nearest-neighbor planning on held-out paraphrases, with and without
//! start-location conditioning.

use plankit::scoring::{aggregate, ScoreOptions};
use plankit::synth::{records_for, synth_plans, SynthConfig, TRAIN_TEMPLATES};
use plankit::{BaselinePlanner, Corpus, MatchMode, PlannerOptions};

fn main() -> anyhow::Result<()> {
    let plans = synth_plans(&SynthConfig { plans: 350, ..SynthConfig::default() });
    let train = Corpus::new(records_for(&plans, TRAIN_TEMPLATES, 0))?;
    let test = Corpus::new(records_for(&plans, 1, TRAIN_TEMPLATES))?;

    for condition_start in [false, true] {
        let planner = BaselinePlanner::new(&train, PlannerOptions { condition_start, substitute_args: true })?;
        let preds = planner.predict_all(test.records());
        let report = aggregate(test.records(), preds.iter().map(|p| (p.id.as_str(), p.plan.as_slice())), &ScoreOptions::default())?;
        let strict = &report.modes[&MatchMode::Strict];
        let permissive = &report.modes[&MatchMode::Permissive];
        println!(
            "condition_start={condition_start:<5}  triples {:.3}  full sequence {:.3}  full minus first (permissive) {:.3}",
            strict.triple.value.unwrap_or(0.0),
            strict.full_sequence.value.unwrap_or(0.0),
            permissive.full_minus_first.value.unwrap_or(0.0),
        );
    }

    let planner = BaselinePlanner::new(&train, PlannerOptions::default())?;
    let sample = &test.records()[0];
    let p = planner.predict_record(sample);
    println!("\n\"{}\"\n  neighbor {} (similarity {:.3})", sample.directive, p.neighbor_id.unwrap_or_default(), p.similarity.unwrap_or(0.0));
    Ok(())
}
