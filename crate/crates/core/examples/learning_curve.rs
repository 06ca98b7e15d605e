//! Baseline accuracy as the training set shrinks.

use plankit::cli::{curve_csv, learning_curve};
use plankit::synth::{records_for, synth_plans, SynthConfig, TRAIN_TEMPLATES};
use plankit::{Corpus, PlannerOptions};

fn main() -> anyhow::Result<()> {
    let plans = synth_plans(&SynthConfig { plans: 1400, ..SynthConfig::default() });
    let (train_plans, dev_plans) = plans.split_at(1050);
    let train = Corpus::new(records_for(train_plans, TRAIN_TEMPLATES, 0))?;
    let dev = Corpus::new(records_for(dev_plans, 1, TRAIN_TEMPLATES))?;
    let options = PlannerOptions { condition_start: true, substitute_args: true };
    let rows = learning_curve(&train, &dev, &[1.0, 0.25, 0.10, 0.01], 0, true, options)?;
    print!("{}", curve_csv(&rows));
    Ok(())
}
