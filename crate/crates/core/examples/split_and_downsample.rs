//! Re-split a corpus by plan group and draw nested, stratified training subsets.

use plankit::dataset::{downsample, split, DownsampleSpec, SplitSpec};
use plankit::synth::{generate, SynthConfig};

fn main() -> anyhow::Result<()> {
    let corpus = generate(&SynthConfig { plans: 2800, ..SynthConfig::default() });
    println!("corpus: {} records in {} plan groups", corpus.len(), corpus.plan_ids().len());

    let splits = split(&corpus, &SplitSpec::default())?;
    for (name, part) in [("train", &splits.train), ("dev", &splits.dev), ("test", &splits.test)] {
        println!("  {name:<5} {:>5} records {:>5} groups", part.len(), part.plan_ids().len());
    }

    let mut previous: Option<Vec<String>> = None;
    for fraction in [0.25, 0.10, 0.01] {
        let sample = downsample(&corpus, &DownsampleSpec::new(fraction, 7, true)?)?;
        let ids: Vec<String> = sample.plan_ids().into_iter().map(String::from).collect();
        if let Some(prev) = &previous {
            assert!(ids.iter().all(|id| prev.contains(id)), "smaller fractions nest inside larger ones");
        }
        let mut per_type = std::collections::BTreeMap::<&str, usize>::new();
        for id in &ids {
            let r = sample.records().iter().find(|r| &r.plan_id == id).expect("present");
            *per_type.entry(r.task_type.as_str()).or_default() += 1;
        }
        println!("fraction {fraction:>4}: {:>4} groups, per task type {:?}", ids.len(), per_type.values().collect::<Vec<_>>());
        previous = Some(ids);
    }
    Ok(())
}
