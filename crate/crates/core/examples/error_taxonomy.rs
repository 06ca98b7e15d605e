//! Align predicted plans to gold plans and label the differences.

use plankit::analysis::{align, classify, error_report, AnalysisPair, Overlay};
use plankit::{Action, CommandTriple};

fn t(action: Action, a: &str, b: Option<&str>) -> CommandTriple {
    CommandTriple::parse(action, a, b).expect("valid triple")
}

fn show(name: &str, gold: &[CommandTriple], pred: &[CommandTriple]) -> anyhow::Result<()> {
    let script = align(gold, pred);
    let labels = classify(gold, pred, &script)?;
    println!("{name} (cost {})", script.cost);
    for op in &script.ops {
        println!("  {}", op.kind());
    }
    println!("  labels: {:?}\n", labels.labels.iter().map(|l| l.as_str()).collect::<Vec<_>>());
    Ok(())
}

fn main() -> anyhow::Result<()> {
    let sink_gold = vec![t(Action::Goto, "countertop", None), t(Action::Pickup, "mug", None), t(Action::Put, "mug", Some("sink basin"))];
    let sink_pred = vec![
        t(Action::Goto, "countertop", None),
        t(Action::Pickup, "mug", None),
        t(Action::Goto, "sink basin", None),
        t(Action::Put, "mug", Some("sink basin")),
    ];
    show("extra goto before the sink", &sink_gold, &sink_pred)?;

    let knife_gold = vec![t(Action::Slice, "lettuce", None), t(Action::Put, "knife", Some("countertop")), t(Action::Put, "lettuce", Some("fridge"))];
    let mut knife_pred = knife_gold.clone();
    knife_pred[1] = t(Action::Put, "knife", Some("microwave"));
    show("knife stored in the microwave", &knife_gold, &knife_pred)?;

    let mut overlay = Overlay::default();
    overlay.insert("knife", "gold_instructions_incomplete")?;
    let pairs = [
        AnalysisPair { id: "sink", gold: &sink_gold, pred: &sink_pred },
        AnalysisPair { id: "knife", gold: &knife_gold, pred: &knife_pred },
        AnalysisPair { id: "exact", gold: &knife_gold, pred: &knife_gold },
    ];
    let report = error_report(&pairs, Some(&overlay))?;
    println!("{} errorful of {} pairs", report.errorful, report.pairs);
    for (label, p) in &report.proportions {
        println!("  {:>5.1}%  {label}", p * 100.0);
    }
    Ok(())
}
