//! Strict versus permissive scoring on a handful of predictions.

use plankit::scoring::{aggregate, match_argument, score_plan, ScoreOptions};
use plankit::{Action, Argument, CommandTriple, MatchMode, Plan, Record};

fn t(action: Action, a: &str, b: Option<&str>) -> CommandTriple {
    CommandTriple::parse(action, a, b).expect("valid triple")
}

fn record(id: &str, gold: Vec<CommandTriple>) -> Record {
    Record {
        id: id.into(),
        plan_id: id.into(),
        task_type: "look_at_obj_in_light".into(),
        directive: String::new(),
        gold: Plan::new(gold).expect("nonempty"),
        start_location: None,
        scene_id: None,
    }
}

fn main() -> anyhow::Result<()> {
    let knife = Argument::parse("butter knife")?;
    let lamp = Argument::parse("desk lamp")?;
    for mode in MatchMode::BOTH {
        println!(
            "{:<10} butter knife ~ knife: {:<5}  desk lamp ~ lamp: {}",
            mode.as_str(),
            match_argument(Some(&knife), Some(&Argument::parse("knife")?), mode),
            match_argument(Some(&lamp), Some(&Argument::parse("lamp")?), mode),
        );
    }

    let gold = vec![t(Action::Goto, "desk", None), t(Action::Pickup, "pencil", None), t(Action::Toggle, "desk lamp", None)];
    let pred = vec![t(Action::Goto, "sofa", None), t(Action::Pickup, "pencil", None), t(Action::Toggle, "lamp", None)];
    let s = score_plan(&gold, &pred, MatchMode::Permissive);
    println!("\npermissive per position: {:?}", s.triple);
    println!("full sequence {} / full minus first {}\n", s.full_sequence, s.full_minus_first);

    let records = vec![record("r1", gold.clone()), record("r2", gold)];
    let preds = [("r1", pred.as_slice())];
    let report = aggregate(&records, preds, &ScoreOptions::default())?;
    print!("{}", report.render_table(true));
    println!("\nmissing predictions: {}", report.missing_predictions);
    assert!(report.monotonicity_violations().is_empty());
    Ok(())
}
