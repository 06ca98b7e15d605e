//! Render a plan into the delimited training format, damage it the way a
//! generator might, then repair and parse it back.

use plankit::text::{parse_generated, serialize_example, Repairer};
use plankit::{Action, CommandTriple};

fn main() -> anyhow::Result<()> {
    let plan = vec![
        CommandTriple::parse(Action::Goto, "dining table", None)?,
        CommandTriple::parse(Action::Pickup, "spoon", None)?,
        CommandTriple::parse(Action::Put, "spoon", Some("mug"))?,
    ];
    let line = serialize_example("put a spoon in a mug", &plan)?;
    println!("serialized:\n  {line}\n");

    let parsed = parse_generated(line.as_str())?;
    assert_eq!(parsed.plan.triples(), plan.as_slice());
    println!("parsed back: {}\n", parsed.plan);

    // missing bigram, doubled tokens and a dropped tag
    let generated = "put a spoon in a mug [SEP] go <arg1> the dining table [CSEP] \
                     pick pick <arg1> the spoon [CSEP] put <arg1> the spoon in the mug [EOS]";
    let repaired = Repairer::default().repair(generated);
    println!("generated:\n  {generated}");
    println!("repaired ({}):\n  {}", repaired.applied.iter().map(|r| r.as_str()).collect::<Vec<_>>().join(", "), repaired.text);
    let parsed = parse_generated(&repaired.text)?;
    println!("parsed: {}", parsed.plan);
    assert_eq!(parsed.plan.triples(), plan.as_slice());
    Ok(())
}
