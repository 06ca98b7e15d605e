//! Synthetic household-task corpora.
//!
//! Generates plan groups across seven task types with templated directives,
//! so the whole pipeline can run without an upstream dataset. Directive
//! templates `0..3` are the training paraphrases; templates `3..` are
//! held-out phrasings for paraphrase tests.

use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::dataset::write_text;
use crate::error::Result;
use crate::plan::{normalize_argument, Action, CommandTriple, Corpus, Plan, Record};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TaskKind {
    PickAndPlace,
    PickCleanThenPlace,
    PickHeatThenPlace,
    PickCoolThenPlace,
    LookAtInLight,
    PickTwoAndPlace,
    PickAndPlaceWithMovable,
}

impl TaskKind {
    pub const ALL: [TaskKind; 7] = [
        TaskKind::PickAndPlace,
        TaskKind::PickCleanThenPlace,
        TaskKind::PickHeatThenPlace,
        TaskKind::PickCoolThenPlace,
        TaskKind::LookAtInLight,
        TaskKind::PickTwoAndPlace,
        TaskKind::PickAndPlaceWithMovable,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TaskKind::PickAndPlace => "pick_and_place_simple",
            TaskKind::PickCleanThenPlace => "pick_clean_then_place_in_recep",
            TaskKind::PickHeatThenPlace => "pick_heat_then_place_in_recep",
            TaskKind::PickCoolThenPlace => "pick_cool_then_place_in_recep",
            TaskKind::LookAtInLight => "look_at_obj_in_light",
            TaskKind::PickTwoAndPlace => "pick_two_obj_and_place",
            TaskKind::PickAndPlaceWithMovable => "pick_and_place_with_movable_recep",
        }
    }

    fn objects(self) -> &'static [&'static str] {
        match self {
            TaskKind::PickAndPlace | TaskKind::PickTwoAndPlace => {
                &["apple", "book", "pen", "remote control", "spoon", "butter knife", "watch", "keychain", "cd", "soap bar"]
            }
            TaskKind::PickCleanThenPlace => &["mug", "cup", "bowl", "spoon", "plate", "butter knife", "apple", "lettuce", "pan"],
            TaskKind::PickHeatThenPlace => &["apple", "potato", "tomato", "bread", "egg", "mug", "cup"],
            TaskKind::PickCoolThenPlace => &["apple", "potato", "tomato", "lettuce", "bread", "mug", "cup", "egg", "wine bottle"],
            TaskKind::LookAtInLight => &["book", "pen", "pencil", "remote control", "watch", "keychain", "bowl", "cd", "vase"],
            TaskKind::PickAndPlaceWithMovable => &["spoon", "pen", "pencil", "apple", "egg", "butter knife", "keychain"],
        }
    }

    fn templates(self) -> &'static [&'static str] {
        match self {
            TaskKind::PickAndPlace => &[
                "put a {o} in the {r}",
                "place the {o} on the {r}",
                "move a {o} to the {r}",
                "take the {o} and set it in the {r}",
                "carry a {o} over to the {r}",
            ],
            TaskKind::PickCleanThenPlace => &[
                "put a clean {o} in the {r}",
                "rinse the {o} and place it on the {r}",
                "wash a {o} then put it in the {r}",
                "clean the {o} and set it down in the {r}",
                "place a washed {o} on the {r}",
            ],
            TaskKind::PickHeatThenPlace => &[
                "put a hot {o} in the {r}",
                "heat the {o} and place it on the {r}",
                "microwave a {o} then put it in the {r}",
                "warm up the {o} and set it in the {r}",
                "place a heated {o} on the {r}",
            ],
            TaskKind::PickCoolThenPlace => &[
                "put a cold {o} in the {r}",
                "chill the {o} and place it on the {r}",
                "cool a {o} in the fridge then put it in the {r}",
                "refrigerate the {o} and set it on the {r}",
                "place a chilled {o} in the {r}",
            ],
            TaskKind::LookAtInLight => &[
                "examine a {o} under the {l}",
                "look at the {o} in the light of the {l}",
                "pick up a {o} and turn on the {l}",
                "inspect the {o} by the {l}",
                "hold the {o} and switch on the {l}",
            ],
            TaskKind::PickTwoAndPlace => &[
                "put two {o}s in the {r}",
                "place a pair of {o}s on the {r}",
                "move two {o}s to the {r}",
                "set both {o}s in the {r}",
                "carry two {o}s over to the {r}",
            ],
            TaskKind::PickAndPlaceWithMovable => &[
                "put a {m} with a {o} in it on the {r}",
                "place the {o} in a {m} and move it to the {r}",
                "move a {m} holding a {o} to the {r}",
                "set the {m} containing the {o} on the {r}",
                "carry a {o} in a {m} over to the {r}",
            ],
        }
    }
}

/// Number of training paraphrase templates per task; higher indices are held out.
pub const TRAIN_TEMPLATES: usize = 3;

const LOCATIONS: [&str; 10] = [
    "countertop", "dining table", "side table", "coffee table", "shelf", "dresser", "sofa", "desk", "cabinet", "drawer",
];
const TARGETS: [&str; 8] = ["dining table", "countertop", "shelf", "cabinet", "drawer", "dresser", "side table", "fridge"];
const LAMPS: [(&str, &str); 2] = [("desk lamp", "desk"), ("floor lamp", "side table")];
const MOVABLES: [&str; 3] = ["bowl", "plate", "mug"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthConfig {
    pub plans: usize,
    pub directives_per_plan: usize,
    /// Use the first `task_types` of the seven task kinds.
    pub task_types: usize,
    pub seed: u64,
    /// Number of distinct scenes plan groups are spread over.
    pub scenes: usize,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig { plans: 700, directives_per_plan: 3, task_types: 7, seed: 0, scenes: 30 }
    }
}

/// One synthetic plan group with the slot values its directives are rendered from.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthPlan {
    pub plan_id: String,
    pub task: TaskKind,
    pub object: String,
    /// Target receptacle, or the lamp for light tasks.
    pub target: String,
    pub movable: Option<String>,
    pub start: String,
    pub scene: String,
    pub plan: Plan,
}

fn triple(action: Action, a: &str, b: Option<&str>) -> CommandTriple {
    CommandTriple::new(
        action,
        Some(normalize_argument(a).expect("static names")),
        b.map(|b| normalize_argument(b).expect("static names")),
    )
}

fn build_plan<R: Rng>(task: TaskKind, rng: &mut R, start: &str, object: &str, target: &str, movable: Option<&str>) -> Vec<CommandTriple> {
    use Action::*;
    let mut p = vec![triple(Goto, start, None), triple(Pickup, object, None)];
    let place = |p: &mut Vec<CommandTriple>, what: &str| {
        p.push(triple(Goto, target, None));
        p.push(triple(Put, what, Some(target)));
    };
    match task {
        TaskKind::PickAndPlace => place(&mut p, object),
        TaskKind::PickCleanThenPlace => {
            p.push(triple(Goto, "sink basin", None));
            p.push(triple(Clean, object, None));
            place(&mut p, object);
        }
        TaskKind::PickHeatThenPlace | TaskKind::PickCoolThenPlace => {
            let sliceable = ["apple", "potato", "tomato", "lettuce", "bread"].contains(&object);
            if sliceable && rng.gen_bool(0.3) {
                p = vec![
                    triple(Goto, start, None),
                    triple(Pickup, "butter knife", None),
                    triple(Slice, object, None),
                    triple(Put, "butter knife", Some(start)),
                    triple(Pickup, object, None),
                ];
            }
            let (appliance, act) = if task == TaskKind::PickHeatThenPlace { ("microwave", Heat) } else { ("fridge", Cool) };
            p.push(triple(Goto, appliance, None));
            p.push(triple(act, object, None));
            place(&mut p, object);
        }
        TaskKind::LookAtInLight => {
            let spot = LAMPS.iter().find(|(l, _)| *l == target).map_or("desk", |(_, s)| s);
            p.push(triple(Goto, spot, None));
            p.push(triple(Toggle, target, None));
        }
        TaskKind::PickTwoAndPlace => {
            place(&mut p, object);
            let second = LOCATIONS.choose(rng).expect("nonempty");
            p.push(triple(Goto, second, None));
            p.push(triple(Pickup, object, None));
            place(&mut p, object);
        }
        TaskKind::PickAndPlaceWithMovable => {
            let m = movable.expect("movable task has a container");
            p.push(triple(Goto, "countertop", None));
            p.push(triple(Put, object, Some(m)));
            p.push(triple(Pickup, m, None));
            place(&mut p, m);
        }
    }
    p
}

/// Generates plan groups, cycling through task types so each gets an equal share.
pub fn synth_plans(config: &SynthConfig) -> Vec<SynthPlan> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let kinds = &TaskKind::ALL[..config.task_types.clamp(1, 7)];
    (0..config.plans)
        .map(|i| {
            let task = kinds[i % kinds.len()];
            let object = task.objects().choose(&mut rng).expect("nonempty").to_string();
            let start = LOCATIONS.choose(&mut rng).expect("nonempty").to_string();
            let (target, movable) = match task {
                TaskKind::LookAtInLight => (LAMPS.choose(&mut rng).expect("nonempty").0.to_string(), None),
                TaskKind::PickAndPlaceWithMovable => (
                    TARGETS[..7].choose(&mut rng).expect("nonempty").to_string(),
                    Some(MOVABLES.choose(&mut rng).expect("nonempty").to_string()),
                ),
                _ => (TARGETS[..7].choose(&mut rng).expect("nonempty").to_string(), None),
            };
            let plan = build_plan(task, &mut rng, &start, &object, &target, movable.as_deref());
            SynthPlan {
                plan_id: format!("synth-{i:05}"),
                task,
                scene: format!("scene-{}", rng.gen_range(0..config.scenes.max(1))),
                object,
                target,
                movable,
                start,
                plan: Plan::new(plan).expect("nonempty"),
            }
        })
        .collect()
}

impl SynthPlan {
    /// Renders directive template `template` (wrapping around the template list).
    pub fn directive(&self, template: usize) -> String {
        let templates = self.task.templates();
        templates[template % templates.len()]
            .replace("{o}", &self.object)
            .replace("{r}", &self.target)
            .replace("{l}", &self.target)
            .replace("{m}", self.movable.as_deref().unwrap_or("bowl"))
    }

    pub fn record(&self, k: usize, template: usize) -> Record {
        Record {
            id: format!("{}:{k}", self.plan_id),
            plan_id: self.plan_id.clone(),
            task_type: self.task.name().to_string(),
            directive: self.directive(template),
            gold: self.plan.clone(),
            start_location: Some(normalize_argument(&self.start).expect("static names")),
            scene_id: Some(self.scene.clone()),
        }
    }
}

/// Records for each plan using templates `offset..offset + per_plan`.
pub fn records_for(plans: &[SynthPlan], per_plan: usize, offset: usize) -> Vec<Record> {
    plans.iter().flat_map(|p| (0..per_plan).map(move |k| p.record(k, offset + k))).collect()
}

pub fn generate(config: &SynthConfig) -> Corpus {
    let plans = synth_plans(config);
    Corpus::new(records_for(&plans, config.directives_per_plan, 0)).expect("synthetic ids are unique")
}

fn external_name(a: Action) -> &'static str {
    match a {
        Action::Goto => "GotoLocation",
        Action::Pickup => "PickupObject",
        Action::Put => "PutObject",
        Action::Cool => "CoolObject",
        Action::Heat => "HeatObject",
        Action::Clean => "CleanObject",
        Action::Slice => "SliceObject",
        Action::Toggle => "ToggleObject",
    }
}

/// Writes each plan as `<dir>/<task>/<plan_id>/traj_data.json` in the default
/// import layout, with `per_plan` training directives.
pub fn write_external_layout(plans: &[SynthPlan], dir: &Path, per_plan: usize) -> Result<()> {
    for p in plans {
        let mut steps: Vec<serde_json::Value> = p
            .plan
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let args: Vec<String> = t.arg1.iter().chain(t.arg2.iter()).map(|a| a.text()).collect();
                json!({"high_idx": i, "discrete_action": {"action": external_name(t.action), "args": args}})
            })
            .collect();
        steps.push(json!({"high_idx": steps.len(), "discrete_action": {"action": "NoOp", "args": []}}));
        let anns: Vec<serde_json::Value> = (0..per_plan).map(|k| json!({"task_desc": p.directive(k)})).collect();
        let doc = json!({
            "task_id": p.plan_id,
            "task_type": p.task.name(),
            "scene": {"scene_num": p.scene},
            "plan": {"high_pddl": steps},
            "turk_annotations": {"anns": anns},
        });
        let path = dir.join(p.task.name()).join(&p.plan_id).join("traj_data.json");
        write_text(&path, &serde_json::to_string_pretty(&doc).expect("json"))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generation_is_deterministic_and_valid() {
        let cfg = SynthConfig { plans: 70, ..SynthConfig::default() };
        let a = generate(&cfg);
        assert_eq!(a, generate(&cfg));
        assert_eq!(a.len(), 210);
        for r in a.records() {
            assert!(r.gold.is_well_formed(), "{}", r.gold);
            assert!(r.lint().is_empty(), "{:?} {}", r.lint(), r.gold);
        }
        let tasks: std::collections::BTreeSet<_> = a.records().iter().map(|r| r.task_type.as_str()).collect();
        assert_eq!(tasks.len(), 7);
    }

    #[test]
    fn held_out_templates_differ() {
        let plans = synth_plans(&SynthConfig { plans: 7, ..SynthConfig::default() });
        for p in &plans {
            let train: Vec<String> = (0..TRAIN_TEMPLATES).map(|k| p.directive(k)).collect();
            assert!(!train.contains(&p.directive(TRAIN_TEMPLATES)));
        }
    }
}
