//! Corpus files, ingestion, re-splitting and downsampling.
//!
//! The canonical corpus format is JSONL, one record per line:
//!
//! ```json
//! {"id":"t1:0","plan_id":"t1","task_type":"pick_and_place","directive":"put a spoon in a mug","plan":[{"action":"goto","arg1":"countertop","arg2":null}],"start_location":"countertop"}
//! ```

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use walkdir::WalkDir;

use crate::error::{Error, Result};
use crate::plan::{normalize_argument, Action, Argument, CommandTriple, Corpus, Plan, Record};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WireTriple {
    pub action: String,
    pub arg1: Option<String>,
    pub arg2: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WireRecord {
    pub id: String,
    pub plan_id: String,
    pub task_type: String,
    pub directive: String,
    pub plan: Vec<WireTriple>,
    pub start_location: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scene_id: Option<String>,
}

pub fn plan_to_wire(plan: &[CommandTriple]) -> Vec<WireTriple> {
    plan.iter()
        .map(|t| WireTriple {
            action: t.action.as_str().to_string(),
            arg1: t.arg1.as_ref().map(Argument::text),
            arg2: t.arg2.as_ref().map(Argument::text),
        })
        .collect()
}

pub fn plan_from_wire(wire: &[WireTriple]) -> Result<Vec<CommandTriple>> {
    wire.iter()
        .map(|w| {
            let action: Action = w.action.parse()?;
            let arg1 = w.arg1.as_deref().map(normalize_argument).transpose()?;
            let arg2 = w.arg2.as_deref().map(normalize_argument).transpose()?;
            Ok(CommandTriple::new(action, arg1, arg2))
        })
        .collect()
}

impl From<&Record> for WireRecord {
    fn from(r: &Record) -> Self {
        WireRecord {
            id: r.id.clone(),
            plan_id: r.plan_id.clone(),
            task_type: r.task_type.clone(),
            directive: r.directive.clone(),
            plan: plan_to_wire(&r.gold),
            start_location: r.start_location.as_ref().map(Argument::text),
            scene_id: r.scene_id.clone(),
        }
    }
}

impl TryFrom<WireRecord> for Record {
    type Error = Error;

    fn try_from(w: WireRecord) -> Result<Self> {
        Ok(Record {
            gold: Plan::new(plan_from_wire(&w.plan)?)?,
            start_location: w.start_location.as_deref().map(normalize_argument).transpose()?,
            id: w.id,
            plan_id: w.plan_id,
            task_type: w.task_type,
            directive: w.directive,
            scene_id: w.scene_id,
        })
    }
}

fn parse_lines<T: for<'de> Deserialize<'de>>(text: &str, path: &Path) -> Result<Vec<(usize, T)>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(n, l)| {
            serde_json::from_str(l)
                .map(|v| (n + 1, v))
                .map_err(|e| Error::Line { path: path.to_path_buf(), line: n + 1, message: e.to_string() })
        })
        .collect()
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Parses canonical JSONL. `path` is used for error messages only.
pub fn parse_corpus(text: &str, path: &Path) -> Result<Corpus> {
    let records = parse_lines::<WireRecord>(text, path)?
        .into_iter()
        .map(|(line, w)| {
            Record::try_from(w).map_err(|e| Error::Line { path: path.to_path_buf(), line, message: e.to_string() })
        })
        .collect::<Result<Vec<_>>>()?;
    Corpus::new(records)
}

pub fn read_corpus(path: &Path) -> Result<Corpus> {
    parse_corpus(&read_text(path)?, path)
}

pub fn corpus_to_jsonl(records: &[Record]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(&WireRecord::from(r)).expect("records serialize"));
        out.push('\n');
    }
    out
}

pub fn write_corpus(path: &Path, records: &[Record]) -> Result<()> {
    write_text(path, &corpus_to_jsonl(records))
}

/// A planner output for one record.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub id: String,
    /// May be empty when a planner produced nothing usable.
    pub plan: Vec<CommandTriple>,
    pub neighbor_id: Option<String>,
    pub similarity: Option<f64>,
    pub flags: Vec<String>,
}

impl Prediction {
    pub fn new(id: impl Into<String>, plan: Vec<CommandTriple>) -> Self {
        Prediction { id: id.into(), plan, neighbor_id: None, similarity: None, flags: Vec::new() }
    }
}

#[derive(Serialize, Deserialize)]
struct WirePrediction {
    id: String,
    plan: Vec<WireTriple>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    neighbor_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    similarity: Option<f64>,
    #[serde(default)]
    flags: Vec<String>,
}

pub fn predictions_to_jsonl(preds: &[Prediction]) -> String {
    let mut out = String::new();
    for p in preds {
        let w = WirePrediction {
            id: p.id.clone(),
            plan: plan_to_wire(&p.plan),
            neighbor_id: p.neighbor_id.clone(),
            similarity: p.similarity,
            flags: p.flags.clone(),
        };
        out.push_str(&serde_json::to_string(&w).expect("predictions serialize"));
        out.push('\n');
    }
    out
}

pub fn parse_predictions(text: &str, path: &Path) -> Result<Vec<Prediction>> {
    parse_lines::<WirePrediction>(text, path)?
        .into_iter()
        .map(|(line, w)| {
            let plan = plan_from_wire(&w.plan)
                .map_err(|e| Error::Line { path: path.to_path_buf(), line, message: e.to_string() })?;
            Ok(Prediction { id: w.id, plan, neighbor_id: w.neighbor_id, similarity: w.similarity, flags: w.flags })
        })
        .collect()
}

pub fn read_predictions(path: &Path) -> Result<Vec<Prediction>> {
    parse_predictions(&read_text(path)?, path)
}

/// Raw model output for one record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Generation {
    pub id: String,
    pub text: String,
}

pub fn read_generations(path: &Path) -> Result<Vec<Generation>> {
    Ok(parse_lines(&read_text(path)?, path)?.into_iter().map(|(_, g)| g).collect())
}

/// Arg1 of the first triple when that triple is a `goto`.
pub fn start_location_of(plan: &[CommandTriple]) -> Option<Argument> {
    plan.first().filter(|t| t.action == Action::Goto).and_then(|t| t.arg1.clone())
}

pub fn extract_start_location(r: &Record) -> Option<Argument> {
    start_location_of(&r.gold)
}

/// What an external action name maps to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mapped {
    Action(Action),
    Skip,
}

/// Schema for ingesting external plan files: action-name mapping and JSON
/// pointers locating each field inside a source file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImportSchema {
    pub actions: BTreeMap<String, Mapped>,
    pub id: String,
    pub task_type: String,
    pub scene: String,
    pub steps: String,
    pub step_action: String,
    pub step_args: String,
    pub annotations: String,
    pub annotation_text: String,
}

impl Default for ImportSchema {
    fn default() -> Self {
        let actions = [
            ("GotoLocation", Mapped::Action(Action::Goto)),
            ("PickupObject", Mapped::Action(Action::Pickup)),
            ("PutObject", Mapped::Action(Action::Put)),
            ("CoolObject", Mapped::Action(Action::Cool)),
            ("HeatObject", Mapped::Action(Action::Heat)),
            ("CleanObject", Mapped::Action(Action::Clean)),
            ("SliceObject", Mapped::Action(Action::Slice)),
            ("ToggleObject", Mapped::Action(Action::Toggle)),
            ("NoOp", Mapped::Skip),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
        ImportSchema {
            actions,
            id: "/task_id".into(),
            task_type: "/task_type".into(),
            scene: "/scene/scene_num".into(),
            steps: "/plan/high_pddl".into(),
            step_action: "/discrete_action/action".into(),
            step_args: "/discrete_action/args".into(),
            annotations: "/turk_annotations/anns".into(),
            annotation_text: "/task_desc".into(),
        }
    }
}

impl ImportSchema {
    /// Applies `key = value` lines on top of the defaults.
    ///
    /// Plain keys map an external action name to one of the eight actions or
    /// `skip`; `field.<name>` keys override a JSON pointer. `#` starts a comment.
    pub fn parse_mapping(text: &str) -> Result<Self> {
        let mut schema = ImportSchema::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| Error::Mapping(format!("line {}: expected `key = value`", n + 1)))?;
            if let Some(field) = key.strip_prefix("field.") {
                let slot = match field {
                    "id" => &mut schema.id,
                    "task_type" => &mut schema.task_type,
                    "scene" => &mut schema.scene,
                    "steps" => &mut schema.steps,
                    "step_action" => &mut schema.step_action,
                    "step_args" => &mut schema.step_args,
                    "annotations" => &mut schema.annotations,
                    "annotation_text" => &mut schema.annotation_text,
                    other => return Err(Error::Mapping(format!("line {}: unknown field `{other}`", n + 1))),
                };
                *slot = value.to_string();
            } else {
                let mapped = if value == "skip" {
                    Mapped::Skip
                } else {
                    Mapped::Action(value.parse().map_err(|e: Error| Error::Mapping(format!("line {}: {e}", n + 1)))?)
                };
                schema.actions.insert(key.to_string(), mapped);
            }
        }
        Ok(schema)
    }

    pub fn read_mapping(path: &Path) -> Result<Self> {
        Self::parse_mapping(&read_text(path)?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IngestLint {
    pub id: String,
    pub index: Option<usize>,
    pub code: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IngestReport {
    pub files: usize,
    pub plans: usize,
    pub records: usize,
    pub lints: Vec<IngestLint>,
}

struct SourcePlan {
    records: Vec<Record>,
    lints: Vec<IngestLint>,
}

fn value_str(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        _ => None,
    }
}

fn import_file(path: &Path, rel: &str, schema: &ImportSchema) -> Result<SourcePlan> {
    let src = |message: String| Error::Source { path: path.to_path_buf(), message };
    let json: Value = serde_json::from_str(&read_text(path)?).map_err(|e| src(e.to_string()))?;
    let plan_id = json.pointer(&schema.id).and_then(value_str).unwrap_or_else(|| rel.to_string());
    let task_type = json.pointer(&schema.task_type).and_then(value_str).unwrap_or_default();
    let scene_id = json.pointer(&schema.scene).and_then(value_str);
    let steps = json
        .pointer(&schema.steps)
        .and_then(Value::as_array)
        .ok_or_else(|| src(format!("missing step list at `{}`", schema.steps)))?;

    let mut triples = Vec::with_capacity(steps.len());
    for (i, step) in steps.iter().enumerate() {
        let name = step
            .pointer(&schema.step_action)
            .and_then(Value::as_str)
            .ok_or_else(|| src(format!("step {i}: missing action at `{}`", schema.step_action)))?;
        let action = match schema.actions.get(name) {
            Some(Mapped::Action(a)) => *a,
            Some(Mapped::Skip) => continue,
            None => return Err(Error::UnmappableAction { action: name.to_string(), plan: plan_id }),
        };
        let args: Vec<Argument> = step
            .pointer(&schema.step_args)
            .and_then(Value::as_array)
            .map(|a| a.as_slice())
            .unwrap_or(&[])
            .iter()
            .map(|v| {
                let s = value_str(v).ok_or_else(|| src(format!("step {i}: non-string argument")))?;
                normalize_argument(&s).map_err(|e| src(format!("step {i}: {e}")))
            })
            .collect::<Result<_>>()?;
        if args.len() > 2 {
            return Err(src(format!("step {i}: {} arguments, at most 2 allowed", args.len())));
        }
        let mut args = args.into_iter();
        triples.push(CommandTriple::new(action, args.next(), args.next()));
    }
    let gold = Plan::new(triples).map_err(|_| src("plan has no mappable steps".to_string()))?;
    let start_location = start_location_of(&gold);

    let annotations = json.pointer(&schema.annotations).and_then(Value::as_array).map(|a| a.as_slice()).unwrap_or(&[]);
    let mut records = Vec::new();
    let mut lints: Vec<IngestLint> = gold
        .lint()
        .into_iter()
        .map(|(index, code)| IngestLint { id: plan_id.clone(), index, code: code.as_str().to_string() })
        .collect();
    for (k, ann) in annotations.iter().enumerate() {
        let directive = ann.pointer(&schema.annotation_text).and_then(Value::as_str).map(str::trim).unwrap_or("");
        let id = format!("{plan_id}:{k}");
        if directive.is_empty() {
            lints.push(IngestLint { id, index: None, code: "empty-directive".into() });
            continue;
        }
        records.push(Record {
            id,
            plan_id: plan_id.clone(),
            task_type: task_type.clone(),
            directive: directive.to_string(),
            gold: gold.clone(),
            start_location: start_location.clone(),
            scene_id: scene_id.clone(),
        });
    }
    if records.is_empty() {
        lints.push(IngestLint { id: plan_id, index: None, code: "no-directives".into() });
    }
    Ok(SourcePlan { records, lints })
}

/// Reads every `*.json` file under `source` (sorted by path) as one plan with
/// its annotator directives. Each directive becomes one record.
pub fn import_external(source: &Path, schema: &ImportSchema) -> Result<(Corpus, IngestReport)> {
    if !source.is_dir() {
        return Err(Error::io(source, std::io::Error::new(std::io::ErrorKind::NotFound, "source directory not found")));
    }
    let mut files: Vec<PathBuf> = Vec::new();
    for entry in WalkDir::new(source).sort_by_file_name() {
        let entry = entry.map_err(|e| Error::Source { path: source.to_path_buf(), message: e.to_string() })?;
        if entry.file_type().is_file() && entry.path().extension().is_some_and(|e| e == "json") {
            files.push(entry.into_path());
        }
    }
    if files.is_empty() {
        return Err(Error::NoSourceFiles(source.to_path_buf()));
    }
    let plans: Vec<SourcePlan> = files
        .par_iter()
        .map(|p| {
            let rel = p.strip_prefix(source).unwrap_or(p).with_extension("");
            import_file(p, &rel.to_string_lossy(), schema)
        })
        .collect::<Result<_>>()?;
    let mut records = Vec::new();
    let mut lints = Vec::new();
    for p in plans {
        records.extend(p.records);
        lints.extend(p.lints);
    }
    let corpus = Corpus::new(records)?;
    let report = IngestReport { files: files.len(), plans: corpus.plan_ids().len(), records: corpus.len(), lints };
    Ok((corpus, report))
}

/// Grouping unit for splits. Records in one group always land in the same split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitUnit {
    /// All paraphrase records of a plan travel together.
    #[default]
    Plan,
    Record,
    /// Group by scene id (records without one fall back to their plan).
    Scene,
}

/// Split sizes and seed. Sizes are used as proportions of the input.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SplitSpec {
    pub sizes: [usize; 3],
    pub seed: u64,
    pub unit: SplitUnit,
}

pub const DEFAULT_SPLIT_SIZES: [usize; 3] = [7793, 5661, 7571];

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec { sizes: DEFAULT_SPLIT_SIZES, seed: 0, unit: SplitUnit::Plan }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Splits {
    pub train: Corpus,
    pub dev: Corpus,
    pub test: Corpus,
}

fn group_key(r: &Record, unit: SplitUnit) -> String {
    match unit {
        SplitUnit::Plan => r.plan_id.clone(),
        SplitUnit::Record => r.id.clone(),
        SplitUnit::Scene => match &r.scene_id {
            Some(s) => format!("scene:{s}"),
            None => format!("plan:{}", r.plan_id),
        },
    }
}

/// Group keys in sorted order with their record counts.
fn groups(corpus: &Corpus, unit: SplitUnit) -> BTreeMap<String, usize> {
    let mut out = BTreeMap::new();
    for r in corpus.records() {
        *out.entry(group_key(r, unit)).or_insert(0) += 1;
    }
    out
}

/// Partitions the corpus into train/dev/test by shuffled groups.
///
/// Groups are visited in seeded random order and each split is filled until
/// it reaches its share of the records; every split gets at least one group.
pub fn split(corpus: &Corpus, spec: &SplitSpec) -> Result<Splits> {
    let total: usize = spec.sizes.iter().sum();
    if spec.sizes.contains(&0) {
        return Err(Error::InvalidSplit(format!("sizes must be positive, got {:?}", spec.sizes)));
    }
    let groups = groups(corpus, spec.unit);
    if groups.len() < 3 {
        return Err(Error::TooFewGroups(groups.len()));
    }
    let mut order: Vec<(&String, usize)> = groups.iter().map(|(k, n)| (k, *n)).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(spec.seed));

    let n = corpus.len() as f64;
    let mut assignment: HashMap<&str, usize> = HashMap::with_capacity(order.len());
    let mut next = 0;
    for (k, size) in spec.sizes.iter().take(2).enumerate() {
        let target = n * *size as f64 / total as f64;
        let later = 2 - k;
        let mut count = 0usize;
        while next < order.len() && order.len() - next > later && (count == 0 || (count as f64) < target) {
            let (key, len) = order[next];
            assignment.insert(key, k);
            count += len;
            next += 1;
        }
    }
    for (key, _) in &order[next..] {
        assignment.insert(key, 2);
    }
    let pick = |k: usize| corpus.filter(|r| assignment[group_key(r, spec.unit).as_str()] == k);
    Ok(Splits { train: pick(0), dev: pick(1), test: pick(2) })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DownsampleSpec {
    pub fraction: f64,
    pub seed: u64,
    pub stratify_by_task: bool,
}

impl DownsampleSpec {
    pub fn new(fraction: f64, seed: u64, stratify_by_task: bool) -> Result<Self> {
        if !(fraction > 0.0 && fraction <= 1.0) {
            return Err(Error::InvalidFraction(fraction));
        }
        Ok(DownsampleSpec { fraction, seed, stratify_by_task })
    }
}

/// Number of groups kept from a stratum of `n` groups.
pub fn kept_groups(fraction: f64, n: usize) -> usize {
    // the epsilon keeps e.g. 0.01 * 400 from rounding up to 5
    ((fraction * n as f64 - 1e-9).ceil() as usize).clamp(1, n.max(1))
}

/// Keeps `ceil(fraction * groups)` plan groups per stratum (at least one).
///
/// Each stratum is ordered by one seeded permutation that does not depend on
/// the fraction, so smaller fractions select subsets of larger ones.
pub fn downsample(train: &Corpus, spec: &DownsampleSpec) -> Result<Corpus> {
    if !(spec.fraction > 0.0 && spec.fraction <= 1.0) {
        return Err(Error::InvalidFraction(spec.fraction));
    }
    let mut strata: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for r in train.records() {
        let stratum = if spec.stratify_by_task { r.task_type.as_str() } else { "" };
        strata.entry(stratum).or_default().insert(r.plan_id.as_str());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut keep: BTreeSet<&str> = BTreeSet::new();
    for plans in strata.values() {
        let mut order: Vec<&str> = plans.iter().copied().collect();
        order.shuffle(&mut rng);
        keep.extend(&order[..kept_groups(spec.fraction, order.len())]);
    }
    Ok(train.filter(|r| keep.contains(r.plan_id.as_str())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(action: Action, a: &str, b: Option<&str>) -> CommandTriple {
        CommandTriple::parse(action, a, b).unwrap()
    }

    fn corpus(groups: usize, per_group: usize, task_types: usize) -> Corpus {
        let mut records = Vec::new();
        for g in 0..groups {
            let plan = Plan::new(vec![t(Action::Goto, &format!("loc{g}"), None), t(Action::Pickup, "mug", None)]).unwrap();
            for k in 0..per_group {
                records.push(Record {
                    id: format!("p{g:04}:{k}"),
                    plan_id: format!("p{g:04}"),
                    task_type: format!("task{}", g % task_types),
                    directive: format!("directive {g} {k}"),
                    start_location: start_location_of(&plan),
                    gold: plan.clone(),
                    scene_id: Some(format!("s{}", g % 5)),
                });
            }
        }
        Corpus::new(records).unwrap()
    }

    #[test]
    fn jsonl_field_layout() {
        let c = corpus(1, 1, 1);
        let line = corpus_to_jsonl(c.records());
        assert_eq!(
            line,
            "{\"id\":\"p0000:0\",\"plan_id\":\"p0000\",\"task_type\":\"task0\",\"directive\":\"directive 0 0\",\"plan\":[{\"action\":\"goto\",\"arg1\":\"loc0\",\"arg2\":null},{\"action\":\"pickup\",\"arg1\":\"mug\",\"arg2\":null}],\"start_location\":\"loc0\",\"scene_id\":\"s0\"}\n"
        );
        let back = parse_corpus(&line, Path::new("x")).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn bad_lines_report_location() {
        let err = parse_corpus("\n{\"id\":1}\n", Path::new("c.jsonl")).unwrap_err();
        assert!(err.to_string().starts_with("c.jsonl:2:"), "{err}");
        let line = "{\"id\":\"a\",\"plan_id\":\"p\",\"task_type\":\"t\",\"directive\":\"d\",\"plan\":[{\"action\":\"dance\",\"arg1\":\"x\",\"arg2\":null}],\"start_location\":null}";
        let err = parse_corpus(line, Path::new("c.jsonl")).unwrap_err();
        assert!(err.to_string().contains("unknown action"), "{err}");
    }

    #[test]
    fn start_location_extraction() {
        let c = corpus(1, 1, 1);
        assert_eq!(extract_start_location(&c.records()[0]).unwrap().text(), "loc0");
        let toggle = Plan::new(vec![t(Action::Toggle, "desk lamp", None)]).unwrap();
        assert_eq!(start_location_of(&toggle), None);
    }

    #[test]
    fn split_six_single_record_groups() {
        let c = corpus(6, 1, 1);
        let s = split(&c, &SplitSpec { sizes: [2, 2, 2], seed: 7, unit: SplitUnit::Plan }).unwrap();
        assert_eq!((s.train.len(), s.dev.len(), s.test.len()), (2, 2, 2));
        let again = split(&c, &SplitSpec { sizes: [2, 2, 2], seed: 7, unit: SplitUnit::Plan }).unwrap();
        assert_eq!(s, again);
    }

    #[test]
    fn split_keeps_groups_together() {
        let c = corpus(50, 3, 7);
        let s = split(&c, &SplitSpec::default()).unwrap();
        let ids = |c: &Corpus| c.plan_ids().into_iter().map(str::to_string).collect::<BTreeSet<_>>();
        assert!(ids(&s.train).is_disjoint(&ids(&s.dev)));
        assert!(ids(&s.train).is_disjoint(&ids(&s.test)));
        assert!(ids(&s.dev).is_disjoint(&ids(&s.test)));
        assert_eq!(s.train.len() + s.dev.len() + s.test.len(), c.len());
    }

    #[test]
    fn split_by_scene_and_record() {
        let c = corpus(20, 2, 1);
        let s = split(&c, &SplitSpec { sizes: [1, 1, 1], seed: 3, unit: SplitUnit::Scene }).unwrap();
        let scenes = |c: &Corpus| c.records().iter().map(|r| r.scene_id.clone()).collect::<BTreeSet<_>>();
        assert!(scenes(&s.train).is_disjoint(&scenes(&s.test)));
        let s = split(&c, &SplitSpec { sizes: [1, 1, 1], seed: 3, unit: SplitUnit::Record }).unwrap();
        assert_eq!(s.train.len() + s.dev.len() + s.test.len(), 40);
    }

    #[test]
    fn split_errors() {
        assert!(matches!(split(&corpus(2, 3, 1), &SplitSpec::default()), Err(Error::TooFewGroups(2))));
        let spec = SplitSpec { sizes: [1, 0, 1], ..SplitSpec::default() };
        assert!(matches!(split(&corpus(5, 1, 1), &spec), Err(Error::InvalidSplit(_))));
    }

    #[test]
    fn downsample_identity_and_minimum() {
        let c = corpus(30, 3, 7);
        let full = downsample(&c, &DownsampleSpec::new(1.0, 1, true).unwrap()).unwrap();
        assert_eq!(full, c);
        let tiny = downsample(&c, &DownsampleSpec::new(0.01, 1, true).unwrap()).unwrap();
        let types: BTreeSet<_> = tiny.records().iter().map(|r| r.task_type.clone()).collect();
        assert_eq!(types.len(), 7);
        assert_eq!(tiny.plan_ids().len(), 7);
        assert!(DownsampleSpec::new(0.0, 1, true).is_err());
        assert!(DownsampleSpec::new(1.5, 1, true).is_err());
    }

    #[test]
    fn kept_group_counts() {
        assert_eq!(kept_groups(0.01, 400), 4);
        assert_eq!(kept_groups(0.10, 400), 40);
        assert_eq!(kept_groups(0.25, 400), 100);
        assert_eq!(kept_groups(0.01, 10), 1);
        assert_eq!(kept_groups(0.3, 10), 3);
        assert_eq!(kept_groups(0.31, 10), 4);
    }

    #[test]
    fn mapping_file_overrides() {
        let s = ImportSchema::parse_mapping("# custom\nWalkTo = goto\nNoOp = skip\nfield.id = /name\n").unwrap();
        assert_eq!(s.actions["WalkTo"], Mapped::Action(Action::Goto));
        assert_eq!(s.actions["GotoLocation"], Mapped::Action(Action::Goto));
        assert_eq!(s.id, "/name");
        assert!(ImportSchema::parse_mapping("Foo = fly").is_err());
        assert!(ImportSchema::parse_mapping("field.nope = /x").is_err());
        assert!(ImportSchema::parse_mapping("nonsense").is_err());
    }
}
