//! Domain types: actions, arguments, command triples, plans, records and corpora.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Words the text templates place around arguments. Argument tokens must not use them.
pub const FILLER_WORDS: [&str; 7] = ["the", "a", "an", "in", "on", "from", "with"];

/// Plans outside this length range are flagged by [`Plan::lint`].
pub const TYPICAL_PLAN_LEN: std::ops::RangeInclusive<usize> = 3..=20;

/// The eight high-level actions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Action {
    Goto,
    Pickup,
    Put,
    Cool,
    Heat,
    Clean,
    Slice,
    Toggle,
}

/// How many arguments an action takes in a given slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arity {
    Required,
    Optional,
    Forbidden,
}

impl Action {
    pub const ALL: [Action; 8] = [
        Action::Goto,
        Action::Pickup,
        Action::Put,
        Action::Cool,
        Action::Heat,
        Action::Clean,
        Action::Slice,
        Action::Toggle,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Action::Goto => "goto",
            Action::Pickup => "pickup",
            Action::Put => "put",
            Action::Cool => "cool",
            Action::Heat => "heat",
            Action::Clean => "clean",
            Action::Slice => "slice",
            Action::Toggle => "toggle",
        }
    }

    /// Arity of the second argument. The first argument is always required.
    pub fn arg2_arity(self) -> Arity {
        match self {
            Action::Put => Arity::Required,
            Action::Pickup | Action::Cool | Action::Heat | Action::Clean | Action::Slice => {
                Arity::Optional
            }
            Action::Goto | Action::Toggle => Arity::Forbidden,
        }
    }

    /// Class of the argument in slot 1 or 2 for this action.
    pub fn arg_class(self, slot: ArgSlot) -> ArgClass {
        match (self, slot) {
            (Action::Goto, ArgSlot::First) => ArgClass::Location,
            (Action::Put | Action::Pickup | Action::Cool | Action::Heat | Action::Clean, ArgSlot::Second) => {
                ArgClass::Receptacle
            }
            _ => ArgClass::Object,
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Action {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Action::ALL
            .iter()
            .copied()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| Error::UnknownAction(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ArgSlot {
    First,
    Second,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArgClass {
    Object,
    Receptacle,
    Location,
    Unconstrained,
}

/// A normalized argument: one or more lowercase word tokens.
///
/// Equality and hashing consider tokens only; the class is positional metadata.
#[derive(Debug, Clone, Eq)]
pub struct Argument {
    tokens: Vec<String>,
    class: ArgClass,
}

impl PartialEq for Argument {
    fn eq(&self, other: &Self) -> bool {
        self.tokens == other.tokens
    }
}

impl std::hash::Hash for Argument {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.tokens.hash(state);
    }
}

fn is_valid_token(tok: &str) -> bool {
    !tok.is_empty()
        && !tok.chars().any(|c| c.is_whitespace() || c.is_uppercase() || matches!(c, '<' | '>' | '[' | ']'))
}

impl Argument {
    /// Builds an argument from already-normalized tokens.
    pub fn from_tokens<I, S>(tokens: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let tokens: Vec<String> = tokens.into_iter().map(Into::into).collect();
        if tokens.is_empty() {
            return Err(Error::EmptyArgument);
        }
        if let Some(bad) = tokens.iter().find(|t| !is_valid_token(t)) {
            return Err(Error::InvalidToken(bad.clone()));
        }
        Ok(Argument { tokens, class: ArgClass::Unconstrained })
    }

    /// Parses raw text with [`normalize_argument`].
    pub fn parse(raw: &str) -> Result<Self> {
        normalize_argument(raw)
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn class(&self) -> ArgClass {
        self.class
    }

    pub fn with_class(mut self, class: ArgClass) -> Self {
        self.class = class;
        self
    }

    pub fn text(&self) -> String {
        self.tokens.join(" ")
    }

    pub fn has_filler(&self) -> bool {
        self.tokens.iter().any(|t| FILLER_WORDS.contains(&t.as_str()))
    }
}

impl fmt::Display for Argument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text())
    }
}

/// Lowercases, splits on whitespace and strips punctuation from token edges.
pub fn normalize_argument(raw: &str) -> Result<Argument> {
    let tokens: Vec<String> = raw
        .split_whitespace()
        .map(|t| {
            t.to_lowercase()
                .trim_matches(|c: char| !c.is_alphanumeric())
                .chars()
                .filter(|c| !matches!(c, '<' | '>' | '[' | ']'))
                .collect::<String>()
        })
        .filter(|t| !t.is_empty())
        .collect();
    if tokens.is_empty() {
        return Err(Error::EmptyArgument);
    }
    Argument::from_tokens(tokens)
}

/// One action with up to two arguments.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CommandTriple {
    pub action: Action,
    pub arg1: Option<Argument>,
    pub arg2: Option<Argument>,
}

/// Machine-readable lint codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LintCode {
    MissingArg1,
    MissingArg2,
    UnexpectedArg2,
    PlanTooShort,
    PlanTooLong,
    FillerWordInArgument,
    StartLocationMismatch,
}

impl LintCode {
    pub fn as_str(self) -> &'static str {
        match self {
            LintCode::MissingArg1 => "missing-arg1",
            LintCode::MissingArg2 => "missing-arg2",
            LintCode::UnexpectedArg2 => "unexpected-arg2",
            LintCode::PlanTooShort => "plan-too-short",
            LintCode::PlanTooLong => "plan-too-long",
            LintCode::FillerWordInArgument => "filler-word-in-argument",
            LintCode::StartLocationMismatch => "start-location-mismatch",
        }
    }
}

impl fmt::Display for LintCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl CommandTriple {
    /// Builds a triple and assigns argument classes from the action and slot.
    /// Arity is not enforced here; see [`validate_triple`].
    pub fn new(action: Action, arg1: Option<Argument>, arg2: Option<Argument>) -> Self {
        CommandTriple {
            action,
            arg1: arg1.map(|a| a.with_class(action.arg_class(ArgSlot::First))),
            arg2: arg2.map(|a| a.with_class(action.arg_class(ArgSlot::Second))),
        }
    }

    /// Convenience constructor from raw argument strings.
    pub fn parse(action: Action, arg1: &str, arg2: Option<&str>) -> Result<Self> {
        let arg1 = normalize_argument(arg1)?;
        let arg2 = arg2.map(normalize_argument).transpose()?;
        Ok(CommandTriple::new(action, Some(arg1), arg2))
    }

    pub fn arg(&self, slot: ArgSlot) -> Option<&Argument> {
        match slot {
            ArgSlot::First => self.arg1.as_ref(),
            ArgSlot::Second => self.arg2.as_ref(),
        }
    }

    pub fn is_valid(&self) -> bool {
        validate_triple(self).is_empty()
    }
}

impl fmt::Display for CommandTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}", self.action)?;
        for arg in [&self.arg1, &self.arg2] {
            match arg {
                Some(a) => write!(f, ", {a}")?,
                None => f.write_str(", -")?,
            }
        }
        f.write_str("}")
    }
}

/// Arity lint for a single triple. Empty means valid.
pub fn validate_triple(t: &CommandTriple) -> Vec<LintCode> {
    let mut findings = Vec::new();
    if t.arg1.is_none() {
        findings.push(LintCode::MissingArg1);
    }
    match (t.action.arg2_arity(), &t.arg2) {
        (Arity::Required, None) => findings.push(LintCode::MissingArg2),
        (Arity::Forbidden, Some(_)) => findings.push(LintCode::UnexpectedArg2),
        _ => {}
    }
    findings
}

/// A nonempty ordered sequence of command triples.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Plan(Vec<CommandTriple>);

impl Plan {
    pub fn new(triples: Vec<CommandTriple>) -> Result<Self> {
        if triples.is_empty() {
            return Err(Error::EmptyPlan);
        }
        Ok(Plan(triples))
    }

    pub fn triples(&self) -> &[CommandTriple] {
        &self.0
    }

    pub fn into_triples(self) -> Vec<CommandTriple> {
        self.0
    }

    pub fn first(&self) -> &CommandTriple {
        &self.0[0]
    }

    /// Lint findings with the offending triple index (`None` for plan-level findings).
    pub fn lint(&self) -> Vec<(Option<usize>, LintCode)> {
        let mut out = Vec::new();
        if self.0.len() < *TYPICAL_PLAN_LEN.start() {
            out.push((None, LintCode::PlanTooShort));
        } else if self.0.len() > *TYPICAL_PLAN_LEN.end() {
            out.push((None, LintCode::PlanTooLong));
        }
        for (i, t) in self.0.iter().enumerate() {
            out.extend(validate_triple(t).into_iter().map(|c| (Some(i), c)));
            if t.arg1.iter().chain(t.arg2.iter()).any(Argument::has_filler) {
                out.push((Some(i), LintCode::FillerWordInArgument));
            }
        }
        out
    }

    /// True when every triple satisfies the arity table.
    pub fn is_well_formed(&self) -> bool {
        self.0.iter().all(CommandTriple::is_valid)
    }
}

impl Deref for Plan {
    type Target = [CommandTriple];

    fn deref(&self) -> &[CommandTriple] {
        &self.0
    }
}

impl fmt::Display for Plan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

/// One directive paired with its gold plan.
#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub id: String,
    pub plan_id: String,
    pub task_type: String,
    pub directive: String,
    pub gold: Plan,
    pub start_location: Option<Argument>,
    /// Opaque scene identifier, carried through when the source provides one.
    pub scene_id: Option<String>,
}

impl Record {
    /// Record lint: plan lints plus start-location consistency.
    pub fn lint(&self) -> Vec<(Option<usize>, LintCode)> {
        let mut out = self.gold.lint();
        if let Some(start) = &self.start_location {
            let first = self.gold.first();
            if first.action == Action::Goto && first.arg1.as_ref() != Some(start) {
                out.push((Some(0), LintCode::StartLocationMismatch));
            }
        }
        out
    }
}

/// Argument vocabularies keyed by class, derived from data.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    by_class: BTreeMap<ArgClass, BTreeSet<Vec<String>>>,
}

impl Vocabulary {
    pub fn from_records<'a>(records: impl IntoIterator<Item = &'a Record>) -> Self {
        let mut by_class: BTreeMap<ArgClass, BTreeSet<Vec<String>>> = BTreeMap::new();
        for r in records {
            for t in r.gold.iter() {
                for a in t.arg1.iter().chain(t.arg2.iter()) {
                    by_class.entry(a.class()).or_default().insert(a.tokens().to_vec());
                }
            }
        }
        Vocabulary { by_class }
    }

    pub fn class(&self, class: ArgClass) -> impl Iterator<Item = &Vec<String>> {
        self.by_class.get(&class).into_iter().flatten()
    }

    pub fn classes_of(&self, item: &[String]) -> BTreeSet<ArgClass> {
        self.by_class
            .iter()
            .filter(|(_, items)| items.contains(item))
            .map(|(c, _)| *c)
            .collect()
    }

    /// All items of any class, deduplicated.
    pub fn items(&self) -> BTreeSet<&Vec<String>> {
        self.by_class.values().flatten().collect()
    }

    pub fn len(&self, class: ArgClass) -> usize {
        self.by_class.get(&class).map_or(0, BTreeSet::len)
    }

    pub fn is_empty(&self) -> bool {
        self.by_class.values().all(BTreeSet::is_empty)
    }
}

/// A validated collection of records with derived vocabularies.
#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    records: Vec<Record>,
    vocab: Vocabulary,
}

impl Corpus {
    /// Checks id uniqueness and that records sharing a `plan_id` share the gold plan.
    pub fn new(records: Vec<Record>) -> Result<Self> {
        let mut ids = HashSet::with_capacity(records.len());
        let mut plans: HashMap<&str, &Plan> = HashMap::new();
        for r in &records {
            if !ids.insert(r.id.as_str()) {
                return Err(Error::DuplicateId(r.id.clone()));
            }
            if let Some(existing) = plans.insert(r.plan_id.as_str(), &r.gold) {
                if existing != &r.gold {
                    return Err(Error::InconsistentPlanGroup(r.plan_id.clone()));
                }
            }
        }
        let vocab = Vocabulary::from_records(&records);
        Ok(Corpus { records, vocab })
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub fn into_records(self) -> Vec<Record> {
        self.records
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Distinct plan ids in first-appearance order.
    pub fn plan_ids(&self) -> Vec<&str> {
        let mut seen = HashSet::new();
        self.records
            .iter()
            .map(|r| r.plan_id.as_str())
            .filter(|p| seen.insert(*p))
            .collect()
    }

    pub fn get(&self, id: &str) -> Option<&Record> {
        self.records.iter().find(|r| r.id == id)
    }

    /// Keeps records matching the predicate, rebuilding vocabularies.
    pub fn filter(&self, mut keep: impl FnMut(&Record) -> bool) -> Corpus {
        let records: Vec<Record> = self.records.iter().filter(|r| keep(r)).cloned().collect();
        let vocab = Vocabulary::from_records(&records);
        Corpus { records, vocab }
    }

    /// All record lints, keyed by record id.
    pub fn lint(&self) -> Vec<(String, Option<usize>, LintCode)> {
        self.records
            .iter()
            .flat_map(|r| r.lint().into_iter().map(move |(i, c)| (r.id.clone(), i, c)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arg(s: &str) -> Argument {
        normalize_argument(s).unwrap()
    }

    #[test]
    fn put_spoon_mug_is_valid() {
        let t = CommandTriple::parse(Action::Put, "spoon", Some("mug")).unwrap();
        assert!(validate_triple(&t).is_empty());
    }

    #[test]
    fn goto_without_arg2_is_valid() {
        let t = CommandTriple::parse(Action::Goto, "countertop", None).unwrap();
        assert!(validate_triple(&t).is_empty());
    }

    #[test]
    fn put_without_arg2_is_flagged() {
        let t = CommandTriple::parse(Action::Put, "spoon", None).unwrap();
        assert_eq!(validate_triple(&t), vec![LintCode::MissingArg2]);
        assert_eq!(LintCode::MissingArg2.to_string(), "missing-arg2");
    }

    #[test]
    fn arity_table() {
        let goto2 = CommandTriple::new(Action::Goto, Some(arg("a")), Some(arg("b")));
        assert_eq!(validate_triple(&goto2), vec![LintCode::UnexpectedArg2]);
        let no_arg = CommandTriple::new(Action::Toggle, None, None);
        assert_eq!(validate_triple(&no_arg), vec![LintCode::MissingArg1]);
        for a in [Action::Pickup, Action::Cool, Action::Heat, Action::Clean, Action::Slice] {
            assert!(CommandTriple::new(a, Some(arg("x")), None).is_valid());
            assert!(CommandTriple::new(a, Some(arg("x")), Some(arg("y"))).is_valid());
        }
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(arg("Butter Knife").tokens(), ["butter", "knife"]);
        assert_eq!(arg("desk lamp ").tokens(), ["desk", "lamp"]);
        assert_eq!(arg("\"Apple,\"").tokens(), ["apple"]);
        assert!(matches!(normalize_argument("  "), Err(Error::EmptyArgument)));
        assert!(matches!(normalize_argument(" ... "), Err(Error::EmptyArgument)));
    }

    #[test]
    fn action_names_are_closed() {
        for a in Action::ALL {
            assert_eq!(a.as_str().parse::<Action>().unwrap(), a);
        }
        assert!("dance".parse::<Action>().is_err());
        assert!("Goto".parse::<Action>().is_err());
    }

    #[test]
    fn classes_follow_position() {
        let t = CommandTriple::parse(Action::Put, "spoon", Some("mug")).unwrap();
        assert_eq!(t.arg1.as_ref().unwrap().class(), ArgClass::Object);
        assert_eq!(t.arg2.as_ref().unwrap().class(), ArgClass::Receptacle);
        let g = CommandTriple::parse(Action::Goto, "countertop", None).unwrap();
        assert_eq!(g.arg1.as_ref().unwrap().class(), ArgClass::Location);
        let s = CommandTriple::parse(Action::Slice, "apple", Some("knife")).unwrap();
        assert_eq!(s.arg2.as_ref().unwrap().class(), ArgClass::Object);
    }

    #[test]
    fn empty_plan_rejected() {
        assert!(matches!(Plan::new(vec![]), Err(Error::EmptyPlan)));
    }

    #[test]
    fn plan_length_lint() {
        let t = CommandTriple::parse(Action::Goto, "desk", None).unwrap();
        let short = Plan::new(vec![t.clone()]).unwrap();
        assert_eq!(short.lint(), vec![(None, LintCode::PlanTooShort)]);
        let long = Plan::new(vec![t; 21]).unwrap();
        assert_eq!(long.lint(), vec![(None, LintCode::PlanTooLong)]);
    }

    fn record(id: &str, plan_id: &str, gold: Plan) -> Record {
        Record {
            id: id.into(),
            plan_id: plan_id.into(),
            task_type: "t".into(),
            directive: "d".into(),
            start_location: None,
            gold,
            scene_id: None,
        }
    }

    #[test]
    fn corpus_rejects_duplicates_and_inconsistent_groups() {
        let p1 = Plan::new(vec![CommandTriple::parse(Action::Goto, "desk", None).unwrap()]).unwrap();
        let p2 = Plan::new(vec![CommandTriple::parse(Action::Goto, "sofa", None).unwrap()]).unwrap();
        assert!(matches!(
            Corpus::new(vec![record("a", "p", p1.clone()), record("a", "q", p1.clone())]),
            Err(Error::DuplicateId(_))
        ));
        assert!(matches!(
            Corpus::new(vec![record("a", "p", p1.clone()), record("b", "p", p2.clone())]),
            Err(Error::InconsistentPlanGroup(_))
        ));
        let c = Corpus::new(vec![record("a", "p", p1), record("b", "q", p2)]).unwrap();
        assert_eq!(c.vocab().len(ArgClass::Location), 2);
        assert_eq!(c.plan_ids(), ["p", "q"]);
    }

    #[test]
    fn vocabulary_is_union_by_class() {
        let plan = Plan::new(vec![
            CommandTriple::parse(Action::Goto, "countertop", None).unwrap(),
            CommandTriple::parse(Action::Pickup, "mug", None).unwrap(),
            CommandTriple::parse(Action::Put, "spoon", Some("mug")).unwrap(),
        ])
        .unwrap();
        let c = Corpus::new(vec![record("a", "p", plan)]).unwrap();
        let objects: Vec<_> = c.vocab().class(ArgClass::Object).cloned().collect();
        assert_eq!(objects, vec![vec!["mug".to_string()], vec!["spoon".to_string()]]);
        let mug = vec!["mug".to_string()];
        assert_eq!(
            c.vocab().classes_of(&mug),
            BTreeSet::from([ArgClass::Object, ArgClass::Receptacle])
        );
        assert_eq!(Vocabulary::from_records(c.records()), *c.vocab());
    }

    #[test]
    fn start_location_mismatch_is_linted() {
        let plan = Plan::new(vec![CommandTriple::parse(Action::Goto, "desk", None).unwrap()]).unwrap();
        let mut r = record("a", "p", plan);
        r.start_location = Some(arg("sofa"));
        assert!(r.lint().contains(&(Some(0), LintCode::StartLocationMismatch)));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn normalize_is_idempotent(raw in "[ A-Za-z0-9,.!'\\-<>\\[\\]]{1,30}") {
                if let Ok(a) = normalize_argument(&raw) {
                    let again = normalize_argument(&a.text()).unwrap();
                    prop_assert_eq!(again.tokens(), a.tokens());
                }
            }
        }
    }
}
