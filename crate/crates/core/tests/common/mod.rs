//! Reference implementations and generators shared by the integration tests
//! and the acceptance harness. The oracles work on plain strings and never
//! call into the scorer or aligner they check.

#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::{BTreeMap, BTreeSet};

use plankit::plan::normalize_argument;
use plankit::{Action, CommandTriple, Plan, Record};
use rand::seq::SliceRandom;
use rand::Rng;

/// `(action, arg1, arg2)` with arguments as space-joined token strings.
pub type Raw = (String, Option<String>, Option<String>);

pub fn raw(t: &CommandTriple) -> Raw {
    (t.action.as_str().to_string(), t.arg1.as_ref().map(|a| a.text()), t.arg2.as_ref().map(|a| a.text()))
}

pub fn tri(action: Action, a: &str, b: Option<&str>) -> CommandTriple {
    CommandTriple::parse(action, a, b).expect("valid triple")
}

pub fn record(id: &str, task: &str, directive: &str, gold: Vec<CommandTriple>) -> Record {
    Record {
        id: id.into(),
        plan_id: id.into(),
        task_type: task.into(),
        directive: directive.into(),
        gold: Plan::new(gold).expect("nonempty gold"),
        start_location: None,
        scene_id: None,
    }
}

fn arg_eq(g: &Option<String>, p: &Option<String>, permissive: bool) -> bool {
    match (g, p) {
        (None, None) => true,
        (Some(g), Some(p)) if permissive => {
            let gs: BTreeSet<&str> = g.split(' ').collect();
            p.split(' ').any(|t| gs.contains(t))
        }
        (Some(g), Some(p)) => g == p,
        _ => false,
    }
}

fn triple_eq(g: &Raw, p: &Raw, permissive: bool) -> bool {
    g.0 == p.0 && arg_eq(&g.1, &p.1, permissive) && arg_eq(&g.2, &p.2, permissive)
}

/// Hit and total counts for every scored cell.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Tally {
    pub command: (u64, u64),
    pub arg1: (u64, u64),
    pub arg2: (u64, u64),
    pub triple: (u64, u64),
    pub full_sequence: (u64, u64),
    pub full_minus_first: (u64, u64),
    pub per_command: BTreeMap<String, (u64, u64)>,
}

fn bump(cell: &mut (u64, u64), hit: bool) {
    cell.0 += hit as u64;
    cell.1 += 1;
}

/// Brute-force scorer: walks gold positions one by one.
pub fn oracle_tally(pairs: &[(Vec<Raw>, Vec<Raw>)], permissive: bool) -> Tally {
    let mut t = Tally::default();
    for (gold, pred) in pairs {
        oracle_add(&mut t, gold, pred, permissive);
    }
    t
}

pub fn oracle_pair(gold: &[Raw], pred: &[Raw], permissive: bool) -> Tally {
    let mut t = Tally::default();
    oracle_add(&mut t, gold, pred, permissive);
    t
}

fn oracle_add(t: &mut Tally, gold: &[Raw], pred: &[Raw], permissive: bool) {
    {
        for i in 0..gold.len() {
            let g = &gold[i];
            let p = pred.get(i);
            bump(&mut t.command, p.is_some_and(|p| p.0 == g.0));
            if g.1.is_some() {
                bump(&mut t.arg1, p.is_some_and(|p| arg_eq(&g.1, &p.1, permissive)));
            }
            if g.2.is_some() {
                bump(&mut t.arg2, p.is_some_and(|p| arg_eq(&g.2, &p.2, permissive)));
            }
            let hit = p.is_some_and(|p| triple_eq(g, p, permissive));
            bump(&mut t.triple, hit);
            bump(t.per_command.entry(g.0.clone()).or_default(), hit);
        }
        let mut all = gold.len() == pred.len();
        for i in 0..gold.len().min(pred.len()) {
            all &= triple_eq(&gold[i], &pred[i], permissive);
        }
        bump(&mut t.full_sequence, all);
        let mut rest = gold.len() == pred.len() || (gold.len() <= 1 && pred.len() <= 1);
        for i in 1..gold.len().min(pred.len()) {
            rest &= triple_eq(&gold[i], &pred[i], permissive);
        }
        bump(&mut t.full_minus_first, rest);
    }
}

/// Tally of the library's report for one mode, in the oracle's shape.
pub fn report_tally(cells: &plankit::scoring::ModeScores) -> Tally {
    let f = |x: &plankit::scoring::Fraction| (x.numerator, x.denominator);
    Tally {
        command: f(&cells.command),
        arg1: f(&cells.arg1),
        arg2: f(&cells.arg2),
        triple: f(&cells.triple),
        full_sequence: f(&cells.full_sequence),
        full_minus_first: f(&cells.full_minus_first),
        per_command: cells
            .per_command
            .iter()
            .filter(|(_, v)| v.denominator > 0)
            .map(|(a, v)| (a.as_str().to_string(), f(v)))
            .collect(),
    }
}

/// Textbook Wagner-Fischer edit distance with unit costs.
pub fn levenshtein<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut d = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for (i, row) in d.iter_mut().enumerate() {
        row[0] = i;
    }
    for j in 0..=b.len() {
        d[0][j] = j;
    }
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            let sub = d[i - 1][j - 1] + (a[i - 1] != b[j - 1]) as usize;
            d[i][j] = sub.min(d[i - 1][j] + 1).min(d[i][j - 1] + 1);
        }
    }
    d[a.len()][b.len()]
}

/// All sequences over `alphabet` with length in `lengths`.
pub fn sequences<T: Clone>(alphabet: &[T], lengths: std::ops::RangeInclusive<usize>) -> Vec<Vec<T>> {
    let mut out = Vec::new();
    let mut layer: Vec<Vec<T>> = vec![vec![]];
    for len in 0..=*lengths.end() {
        if lengths.contains(&len) {
            out.extend(layer.iter().cloned());
        }
        layer = layer
            .iter()
            .flat_map(|s| alphabet.iter().map(move |x| {
                let mut s = s.clone();
                s.push(x.clone());
                s
            }))
            .collect();
    }
    out
}

const SYLLABLES: [&str; 12] = ["ka", "lo", "mi", "ne", "ru", "sa", "to", "vi", "ze", "bo", "du", "fe"];

/// A random lowercase word that is never a filler word or a tag.
pub fn random_word<R: Rng>(rng: &mut R) -> String {
    let n = rng.gen_range(1..=3);
    let mut w: String = (0..n).map(|_| *SYLLABLES.choose(rng).unwrap()).collect();
    if rng.gen_bool(0.2) {
        w.push_str(&rng.gen_range(0..10).to_string());
    }
    w
}

/// A random argument vocabulary of 1-3 token phrases. Adjacent words never
/// repeat, since repair collapses doubled tokens.
pub fn random_vocab<R: Rng>(rng: &mut R, size: usize) -> Vec<String> {
    (0..size)
        .map(|_| {
            let mut words: Vec<String> = Vec::new();
            while words.len() < rng.gen_range(1..=3) {
                let w = random_word(rng);
                if words.last() != Some(&w) {
                    words.push(w);
                }
            }
            words.join(" ")
        })
        .collect()
}

/// A random arity-valid triple drawing arguments from `vocab`.
pub fn random_triple<R: Rng>(rng: &mut R, vocab: &[String]) -> CommandTriple {
    use plankit::plan::Arity;
    let action = *Action::ALL.choose(rng).unwrap();
    let arg2 = match action.arg2_arity() {
        Arity::Required => true,
        Arity::Optional => rng.gen_bool(0.5),
        Arity::Forbidden => false,
    };
    let pick = |rng: &mut R| normalize_argument(vocab.choose(rng).unwrap()).unwrap();
    let a1 = pick(rng);
    let a2 = arg2.then(|| pick(rng));
    CommandTriple::new(action, Some(a1), a2)
}

pub fn random_plan<R: Rng>(rng: &mut R, vocab: &[String], lengths: std::ops::RangeInclusive<usize>) -> Vec<CommandTriple> {
    let n = rng.gen_range(lengths);
    (0..n).map(|_| random_triple(rng, vocab)).collect()
}

/// Dense TF-IDF cosine nearest neighbor by a full scan; returns every
/// similarity so callers can check ties.
pub fn brute_force_similarities(train: &[(String, String)], query: &str) -> Vec<(String, f64)> {
    let tok = |s: &str| -> Vec<String> {
        s.split(|c: char| !c.is_alphanumeric()).filter(|t| !t.is_empty()).map(|t| t.to_lowercase()).collect()
    };
    let docs: Vec<Vec<String>> = train.iter().map(|(_, d)| tok(d)).collect();
    let vocab: BTreeSet<&String> = docs.iter().flatten().collect();
    let vocab: Vec<&String> = vocab.into_iter().collect();
    let n = docs.len() as f64;
    let idf: Vec<f64> = vocab
        .iter()
        .map(|term| {
            let df = docs.iter().filter(|d| d.contains(term)).count() as f64;
            ((1.0 + n) / (1.0 + df)).ln() + 1.0
        })
        .collect();
    let dense = |toks: &[String]| -> Vec<f64> {
        let v: Vec<f64> =
            vocab.iter().zip(&idf).map(|(term, w)| toks.iter().filter(|t| t == term).count() as f64 * w).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 { v } else { v.iter().map(|x| x / norm).collect() }
    };
    let q = dense(&tok(query));
    train
        .iter()
        .zip(&docs)
        .map(|((id, _), d)| (id.clone(), dense(d).iter().zip(&q).map(|(a, b)| a * b).sum()))
        .collect()
}

/// One pair's positionwise outcome folded into a tally.
pub fn plan_scores_tally(gold: &[CommandTriple], s: &plankit::scoring::PlanScores) -> Tally {
    let mut t = Tally::default();
    s.command.iter().for_each(|&b| bump(&mut t.command, b));
    s.arg1.iter().flatten().for_each(|&b| bump(&mut t.arg1, b));
    s.arg2.iter().flatten().for_each(|&b| bump(&mut t.arg2, b));
    for (g, &b) in gold.iter().zip(&s.triple) {
        bump(&mut t.triple, b);
        bump(t.per_command.entry(g.action.as_str().to_string()).or_default(), b);
    }
    bump(&mut t.full_sequence, s.full_sequence);
    bump(&mut t.full_minus_first, s.full_minus_first);
    t
}

/// Runs the library aggregator over `pairs`, one record per pair.
pub fn aggregate_tally(pairs: &[(Vec<CommandTriple>, Vec<CommandTriple>)], mode: plankit::MatchMode) -> Tally {
    let records: Vec<Record> =
        pairs.iter().enumerate().map(|(i, (g, _))| record(&format!("r{i:06}"), "t", "", g.clone())).collect();
    let preds: Vec<(String, &[CommandTriple])> =
        pairs.iter().enumerate().map(|(i, (_, p))| (format!("r{i:06}"), p.as_slice())).collect();
    let opts = plankit::ScoreOptions { modes: vec![mode], ..Default::default() };
    let report = plankit::aggregate(&records, preds.iter().map(|(id, p)| (id.as_str(), *p)), &opts).expect("scored");
    report_tally(&report.modes[&mode])
}

/// Five triples over the tokens butter, knife, desk, lamp and mug, chosen so
/// strict and permissive matching disagree.
pub fn scoring_alphabet() -> Vec<CommandTriple> {
    vec![
        tri(Action::Pickup, "butter knife", None),
        tri(Action::Pickup, "knife", None),
        tri(Action::Put, "knife", Some("desk")),
        tri(Action::Put, "butter knife", Some("desk lamp")),
        tri(Action::Toggle, "lamp", None),
    ]
}

/// Three triples for the alignment oracle: two share an action and one argument.
pub fn alignment_alphabet() -> Vec<CommandTriple> {
    vec![tri(Action::Goto, "desk", None), tri(Action::Goto, "sofa", None), tri(Action::Pickup, "mug", None)]
}

const FUZZ_POOL: [&str; 24] = [
    "go", "to", "pick", "up", "put", "heat", "cool", "clean", "slice", "toggle", "<arg1>", "<arg2>", "the", "a", "in",
    "on", "from", "with", "[SEP]", "[CSEP]", "[EOS]", "mug", "desk", "lamp",
];

/// A random token soup biased toward the format's keywords.
pub fn fuzz_string<R: Rng>(rng: &mut R) -> String {
    let n = rng.gen_range(0..=30);
    let mut toks: Vec<String> = (0..n)
        .map(|_| if rng.gen_bool(0.85) { FUZZ_POOL.choose(rng).unwrap().to_string() } else { random_word(rng) })
        .collect();
    if rng.gen_bool(0.3) {
        let at = rng.gen_range(0..=toks.len());
        toks.insert(at, "  ".into());
    }
    toks.join(if rng.gen_bool(0.1) { "  " } else { " " })
}

/// Damage kinds a generator typically produces, each recoverable by repair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Corruption {
    /// Repeat one structural token (phrase word, tag, article, preposition, delimiter).
    DoubleToken,
    DropUp,
    DropTo,
    DropArg1,
    DropPutArg2,
}

pub const CORRUPTIONS: [Corruption; 5] =
    [Corruption::DoubleToken, Corruption::DropUp, Corruption::DropTo, Corruption::DropArg1, Corruption::DropPutArg2];

/// Applies `kind` at a random eligible position of the continuation after
/// `[SEP]`. Returns `None` when the text has no eligible position.
pub fn corrupt<R: Rng>(rng: &mut R, text: &str, kind: Corruption) -> Option<String> {
    let toks: Vec<&str> = text.split_whitespace().collect();
    let sep = toks.iter().position(|t| *t == "[SEP]")?;
    let body = sep + 1..toks.len();
    let candidates: Vec<usize> = body
        .filter(|&i| match kind {
            Corruption::DoubleToken => doubling_target(&toks, i),
            Corruption::DropUp => toks[i] == "up" && toks[i - 1] == "pick",
            Corruption::DropTo => toks[i] == "to" && toks[i - 1] == "go",
            Corruption::DropArg1 => toks[i] == "<arg1>",
            Corruption::DropPutArg2 => toks[i] == "<arg2>" && segment_action(&toks, i) == "put",
        })
        .collect();
    let &i = candidates.choose(rng)?;
    let mut out: Vec<&str> = toks.clone();
    match kind {
        Corruption::DoubleToken => out.insert(i, toks[i]),
        _ => {
            out.remove(i);
        }
    }
    Some(out.join(" "))
}

/// Whether doubling token `i` is pure noise: a delimiter, a tag, an action
/// phrase word, or the article/preposition right after a tag. Argument tokens
/// are excluded because a doubled argument word still parses cleanly.
fn doubling_target(toks: &[&str], i: usize) -> bool {
    let tok = toks[i];
    if tok.starts_with('[') || tok.starts_with('<') {
        return true;
    }
    let mut j = i;
    while j > 0 && !matches!(toks[j - 1], "[CSEP]" | "[SEP]" | "<arg1>" | "<arg2>") {
        j -= 1;
    }
    if j == 0 || matches!(toks[j - 1], "[CSEP]" | "[SEP]") {
        return true;
    }
    toks[j..=i].iter().all(|t| ["the", "in", "on", "from", "with"].contains(t))
}

fn segment_action<'a>(toks: &[&'a str], i: usize) -> &'a str {
    let mut j = i;
    while j > 0 && toks[j - 1] != "[CSEP]" && toks[j - 1] != "[SEP]" {
        j -= 1;
    }
    toks[j]
}

/// Keeps the first plan for each bag of words of its template-0 directive, so
/// every directive identifies exactly one plan.
pub fn unique_by_directive(plans: Vec<plankit::synth::SynthPlan>) -> Vec<plankit::synth::SynthPlan> {
    let mut seen = BTreeSet::new();
    plans
        .into_iter()
        .filter(|p| {
            let mut bag = plankit::baseline::directive_tokens(&p.directive(0));
            bag.sort();
            seen.insert(bag)
        })
        .collect()
}
