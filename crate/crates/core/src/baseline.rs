//! Nearest-neighbor retrieval planner.
//!
//! Directives are embedded as TF-IDF vectors; a query returns the gold plan of
//! the most similar training directive. Optional refinements swap arguments
//! that the directives disagree on and condition the plan on a known start
//! location.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;

use crate::dataset::Prediction;
use crate::error::{Error, Result};
use crate::plan::{Action, Argument, CommandTriple, Corpus, Plan, Record, Vocabulary};

pub const FLAG_FALLBACK: &str = "fallback";
pub const FLAG_SUBSTITUTED: &str = "substituted";
pub const FLAG_CONDITIONED: &str = "conditioned";

/// Lowercased alphanumeric tokens.
pub fn directive_tokens(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

/// Unit-normalized sparse vector, sorted by term id.
type SparseVec = Vec<(usize, f64)>;

#[derive(Debug, Clone, PartialEq)]
pub struct DirectiveIndex {
    /// Training records sorted by id.
    ids: Vec<String>,
    plans: Vec<Plan>,
    directives: Vec<String>,
    terms: BTreeMap<String, usize>,
    idf: Vec<f64>,
    vectors: Vec<SparseVec>,
    postings: Vec<Vec<(usize, f64)>>,
    fallback: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Retrieval {
    pub plan: Plan,
    pub neighbor_id: String,
    pub similarity: f64,
    /// The directive shared no terms with the index; the modal plan was returned.
    pub fallback: bool,
}

fn normalize(mut v: SparseVec) -> SparseVec {
    let norm = v.iter().map(|(_, w)| w * w).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|(_, w)| *w /= norm);
    }
    v
}

impl DirectiveIndex {
    pub fn build(train: &Corpus) -> Result<Self> {
        if train.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let mut records: Vec<&Record> = train.records().iter().collect();
        records.sort_by(|a, b| a.id.cmp(&b.id));
        let tokenized: Vec<Vec<String>> = records.iter().map(|r| directive_tokens(&r.directive)).collect();

        let mut df: BTreeMap<&str, usize> = BTreeMap::new();
        for toks in &tokenized {
            for t in toks.iter().map(String::as_str).collect::<BTreeSet<_>>() {
                *df.entry(t).or_default() += 1;
            }
        }
        let terms: BTreeMap<String, usize> = df.keys().enumerate().map(|(i, t)| (t.to_string(), i)).collect();
        let n = records.len() as f64;
        let idf: Vec<f64> = df.values().map(|&d| ((1.0 + n) / (1.0 + d as f64)).ln() + 1.0).collect();

        let mut postings = vec![Vec::new(); terms.len()];
        let vectors: Vec<SparseVec> = tokenized
            .iter()
            .map(|toks| {
                let mut tf: BTreeMap<usize, f64> = BTreeMap::new();
                for t in toks {
                    *tf.entry(terms[t]).or_default() += 1.0;
                }
                normalize(tf.into_iter().map(|(t, c)| (t, c * idf[t])).collect())
            })
            .collect();
        for (doc, v) in vectors.iter().enumerate() {
            for &(t, w) in v {
                postings[t].push((doc, w));
            }
        }

        // modal plan; ties go to the plan whose first record id is smallest
        let mut counts: HashMap<&Plan, (usize, usize)> = HashMap::new();
        for (i, r) in records.iter().enumerate() {
            counts.entry(&r.gold).or_insert((0, i)).0 += 1;
        }
        let fallback = counts
            .values()
            .max_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)))
            .map(|(_, first)| *first)
            .expect("nonempty");

        Ok(DirectiveIndex {
            ids: records.iter().map(|r| r.id.clone()).collect(),
            plans: records.iter().map(|r| r.gold.clone()).collect(),
            directives: records.iter().map(|r| r.directive.clone()).collect(),
            terms,
            idf,
            vectors,
            postings,
            fallback,
        })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    /// Training directive for a record id.
    pub fn directive(&self, id: &str) -> Option<&str> {
        self.ids.binary_search_by(|x| x.as_str().cmp(id)).ok().map(|i| self.directives[i].as_str())
    }

    /// TF-IDF vector of arbitrary text over the index vocabulary; unknown terms are ignored.
    pub fn embed(&self, text: &str) -> Vec<(usize, f64)> {
        let mut tf: BTreeMap<usize, f64> = BTreeMap::new();
        for t in directive_tokens(text) {
            if let Some(&id) = self.terms.get(&t) {
                *tf.entry(id).or_default() += 1.0;
            }
        }
        normalize(tf.into_iter().map(|(t, c)| (t, c * self.idf[t])).collect())
    }

    /// Stored vector of the training record at sorted position `doc`.
    pub fn vector(&self, doc: usize) -> &[(usize, f64)] {
        &self.vectors[doc]
    }

    pub fn predict(&self, directive: &str) -> Retrieval {
        let query = self.embed(directive);
        let mut scores = vec![0.0f64; self.ids.len()];
        for &(t, qw) in &query {
            for &(doc, dw) in &self.postings[t] {
                scores[doc] += qw * dw;
            }
        }
        let mut best: Option<(usize, f64)> = None;
        for (doc, &s) in scores.iter().enumerate() {
            if s > 0.0 && best.is_none_or(|(_, b)| s > b) {
                best = Some((doc, s));
            }
        }
        match best {
            Some((doc, similarity)) => Retrieval {
                plan: self.plans[doc].clone(),
                neighbor_id: self.ids[doc].clone(),
                similarity,
                fallback: false,
            },
            None => Retrieval {
                plan: self.plans[self.fallback].clone(),
                neighbor_id: self.ids[self.fallback].clone(),
                similarity: 0.0,
                fallback: true,
            },
        }
    }
}

/// Vocabulary items with at least one occurrence in `tokens` that is not
/// strictly inside a longer item's occurrence.
fn maximal_items<'v>(tokens: &[String], items: &BTreeSet<&'v Vec<String>>) -> BTreeSet<&'v Vec<String>> {
    let mut spans: Vec<(usize, usize, &Vec<String>)> = Vec::new();
    for item in items {
        if item.is_empty() || item.len() > tokens.len() {
            continue;
        }
        for start in 0..=tokens.len() - item.len() {
            if tokens[start..start + item.len()] == item[..] {
                spans.push((start, start + item.len(), item));
            }
        }
    }
    spans
        .iter()
        .filter(|(s, e, _)| !spans.iter().any(|(s2, e2, _)| s2 <= s && e <= e2 && (e2 - s2) > (e - s)))
        .map(|(_, _, item)| *item)
        .collect()
}

/// Replaces arguments the retrieved plan borrowed from its training directive
/// when the test directive unambiguously names a different item of the same class.
///
/// Returns the plan and whether anything changed.
pub fn substitute_arguments(plan: &Plan, train_directive: &str, test_directive: &str, vocab: &Vocabulary) -> (Plan, bool) {
    let items = vocab.items();
    let train = maximal_items(&directive_tokens(train_directive), &items);
    let test = maximal_items(&directive_tokens(test_directive), &items);

    let mut mapping: BTreeMap<&Vec<String>, &Vec<String>> = BTreeMap::new();
    for &old in train.difference(&test) {
        let classes = vocab.classes_of(old);
        let candidates: Vec<&Vec<String>> = test
            .difference(&train)
            .copied()
            .filter(|new| !vocab.classes_of(new).is_disjoint(&classes))
            .collect();
        if let [new] = candidates[..] {
            mapping.insert(old, new);
        }
    }
    if mapping.is_empty() {
        return (plan.clone(), false);
    }

    let swap = |a: &Option<Argument>| -> Option<Argument> {
        a.as_ref().map(|a| match mapping.get(&a.tokens().to_vec()) {
            Some(new) => Argument::from_tokens(new.iter().cloned()).expect("vocabulary items are valid"),
            None => a.clone(),
        })
    };
    let triples: Vec<CommandTriple> =
        plan.iter().map(|t| CommandTriple::new(t.action, swap(&t.arg1), swap(&t.arg2))).collect();
    let out = Plan::new(triples).expect("same length as input");
    let changed = out != *plan;
    (out, changed)
}

/// Forces the plan to begin at `start`: replaces the first goto's location or
/// prepends a goto.
pub fn condition_on_start(plan: &Plan, start: &Argument) -> Plan {
    let mut triples = plan.triples().to_vec();
    if triples[0].action == Action::Goto {
        triples[0] = CommandTriple::new(Action::Goto, Some(start.clone()), None);
    } else {
        triples.insert(0, CommandTriple::new(Action::Goto, Some(start.clone()), None));
    }
    Plan::new(triples).expect("nonempty")
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PlannerOptions {
    pub condition_start: bool,
    pub substitute_args: bool,
}

/// Retrieval planner over a training corpus.
#[derive(Debug, Clone)]
pub struct BaselinePlanner {
    index: DirectiveIndex,
    vocab: Vocabulary,
    options: PlannerOptions,
}

impl BaselinePlanner {
    pub fn new(train: &Corpus, options: PlannerOptions) -> Result<Self> {
        Ok(BaselinePlanner { index: DirectiveIndex::build(train)?, vocab: train.vocab().clone(), options })
    }

    pub fn index(&self) -> &DirectiveIndex {
        &self.index
    }

    pub fn predict_record(&self, record: &Record) -> Prediction {
        let hit = self.index.predict(&record.directive);
        let mut flags = Vec::new();
        if hit.fallback {
            flags.push(FLAG_FALLBACK.to_string());
        }
        let mut plan = hit.plan;
        if self.options.substitute_args {
            let train_directive = self.index.directive(&hit.neighbor_id).expect("neighbor is indexed");
            let (p, changed) = substitute_arguments(&plan, train_directive, &record.directive, &self.vocab);
            if changed {
                flags.push(FLAG_SUBSTITUTED.to_string());
            }
            plan = p;
        }
        if self.options.condition_start {
            if let Some(start) = &record.start_location {
                plan = condition_on_start(&plan, start);
                flags.push(FLAG_CONDITIONED.to_string());
            }
        }
        Prediction {
            id: record.id.clone(),
            plan: plan.into_triples(),
            neighbor_id: Some(hit.neighbor_id),
            similarity: Some(hit.similarity),
            flags,
        }
    }

    /// Predictions in input order.
    pub fn predict_all(&self, records: &[Record]) -> Vec<Prediction> {
        records.par_iter().map(|r| self.predict_record(r)).collect()
    }
}
