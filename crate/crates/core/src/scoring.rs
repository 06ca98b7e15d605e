//! Strict and permissive plan accuracy.
//!
//! Component and triple accuracy are positionwise over gold indices: position
//! `i` is correct only when the prediction has a triple at `i` that matches.
//! Full-sequence accuracy requires equal lengths and every position correct;
//! full-minus-first applies the same rule after dropping index 0 from both
//! plans.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::plan::{Action, Argument, CommandTriple, Record};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatchMode {
    /// Every token of an argument must match.
    Strict,
    /// One shared token is enough (`desk lamp` = `lamp`).
    Permissive,
}

impl MatchMode {
    pub const BOTH: [MatchMode; 2] = [MatchMode::Strict, MatchMode::Permissive];

    pub fn as_str(self) -> &'static str {
        match self {
            MatchMode::Strict => "strict",
            MatchMode::Permissive => "permissive",
        }
    }
}

pub fn match_argument(gold: Option<&Argument>, pred: Option<&Argument>, mode: MatchMode) -> bool {
    match (gold, pred) {
        (None, None) => true,
        (Some(g), Some(p)) => match mode {
            MatchMode::Strict => g.tokens() == p.tokens(),
            MatchMode::Permissive => g.tokens().iter().any(|t| p.tokens().contains(t)),
        },
        _ => false,
    }
}

pub fn score_triple(gold: &CommandTriple, pred: &CommandTriple, mode: MatchMode) -> bool {
    gold.action == pred.action
        && match_argument(gold.arg1.as_ref(), pred.arg1.as_ref(), mode)
        && match_argument(gold.arg2.as_ref(), pred.arg2.as_ref(), mode)
}

/// Positionwise outcomes for one gold/prediction pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanScores {
    pub command: Vec<bool>,
    /// `None` where the gold triple has no first argument.
    pub arg1: Vec<Option<bool>>,
    /// `None` where the gold triple has no second argument.
    pub arg2: Vec<Option<bool>>,
    pub triple: Vec<bool>,
    pub full_sequence: bool,
    pub full_minus_first: bool,
}

fn sequence_matches(gold: &[CommandTriple], pred: &[CommandTriple], mode: MatchMode) -> bool {
    gold.len() == pred.len() && gold.iter().zip(pred).all(|(g, p)| score_triple(g, p, mode))
}

pub fn score_plan(gold: &[CommandTriple], pred: &[CommandTriple], mode: MatchMode) -> PlanScores {
    let n = gold.len();
    let mut scores = PlanScores {
        command: Vec::with_capacity(n),
        arg1: Vec::with_capacity(n),
        arg2: Vec::with_capacity(n),
        triple: Vec::with_capacity(n),
        full_sequence: sequence_matches(gold, pred, mode),
        full_minus_first: sequence_matches(gold.get(1..).unwrap_or(&[]), pred.get(1..).unwrap_or(&[]), mode),
    };
    for (i, g) in gold.iter().enumerate() {
        let p = pred.get(i);
        scores.command.push(p.is_some_and(|p| p.action == g.action));
        scores.arg1.push(g.arg1.as_ref().map(|ga| p.is_some_and(|p| match_argument(Some(ga), p.arg1.as_ref(), mode))));
        scores.arg2.push(g.arg2.as_ref().map(|ga| p.is_some_and(|p| match_argument(Some(ga), p.arg2.as_ref(), mode))));
        scores.triple.push(p.is_some_and(|p| score_triple(g, p, mode)));
    }
    scores
}

/// An exact ratio; `value` is `None` when the denominator is zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Fraction {
    pub numerator: u64,
    pub denominator: u64,
    pub value: Option<f64>,
}

impl Fraction {
    pub fn new(numerator: u64, denominator: u64) -> Self {
        let value = (denominator > 0).then(|| numerator as f64 / denominator as f64);
        Fraction { numerator, denominator, value }
    }

    fn add(&mut self, hit: bool) {
        *self = Fraction::new(self.numerator + hit as u64, self.denominator + 1);
    }
}

impl Default for Fraction {
    fn default() -> Self {
        Fraction::new(0, 0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Averaging {
    /// Pool all gold triple positions.
    #[default]
    Micro,
    /// Average per-record ratios (reported alongside the micro cells).
    Macro,
}

/// Per-record mean of component ratios; records with an empty cell are skipped.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MacroScores {
    pub command: Option<f64>,
    pub arg1: Option<f64>,
    pub arg2: Option<f64>,
    pub triple: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeScores {
    pub command: Fraction,
    pub arg1: Fraction,
    pub arg2: Fraction,
    pub triple: Fraction,
    pub full_sequence: Fraction,
    pub full_minus_first: Fraction,
    /// Triple accuracy pooled by gold action.
    pub per_command: BTreeMap<Action, Fraction>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub macro_average: Option<MacroScores>,
}

impl ModeScores {
    /// Named cells in a fixed order, for comparisons and tables.
    pub fn cells(&self) -> Vec<(String, Fraction)> {
        let mut out = vec![
            ("command".to_string(), self.command),
            ("arg1".to_string(), self.arg1),
            ("arg2".to_string(), self.arg2),
            ("triple".to_string(), self.triple),
            ("full_sequence".to_string(), self.full_sequence),
            ("full_minus_first".to_string(), self.full_minus_first),
        ];
        out.extend(self.per_command.iter().map(|(a, f)| (format!("per_command.{a}"), *f)));
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RecordOutcome {
    pub full_sequence: bool,
    pub full_minus_first: bool,
    pub triples_correct: usize,
    pub gold_len: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecordScores {
    pub id: String,
    pub predicted: bool,
    pub outcomes: BTreeMap<MatchMode, RecordOutcome>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreReport {
    pub averaging: Averaging,
    pub gold_records: usize,
    pub gold_triples: usize,
    /// Gold records without a prediction; scored as empty plans.
    pub missing_predictions: usize,
    /// Predictions whose id is not in the gold set; ignored.
    pub unmatched_predictions: usize,
    pub modes: BTreeMap<MatchMode, ModeScores>,
    pub records: Vec<RecordScores>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScoreOptions {
    pub modes: Vec<MatchMode>,
    pub averaging: Averaging,
}

impl Default for ScoreOptions {
    fn default() -> Self {
        ScoreOptions { modes: MatchMode::BOTH.to_vec(), averaging: Averaging::Micro }
    }
}

fn mean(xs: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    (n > 0).then(|| sum / n as f64)
}

fn ratio<I: Iterator<Item = bool>>(it: I) -> Option<f64> {
    let (hits, n) = it.fold((0usize, 0usize), |(h, n), b| (h + b as usize, n + 1));
    (n > 0).then(|| hits as f64 / n as f64)
}

/// Scores predictions against gold records.
///
/// Every gold record is scored; a missing prediction counts as an empty plan.
/// Duplicate prediction ids are an error.
pub fn aggregate<'a, I>(gold: &[Record], predictions: I, options: &ScoreOptions) -> Result<ScoreReport>
where
    I: IntoIterator<Item = (&'a str, &'a [CommandTriple])>,
{
    let gold_ids: HashSet<&str> = gold.iter().map(|r| r.id.as_str()).collect();
    let mut by_id: HashMap<&str, &[CommandTriple]> = HashMap::new();
    let mut unmatched = 0;
    for (id, plan) in predictions {
        if by_id.insert(id, plan).is_some() {
            return Err(Error::DuplicateId(id.to_string()));
        }
        if !gold_ids.contains(id) {
            unmatched += 1;
        }
    }

    let per_record: Vec<(Option<&[CommandTriple]>, Vec<PlanScores>)> = gold
        .par_iter()
        .map(|r| {
            let pred = by_id.get(r.id.as_str()).copied();
            let scores = options.modes.iter().map(|&m| score_plan(&r.gold, pred.unwrap_or(&[]), m)).collect();
            (pred, scores)
        })
        .collect();

    let mut modes = BTreeMap::new();
    for (k, &mode) in options.modes.iter().enumerate() {
        let mut cells = ModeScores {
            command: Fraction::default(),
            arg1: Fraction::default(),
            arg2: Fraction::default(),
            triple: Fraction::default(),
            full_sequence: Fraction::default(),
            full_minus_first: Fraction::default(),
            per_command: Action::ALL.iter().map(|a| (*a, Fraction::default())).collect(),
            macro_average: None,
        };
        for (record, (_, scores)) in gold.iter().zip(&per_record) {
            let s = &scores[k];
            s.command.iter().for_each(|&b| cells.command.add(b));
            s.arg1.iter().flatten().for_each(|&b| cells.arg1.add(b));
            s.arg2.iter().flatten().for_each(|&b| cells.arg2.add(b));
            for (t, &b) in record.gold.iter().zip(&s.triple) {
                cells.triple.add(b);
                cells.per_command.get_mut(&t.action).expect("all actions present").add(b);
            }
            cells.full_sequence.add(s.full_sequence);
            cells.full_minus_first.add(s.full_minus_first);
        }
        if options.averaging == Averaging::Macro {
            let all = || per_record.iter().map(|(_, s)| &s[k]);
            cells.macro_average = Some(MacroScores {
                command: mean(all().filter_map(|s| ratio(s.command.iter().copied()))),
                arg1: mean(all().filter_map(|s| ratio(s.arg1.iter().flatten().copied()))),
                arg2: mean(all().filter_map(|s| ratio(s.arg2.iter().flatten().copied()))),
                triple: mean(all().filter_map(|s| ratio(s.triple.iter().copied()))),
            });
        }
        modes.insert(mode, cells);
    }

    let records = gold
        .iter()
        .zip(&per_record)
        .map(|(r, (pred, scores))| RecordScores {
            id: r.id.clone(),
            predicted: pred.is_some(),
            outcomes: options
                .modes
                .iter()
                .zip(scores)
                .map(|(&m, s)| {
                    (
                        m,
                        RecordOutcome {
                            full_sequence: s.full_sequence,
                            full_minus_first: s.full_minus_first,
                            triples_correct: s.triple.iter().filter(|b| **b).count(),
                            gold_len: s.triple.len(),
                        },
                    )
                })
                .collect(),
        })
        .collect();

    Ok(ScoreReport {
        averaging: options.averaging,
        gold_records: gold.len(),
        gold_triples: gold.iter().map(|r| r.gold.len()).sum(),
        missing_predictions: per_record.iter().filter(|(p, _)| p.is_none()).count(),
        unmatched_predictions: unmatched,
        modes,
        records,
    })
}

impl ScoreReport {
    /// Violations of the metric invariants: permissive >= strict for every
    /// cell, and full-minus-first >= full-sequence in every mode.
    pub fn monotonicity_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (mode, cells) in &self.modes {
            if let (Some(fmf), Some(fs)) = (cells.full_minus_first.value, cells.full_sequence.value) {
                if fmf < fs {
                    out.push(format!("{}: full_minus_first {fmf} < full_sequence {fs}", mode.as_str()));
                }
            }
        }
        if let (Some(strict), Some(perm)) = (self.modes.get(&MatchMode::Strict), self.modes.get(&MatchMode::Permissive)) {
            for ((name, s), (_, p)) in strict.cells().into_iter().zip(perm.cells()) {
                if let (Some(sv), Some(pv)) = (s.value, p.value) {
                    if pv < sv {
                        out.push(format!("{name}: permissive {pv} < strict {sv}"));
                    }
                }
            }
        }
        out
    }

    /// Plain-text table: one row per mode with component, triple and
    /// full-plan columns, followed by per-command triple accuracy.
    pub fn render_table(&self, minus_first: bool) -> String {
        fn pct(f: &Fraction) -> String {
            f.value.map_or_else(|| "n/a".to_string(), |v| format!("{:.1}%", v * 100.0))
        }
        let mut s = String::new();
        let mut header = format!("{:<12} {:>8} {:>8} {:>8} {:>8} {:>14}", "Scoring", "Command", "Arg1", "Arg2", "Triples", "Full Sequence");
        if minus_first {
            let _ = write!(header, " {:>17}", "Full Minus First");
        }
        let _ = writeln!(s, "{header}");
        for (mode, c) in &self.modes {
            let _ = write!(
                s,
                "{:<12} {:>8} {:>8} {:>8} {:>8} {:>14}",
                mode.as_str(),
                pct(&c.command),
                pct(&c.arg1),
                pct(&c.arg2),
                pct(&c.triple),
                pct(&c.full_sequence)
            );
            if minus_first {
                let _ = write!(s, " {:>17}", pct(&c.full_minus_first));
            }
            s.push('\n');
        }
        s.push('\n');
        let _ = write!(s, "{:<12}", "Per command");
        for a in Action::ALL {
            let _ = write!(s, " {:>7}", a.as_str());
        }
        s.push('\n');
        for (mode, c) in &self.modes {
            let _ = write!(s, "{:<12}", mode.as_str());
            for a in Action::ALL {
                let _ = write!(s, " {:>7}", pct(&c.per_command[&a]));
            }
            s.push('\n');
        }
        s
    }
}
