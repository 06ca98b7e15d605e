//! Plan alignment and error taxonomy.
//!
//! [`align`] computes a minimal edit script between gold and predicted plans
//! under strict triple equality. [`classify`] maps each non-match operation to
//! one primary [`ErrorLabel`]; `offset_error` is a supplementary pair-level
//! flag. [`error_report`] aggregates labels over errorful pairs and merges
//! manual labels from an overlay file.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::plan::{Action, ArgClass, ArgSlot, CommandTriple};
use crate::scoring::{score_plan, score_triple, MatchMode};

fn same(a: &CommandTriple, b: &CommandTriple) -> bool {
    score_triple(a, b, MatchMode::Strict)
}

/// Which fields of a substituted triple differ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct FieldDiff {
    pub action: bool,
    pub arg1: bool,
    pub arg2: bool,
}

impl FieldDiff {
    pub fn between(gold: &CommandTriple, pred: &CommandTriple) -> Self {
        FieldDiff {
            action: gold.action != pred.action,
            arg1: gold.arg1 != pred.arg1,
            arg2: gold.arg2 != pred.arg2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EditOp {
    Match { gold_index: usize, pred_index: usize },
    Substitute { gold_index: usize, pred_index: usize, diff: FieldDiff, with: CommandTriple },
    Insert { pred_index: usize, triple: CommandTriple },
    Delete { gold_index: usize },
}

impl EditOp {
    pub fn is_match(&self) -> bool {
        matches!(self, EditOp::Match { .. })
    }

    pub fn kind(&self) -> &'static str {
        match self {
            EditOp::Match { .. } => "match",
            EditOp::Substitute { .. } => "substitute",
            EditOp::Insert { .. } => "insert",
            EditOp::Delete { .. } => "delete",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EditScript {
    pub ops: Vec<EditOp>,
    pub cost: usize,
}

impl EditScript {
    /// Applies the script to `gold`, producing the predicted plan.
    pub fn replay(&self, gold: &[CommandTriple]) -> Vec<CommandTriple> {
        self.ops
            .iter()
            .filter_map(|op| match op {
                EditOp::Match { gold_index, .. } => Some(gold[*gold_index].clone()),
                EditOp::Substitute { with, .. } => Some(with.clone()),
                EditOp::Insert { triple, .. } => Some(triple.clone()),
                EditOp::Delete { .. } => None,
            })
            .collect()
    }
}

/// Minimal unit-cost edit script from `gold` to `pred`.
///
/// Ties prefer substitute (or match) over insert/delete, then delete over
/// insert, choosing operations as early in the plans as possible.
pub fn align(gold: &[CommandTriple], pred: &[CommandTriple]) -> EditScript {
    let (n, m) = (gold.len(), pred.len());
    // suffix costs: rest[i][j] aligns gold[i..] with pred[j..]
    let mut rest = vec![vec![0usize; m + 1]; n + 1];
    for i in (0..=n).rev() {
        for j in (0..=m).rev() {
            rest[i][j] = if i == n {
                m - j
            } else if j == m {
                n - i
            } else {
                let diag = rest[i + 1][j + 1] + usize::from(!same(&gold[i], &pred[j]));
                diag.min(rest[i + 1][j] + 1).min(rest[i][j + 1] + 1)
            };
        }
    }
    let mut ops = Vec::with_capacity(n.max(m));
    let (mut i, mut j) = (0, 0);
    while i < n || j < m {
        if i < n && j < m {
            let eq = same(&gold[i], &pred[j]);
            if rest[i][j] == rest[i + 1][j + 1] + usize::from(!eq) {
                ops.push(if eq {
                    EditOp::Match { gold_index: i, pred_index: j }
                } else {
                    EditOp::Substitute {
                        gold_index: i,
                        pred_index: j,
                        diff: FieldDiff::between(&gold[i], &pred[j]),
                        with: pred[j].clone(),
                    }
                });
                i += 1;
                j += 1;
                continue;
            }
        }
        if i < n && rest[i][j] == rest[i + 1][j] + 1 {
            ops.push(EditOp::Delete { gold_index: i });
            i += 1;
        } else {
            ops.push(EditOp::Insert { pred_index: j, triple: pred[j].clone() });
            j += 1;
        }
    }
    EditScript { ops, cost: rest[0][0] }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorLabel {
    WrongLocation,
    WrongObject,
    ExtraIncorrect,
    ExtraNotHarmful,
    MissedAction,
    OrderSwapped,
    OffsetError,
    Unexplained,
}

impl ErrorLabel {
    pub const ALL: [ErrorLabel; 8] = [
        ErrorLabel::WrongLocation,
        ErrorLabel::WrongObject,
        ErrorLabel::ExtraIncorrect,
        ErrorLabel::ExtraNotHarmful,
        ErrorLabel::MissedAction,
        ErrorLabel::OrderSwapped,
        ErrorLabel::OffsetError,
        ErrorLabel::Unexplained,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ErrorLabel::WrongLocation => "wrong_location",
            ErrorLabel::WrongObject => "wrong_object",
            ErrorLabel::ExtraIncorrect => "extra_incorrect",
            ErrorLabel::ExtraNotHarmful => "extra_not_harmful",
            ErrorLabel::MissedAction => "missed_action",
            ErrorLabel::OrderSwapped => "order_swapped",
            ErrorLabel::OffsetError => "offset_error",
            ErrorLabel::Unexplained => "unexplained",
        }
    }
}

impl fmt::Display for ErrorLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ErrorLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ErrorLabel::ALL
            .into_iter()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| Error::UnknownLabel(s.to_string()))
    }
}

/// Labels that only a human annotator can assign.
pub const MANUAL_LABELS: [&str; 2] = ["gold_instructions_incorrect", "gold_instructions_incomplete"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub labels: BTreeSet<ErrorLabel>,
    /// Primary label for every non-match op, by op index.
    pub attributions: Vec<(usize, ErrorLabel)>,
}

fn check_script(gold: &[CommandTriple], pred: &[CommandTriple], script: &EditScript) -> Result<()> {
    let (mut gi, mut pj) = (0, 0);
    let mismatch = |msg: String| Err(Error::ScriptMismatch(msg));
    for (k, op) in script.ops.iter().enumerate() {
        match op {
            EditOp::Match { gold_index, pred_index } | EditOp::Substitute { gold_index, pred_index, .. } => {
                if (*gold_index, *pred_index) != (gi, pj) || gi >= gold.len() || pj >= pred.len() {
                    return mismatch(format!("op {k} indices out of sequence"));
                }
                let eq = same(&gold[gi], &pred[pj]);
                if eq != op.is_match() {
                    return mismatch(format!("op {k} is a {} but triples {}", op.kind(), if eq { "agree" } else { "differ" }));
                }
                if let EditOp::Substitute { with, .. } = op {
                    if with != &pred[pj] {
                        return mismatch(format!("op {k} substitutes a different triple"));
                    }
                }
                gi += 1;
                pj += 1;
            }
            EditOp::Insert { pred_index, triple } => {
                if *pred_index != pj || pj >= pred.len() || triple != &pred[pj] {
                    return mismatch(format!("op {k} inserts the wrong triple"));
                }
                pj += 1;
            }
            EditOp::Delete { gold_index } => {
                if *gold_index != gi || gi >= gold.len() {
                    return mismatch(format!("op {k} deletes out of sequence"));
                }
                gi += 1;
            }
        }
    }
    if (gi, pj) != (gold.len(), pred.len()) {
        return mismatch("script does not cover both plans".to_string());
    }
    Ok(())
}

fn substitution_label(gold: &CommandTriple, diff: FieldDiff) -> ErrorLabel {
    let slot = match (diff.action, diff.arg1, diff.arg2) {
        (false, true, false) => ArgSlot::First,
        (false, false, true) => ArgSlot::Second,
        _ => return ErrorLabel::Unexplained,
    };
    match gold.action.arg_class(slot) {
        ArgClass::Location | ArgClass::Receptacle => ErrorLabel::WrongLocation,
        ArgClass::Object | ArgClass::Unconstrained => ErrorLabel::WrongObject,
    }
}

/// Assigns taxonomy labels to an aligned pair.
pub fn classify(gold: &[CommandTriple], pred: &[CommandTriple], script: &EditScript) -> Result<Classification> {
    check_script(gold, pred, script)?;
    let ops = &script.ops;
    let mut primary: Vec<Option<ErrorLabel>> = vec![None; ops.len()];

    for k in 0..ops.len().saturating_sub(1) {
        if let (
            EditOp::Substitute { gold_index: g, pred_index: p, .. },
            EditOp::Substitute { gold_index: g2, pred_index: p2, .. },
        ) = (&ops[k], &ops[k + 1])
        {
            if primary[k].is_none()
                && *g2 == g + 1
                && *p2 == p + 1
                && same(&gold[*g], &pred[p + 1])
                && same(&gold[g + 1], &pred[*p])
            {
                primary[k] = Some(ErrorLabel::OrderSwapped);
                primary[k + 1] = Some(ErrorLabel::OrderSwapped);
            }
        }
    }

    for (k, op) in ops.iter().enumerate() {
        if primary[k].is_some() {
            continue;
        }
        primary[k] = match op {
            EditOp::Match { .. } => None,
            EditOp::Substitute { gold_index, diff, .. } => Some(substitution_label(&gold[*gold_index], *diff)),
            EditOp::Insert { triple, .. } => {
                let next_gold = ops[k + 1..].iter().find_map(|o| match o {
                    EditOp::Match { gold_index, .. } => Some(&gold[*gold_index]),
                    _ => None,
                });
                let harmless = triple.action == Action::Goto
                    && next_gold.is_some_and(|g| {
                        triple.arg1.is_some() && (g.arg1 == triple.arg1 || g.arg2 == triple.arg1)
                    });
                Some(if harmless { ErrorLabel::ExtraNotHarmful } else { ErrorLabel::ExtraIncorrect })
            }
            EditOp::Delete { .. } => Some(ErrorLabel::MissedAction),
        };
    }

    let attributions: Vec<(usize, ErrorLabel)> =
        primary.iter().enumerate().filter_map(|(k, l)| l.map(|l| (k, l))).collect();
    let mut labels: BTreeSet<ErrorLabel> = attributions.iter().map(|(_, l)| *l).collect();
    let offset = ops.iter().enumerate().any(|(k, op)| {
        matches!(op, EditOp::Insert { .. } | EditOp::Delete { .. }) && ops[k + 1..].iter().any(EditOp::is_match)
    });
    if offset {
        labels.insert(ErrorLabel::OffsetError);
    }
    Ok(Classification { labels, attributions })
}

/// Manual labels keyed by record id, read from JSONL `{"id": ..., "labels": [...]}`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Overlay {
    labels: BTreeMap<String, BTreeSet<String>>,
}

#[derive(Deserialize)]
struct OverlayLine {
    id: String,
    labels: Vec<String>,
}

fn known_label(label: &str) -> bool {
    MANUAL_LABELS.contains(&label) || label.parse::<ErrorLabel>().is_ok()
}

impl Overlay {
    pub fn insert(&mut self, id: impl Into<String>, label: &str) -> Result<()> {
        if !known_label(label) {
            return Err(Error::UnknownLabel(label.to_string()));
        }
        self.labels.entry(id.into()).or_default().insert(label.to_string());
        Ok(())
    }

    pub fn parse_jsonl(text: &str, path: &Path) -> Result<Self> {
        let mut overlay = Overlay::default();
        for (n, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let err = |message: String| Error::Line { path: path.to_path_buf(), line: n + 1, message };
            let parsed: OverlayLine = serde_json::from_str(line).map_err(|e| err(e.to_string()))?;
            for l in &parsed.labels {
                overlay.insert(parsed.id.clone(), l).map_err(|e| err(e.to_string()))?;
            }
        }
        Ok(overlay)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_jsonl(&text, path)
    }

    pub fn get(&self, id: &str) -> Option<&BTreeSet<String>> {
        self.labels.get(id)
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.labels.keys().map(String::as_str)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairLabels {
    pub id: String,
    pub cost: usize,
    pub labels: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorReport {
    pub pairs: usize,
    /// Pairs that fail strict full-sequence scoring; the denominator of every proportion.
    pub errorful: usize,
    pub counts: BTreeMap<String, usize>,
    /// Multi-label, so proportions may sum past 1.
    pub proportions: BTreeMap<String, f64>,
    pub per_pair: Vec<PairLabels>,
}

/// One gold/prediction pair to analyze.
#[derive(Debug, Clone, Copy)]
pub struct AnalysisPair<'a> {
    pub id: &'a str,
    pub gold: &'a [CommandTriple],
    pub pred: &'a [CommandTriple],
}

/// Label proportions over errorful pairs. Overlay labels are merged into
/// errorful pairs only.
pub fn error_report(pairs: &[AnalysisPair<'_>], overlay: Option<&Overlay>) -> Result<ErrorReport> {
    if let Some(overlay) = overlay {
        let ids: HashSet<&str> = pairs.iter().map(|p| p.id).collect();
        if let Some(unknown) = overlay.ids().find(|id| !ids.contains(id)) {
            return Err(Error::UnknownOverlayId(unknown.to_string()));
        }
    }
    let per_pair: Vec<Option<PairLabels>> = pairs
        .par_iter()
        .map(|p| -> Result<Option<PairLabels>> {
            if score_plan(p.gold, p.pred, MatchMode::Strict).full_sequence {
                return Ok(None);
            }
            let script = align(p.gold, p.pred);
            let class = classify(p.gold, p.pred, &script)?;
            let mut labels: BTreeSet<String> = class.labels.iter().map(|l| l.as_str().to_string()).collect();
            if let Some(extra) = overlay.and_then(|o| o.get(p.id)) {
                labels.extend(extra.iter().cloned());
            }
            Ok(Some(PairLabels { id: p.id.to_string(), cost: script.cost, labels: labels.into_iter().collect() }))
        })
        .collect::<Result<_>>()?;
    let per_pair: Vec<PairLabels> = per_pair.into_iter().flatten().collect();

    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for p in &per_pair {
        for l in &p.labels {
            *counts.entry(l.clone()).or_default() += 1;
        }
    }
    let errorful = per_pair.len();
    let proportions = counts.iter().map(|(l, c)| (l.clone(), *c as f64 / errorful as f64)).collect();
    Ok(ErrorReport { pairs: pairs.len(), errorful, counts, proportions, per_pair })
}
