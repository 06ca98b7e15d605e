//! Plan text format.
//!
//! A training/generation line looks like
//!
//! ```text
//! put a spoon in a mug [SEP] go to <arg1> the countertop [CSEP] pick up <arg1> the spoon [CSEP] put <arg1> the spoon <arg2> in the mug [EOS]
//! ```
//!
//! Each triple is rendered through a per-action template that starts with a
//! unique keyword phrase and marks argument positions with `<arg1>` / `<arg2>`.
//! [`parse_generated`] inverts the templates, and [`repair`] patches common
//! generation artifacts before parsing.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::error::{Error, Result};
use crate::plan::{normalize_argument, validate_triple, Action, Argument, CommandTriple, Plan};

pub const SEP: &str = "[SEP]";
pub const CSEP: &str = "[CSEP]";
pub const EOS: &str = "[EOS]";
pub const ARG1: &str = "<arg1>";
pub const ARG2: &str = "<arg2>";

const ARTICLES: [&str; 3] = ["the", "a", "an"];
const PREPOSITIONS: [&str; 4] = ["in", "on", "from", "with"];

/// Surface template for one action.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TupleTemplate {
    pub action: Action,
    /// Leading keyword phrase, unique per action.
    pub phrase: &'static [&'static str],
    /// Preposition introducing the second argument.
    pub arg2_prep: &'static str,
}

pub const TEMPLATES: [TupleTemplate; 8] = [
    TupleTemplate { action: Action::Goto, phrase: &["go", "to"], arg2_prep: "in" },
    TupleTemplate { action: Action::Pickup, phrase: &["pick", "up"], arg2_prep: "from" },
    TupleTemplate { action: Action::Put, phrase: &["put"], arg2_prep: "in" },
    TupleTemplate { action: Action::Cool, phrase: &["cool"], arg2_prep: "in" },
    TupleTemplate { action: Action::Heat, phrase: &["heat"], arg2_prep: "in" },
    TupleTemplate { action: Action::Clean, phrase: &["clean"], arg2_prep: "in" },
    TupleTemplate { action: Action::Slice, phrase: &["slice"], arg2_prep: "with" },
    TupleTemplate { action: Action::Toggle, phrase: &["toggle"], arg2_prep: "in" },
];

pub fn template(action: Action) -> &'static TupleTemplate {
    TEMPLATES.iter().find(|t| t.action == action).expect("every action has a template")
}

/// Finds the template whose keyword phrase prefixes `tokens` (case-insensitive).
fn match_phrase<S: AsRef<str>>(tokens: &[S]) -> Option<&'static TupleTemplate> {
    TEMPLATES.iter().find(|t| {
        tokens.len() >= t.phrase.len()
            && t.phrase.iter().zip(tokens).all(|(p, tok)| tok.as_ref().eq_ignore_ascii_case(p))
    })
}

/// Renders one triple, e.g. `put <arg1> the spoon <arg2> in the mug`.
pub fn triple_to_text(t: &CommandTriple) -> Result<String> {
    if let Some(code) = validate_triple(t).into_iter().next() {
        return Err(Error::Arity { triple: t.to_string(), code });
    }
    let tpl = template(t.action);
    let mut out: Vec<&str> = tpl.phrase.to_vec();
    let arg1 = t.arg1.as_ref().expect("validated");
    out.push(ARG1);
    out.push("the");
    out.extend(arg1.tokens().iter().map(String::as_str));
    if let Some(arg2) = &t.arg2 {
        out.push(ARG2);
        out.push(tpl.arg2_prep);
        out.push("the");
        out.extend(arg2.tokens().iter().map(String::as_str));
    }
    Ok(out.join(" "))
}

/// A full `<directive> [SEP] ... [EOS]` line.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct SequenceString(String);

impl SequenceString {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0
    }

    /// Checks the delimiter layout: one `[SEP]`, a final `[EOS]`, and `[CSEP]`
    /// only between nonempty tuple texts.
    pub fn is_well_formed(text: &str) -> bool {
        let toks: Vec<&str> = text.split_whitespace().collect();
        let seps = toks.iter().filter(|t| **t == SEP).count();
        let eos = toks.iter().filter(|t| **t == EOS).count();
        if seps != 1 || eos != 1 || toks.last() != Some(&EOS) {
            return false;
        }
        let sep = toks.iter().position(|t| *t == SEP).unwrap();
        let body = &toks[sep + 1..toks.len() - 1];
        !body.is_empty() && body.split(|t| *t == CSEP).all(|seg| !seg.is_empty())
    }
}

impl fmt::Display for SequenceString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Joins the directive and the rendered triples with the delimiter tokens.
///
/// The directive is copied verbatim; it should not itself contain `[SEP]`.
pub fn serialize_example(directive: &str, plan: &[CommandTriple]) -> Result<SequenceString> {
    if plan.is_empty() {
        return Err(Error::EmptyPlan);
    }
    let tuples = plan.iter().map(triple_to_text).collect::<Result<Vec<_>>>()?;
    Ok(SequenceString(format!("{directive} {SEP} {} {EOS}", tuples.join(&format!(" {CSEP} ")))))
}

/// Renders only the continuation after `[SEP]`, including `[EOS]`.
pub fn serialize_plan(plan: &[CommandTriple]) -> Result<String> {
    if plan.is_empty() {
        return Err(Error::EmptyPlan);
    }
    let tuples = plan.iter().map(triple_to_text).collect::<Result<Vec<_>>>()?;
    Ok(format!("{} {EOS}", tuples.join(&format!(" {CSEP} "))))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("segment {segment}: {kind}")]
pub struct ParseError {
    pub segment: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("no plan text")]
    EmptyInput,
    #[error("empty segment")]
    EmptySegment,
    #[error("unknown action phrase `{0}`")]
    UnknownAction(String),
    #[error("missing <arg1> tag")]
    MissingArg1Tag,
    #[error("argument {0} is empty")]
    EmptyArgument(u8),
    #[error("unexpected tag `{0}`")]
    UnexpectedTag(String),
    #[error("unexpected tokens `{0}` before <arg1>")]
    UnexpectedTokens(String),
    #[error("argument {slot} starts with `{word}`")]
    LeadingFiller { slot: u8, word: String },
}

impl ParseErrorKind {
    pub fn code(&self) -> &'static str {
        match self {
            ParseErrorKind::EmptyInput => "empty-input",
            ParseErrorKind::EmptySegment => "empty-segment",
            ParseErrorKind::UnknownAction(_) => "unknown-action",
            ParseErrorKind::MissingArg1Tag => "missing-arg1-tag",
            ParseErrorKind::EmptyArgument(_) => "empty-argument",
            ParseErrorKind::UnexpectedTag(_) => "unexpected-tag",
            ParseErrorKind::UnexpectedTokens(_) => "unexpected-tokens",
            ParseErrorKind::LeadingFiller { .. } => "leading-filler",
        }
    }
}

/// Result of [`parse_generated`].
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedPlan {
    pub plan: Plan,
    /// No `[EOS]` was found.
    pub truncated: bool,
    /// A trailing partial segment of a truncated generation failed to parse and was dropped.
    pub dropped_partial: bool,
}

impl ParsedPlan {
    /// Parsed without dropping anything and every triple satisfies the arity table.
    pub fn is_clean(&self) -> bool {
        !self.dropped_partial && self.plan.is_well_formed()
    }
}

fn is_tag_like(tok: &str) -> bool {
    (tok.starts_with('<') && tok.ends_with('>')) || (tok.starts_with('[') && tok.ends_with(']'))
}

fn strip_leading<'a>(mut toks: &'a [&'a str], words: &[&str], once: bool) -> &'a [&'a str] {
    while let Some(first) = toks.first() {
        if words.iter().any(|w| first.eq_ignore_ascii_case(w)) {
            toks = &toks[1..];
            if once {
                break;
            }
        } else {
            break;
        }
    }
    toks
}

fn parse_argument(toks: &[&str], slot: u8) -> std::result::Result<Argument, ParseErrorKind> {
    if let Some(tag) = toks.iter().find(|t| is_tag_like(t)) {
        return Err(ParseErrorKind::UnexpectedTag(tag.to_string()));
    }
    // a second preposition means the separator was garbled, e.g. `<arg2> in in the mug`
    if let Some(first) = toks.first().filter(|t| PREPOSITIONS.iter().any(|p| t.eq_ignore_ascii_case(p))) {
        return Err(ParseErrorKind::LeadingFiller { slot, word: first.to_string() });
    }
    normalize_argument(&toks.join(" ")).map_err(|_| ParseErrorKind::EmptyArgument(slot))
}

fn parse_segment(toks: &[&str]) -> std::result::Result<CommandTriple, ParseErrorKind> {
    if toks.is_empty() {
        return Err(ParseErrorKind::EmptySegment);
    }
    let tpl = match_phrase(toks).ok_or_else(|| {
        let head = toks.iter().take_while(|t| !is_tag_like(t)).take(2).copied().collect::<Vec<_>>();
        ParseErrorKind::UnknownAction(head.join(" "))
    })?;
    let rest = &toks[tpl.phrase.len()..];
    let a1 = rest.iter().position(|t| *t == ARG1).ok_or(ParseErrorKind::MissingArg1Tag)?;
    if a1 > 0 {
        return Err(ParseErrorKind::UnexpectedTokens(rest[..a1].join(" ")));
    }
    let after = &rest[a1 + 1..];
    let (arg1_toks, arg2_toks) = match after.iter().position(|t| *t == ARG2) {
        Some(a2) => (&after[..a2], Some(&after[a2 + 1..])),
        None => (after, None),
    };
    let arg1 = parse_argument(strip_leading(arg1_toks, &ARTICLES, false), 1)?;
    let arg2 = match arg2_toks {
        Some(t) => {
            let t = strip_leading(t, &PREPOSITIONS, true);
            Some(parse_argument(strip_leading(t, &ARTICLES, false), 2)?)
        }
        None => None,
    };
    Ok(CommandTriple::new(tpl.action, Some(arg1), arg2))
}

/// Parses generated plan text back into triples.
///
/// Accepts either the continuation after `[SEP]` or a full sequence string;
/// everything through the first `[SEP]` is skipped. Text after the first
/// `[EOS]` is ignored. When `[EOS]` is missing the generation is treated as
/// truncated, and a failing final segment is dropped.
pub fn parse_generated(text: &str) -> std::result::Result<ParsedPlan, ParseError> {
    let mut toks: Vec<&str> = text.split_whitespace().collect();
    if let Some(sep) = toks.iter().position(|t| *t == SEP) {
        toks.drain(..=sep);
    }
    let truncated = match toks.iter().position(|t| *t == EOS) {
        Some(eos) => {
            toks.truncate(eos);
            false
        }
        None => true,
    };
    if toks.is_empty() {
        return Err(ParseError { segment: 0, kind: ParseErrorKind::EmptyInput });
    }
    let segments: Vec<&[&str]> = toks.split(|t| *t == CSEP).collect();
    let last = segments.len() - 1;
    let mut triples = Vec::with_capacity(segments.len());
    let mut dropped_partial = false;
    for (i, seg) in segments.iter().enumerate() {
        match parse_segment(seg) {
            Ok(t) => triples.push(t),
            Err(_) if truncated && i == last && i > 0 => dropped_partial = true,
            Err(kind) => return Err(ParseError { segment: i, kind }),
        }
    }
    let plan = Plan::new(triples).expect("at least one segment parsed");
    Ok(ParsedPlan { plan, truncated, dropped_partial })
}

/// Which repair rule changed the text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RepairRule {
    Doubling,
    Bigram,
    Arg1Tag,
    Arg2Tag,
}

impl RepairRule {
    pub fn as_str(self) -> &'static str {
        match self {
            RepairRule::Doubling => "doubling",
            RepairRule::Bigram => "bigram",
            RepairRule::Arg1Tag => "arg1-tag",
            RepairRule::Arg2Tag => "arg2-tag",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Repaired {
    pub text: String,
    pub applied: Vec<RepairRule>,
}

/// One token-sequence rewrite, e.g. `pick <arg1>` to `pick up <arg1>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fixup {
    pub from: Vec<String>,
    pub to: Vec<String>,
}

impl Fixup {
    pub fn new(from: &str, to: &str) -> Self {
        Fixup {
            from: from.split_whitespace().map(str::to_string).collect(),
            to: to.split_whitespace().map(str::to_string).collect(),
        }
    }
}

/// Post-generation repair pipeline with a configurable bigram fix-up table.
#[derive(Debug, Clone)]
pub struct Repairer {
    fixups: Vec<Fixup>,
}

impl Default for Repairer {
    fn default() -> Self {
        Repairer { fixups: vec![Fixup::new("pick <arg1>", "pick up <arg1>"), Fixup::new("go <arg1>", "go to <arg1>")] }
    }
}

const MAX_PASSES: usize = 16;

impl Repairer {
    pub fn with_fixups(fixups: Vec<Fixup>) -> Self {
        Repairer { fixups }
    }

    pub fn fixups(&self) -> &[Fixup] {
        &self.fixups
    }

    pub fn repair(&self, text: &str) -> Repaired {
        if parse_generated(text).is_ok_and(|p| p.is_clean()) {
            return Repaired { text: text.to_string(), applied: vec![] };
        }
        let (prefix, body) = split_prefix(text);
        let mut toks: Vec<String> = body.split_whitespace().map(str::to_string).collect();
        let tail = match toks.iter().position(|t| t == EOS) {
            Some(eos) => toks.split_off(eos),
            None => Vec::new(),
        };
        let mut applied = Vec::new();
        for _ in 0..MAX_PASSES {
            let before = toks.clone();
            collapse_doubles(&mut toks, &mut applied);
            self.apply_fixups(&mut toks, &mut applied);
            insert_missing_tags(&mut toks, &mut applied);
            if toks == before {
                break;
            }
        }
        applied.sort();
        applied.dedup();
        let body: Vec<String> = toks.into_iter().chain(tail).collect();
        let text = match (prefix, body.is_empty()) {
            (Some(p), true) => p.to_string(),
            (Some(p), false) => format!("{p} {}", body.join(" ")),
            (None, _) => body.join(" "),
        };
        Repaired { text, applied }
    }

    fn apply_fixups(&self, toks: &mut Vec<String>, applied: &mut Vec<RepairRule>) {
        for fix in &self.fixups {
            if fix.from.is_empty() {
                continue;
            }
            let mut i = 0;
            while i + fix.from.len() <= toks.len() {
                if toks[i..i + fix.from.len()] == fix.from[..] {
                    toks.splice(i..i + fix.from.len(), fix.to.iter().cloned());
                    applied.push(RepairRule::Bigram);
                    i += fix.to.len().max(1);
                } else {
                    i += 1;
                }
            }
        }
    }
}

/// Repairs with the default fix-up table.
pub fn repair(text: &str) -> String {
    Repairer::default().repair(text).text
}

/// Splits off everything through the first standalone `[SEP]` token.
fn split_prefix(text: &str) -> (Option<&str>, &str) {
    let mut offset = 0;
    for tok in text.split_whitespace() {
        let start = offset + text[offset..].find(tok).expect("token comes from text");
        let end = start + tok.len();
        if tok == SEP {
            return (Some(&text[..end]), &text[end..]);
        }
        offset = end;
    }
    (None, text)
}

fn collapse_doubles(toks: &mut Vec<String>, applied: &mut Vec<RepairRule>) {
    let n = toks.len();
    toks.dedup();
    if toks.len() != n {
        applied.push(RepairRule::Doubling);
    }
}

fn insert_missing_tags(toks: &mut Vec<String>, applied: &mut Vec<RepairRule>) {
    let mut out = Vec::with_capacity(toks.len() + 2);
    for (i, seg) in toks.split(|t| t == CSEP).enumerate() {
        if i > 0 {
            out.push(CSEP.to_string());
        }
        let mut seg = seg.to_vec();
        if let Some(tpl) = match_phrase(&seg) {
            let n = tpl.phrase.len();
            if seg.len() > n && !seg.iter().any(|t| t == ARG1) {
                seg.insert(n, ARG1.to_string());
                applied.push(RepairRule::Arg1Tag);
            }
            if tpl.action == Action::Put && !seg.iter().any(|t| t == ARG2) {
                if let Some(a1) = seg.iter().position(|t| t == ARG1) {
                    if let Some(k) = trailing_prep(&seg, a1) {
                        seg.insert(k, ARG2.to_string());
                        applied.push(RepairRule::Arg2Tag);
                    }
                }
            }
        }
        out.extend(seg);
    }
    *toks = out;
}

/// Position of the last `in|on the X` phrase after a nonempty first argument.
fn trailing_prep(seg: &[String], arg1_pos: usize) -> Option<usize> {
    (arg1_pos + 2..seg.len().saturating_sub(2)).rev().find(|&k| {
        matches!(seg[k].as_str(), "in" | "on")
            && seg[k + 1] == "the"
            && seg[arg1_pos + 1..k].iter().any(|t| !ARTICLES.contains(&t.as_str()))
    })
}
