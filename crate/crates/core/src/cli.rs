//! Command-line front end.
//!
//! Every option can also come from a `key = value` config file passed with
//! `--config` (keys are long flag names) or from a `PLANKIT_*` environment
//! variable. Precedence: command line, then config file, then environment.
//! Each run writes a JSON report embedding its resolved configuration and the
//! SHA-256 of every input.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};
use walkdir::WalkDir;

use crate::analysis::{error_report, AnalysisPair, Overlay};
use crate::baseline::{BaselinePlanner, PlannerOptions, FLAG_FALLBACK};
use crate::dataset::{
    self, downsample, import_external, parse_predictions, predictions_to_jsonl, read_corpus, read_generations,
    split, write_corpus, write_text, DownsampleSpec, ImportSchema, Prediction, SplitSpec, SplitUnit,
};
use crate::plan::CommandTriple;
use crate::scoring::{aggregate, Averaging, MatchMode, ScoreOptions, ScoreReport};
use crate::text::{parse_generated, Repairer};

#[derive(Debug, Parser)]
#[command(name = "plankit", version, about = "Directive-to-plan toolkit: ingest, split, predict, repair, score, analyze")]
#[command(args_override_self = true)]
pub struct Cli {
    /// `key = value` file supplying defaults for the subcommand's flags.
    #[arg(long, global = true, env = "PLANKIT_CONFIG")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Convert a directory of external plan files into canonical JSONL.
    Ingest(IngestArgs),
    /// Re-split a corpus into train/dev/test by plan group.
    Split(SplitArgs),
    /// Keep a fraction of the plan groups in a corpus.
    Downsample(DownsampleArgs),
    /// Predict plans with the retrieval baseline.
    Predict(PredictArgs),
    /// Repair and parse raw model generations into predictions.
    RepairParse(RepairParseArgs),
    /// Score predictions against gold records.
    Score(ScoreArgs),
    /// Classify prediction errors.
    AnalyzeErrors(AnalyzeArgs),
    /// Accuracy as a function of training-set fraction.
    Curve(CurveArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct IngestArgs {
    #[arg(long, env = "PLANKIT_SOURCE")]
    pub source: PathBuf,
    /// Action-name mapping and field pointers; defaults cover the standard layout.
    #[arg(long, env = "PLANKIT_MAPPING")]
    pub mapping: Option<PathBuf>,
    #[arg(long, env = "PLANKIT_OUT")]
    pub out: PathBuf,
    /// Lint report path [default: <out>.report.json]
    #[arg(long, env = "PLANKIT_REPORT")]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum UnitArg {
    Plan,
    Record,
    Scene,
}

#[derive(Debug, Args, Serialize)]
pub struct SplitArgs {
    #[arg(long, env = "PLANKIT_INPUT")]
    pub input: PathBuf,
    #[arg(long, env = "PLANKIT_OUT_DIR")]
    pub out_dir: PathBuf,
    /// Train,dev,test sizes, used as proportions of the input.
    #[arg(long, env = "PLANKIT_SIZES", value_delimiter = ',', num_args = 3, default_values_t = dataset::DEFAULT_SPLIT_SIZES)]
    pub sizes: Vec<usize>,
    #[arg(long, env = "PLANKIT_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, env = "PLANKIT_UNIT", value_enum, default_value_t = UnitArg::Plan)]
    pub unit: UnitArg,
}

#[derive(Debug, Args, Serialize)]
pub struct DownsampleArgs {
    #[arg(long, env = "PLANKIT_INPUT")]
    pub input: PathBuf,
    #[arg(long, env = "PLANKIT_FRACTION")]
    pub fraction: f64,
    #[arg(long, env = "PLANKIT_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Sample plan groups separately within each task type.
    #[arg(long, env = "PLANKIT_STRATIFY")]
    pub stratify: bool,
    #[arg(long, env = "PLANKIT_OUT")]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct PredictArgs {
    #[arg(long, env = "PLANKIT_TRAIN")]
    pub train: PathBuf,
    #[arg(long, env = "PLANKIT_TEST")]
    pub test: PathBuf,
    /// Replace or prepend the first goto with the record's start location.
    #[arg(long, env = "PLANKIT_CONDITION_START")]
    pub condition_start: bool,
    /// Swap arguments the test directive unambiguously names differently.
    #[arg(long, env = "PLANKIT_SUBSTITUTE_ARGS")]
    pub substitute_args: bool,
    #[arg(long, env = "PLANKIT_OUT")]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct RepairParseArgs {
    /// Generations JSONL with `{"id", "text"}` lines.
    #[arg(long, env = "PLANKIT_INPUT")]
    pub input: PathBuf,
    #[arg(long, env = "PLANKIT_OUT")]
    pub out: PathBuf,
    /// Parse-failure report [default: <out>.failures.json]
    #[arg(long, env = "PLANKIT_FAILURES")]
    pub failures: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Strict,
    Permissive,
    Both,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AveragingArg {
    Micro,
    Macro,
}

#[derive(Debug, Args, Serialize)]
pub struct ScoreArgs {
    #[arg(long, env = "PLANKIT_GOLD")]
    pub gold: PathBuf,
    #[arg(long, env = "PLANKIT_PRED")]
    pub pred: PathBuf,
    #[arg(long, env = "PLANKIT_MODE", value_enum, default_value_t = ModeArg::Both)]
    pub mode: ModeArg,
    /// Include the full-minus-first column in the printed table.
    #[arg(long, env = "PLANKIT_MINUS_FIRST")]
    pub minus_first: bool,
    #[arg(long, env = "PLANKIT_AVERAGING", value_enum, default_value_t = AveragingArg::Micro)]
    pub averaging: AveragingArg,
    #[arg(long, env = "PLANKIT_OUT")]
    pub out: PathBuf,
    /// Also write the plain-text table here.
    #[arg(long, env = "PLANKIT_TABLE")]
    pub table: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct AnalyzeArgs {
    #[arg(long, env = "PLANKIT_GOLD")]
    pub gold: PathBuf,
    #[arg(long, env = "PLANKIT_PRED")]
    pub pred: PathBuf,
    /// JSONL of `{"id", "labels"}` manual annotations.
    #[arg(long, env = "PLANKIT_OVERLAY")]
    pub overlay: Option<PathBuf>,
    #[arg(long, env = "PLANKIT_OUT")]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct CurveArgs {
    #[arg(long, env = "PLANKIT_TRAIN")]
    pub train: PathBuf,
    #[arg(long, env = "PLANKIT_DEV")]
    pub dev: PathBuf,
    #[arg(long, env = "PLANKIT_FRACTIONS", value_delimiter = ',', default_values_t = [1.0, 0.25, 0.10, 0.01])]
    pub fractions: Vec<f64>,
    #[arg(long, env = "PLANKIT_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, env = "PLANKIT_STRATIFY")]
    pub stratify: bool,
    #[arg(long, env = "PLANKIT_CONDITION_START")]
    pub condition_start: bool,
    #[arg(long, env = "PLANKIT_SUBSTITUTE_ARGS")]
    pub substitute_args: bool,
    /// CSV output; a JSON report is written next to it.
    #[arg(long, env = "PLANKIT_OUT")]
    pub out: PathBuf,
}

/// Resolved configuration and input digests embedded in every report.
#[derive(Debug, Serialize)]
pub struct RunInfo {
    pub command: &'static str,
    pub config: serde_json::Value,
    pub inputs: BTreeMap<String, String>,
}

impl RunInfo {
    fn new<A: Serialize>(command: &'static str, args: &A, inputs: &[&Path]) -> anyhow::Result<Self> {
        let inputs = inputs
            .iter()
            .map(|p| Ok((p.display().to_string(), hash_path(p)?)))
            .collect::<anyhow::Result<_>>()?;
        Ok(RunInfo { command, config: serde_json::to_value(args)?, inputs })
    }
}

/// SHA-256 of a file, or of a directory's sorted relative paths and contents.
pub fn hash_path(path: &Path) -> anyhow::Result<String> {
    let mut h = Sha256::new();
    if path.is_dir() {
        for entry in WalkDir::new(path).sort_by_file_name() {
            let entry = entry?;
            if entry.file_type().is_file() {
                let rel = entry.path().strip_prefix(path).unwrap_or(entry.path());
                h.update(rel.to_string_lossy().as_bytes());
                h.update([0]);
                h.update(fs::read(entry.path()).with_context(|| entry.path().display().to_string())?);
            }
        }
    } else {
        h.update(fs::read(path).with_context(|| path.display().to_string())?);
    }
    Ok(hex::encode(h.finalize()))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_text(path, &text)?;
    Ok(())
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let mut name = path.file_name().map(OsString::from).unwrap_or_default();
    name.push(suffix);
    path.with_file_name(name)
}

const SUBCOMMANDS: [&str; 8] = ["ingest", "split", "downsample", "predict", "repair-parse", "score", "analyze-errors", "curve"];

/// Expands `--config FILE` into flags placed right after the subcommand, so
/// explicit flags given later on the command line win.
fn expand_config(args: Vec<OsString>) -> anyhow::Result<Vec<OsString>> {
    let strs: Vec<String> = args.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let mut config = None;
    for (i, a) in strs.iter().enumerate() {
        if a == "--config" {
            config = strs.get(i + 1).cloned();
        } else if let Some(v) = a.strip_prefix("--config=") {
            config = Some(v.to_string());
        }
    }
    let Some(config) = config.or_else(|| std::env::var("PLANKIT_CONFIG").ok()) else {
        return Ok(args);
    };
    let Some(sub) = strs.iter().position(|a| SUBCOMMANDS.contains(&a.as_str())) else {
        return Ok(args);
    };
    let text = fs::read_to_string(&config).with_context(|| format!("reading config {config}"))?;
    let mut injected = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!("{config}:{}: expected `key = value`", n + 1);
        };
        let (key, value) = (key.trim().replace('_', "-"), value.trim());
        match value {
            "true" => injected.push(OsString::from(format!("--{key}"))),
            "false" => {}
            v => injected.push(OsString::from(format!("--{key}={v}"))),
        }
    }
    let mut out = args;
    out.splice(sub + 1..sub + 1, injected);
    Ok(out)
}

/// Parses arguments and runs one subcommand.
pub fn run<I, T>(args: I) -> anyhow::Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args = expand_config(args.into_iter().map(Into::into).collect())?;
    let cli = Cli::try_parse_from(args)?;
    match cli.command {
        Command::Ingest(a) => cmd_ingest(&a),
        Command::Split(a) => cmd_split(&a),
        Command::Downsample(a) => cmd_downsample(&a),
        Command::Predict(a) => cmd_predict(&a),
        Command::RepairParse(a) => cmd_repair_parse(&a),
        Command::Score(a) => cmd_score(&a),
        Command::AnalyzeErrors(a) => cmd_analyze_errors(&a),
        Command::Curve(a) => cmd_curve(&a),
    }
}

pub fn cmd_ingest(a: &IngestArgs) -> anyhow::Result<()> {
    let schema = match &a.mapping {
        Some(p) => ImportSchema::read_mapping(p)?,
        None => ImportSchema::default(),
    };
    let (corpus, report) = import_external(&a.source, &schema)?;
    let mut inputs = vec![a.source.as_path()];
    inputs.extend(a.mapping.as_deref());
    let run = RunInfo::new("ingest", a, &inputs)?;
    write_corpus(&a.out, corpus.records())?;
    let report_path = a.report.clone().unwrap_or_else(|| sibling(&a.out, ".report.json"));
    write_json(&report_path, &serde_json::json!({ "run": run, "ingest": report }))?;
    println!("ingested {} records from {} plans ({} lint findings)", report.records, report.plans, report.lints.len());
    Ok(())
}

pub fn cmd_split(a: &SplitArgs) -> anyhow::Result<()> {
    let corpus = read_corpus(&a.input)?;
    let unit = match a.unit {
        UnitArg::Plan => SplitUnit::Plan,
        UnitArg::Record => SplitUnit::Record,
        UnitArg::Scene => SplitUnit::Scene,
    };
    let sizes: [usize; 3] = a.sizes.as_slice().try_into().context("--sizes takes exactly three values")?;
    let splits = split(&corpus, &SplitSpec { sizes, seed: a.seed, unit })?;
    let run = RunInfo::new("split", a, &[&a.input])?;
    let mut counts = BTreeMap::new();
    for (name, part) in [("train", &splits.train), ("dev", &splits.dev), ("test", &splits.test)] {
        write_corpus(&a.out_dir.join(format!("{name}.jsonl")), part.records())?;
        counts.insert(name, serde_json::json!({ "records": part.len(), "plan_groups": part.plan_ids().len() }));
    }
    write_json(&a.out_dir.join("split_report.json"), &serde_json::json!({ "run": run, "splits": counts }))?;
    println!(
        "split {} records: train {}, dev {}, test {}",
        corpus.len(),
        splits.train.len(),
        splits.dev.len(),
        splits.test.len()
    );
    Ok(())
}

pub fn cmd_downsample(a: &DownsampleArgs) -> anyhow::Result<()> {
    let spec = DownsampleSpec::new(a.fraction, a.seed, a.stratify)?;
    let corpus = read_corpus(&a.input)?;
    let sample = downsample(&corpus, &spec)?;
    let run = RunInfo::new("downsample", a, &[&a.input])?;
    write_corpus(&a.out, sample.records())?;
    let report = serde_json::json!({
        "run": run,
        "input_records": corpus.len(),
        "input_plan_groups": corpus.plan_ids().len(),
        "records": sample.len(),
        "plan_groups": sample.plan_ids().len(),
    });
    write_json(&sibling(&a.out, ".report.json"), &report)?;
    println!("kept {} of {} plan groups ({} records)", sample.plan_ids().len(), corpus.plan_ids().len(), sample.len());
    Ok(())
}

pub fn cmd_predict(a: &PredictArgs) -> anyhow::Result<()> {
    let train = read_corpus(&a.train)?;
    let test = read_corpus(&a.test)?;
    let options = PlannerOptions { condition_start: a.condition_start, substitute_args: a.substitute_args };
    let planner = BaselinePlanner::new(&train, options)?;
    let preds = planner.predict_all(test.records());
    let run = RunInfo::new("predict", a, &[&a.train, &a.test])?;
    write_text(&a.out, &predictions_to_jsonl(&preds))?;
    let fallbacks = preds.iter().filter(|p| p.flags.iter().any(|f| f == FLAG_FALLBACK)).count();
    write_json(
        &sibling(&a.out, ".report.json"),
        &serde_json::json!({ "run": run, "predictions": preds.len(), "fallbacks": fallbacks }),
    )?;
    println!("wrote {} predictions ({fallbacks} fallbacks)", preds.len());
    Ok(())
}

#[derive(Debug, Serialize)]
struct ParseFailure {
    id: String,
    segment: usize,
    code: &'static str,
    reason: String,
    text: String,
}

pub fn cmd_repair_parse(a: &RepairParseArgs) -> anyhow::Result<()> {
    let gens = read_generations(&a.input)?;
    let repairer = Repairer::default();
    let outcomes: Vec<Result<Prediction, ParseFailure>> = gens
        .par_iter()
        .map(|g| {
            let repaired = repairer.repair(&g.text);
            match parse_generated(&repaired.text) {
                Ok(parsed) => {
                    let mut p = Prediction::new(g.id.clone(), parsed.plan.into_triples());
                    if !repaired.applied.is_empty() {
                        p.flags.push("repaired".into());
                        p.flags.extend(repaired.applied.iter().map(|r| format!("repair:{}", r.as_str())));
                    }
                    if parsed.truncated {
                        p.flags.push("truncated".into());
                    }
                    if parsed.dropped_partial {
                        p.flags.push("dropped-partial".into());
                    }
                    Ok(p)
                }
                Err(e) => Err(ParseFailure {
                    id: g.id.clone(),
                    segment: e.segment,
                    code: e.kind.code(),
                    reason: e.to_string(),
                    text: g.text.clone(),
                }),
            }
        })
        .collect();
    let mut preds = Vec::new();
    let mut failures = Vec::new();
    for o in outcomes {
        match o {
            Ok(p) => preds.push(p),
            Err(f) => failures.push(f),
        }
    }
    let run = RunInfo::new("repair-parse", a, &[&a.input])?;
    write_text(&a.out, &predictions_to_jsonl(&preds))?;
    let failures_path = a.failures.clone().unwrap_or_else(|| sibling(&a.out, ".failures.json"));
    write_json(
        &failures_path,
        &serde_json::json!({ "run": run, "generations": gens.len(), "parsed": preds.len(), "failures": failures }),
    )?;
    println!("parsed {} of {} generations", preds.len(), gens.len());
    Ok(())
}

fn modes(m: ModeArg) -> Vec<MatchMode> {
    match m {
        ModeArg::Strict => vec![MatchMode::Strict],
        ModeArg::Permissive => vec![MatchMode::Permissive],
        ModeArg::Both => MatchMode::BOTH.to_vec(),
    }
}

fn read_preds(path: &Path) -> anyhow::Result<Vec<Prediction>> {
    let text = fs::read_to_string(path).with_context(|| path.display().to_string())?;
    Ok(parse_predictions(&text, path)?)
}

fn score_files(gold: &Path, pred: &Path, options: &ScoreOptions) -> anyhow::Result<ScoreReport> {
    let gold = read_corpus(gold)?;
    let preds = read_preds(pred)?;
    Ok(aggregate(gold.records(), preds.iter().map(|p| (p.id.as_str(), p.plan.as_slice())), options)?)
}

pub fn cmd_score(a: &ScoreArgs) -> anyhow::Result<()> {
    let averaging = match a.averaging {
        AveragingArg::Micro => Averaging::Micro,
        AveragingArg::Macro => Averaging::Macro,
    };
    let report = score_files(&a.gold, &a.pred, &ScoreOptions { modes: modes(a.mode), averaging })?;
    let violations = report.monotonicity_violations();
    let run = RunInfo::new("score", a, &[&a.gold, &a.pred])?;
    let table = report.render_table(a.minus_first);
    write_json(
        &a.out,
        &serde_json::json!({ "run": run, "report": report, "invariants": { "monotonicity_violations": violations } }),
    )?;
    if let Some(t) = &a.table {
        write_text(t, &table)?;
    }
    print!("{table}");
    if !violations.is_empty() {
        bail!("metric invariants violated: {}", violations.join("; "));
    }
    Ok(())
}

pub fn cmd_analyze_errors(a: &AnalyzeArgs) -> anyhow::Result<()> {
    let gold = read_corpus(&a.gold)?;
    let preds = read_preds(&a.pred)?;
    let by_id: BTreeMap<&str, &[CommandTriple]> = preds.iter().map(|p| (p.id.as_str(), p.plan.as_slice())).collect();
    let pairs: Vec<AnalysisPair<'_>> = gold
        .records()
        .iter()
        .map(|r| AnalysisPair { id: &r.id, gold: &r.gold, pred: by_id.get(r.id.as_str()).copied().unwrap_or(&[]) })
        .collect();
    let overlay = a.overlay.as_deref().map(Overlay::read).transpose()?;
    let report = error_report(&pairs, overlay.as_ref())?;
    let mut inputs = vec![a.gold.as_path(), a.pred.as_path()];
    inputs.extend(a.overlay.as_deref());
    let run = RunInfo::new("analyze-errors", a, &inputs)?;
    write_json(&a.out, &serde_json::json!({ "run": run, "report": report }))?;
    println!("{} errorful of {} pairs", report.errorful, report.pairs);
    for (label, p) in &report.proportions {
        println!("{:>6.1}%  {label}", p * 100.0);
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct CurveRow {
    pub fraction: f64,
    pub plan_groups: usize,
    pub records: usize,
    pub full_minus_first_permissive: f64,
    pub full_sequence_strict: f64,
}

/// Downsample, predict and score for each fraction.
pub fn learning_curve(
    train: &crate::plan::Corpus,
    dev: &crate::plan::Corpus,
    fractions: &[f64],
    seed: u64,
    stratify: bool,
    options: PlannerOptions,
) -> anyhow::Result<Vec<CurveRow>> {
    fractions
        .iter()
        .map(|&fraction| {
            let sample = downsample(train, &DownsampleSpec::new(fraction, seed, stratify)?)?;
            let planner = BaselinePlanner::new(&sample, options)?;
            let preds = planner.predict_all(dev.records());
            let report = aggregate(
                dev.records(),
                preds.iter().map(|p| (p.id.as_str(), p.plan.as_slice())),
                &ScoreOptions::default(),
            )?;
            Ok(CurveRow {
                fraction,
                plan_groups: sample.plan_ids().len(),
                records: sample.len(),
                full_minus_first_permissive: report.modes[&MatchMode::Permissive].full_minus_first.value.unwrap_or(0.0),
                full_sequence_strict: report.modes[&MatchMode::Strict].full_sequence.value.unwrap_or(0.0),
            })
        })
        .collect()
}

pub fn curve_csv(rows: &[CurveRow]) -> String {
    let mut out = String::from("fraction,plan_groups,records,full_minus_first_permissive,full_sequence_strict\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{:.6},{:.6}\n",
            r.fraction, r.plan_groups, r.records, r.full_minus_first_permissive, r.full_sequence_strict
        ));
    }
    out
}

pub fn cmd_curve(a: &CurveArgs) -> anyhow::Result<()> {
    let train = read_corpus(&a.train)?;
    let dev = read_corpus(&a.dev)?;
    let options = PlannerOptions { condition_start: a.condition_start, substitute_args: a.substitute_args };
    let rows = learning_curve(&train, &dev, &a.fractions, a.seed, a.stratify, options)?;
    let run = RunInfo::new("curve", a, &[&a.train, &a.dev])?;
    let csv = curve_csv(&rows);
    write_text(&a.out, &csv)?;
    write_json(&sibling(&a.out, ".report.json"), &serde_json::json!({ "run": run, "rows": rows }))?;
    print!("{csv}");
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn unknown_flag_is_a_usage_error() {
        let err = run(["plankit", "predict", "--train", "a", "--test", "b", "--out", "c", "--bogus"]).unwrap_err();
        let clap_err = err.downcast_ref::<clap::Error>().expect("clap error");
        assert_eq!(clap_err.kind(), clap::error::ErrorKind::UnknownArgument);
        assert_ne!(clap_err.exit_code(), 0);
    }

    #[test]
    fn config_file_supplies_flags() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("run.conf");
        fs::write(&cfg, "# defaults\nfraction = 0.25\nstratify = true\nseed=9\n").unwrap();
        let args: Vec<OsString> = ["plankit", "--config", cfg.to_str().unwrap(), "downsample", "--input", "x", "--out", "y", "--seed", "3"]
            .iter()
            .map(OsString::from)
            .collect();
        let expanded = expand_config(args).unwrap();
        let cli = Cli::try_parse_from(expanded).unwrap();
        let Command::Downsample(d) = cli.command else { panic!("wrong subcommand") };
        assert_eq!(d.fraction, 0.25);
        assert!(d.stratify);
        assert_eq!(d.seed, 3);
    }

    #[test]
    fn sibling_paths() {
        assert_eq!(sibling(Path::new("out/p.jsonl"), ".report.json"), Path::new("out/p.jsonl.report.json"));
    }

    #[test]
    fn curve_csv_format() {
        let rows = vec![CurveRow { fraction: 0.25, plan_groups: 3, records: 9, full_minus_first_permissive: 0.5, full_sequence_strict: 0.25 }];
        assert_eq!(curve_csv(&rows), "fraction,plan_groups,records,full_minus_first_permissive,full_sequence_strict\n0.25,3,9,0.500000,0.250000\n");
    }
}
