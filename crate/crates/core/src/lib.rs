//! Tools for directive-to-plan datasets: a typed command-triple model, the
//! textual sequence format shared with language-model adapters, generation
//! repair, strict and permissive scoring, error taxonomy, corpus splitting,
//! and a retrieval baseline planner.

pub mod analysis;
pub mod baseline;
pub mod cli;
pub mod dataset;
pub mod error;
pub mod plan;
pub mod scoring;
pub mod synth;
pub mod text;

pub use analysis::{align, classify, error_report, EditOp, EditScript, ErrorLabel, ErrorReport, Overlay};
pub use baseline::{BaselinePlanner, DirectiveIndex, PlannerOptions};
pub use dataset::{Prediction, SplitSpec, Splits};
pub use error::{Error, Result};
pub use plan::{Action, ArgClass, Argument, CommandTriple, Corpus, Plan, Record, Vocabulary};
pub use scoring::{aggregate, score_plan, MatchMode, ScoreOptions, ScoreReport};
pub use text::{parse_generated, repair, serialize_example, SequenceString};
