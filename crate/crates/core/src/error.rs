use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown action `{0}`")]
    UnknownAction(String),
    #[error("argument is empty after normalization")]
    EmptyArgument,
    #[error("invalid argument token `{0}`")]
    InvalidToken(String),
    #[error("plan must contain at least one triple")]
    EmptyPlan,
    #[error("triple {triple} violates arity: {code}")]
    Arity { triple: String, code: crate::plan::LintCode },
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("records of plan group `{0}` disagree on the gold plan")]
    InconsistentPlanGroup(String),
    #[error(transparent)]
    Parse(#[from] crate::text::ParseError),
    #[error("edit script does not describe this plan pair: {0}")]
    ScriptMismatch(String),
    #[error("overlay references unknown id `{0}`")]
    UnknownOverlayId(String),
    #[error("unknown error label `{0}`")]
    UnknownLabel(String),
    #[error("need at least 3 groups to split, found {0}")]
    TooFewGroups(usize),
    #[error("invalid split sizes: {0}")]
    InvalidSplit(String),
    #[error("fraction must be in (0, 1], got {0}")]
    InvalidFraction(f64),
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("no source files found under {0}")]
    NoSourceFiles(PathBuf),
    #[error("{path}: {message}")]
    Source { path: PathBuf, message: String },
    #[error("{path}:{line}: {message}")]
    Line { path: PathBuf, line: usize, message: String },
    #[error("unmappable action `{action}` in plan `{plan}`")]
    UnmappableAction { action: String, plan: String },
    #[error("mapping file: {0}")]
    Mapping(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
