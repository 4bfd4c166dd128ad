use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    #[error("document `{document}`: {msg}")]
    Invariant { document: String, msg: String },

    #[error("unknown tag `{0}`")]
    UnknownTag(String),

    #[error("unknown relation type `{0}`")]
    UnknownRelation(String),

    #[error("document `{document}`: mentions {first} and {second} overlap")]
    Overlap {
        document: String,
        first: usize,
        second: usize,
    },

    #[error("corpus is empty")]
    EmptyCorpus,

    #[error("cannot split {documents} documents into {k} folds")]
    FoldCount { k: usize, documents: usize },

    #[error("training data is empty")]
    EmptyTrainingData,

    #[error("objective became non-finite at iteration {iteration}")]
    NonFiniteObjective { iteration: usize },

    #[error("training frames contain a single label ({0}); need at least two")]
    SingleClass(String),

    #[error("negative sampling needs at least one positive frame")]
    NoPositiveFrames,

    #[error("sequence {index}: gold has length {gold}, prediction has length {pred}")]
    LengthMismatch {
        index: usize,
        gold: usize,
        pred: usize,
    },

    #[error("gold has {gold} sequences, prediction has {pred}")]
    SequenceCountMismatch { gold: usize, pred: usize },

    #[error("reports disagree on class set")]
    ClassSetMismatch,

    #[error("gold document `{gold}` does not match predicted document `{pred}`")]
    DocumentMismatch { gold: String, pred: String },

    #[error("model file: {0}")]
    ModelFormat(String),

    #[error("config: {0}")]
    Config(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn invariant(document: &str, msg: impl Into<String>) -> Self {
        Error::Invariant {
            document: document.to_string(),
            msg: msg.into(),
        }
    }
}
