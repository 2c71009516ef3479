use thiserror::Error;

use crate::seqdata::ModalityKind;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("{}: {source}", path.display())]
    File {
        path: std::path::PathBuf,
        source: std::io::Error,
    },

    #[error("malformed json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("sample `{sample}`: {modality} row {row} has {found} features, expected {expected}")]
    DimensionMismatch {
        sample: String,
        modality: ModalityKind,
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("sample `{sample}`: {modality} sequence is empty")]
    EmptySequence { sample: String, modality: ModalityKind },

    #[error("sample `{sample}`: {modality} contains a non-finite value at row {row}")]
    NonFiniteFeature {
        sample: String,
        modality: ModalityKind,
        row: usize,
    },

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("invalid synthetic spec: {0}")]
    InvalidSpec(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("unknown sample id `{0}`")]
    UnknownSample(String),

    #[error("split `{0}` has no samples")]
    EmptySplit(String),

    #[error("alignment needs 1 <= N <= M, got M={long}, N={short}")]
    Alignment { long: usize, short: usize },

    #[error("positional embedding size must be even and >= 2, got {0}")]
    EmbeddingSize(usize),

    #[error("shape error in {op}: {detail}")]
    Shape { op: &'static str, detail: String },

    #[error("non-finite value produced by {0}")]
    NonFinite(&'static str),

    #[error("readout is empty: no node kept an incoming edge")]
    EmptyReadout,

    #[error("training diverged: {0}")]
    Divergence(String),
}

impl Error {
    /// Attaches the offending path to an i/o error.
    pub fn file(path: impl AsRef<std::path::Path>) -> impl FnOnce(std::io::Error) -> Self {
        let path = path.as_ref().to_path_buf();
        move |source| Error::File { path, source }
    }

    pub(crate) fn shape(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Shape {
            op,
            detail: detail.into(),
        }
    }

    /// Process exit code used by the command line front end.
    ///
    /// 1 usage, 2 data, 3 numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidConfig(_) | Error::InvalidSpec(_) => 1,
            Error::NonFinite(_) | Error::Divergence(_) | Error::EmptyReadout => 3,
            _ => 2,
        }
    }
}
