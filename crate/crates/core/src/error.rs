use std::io;

/// Errors produced anywhere in the detection pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("remote service unavailable: {0}")]
    RemoteUnavailable(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("partial response: expected {expected} items, got {got}")]
    PartialResponse { expected: usize, got: usize },

    #[error("insufficient vectors: need at least {needed}, got {got}")]
    InsufficientVectors { needed: usize, got: usize },

    #[error("index is empty")]
    EmptyIndex,

    #[error("bad product-quantizer shape: {0}")]
    BadPqShape(String),

    #[error("PQ code byte {code} out of range for {ks} centroids")]
    CodeOutOfRange { code: u8, ks: usize },

    #[error("duplicate id {0}")]
    DuplicateId(u64),

    #[error("corrupt file: {0}")]
    CorruptFile(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("label {label} out of range for {classes} classes")]
    LabelOutOfRange { label: usize, classes: usize },

    #[error("confusion matrix is empty")]
    EmptyMatrix,

    #[error("query set is empty")]
    EmptyQuerySet,

    #[error("need segments from at least 2 documents")]
    InsufficientDocuments,

    #[error("too few samples: need at least {needed}, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("classifier has not been trained")]
    ModelNotTrained,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("failed to bind {addr}: {source}")]
    BindFailure { addr: String, source: io::Error },

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
