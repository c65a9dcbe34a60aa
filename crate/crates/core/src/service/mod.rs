//! The end-to-end detector: embed a query, retrieve candidate segments, and
//! classify every (candidate, query) pair. Exposed through [`Engine`], the
//! HTTP API in [`http`] and the command line in [`cli`].

mod bench;
pub mod cli;
mod config;
mod engine;
pub mod http;

pub use bench::RetrievalBench;
pub use config::{EngineConfig, IndexSettings};
pub use engine::{
    Candidate, DetectionReport, Engine, EngineIndex, IngestMode, IngestSummary, Timings, CONFIG_FILE, EMBEDDINGS_FILE,
    INDEX_FILE, PARAMS_FILE, SEGMENTS_FILE,
};
pub use http::{
    router, serve, spawn_background, AppState, DetectRequest, IngestRequest, JobStatus, ServeOptions, TrainRequest,
};
