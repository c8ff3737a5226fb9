//! File formats, experiment harness and command-line plumbing around
//! `oar-core`.

use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

pub mod codebook_io;
pub mod config;
pub mod corpus;
pub mod format;
pub mod graph_io;
pub mod harness;
pub mod vocab_io;

pub use config::{ExperimentConfig, Scheme, Snr};
pub use corpus::load_corpus;
pub use graph_io::{parse_graph, serialize_graph, GraphParseError};
pub use harness::{run_sweep, write_outputs, Experiment, Point, SummaryRow, TrialRecord};

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{}: line {line}: {source}", path.display())]
    Corpus { path: PathBuf, line: usize, source: GraphParseError },
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
}

impl Error {
    pub fn io(path: &Path, source: io::Error) -> Self {
        Error::Io { path: path.to_path_buf(), source }
    }

    /// Process exit status: 1 for bad input, 2 for I/O failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Corpus { .. } => 1,
            Error::Io { .. } => 2,
        }
    }
}
