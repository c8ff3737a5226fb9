//! JSONL graph corpora.

use std::fs;
use std::path::Path;

use oar_core::graph::{OarGraph, Vocabulary};

use crate::graph_io::parse_graph_with;
use crate::Error;

/// Reads one graph per line. Blank lines are skipped; the first invalid
/// line aborts the load.
pub fn load_corpus(path: &Path, vocab: &Vocabulary) -> Result<Vec<OarGraph>, Error> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_corpus(&text, vocab).map_err(|(line, source)| Error::Corpus { path: path.to_path_buf(), line, source })
}

pub fn parse_corpus(text: &str, vocab: &Vocabulary) -> Result<Vec<OarGraph>, (usize, crate::GraphParseError)> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| parse_graph_with(l, vocab).map_err(|e| (i + 1, e)))
        .collect()
}
