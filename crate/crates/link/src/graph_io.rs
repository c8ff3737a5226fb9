//! One-line JSON records for scene graphs.

use oar_core::graph::{structural_violations, validate_graph, OarGraph, Vocabulary};
use oar_core::SLOTS;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphParseError {
    #[error("malformed graph at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("{0}")]
    Invalid(String),
}

pub fn serialize_graph(g: &OarGraph) -> String {
    serde_json::to_string(g).expect("graph fields are plain numbers")
}

/// Parses one graph and checks its structure (unique slots in range,
/// edges between present nodes, confidences in `[0, 1]`).
pub fn parse_graph(text: &str) -> Result<OarGraph, GraphParseError> {
    let g: OarGraph = serde_json::from_str(text).map_err(|e| GraphParseError::Syntax {
        offset: byte_offset(text, e.line(), e.column()),
        message: strip_position(&e.to_string()),
    })?;
    if let Some(v) = structural_violations(&g, SLOTS).first() {
        return Err(GraphParseError::Invalid(v.to_string()));
    }
    Ok(g)
}

/// [`parse_graph`] followed by the vocabulary checks.
pub fn parse_graph_with(text: &str, vocab: &Vocabulary) -> Result<OarGraph, GraphParseError> {
    let g = parse_graph(text)?;
    let report = validate_graph(&g, vocab);
    match report.violations.first() {
        Some(v) => Err(GraphParseError::Invalid(v.to_string())),
        None => Ok(g),
    }
}

fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    if line == 0 {
        return 0;
    }
    let start: usize = text.split_inclusive('\n').take(line - 1).map(str::len).sum();
    (start + column.saturating_sub(1)).min(text.len())
}

fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_string(),
        None => msg.to_string(),
    }
}
