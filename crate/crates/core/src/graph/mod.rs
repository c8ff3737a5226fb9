//! Scene-graph data model: vocabulary, object/relation graph, validation and
//! graph edit distance.

mod assignment;
mod ged;
mod vocab;

use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

pub use assignment::min_cost_assignment;
pub use ged::{ged, ged_approx, ged_exact, GedCosts, GedError, GedResult, EXACT_NODE_LIMIT};
pub use vocab::{Vocabulary, VocabError, VocabularyParts};

use crate::SLOTS;

/// An object slot with its entity category and optional attribute.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectNode {
    pub slot: usize,
    pub category: usize,
    pub attribute: Option<usize>,
    pub confidence: f64,
}

/// A directed relation between two object slots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationEdge {
    pub subject: usize,
    pub object: usize,
    pub predicate: usize,
    pub confidence: f64,
}

/// Object-attribute-relation scene graph.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct OarGraph {
    pub nodes: Vec<ObjectNode>,
    pub edges: Vec<RelationEdge>,
}

impl OarGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty() && self.edges.is_empty()
    }

    pub fn node(&self, slot: usize) -> Option<&ObjectNode> {
        self.nodes.iter().find(|n| n.slot == slot)
    }

    /// Category of the node occupying `slot`.
    pub fn category_of(&self, slot: usize) -> Option<usize> {
        self.node(slot).map(|n| n.category)
    }

    /// `(subject category, predicate, object category)` for every edge whose
    /// endpoints resolve.
    pub fn triplets(&self) -> Vec<((usize, usize, usize), f64)> {
        self.edges
            .iter()
            .filter_map(|e| {
                let s = self.category_of(e.subject)?;
                let o = self.category_of(e.object)?;
                Some(((s, e.predicate, o), e.confidence))
            })
            .collect()
    }
}

/// A single broken invariant.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    SlotOutOfRange { slot: usize, limit: usize },
    DuplicateSlot { slot: usize },
    UnknownCategory { slot: usize, category: usize },
    UnknownAttribute { slot: usize, attribute: usize },
    IncompatibleAttribute { slot: usize, category: usize, attribute: usize },
    NodeConfidence { slot: usize, confidence: f64 },
    DanglingEdge { subject: usize, object: usize },
    SelfLoop { slot: usize },
    DuplicatePair { subject: usize, object: usize },
    UnknownPredicate { subject: usize, object: usize, predicate: usize },
    EdgeConfidence { subject: usize, object: usize, confidence: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::SlotOutOfRange { slot, limit } => {
                write!(f, "slot out of range: {slot} >= {limit}")
            }
            Violation::DuplicateSlot { slot } => write!(f, "duplicate slot {slot}"),
            Violation::UnknownCategory { slot, category } => {
                write!(f, "unknown entity category {category} at slot {slot}")
            }
            Violation::UnknownAttribute { slot, attribute } => {
                write!(f, "unknown attribute {attribute} at slot {slot}")
            }
            Violation::IncompatibleAttribute { slot, category, attribute } => write!(
                f,
                "incompatible attribute {attribute} for category {category} at slot {slot}"
            ),
            Violation::NodeConfidence { slot, confidence } => {
                write!(f, "node confidence {confidence} outside [0,1] at slot {slot}")
            }
            Violation::DanglingEdge { subject, object } => {
                write!(f, "dangling edge endpoint in {subject}->{object}")
            }
            Violation::SelfLoop { slot } => write!(f, "self loop at slot {slot}"),
            Violation::DuplicatePair { subject, object } => {
                write!(f, "duplicate edge for ordered pair {subject}->{object}")
            }
            Violation::UnknownPredicate { subject, object, predicate } => {
                write!(f, "unknown predicate {predicate} on {subject}->{object}")
            }
            Violation::EdgeConfidence { subject, object, confidence } => write!(
                f,
                "edge confidence {confidence} outside [0,1] on {subject}->{object}"
            ),
        }
    }
}

/// Outcome of [`validate_graph`]; violations are data, not errors.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

fn unit_interval(x: f64) -> bool {
    (0.0..=1.0).contains(&x)
}

/// Invariants that do not depend on a vocabulary: slot range and uniqueness,
/// edge endpoints, self loops, duplicate ordered pairs, confidence ranges.
pub fn structural_violations(g: &OarGraph, slots: usize) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut seen = alloc::collections::BTreeSet::new();
    for n in &g.nodes {
        if n.slot >= slots {
            out.push(Violation::SlotOutOfRange { slot: n.slot, limit: slots });
        }
        if !seen.insert(n.slot) {
            out.push(Violation::DuplicateSlot { slot: n.slot });
        }
        if !unit_interval(n.confidence) {
            out.push(Violation::NodeConfidence { slot: n.slot, confidence: n.confidence });
        }
    }
    let mut pairs = alloc::collections::BTreeSet::new();
    for e in &g.edges {
        if e.subject == e.object {
            out.push(Violation::SelfLoop { slot: e.subject });
        }
        if !seen.contains(&e.subject) || !seen.contains(&e.object) {
            out.push(Violation::DanglingEdge { subject: e.subject, object: e.object });
        }
        if !pairs.insert((e.subject, e.object)) {
            out.push(Violation::DuplicatePair { subject: e.subject, object: e.object });
        }
        if !unit_interval(e.confidence) {
            out.push(Violation::EdgeConfidence {
                subject: e.subject,
                object: e.object,
                confidence: e.confidence,
            });
        }
    }
    out
}

/// Checks every graph invariant against `vocab` with the default slot count.
pub fn validate_graph(g: &OarGraph, vocab: &Vocabulary) -> ValidationReport {
    validate_graph_with_slots(g, vocab, SLOTS)
}

pub fn validate_graph_with_slots(g: &OarGraph, vocab: &Vocabulary, slots: usize) -> ValidationReport {
    let mut violations = structural_violations(g, slots);
    for n in &g.nodes {
        if n.category >= vocab.entity_count() {
            violations.push(Violation::UnknownCategory { slot: n.slot, category: n.category });
            continue;
        }
        if let Some(a) = n.attribute {
            if a >= vocab.attribute_count() {
                violations.push(Violation::UnknownAttribute { slot: n.slot, attribute: a });
            } else if !vocab.attribute_allowed(n.category, a) {
                violations.push(Violation::IncompatibleAttribute {
                    slot: n.slot,
                    category: n.category,
                    attribute: a,
                });
            }
        }
    }
    for e in &g.edges {
        if e.predicate >= vocab.predicate_count() {
            violations.push(Violation::UnknownPredicate {
                subject: e.subject,
                object: e.object,
                predicate: e.predicate,
            });
        }
    }
    ValidationReport { violations }
}
