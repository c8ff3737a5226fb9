#![allow(dead_code)]

use oar_core::graph::{ObjectNode, OarGraph, RelationEdge};
use oar_core::rng::rng_from;
use rand::seq::SliceRandom;
use rand::Rng;

/// Small random graph over a narrow label alphabet so that matches and
/// near-matches are common. Attributes are taken from the first three
/// (color) attributes, which every builtin entity accepts.
pub fn small_graph(seed: u64, max_nodes: usize, categories: usize, predicates: usize) -> OarGraph {
    let mut rng = rng_from(seed);
    let n = rng.random_range(0..=max_nodes);
    let mut slots: Vec<usize> = (0..30).collect();
    slots.shuffle(&mut rng);
    let nodes: Vec<ObjectNode> = slots[..n]
        .iter()
        .map(|&slot| ObjectNode {
            slot,
            category: rng.random_range(0..categories),
            attribute: rng.random_bool(0.4).then(|| rng.random_range(0..3)),
            confidence: 1.0,
        })
        .collect();
    let mut edges = Vec::new();
    for a in &nodes {
        for b in &nodes {
            if a.slot != b.slot && rng.random_bool(0.35) {
                edges.push(RelationEdge {
                    subject: a.slot,
                    object: b.slot,
                    predicate: rng.random_range(0..predicates),
                    confidence: 1.0,
                });
            }
        }
    }
    OarGraph { nodes, edges }
}

/// Same graph with slots permuted.
pub fn relabel(g: &OarGraph, seed: u64) -> OarGraph {
    let mut rng = rng_from(seed);
    let mut perm: Vec<usize> = (0..30).collect();
    perm.shuffle(&mut rng);
    OarGraph {
        nodes: g.nodes.iter().map(|n| ObjectNode { slot: perm[n.slot], ..n.clone() }).collect(),
        edges: g
            .edges
            .iter()
            .map(|e| RelationEdge { subject: perm[e.subject], object: perm[e.object], ..e.clone() })
            .collect(),
    }
}
