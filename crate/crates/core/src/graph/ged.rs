//! Graph edit distance between scene graphs.
//!
//! Nodes are matched by label (category, attribute); slot numbers are
//! transport artifacts and carry no identity. Small instances are solved
//! exactly with A*; larger ones get a bipartite-assignment upper bound
//! refined by local search.

use alloc::collections::{BTreeMap, BinaryHeap};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use serde::{Deserialize, Serialize};

use super::assignment::min_cost_assignment;
use super::OarGraph;

/// Instances with at most this many nodes in total are solved exactly.
pub const EXACT_NODE_LIMIT: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GedCosts {
    pub node_sub: f64,
    pub node_indel: f64,
    pub edge_sub: f64,
    pub edge_indel: f64,
    /// Charged instead of `node_sub` when categories agree but attributes
    /// differ. Must lie in `[0, node_sub]`.
    pub attr_mismatch: f64,
}

impl Default for GedCosts {
    fn default() -> Self {
        Self { node_sub: 1.0, node_indel: 1.0, edge_sub: 1.0, edge_indel: 1.0, attr_mismatch: 0.5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GedError {
    InvalidCost(&'static str),
}

impl fmt::Display for GedError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GedError::InvalidCost(name) => write!(f, "invalid edit cost: {name}"),
        }
    }
}

impl GedCosts {
    pub fn check(&self) -> Result<(), GedError> {
        let positive = [
            ("node_sub", self.node_sub),
            ("node_indel", self.node_indel),
            ("edge_sub", self.edge_sub),
            ("edge_indel", self.edge_indel),
        ];
        for (name, c) in positive {
            if !(c > 0.0 && c.is_finite()) {
                return Err(GedError::InvalidCost(name));
            }
        }
        if !(self.attr_mismatch >= 0.0 && self.attr_mismatch <= self.node_sub) {
            return Err(GedError::InvalidCost("attr_mismatch"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GedResult {
    pub raw: f64,
    /// `raw / max(1, |V1|+|E1|, |V2|+|E2|)`.
    pub normalized: f64,
    /// False when the value is an upper bound from the approximation.
    pub exact: bool,
}

struct Compact {
    labels: Vec<(usize, Option<usize>)>,
    adj: Vec<Option<usize>>,
    edges: Vec<(usize, usize, usize)>,
}

impl Compact {
    fn new(g: &OarGraph) -> Self {
        let index: BTreeMap<usize, usize> =
            g.nodes.iter().enumerate().map(|(i, n)| (n.slot, i)).collect();
        let n = g.nodes.len();
        let mut adj = vec![None; n * n];
        let mut edges = Vec::with_capacity(g.edges.len());
        for e in &g.edges {
            if let (Some(&s), Some(&o)) = (index.get(&e.subject), index.get(&e.object)) {
                if s != o && adj[s * n + o].is_none() {
                    adj[s * n + o] = Some(e.predicate);
                    edges.push((s, o, e.predicate));
                }
            }
        }
        Self { labels: g.nodes.iter().map(|n| (n.category, n.attribute)).collect(), adj, edges }
    }

    fn len(&self) -> usize {
        self.labels.len()
    }

    fn edge(&self, s: usize, o: usize) -> Option<usize> {
        self.adj[s * self.len() + o]
    }

    fn size(&self) -> usize {
        self.labels.len() + self.edges.len()
    }
}

struct Problem<'a> {
    a: &'a Compact,
    b: &'a Compact,
    c: GedCosts,
}

impl Problem<'_> {
    fn node_cost(&self, i: usize, j: usize) -> f64 {
        let (ca, aa) = self.a.labels[i];
        let (cb, ab) = self.b.labels[j];
        if ca != cb {
            self.c.node_sub
        } else if aa != ab {
            self.c.attr_mismatch
        } else {
            0.0
        }
    }

    fn edge_pair_cost(&self, e1: Option<usize>, e2: Option<usize>) -> f64 {
        match (e1, e2) {
            (Some(p), Some(q)) if p == q => 0.0,
            (Some(_), Some(_)) => self.c.edge_sub,
            (Some(_), None) | (None, Some(_)) => self.c.edge_indel,
            (None, None) => 0.0,
        }
    }

    /// Total edit cost induced by a node mapping from `a` to `b`.
    fn mapping_cost(&self, map: &[Option<usize>]) -> f64 {
        let mut cost = 0.0;
        let mut inv = vec![None; self.b.len()];
        for (i, m) in map.iter().enumerate() {
            match *m {
                Some(j) => {
                    cost += self.node_cost(i, j);
                    inv[j] = Some(i);
                }
                None => cost += self.c.node_indel,
            }
        }
        cost += inv.iter().filter(|x| x.is_none()).count() as f64 * self.c.node_indel;
        for &(s, o, p) in &self.a.edges {
            let other = match (map[s], map[o]) {
                (Some(js), Some(jo)) => self.b.edge(js, jo),
                _ => None,
            };
            cost += self.edge_pair_cost(Some(p), other);
        }
        for &(s, o, _) in &self.b.edges {
            let covered = match (inv[s], inv[o]) {
                (Some(is), Some(io)) => self.a.edge(is, io).is_some(),
                _ => false,
            };
            if !covered {
                cost += self.c.edge_indel;
            }
        }
        cost
    }
}

/// Exact when `|V1| + |V2| <= EXACT_NODE_LIMIT`, approximate otherwise.
pub fn ged(g1: &OarGraph, g2: &OarGraph, costs: &GedCosts) -> Result<GedResult, GedError> {
    if g1.nodes.len() + g2.nodes.len() <= EXACT_NODE_LIMIT {
        ged_exact(g1, g2, costs)
    } else {
        ged_approx(g1, g2, costs)
    }
}

fn finish(raw: f64, a: &Compact, b: &Compact, exact: bool) -> GedResult {
    let denom = a.size().max(b.size()).max(1) as f64;
    GedResult { raw, normalized: raw / denom, exact }
}

#[derive(Debug)]
struct SearchNode {
    f: f64,
    g: f64,
    map: Vec<Option<usize>>,
    used: u64,
    complete: bool,
}

impl PartialEq for SearchNode {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for SearchNode {}
impl PartialOrd for SearchNode {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for SearchNode {
    // min-heap on f; deeper partial mappings first on ties
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .f
            .total_cmp(&self.f)
            .then_with(|| self.complete.cmp(&other.complete))
            .then_with(|| self.map.len().cmp(&other.map.len()))
    }
}

/// Exact graph edit distance by A* over node mappings. Practical up to a
/// dozen nodes in total; panics above 64 nodes in the second graph.
pub fn ged_exact(g1: &OarGraph, g2: &OarGraph, costs: &GedCosts) -> Result<GedResult, GedError> {
    costs.check()?;
    let a = Compact::new(g1);
    let b = Compact::new(g2);
    assert!(b.len() <= 64, "exact search supports at most 64 target nodes");
    let p = Problem { a: &a, b: &b, c: *costs };
    let n1 = a.len();
    let mut heap = BinaryHeap::new();
    heap.push(SearchNode { f: heuristic(&p, 0, 0), g: 0.0, map: Vec::new(), used: 0, complete: false });
    while let Some(node) = heap.pop() {
        if node.complete {
            return Ok(finish(node.g, &a, &b, true));
        }
        let depth = node.map.len();
        if depth == n1 {
            let g = node.g + completion_cost(&p, node.used);
            heap.push(SearchNode { f: g, g, map: node.map, used: node.used, complete: true });
            continue;
        }
        let mut targets: Vec<Option<usize>> =
            (0..b.len()).filter(|j| node.used & (1 << j) == 0).map(Some).collect();
        targets.push(None);
        for t in targets {
            let step = step_cost(&p, &node.map, depth, t);
            let mut map = node.map.clone();
            map.push(t);
            let used = match t {
                Some(j) => node.used | (1 << j),
                None => node.used,
            };
            let g = node.g + step;
            let f = g + heuristic(&p, depth + 1, used);
            heap.push(SearchNode { f, g, map, used, complete: false });
        }
    }
    unreachable!("search space always contains a complete mapping")
}

fn step_cost(p: &Problem<'_>, map: &[Option<usize>], i: usize, t: Option<usize>) -> f64 {
    let mut cost = match t {
        Some(j) => p.node_cost(i, j),
        None => p.c.node_indel,
    };
    for (k, &mk) in map.iter().enumerate() {
        let (fwd, bwd) = match (t, mk) {
            (Some(j), Some(l)) => (p.b.edge(j, l), p.b.edge(l, j)),
            _ => (None, None),
        };
        cost += p.edge_pair_cost(p.a.edge(i, k), fwd);
        cost += p.edge_pair_cost(p.a.edge(k, i), bwd);
    }
    cost
}

fn completion_cost(p: &Problem<'_>, used: u64) -> f64 {
    let free = |j: usize| used & (1 << j) == 0;
    let nodes = (0..p.b.len()).filter(|&j| free(j)).count() as f64 * p.c.node_indel;
    let edges = p.b.edges.iter().filter(|&&(s, o, _)| free(s) || free(o)).count() as f64 * p.c.edge_indel;
    nodes + edges
}

/// Admissible lower bound on the cost of completing a partial mapping in
/// which `a` nodes `[depth, n1)` are unassigned and `used` marks taken `b`
/// nodes.
fn heuristic(p: &Problem<'_>, depth: usize, used: u64) -> f64 {
    let free = |j: usize| used & (1 << j) == 0;
    let mut rest_a: Vec<usize> = p.a.labels[depth..].iter().map(|l| l.0).collect();
    let mut rest_b: Vec<usize> = (0..p.b.len()).filter(|&j| free(j)).map(|j| p.b.labels[j].0).collect();
    rest_a.sort_unstable();
    rest_b.sort_unstable();
    let common = multiset_intersection(&rest_a, &rest_b);
    let (na, nb) = (rest_a.len(), rest_b.len());
    let pairs = na.min(nb);
    let sub = p.c.node_sub.min(2.0 * p.c.node_indel);
    let mut h = na.abs_diff(nb) as f64 * p.c.node_indel + pairs.saturating_sub(common) as f64 * sub;
    let ea = p.a.edges.iter().filter(|&&(s, o, _)| s >= depth && o >= depth).count();
    let eb = p.b.edges.iter().filter(|&&(s, o, _)| free(s) && free(o)).count();
    h += ea.abs_diff(eb) as f64 * p.c.edge_indel;
    h
}

fn multiset_intersection(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => i += 1,
            Ordering::Greater => j += 1,
            Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

const FORBIDDEN: f64 = 1e12;

/// Upper bound from a bipartite node assignment with local edge-structure
/// costs, improved by first-improvement swaps of the induced mapping.
pub fn ged_approx(g1: &OarGraph, g2: &OarGraph, costs: &GedCosts) -> Result<GedResult, GedError> {
    costs.check()?;
    let a = Compact::new(g1);
    let b = Compact::new(g2);
    let p = Problem { a: &a, b: &b, c: *costs };
    let (n1, n2) = (a.len(), b.len());
    let n = n1 + n2;
    let star_a = stars(&a);
    let star_b = stars(&b);
    let mut cost = vec![FORBIDDEN; n * n];
    for i in 0..n1 {
        for j in 0..n2 {
            cost[i * n + j] = p.node_cost(i, j) + 0.5 * star_cost(&p, &star_a[i], &star_b[j]);
        }
        let deg = (star_a[i].0.len() + star_a[i].1.len()) as f64;
        cost[i * n + n2 + i] = costs.node_indel + 0.5 * deg * costs.edge_indel;
    }
    for j in 0..n2 {
        let deg = (star_b[j].0.len() + star_b[j].1.len()) as f64;
        cost[(n1 + j) * n + j] = costs.node_indel + 0.5 * deg * costs.edge_indel;
        for i in 0..n1 {
            cost[(n1 + j) * n + n2 + i] = 0.0;
        }
    }
    let assign = min_cost_assignment(&cost, n, n);
    let mut map: Vec<Option<usize>> = (0..n1).map(|i| (assign[i] < n2).then_some(assign[i])).collect();
    let mut best = p.mapping_cost(&map);
    improve(&p, &mut map, &mut best);
    Ok(finish(best, &a, &b, false))
}

type Star = (Vec<usize>, Vec<usize>);

/// Sorted outgoing and incoming predicate lists per node.
fn stars(g: &Compact) -> Vec<Star> {
    let mut out = vec![(Vec::new(), Vec::new()); g.len()];
    for &(s, o, p) in &g.edges {
        out[s].0.push(p);
        out[o].1.push(p);
    }
    for (o, i) in out.iter_mut() {
        o.sort_unstable();
        i.sort_unstable();
    }
    out
}

fn star_cost(p: &Problem<'_>, x: &Star, y: &Star) -> f64 {
    let side = |u: &[usize], v: &[usize]| {
        let m = multiset_intersection(u, v);
        let pairs = u.len().min(v.len());
        (pairs - m) as f64 * p.c.edge_sub.min(2.0 * p.c.edge_indel)
            + u.len().abs_diff(v.len()) as f64 * p.c.edge_indel
    };
    side(&x.0, &y.0) + side(&x.1, &y.1)
}

fn improve(p: &Problem<'_>, map: &mut [Option<usize>], best: &mut f64) {
    const MAX_PASSES: usize = 20;
    let n2 = p.b.len();
    for _ in 0..MAX_PASSES {
        let mut improved = false;
        for i in 0..map.len() {
            for t in (0..n2).map(Some).chain(core::iter::once(None)) {
                if map[i] == t {
                    continue;
                }
                let holder = t.and_then(|j| map.iter().position(|&m| m == Some(j)));
                let old = map[i];
                map[i] = t;
                if let Some(h) = holder {
                    map[h] = old;
                }
                let c = p.mapping_cost(map);
                if c < *best - 1e-12 {
                    *best = c;
                    improved = true;
                } else {
                    if let Some(h) = holder {
                        map[h] = t;
                    }
                    map[i] = old;
                }
            }
        }
        if !improved {
            break;
        }
    }
}
