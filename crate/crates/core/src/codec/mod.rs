//! Codebook-based semantic transceiver.
//!
//! The encoder routes fused evidence into three latent streams of `N` slots
//! each: objects (entity codeword scaled by confidence), attributes
//! (attribute codeword of the slot's object) and relations
//! (`[subject code | object code | predicate]`). Each latent row is
//! compressed from `D` to `D_c` channel symbols. The receiver decodes
//! objects first, then attributes and relations conditioned on them.

mod codebook;
pub mod linalg;
mod uniform;

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

pub use codebook::{
    Codebook, CodebookError, CodebookParams, Family, FamilySizes, ShapeError, DISTORTION_BOUND,
    MAX_COHERENCE, NORM_TOLERANCE, PROJECTION_TOLERANCE,
};
pub use linalg::Matrix;
pub use uniform::UniformCodec;

use crate::graph::{ObjectNode, OarGraph, RelationEdge, Vocabulary};
use linalg::dot;

/// Default detection threshold.
pub const DEFAULT_THRESHOLD: f64 = 0.5;
const LOGISTIC_SLOPE: f64 = 8.0;
const LOGISTIC_MIDPOINT: f64 = 0.5;

/// Maps a correlation to a detection confidence in `[0, 1]`.
pub fn squash(correlation: f64) -> f64 {
    1.0 / (1.0 + libm::exp(-LOGISTIC_SLOPE * (correlation - LOGISTIC_MIDPOINT)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stream {
    Obj,
    Attr,
    Rel,
}

impl Stream {
    /// Order in which transmitted streams are serialized onto the channel.
    pub const TRANSMIT_ORDER: [Stream; 3] = [Stream::Obj, Stream::Rel, Stream::Attr];
}

/// One stream's `N x D_c` channel symbols. Untransmitted blocks are all zero.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolBlock {
    stream: Stream,
    symbols: Matrix,
    transmitted: bool,
}

impl SymbolBlock {
    pub fn sent(stream: Stream, symbols: Matrix) -> Self {
        Self { stream, symbols, transmitted: true }
    }

    /// Zero block standing in for a stream that was not sent.
    pub fn padded(stream: Stream, slots: usize, channel_dim: usize) -> Self {
        Self { stream, symbols: Matrix::zeros(slots, channel_dim), transmitted: false }
    }

    pub fn stream(&self) -> Stream {
        self.stream
    }

    pub fn symbols(&self) -> &Matrix {
        &self.symbols
    }

    pub fn symbols_mut(&mut self) -> Option<&mut Matrix> {
        self.transmitted.then_some(&mut self.symbols)
    }

    pub fn transmitted(&self) -> bool {
        self.transmitted
    }
}

/// The three stream blocks of one sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub obj: SymbolBlock,
    pub attr: SymbolBlock,
    pub rel: SymbolBlock,
}

impl Frame {
    pub fn block(&self, s: Stream) -> &SymbolBlock {
        match s {
            Stream::Obj => &self.obj,
            Stream::Attr => &self.attr,
            Stream::Rel => &self.rel,
        }
    }

    pub fn block_mut(&mut self, s: Stream) -> &mut SymbolBlock {
        match s {
            Stream::Obj => &mut self.obj,
            Stream::Attr => &mut self.attr,
            Stream::Rel => &mut self.rel,
        }
    }

    /// Transmitted symbols in channel order.
    pub fn serialize(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for s in Stream::TRANSMIT_ORDER {
            let b = self.block(s);
            if b.transmitted {
                out.extend_from_slice(b.symbols.as_slice());
            }
        }
        out
    }

    /// Writes received symbols back into the transmitted blocks, in channel
    /// order. Untransmitted blocks stay zero. Panics if `rx` has the wrong
    /// length.
    pub fn deserialize(&mut self, rx: &[f64]) {
        let mut at = 0;
        for s in Stream::TRANSMIT_ORDER {
            if let Some(m) = self.block_mut(s).symbols_mut() {
                let n = m.as_slice().len();
                m.as_mut_slice().copy_from_slice(&rx[at..at + n]);
                at += n;
            }
        }
        assert_eq!(at, rx.len(), "received length does not match the frame");
    }
}

/// Latent blocks for one sample, each `N x D`.
#[derive(Debug, Clone, PartialEq)]
pub struct Latents {
    pub obj: Matrix,
    pub attr: Matrix,
    pub rel: Matrix,
}

impl Latents {
    pub fn zeros(slots: usize, dim: usize) -> Self {
        Self { obj: Matrix::zeros(slots, dim), attr: Matrix::zeros(slots, dim), rel: Matrix::zeros(slots, dim) }
    }

    pub fn get(&self, s: Stream) -> &Matrix {
        match s {
            Stream::Obj => &self.obj,
            Stream::Attr => &self.attr,
            Stream::Rel => &self.rel,
        }
    }
}

/// Encoder output.
#[derive(Debug, Clone, PartialEq)]
pub struct Encoded {
    pub latents: Latents,
    /// The encoded evidence with encoder slot numbers; what a perfect
    /// receiver reconstructs.
    pub graph: OarGraph,
    /// Source slot of each encoder slot.
    pub source_slots: Vec<usize>,
    pub truncated_objects: usize,
    /// Relations dropped by the slot ceiling.
    pub truncated_relations: usize,
}

/// Routes evidence into latent streams. Objects are ranked by confidence
/// (ties by source slot) and take encoder slots `0..`; objects beyond `N` are
/// dropped and counted. Relations whose endpoints were both encoded are
/// ranked the same way and fill relation rows.
pub fn encode(evidence: &OarGraph, cb: &Codebook) -> Encoded {
    let (n, d) = (cb.slots(), cb.latent_dim());
    let mut objects: Vec<&ObjectNode> = evidence.nodes.iter().collect();
    objects.sort_by(|a, b| b.confidence.total_cmp(&a.confidence).then(a.slot.cmp(&b.slot)));
    let truncated_objects = objects.len().saturating_sub(n);
    objects.truncate(n);

    let mut latents = Latents::zeros(n, d);
    let mut slot_of: BTreeMap<usize, usize> = BTreeMap::new();
    let mut nodes = Vec::with_capacity(objects.len());
    for (i, obj) in objects.iter().enumerate() {
        slot_of.insert(obj.slot, i);
        let row = latents.obj.row_mut(i);
        for (dst, src) in row.iter_mut().zip(cb.entity_codewords().row(obj.category)) {
            *dst = obj.confidence * src;
        }
        if let Some(a) = obj.attribute {
            latents.attr.row_mut(i).copy_from_slice(cb.attribute_codewords().row(a));
        }
        nodes.push(ObjectNode { slot: i, ..(*obj).clone() });
    }

    let mut relations: Vec<RelationEdge> = evidence
        .edges
        .iter()
        .filter_map(|e| {
            let s = *slot_of.get(&e.subject)?;
            let o = *slot_of.get(&e.object)?;
            Some(RelationEdge { subject: s, object: o, ..e.clone() })
        })
        .collect();
    relations.sort_by(|a, b| {
        b.confidence
            .total_cmp(&a.confidence)
            .then((a.subject, a.object).cmp(&(b.subject, b.object)))
    });
    let truncated_relations = relations.len().saturating_sub(n);
    relations.truncate(n);
    for (j, e) in relations.iter().enumerate() {
        let cw = cb.relation_codeword(e.subject, e.object, e.predicate);
        for (dst, src) in latents.rel.row_mut(j).iter_mut().zip(cw) {
            *dst = e.confidence * src;
        }
    }

    Encoded {
        latents,
        graph: OarGraph { nodes, edges: relations },
        source_slots: objects.iter().map(|o| o.slot).collect(),
        truncated_objects,
        truncated_relations,
    }
}

/// Compresses the streams selected by `send` (indexed obj, attr, rel) and
/// zero-pads the rest.
pub fn modulate(latents: &Latents, cb: &Codebook, send: [bool; 3]) -> Frame {
    let block = |s: Stream, on: bool| {
        if on {
            SymbolBlock::sent(s, cb.compress(latents.get(s)).expect("latents match codebook"))
        } else {
            SymbolBlock::padded(s, cb.slots(), cb.channel_dim())
        }
    };
    Frame {
        obj: block(Stream::Obj, send[0]),
        attr: block(Stream::Attr, send[1]),
        rel: block(Stream::Rel, send[2]),
    }
}

/// Latent estimates for all three blocks.
pub fn demodulate(frame: &Frame, cb: &Codebook) -> Latents {
    let z = |s: Stream| cb.decompress(frame.block(s).symbols()).expect("frame matches codebook");
    Latents { obj: z(Stream::Obj), attr: z(Stream::Attr), rel: z(Stream::Rel) }
}

/// Best-matching entity and its detection confidence for every object row.
pub fn detect_objects(z_obj: &Matrix, cb: &Codebook) -> Vec<(usize, f64)> {
    (0..z_obj.rows())
        .map(|i| {
            let (k, r) = best_match(z_obj.row(i), cb.entity_codewords(), 0..cb.sizes().entities);
            (k, squash(r))
        })
        .collect()
}

fn best_match(z: &[f64], book: &Matrix, candidates: impl IntoIterator<Item = usize>) -> (usize, f64) {
    let mut best = (0, f64::NEG_INFINITY);
    for k in candidates {
        let r = dot(z, book.row(k));
        if r > best.1 {
            best = (k, r);
        }
    }
    best
}

/// Cascaded decoding of received blocks; see [`decode_latents`].
pub fn decode_cascade(frame: &Frame, cb: &Codebook, vocab: &Vocabulary, threshold: f64) -> OarGraph {
    decode_latents(&demodulate(frame, cb), cb, vocab, threshold)
}

/// Three-stage graph reconstruction from latent estimates.
///
/// 1. Each object row is matched against every entity codeword; the slot is
///    detected when the squashed best correlation exceeds `threshold`.
/// 2. Detected slots get the best attribute among those compatible with
///    the decoded category, when its confidence exceeds `threshold`.
/// 3. Each relation row is matched against subject/object pair codes of
///    detected slots only (distinct ordered pairs) and all predicates. A
///    pair decoded by several rows keeps the most confident one, ties to
///    the lower row.
///
/// Deterministic and total: any input yields a valid, possibly empty, graph.
pub fn decode_latents(z: &Latents, cb: &Codebook, vocab: &Vocabulary, threshold: f64) -> OarGraph {
    let d = cb.latent_dim();
    let detections = detect_objects(&z.obj, cb);
    let mut nodes = Vec::new();
    for (slot, &(category, confidence)) in detections.iter().enumerate() {
        if confidence <= threshold {
            continue;
        }
        let allowed = vocab.compatible_attributes(category);
        let attribute = (!allowed.is_empty())
            .then(|| {
                let (a, r) = best_match(z.attr.row(slot), cb.attribute_codewords(), allowed.iter().copied());
                (squash(r) > threshold).then_some(a)
            })
            .flatten();
        nodes.push(ObjectNode { slot, category, attribute, confidence });
    }

    let mut edges = Vec::new();
    if nodes.len() >= 2 {
        let slots: Vec<usize> = nodes.iter().map(|n| n.slot).collect();
        let pair = cb.pair_codes();
        let norm = 1.0 / libm::sqrt(3.0);
        let mut candidates = Vec::new();
        for row in 0..z.rel.rows() {
            let r = z.rel.row(row);
            let (rs, ro, rp) = (&r[..d / 4], &r[d / 4..d / 2], &r[d / 2..]);
            let subj: Vec<f64> = slots.iter().map(|&s| dot(rs, pair.row(s))).collect();
            let obj: Vec<f64> = slots.iter().map(|&s| dot(ro, pair.row(s))).collect();
            let ((si, oi), pair_score) = best_distinct_pair(&subj, &obj);
            let (pred, pred_score) = best_match(rp, cb.predicate_codewords(), 0..cb.sizes().predicates);
            let conf = squash(norm * (pair_score + pred_score));
            if conf > threshold {
                candidates.push((slots[si], slots[oi], pred, conf, row));
            }
        }
        candidates.sort_by(|a, b| b.3.total_cmp(&a.3).then(a.4.cmp(&b.4)));
        let mut used = alloc::collections::BTreeSet::new();
        let mut kept: Vec<(usize, RelationEdge)> = Vec::new();
        for (s, o, p, c, row) in candidates {
            if used.insert((s, o)) {
                kept.push((row, RelationEdge { subject: s, object: o, predicate: p, confidence: c }));
            }
        }
        kept.sort_by_key(|(row, _)| *row);
        edges = kept.into_iter().map(|(_, e)| e).collect();
    }
    OarGraph { nodes, edges }
}

/// Maximizes `subj[i] + obj[j]` over `i != j`. Needs at least two entries.
fn best_distinct_pair(subj: &[f64], obj: &[f64]) -> ((usize, usize), f64) {
    let top2 = |v: &[f64]| {
        let mut first = 0;
        for (i, &x) in v.iter().enumerate() {
            if x > v[first] {
                first = i;
            }
        }
        let mut second = if first == 0 { 1 } else { 0 };
        for (i, &x) in v.iter().enumerate() {
            if i != first && x > v[second] {
                second = i;
            }
        }
        (first, second)
    };
    let (s1, s2) = top2(subj);
    let (o1, o2) = top2(obj);
    if s1 != o1 {
        return ((s1, o1), subj[s1] + obj[o1]);
    }
    let a = subj[s1] + obj[o2];
    let b = subj[s2] + obj[o1];
    if a >= b {
        ((s1, o2), a)
    } else {
        ((s2, o1), b)
    }
}

/// Zero latent block helper for callers building blocks by hand.
pub fn zero_latent(cb: &Codebook) -> Matrix {
    Matrix::zeros(cb.slots(), cb.latent_dim())
}

/// Mean squashed detection confidence over the given object rows.
pub fn mean_detection_confidence(z_obj: &Matrix, cb: &Codebook, rows: usize) -> f64 {
    let det = detect_objects(z_obj, cb);
    if rows == 0 {
        return 0.0;
    }
    det.iter().take(rows).map(|&(_, c)| c).sum::<f64>() / rows as f64
}
