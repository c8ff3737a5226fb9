//! Synthetic scenes and per-modality observations.
//!
//! Scenes follow long-tailed (Zipf) category statistics. Each modality sees
//! an independent random subset of the scene with noisy confidences, and
//! views are combined by noisy-OR fusion.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng as _;
use rand_distr::{Distribution, Normal, Poisson, Zipf};
use serde::{Deserialize, Serialize};

use crate::graph::{ObjectNode, OarGraph, RelationEdge, Vocabulary};
use crate::rng::{rng_from, Rng};
use crate::SLOTS;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SceneConfig {
    pub mean_objects: f64,
    pub mean_visual_relations: f64,
    pub mean_audio_relations: f64,
    pub attribute_probability: f64,
    pub seed: u64,
}

impl Default for SceneConfig {
    fn default() -> Self {
        Self {
            mean_objects: 8.0,
            mean_visual_relations: 10.4,
            mean_audio_relations: 0.6,
            attribute_probability: 0.6,
            seed: 0,
        }
    }
}

impl SceneConfig {
    pub fn is_valid(&self) -> bool {
        self.mean_objects >= 0.0
            && self.mean_visual_relations >= 0.0
            && self.mean_audio_relations >= 0.0
            && (0.0..=1.0).contains(&self.attribute_probability)
    }
}

fn poisson(rng: &mut Rng, mean: f64) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean).expect("positive finite mean").sample(rng) as u64
}

/// Zero-based rank drawn from Zipf(s = 1) over `n` items.
fn zipf_index(rng: &mut Rng, n: usize) -> usize {
    let z = Zipf::new(n as f64, 1.0).expect("n >= 1");
    (z.sample(rng) as usize).clamp(1, n) - 1
}

/// Draws a ground-truth scene. Object count is Poisson clamped to
/// `[1, SLOTS]`, relation count Poisson clamped to
/// `[0, min(SLOTS, n(n-1))]`, with at most one relation per ordered pair.
/// Nodes occupy slots `0..n` with confidence 1.
pub fn generate_scene(cfg: &SceneConfig, vocab: &Vocabulary) -> OarGraph {
    let mut rng = rng_from(cfg.seed);
    let n = (poisson(&mut rng, cfg.mean_objects) as usize).clamp(1, SLOTS);
    let mut nodes = Vec::with_capacity(n);
    for slot in 0..n {
        let category = zipf_index(&mut rng, vocab.entity_count());
        let allowed = vocab.compatible_attributes(category);
        let attribute = (!allowed.is_empty() && rng.random_bool(cfg.attribute_probability))
            .then(|| allowed[zipf_index(&mut rng, allowed.len())]);
        nodes.push(ObjectNode { slot, category, attribute, confidence: 1.0 });
    }
    let cap = SLOTS.min(n * (n - 1));
    let mean_rel = cfg.mean_visual_relations + cfg.mean_audio_relations;
    let count = (poisson(&mut rng, mean_rel) as usize).min(cap);
    let mut pairs: Vec<(usize, usize)> =
        (0..n).flat_map(|s| (0..n).filter(move |&o| o != s).map(move |o| (s, o))).collect();
    let (chosen, _) = pairs.partial_shuffle(&mut rng, count);
    let mut chosen = chosen.to_vec();
    chosen.sort_unstable();
    let edges = chosen
        .into_iter()
        .map(|(subject, object)| RelationEdge {
            subject,
            object,
            predicate: zipf_index(&mut rng, vocab.predicate_count()),
            confidence: 1.0,
        })
        .collect();
    OarGraph { nodes, edges }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Modality {
    Image,
    Text,
    Audio,
}

impl Modality {
    pub const ALL: [Modality; 3] = [Modality::Image, Modality::Text, Modality::Audio];

    pub fn name(&self) -> &'static str {
        match self {
            Modality::Image => "image",
            Modality::Text => "text",
            Modality::Audio => "audio",
        }
    }

    pub fn code(&self) -> char {
        match self {
            Modality::Image => 'I',
            Modality::Text => 'T',
            Modality::Audio => 'A',
        }
    }
}

/// A node (by slot) or an edge (by ordered slot pair).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EvidenceRef {
    Node(usize),
    Edge(usize, usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModalityView {
    pub modality: Modality,
    pub evidence: Vec<(EvidenceRef, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ObservationConfig {
    pub p_img_node: f64,
    pub p_img_edge: f64,
    pub p_txt_node: f64,
    pub p_txt_edge: f64,
    pub p_aud_event: f64,
    /// Standard deviation of the Gaussian that erodes confidences.
    pub noise_scale: f64,
    /// Entity categories that can be heard. `None` uses the vocabulary's
    /// audio sources.
    pub audio_entities: Option<Vec<usize>>,
}

impl Default for ObservationConfig {
    fn default() -> Self {
        Self {
            p_img_node: 0.7,
            p_img_edge: 0.6,
            p_txt_node: 0.5,
            p_txt_edge: 0.4,
            p_aud_event: 0.8,
            noise_scale: 0.1,
            audio_entities: None,
        }
    }
}

impl ObservationConfig {
    /// Every element visible with confidence 1.
    pub fn perfect() -> Self {
        Self {
            p_img_node: 1.0,
            p_img_edge: 1.0,
            p_txt_node: 1.0,
            p_txt_edge: 1.0,
            p_aud_event: 1.0,
            noise_scale: 0.0,
            audio_entities: None,
        }
    }

    pub fn is_valid(&self) -> bool {
        let unit = |p: f64| (0.0..=1.0).contains(&p);
        [self.p_img_node, self.p_img_edge, self.p_txt_node, self.p_txt_edge, self.p_aud_event]
            .into_iter()
            .all(unit)
            && self.noise_scale >= 0.0
    }

    fn visibility(&self, m: Modality) -> (f64, f64) {
        match m {
            Modality::Image => (self.p_img_node, self.p_img_edge),
            Modality::Text => (self.p_txt_node, self.p_txt_edge),
            Modality::Audio => (self.p_aud_event, 0.0),
        }
    }
}

/// One modality's partial, noisy view of `scene`. Audio only reports nodes
/// whose category is an audio source. Every element consumes the same
/// random draws whether or not it is visible, so views for different
/// configurations stay aligned under one seed.
pub fn observe(
    scene: &OarGraph,
    modality: Modality,
    cfg: &ObservationConfig,
    vocab: &Vocabulary,
    seed: u64,
) -> ModalityView {
    let mut rng = rng_from(seed);
    let noise = (cfg.noise_scale > 0.0).then(|| Normal::new(0.0, cfg.noise_scale).expect("finite scale"));
    let draw_conf = |rng: &mut Rng| {
        let e = noise.as_ref().map_or(0.0, |n| libm::fabs(n.sample(rng)));
        (1.0 - e).clamp(0.0, 1.0)
    };
    let audio: Vec<usize> = match (&cfg.audio_entities, modality) {
        (_, m) if m != Modality::Audio => Vec::new(),
        (Some(list), _) => list.clone(),
        (None, _) => vocab.audio_emitting_entities(),
    };
    let (p_node, p_edge) = cfg.visibility(modality);
    let mut evidence = Vec::new();
    for n in &scene.nodes {
        let seen = rng.random::<f64>() < p_node;
        let conf = draw_conf(&mut rng);
        let eligible = modality != Modality::Audio || audio.contains(&n.category);
        if seen && eligible {
            evidence.push((EvidenceRef::Node(n.slot), conf));
        }
    }
    for e in &scene.edges {
        let seen = rng.random::<f64>() < p_edge;
        let conf = draw_conf(&mut rng);
        if seen {
            evidence.push((EvidenceRef::Edge(e.subject, e.object), conf));
        }
    }
    ModalityView { modality, evidence }
}

/// Combined confidence per reference.
pub type FusedEvidence = BTreeMap<EvidenceRef, f64>;

/// Noisy-OR fusion: `1 - prod(1 - c_m)` over the views reporting a
/// reference.
pub fn fuse(views: &[ModalityView]) -> FusedEvidence {
    let mut miss: BTreeMap<EvidenceRef, f64> = BTreeMap::new();
    for v in views {
        for &(r, c) in &v.evidence {
            *miss.entry(r).or_insert(1.0) *= 1.0 - c;
        }
    }
    miss.into_iter().map(|(r, m)| (r, 1.0 - m)).collect()
}

/// The part of `scene` backed by fused evidence, carrying fused confidences.
/// Edges need evidence for the edge itself and both endpoints.
pub fn evidence_graph(scene: &OarGraph, fused: &FusedEvidence) -> OarGraph {
    let nodes: Vec<ObjectNode> = scene
        .nodes
        .iter()
        .filter_map(|n| {
            let c = *fused.get(&EvidenceRef::Node(n.slot))?;
            Some(ObjectNode { confidence: c, ..n.clone() })
        })
        .collect();
    let has = |s: usize| fused.contains_key(&EvidenceRef::Node(s));
    let edges = scene
        .edges
        .iter()
        .filter(|e| has(e.subject) && has(e.object))
        .filter_map(|e| {
            let c = *fused.get(&EvidenceRef::Edge(e.subject, e.object))?;
            Some(RelationEdge { confidence: c, ..e.clone() })
        })
        .collect();
    OarGraph { nodes, edges }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::validate_graph;
    use alloc::vec;

    #[test]
    fn zero_mean_objects_gives_one_node() {
        let v = Vocabulary::builtin();
        for seed in 0..20 {
            let cfg = SceneConfig { mean_objects: 0.0, seed, ..SceneConfig::default() };
            let g = generate_scene(&cfg, &v);
            assert_eq!(g.nodes.len(), 1);
            assert!(g.edges.is_empty());
        }
    }

    #[test]
    fn scenes_are_valid_and_deterministic() {
        let v = Vocabulary::builtin();
        for seed in 0..200 {
            let cfg = SceneConfig { seed, ..SceneConfig::default() };
            let g = generate_scene(&cfg, &v);
            assert!(validate_graph(&g, &v).is_ok(), "seed {seed}");
            assert!(g.nodes.len() <= SLOTS && g.edges.len() <= SLOTS);
            assert_eq!(g, generate_scene(&cfg, &v));
        }
    }

    #[test]
    fn perfect_and_blind_views() {
        let v = Vocabulary::builtin();
        let g = generate_scene(&SceneConfig { seed: 3, ..SceneConfig::default() }, &v);
        let full = observe(&g, Modality::Image, &ObservationConfig::perfect(), &v, 1);
        assert_eq!(full.evidence.len(), g.nodes.len() + g.edges.len());
        assert!(full.evidence.iter().all(|&(_, c)| c == 1.0));
        let blind = ObservationConfig {
            p_img_node: 0.0,
            p_img_edge: 0.0,
            p_txt_node: 0.0,
            p_txt_edge: 0.0,
            p_aud_event: 0.0,
            ..ObservationConfig::default()
        };
        for m in Modality::ALL {
            assert!(observe(&g, m, &blind, &v, 9).evidence.is_empty());
        }
    }

    #[test]
    fn audio_only_reports_sources() {
        let v = Vocabulary::builtin();
        let sources = v.audio_emitting_entities();
        let g = generate_scene(&SceneConfig { seed: 5, mean_objects: 25.0, ..SceneConfig::default() }, &v);
        let view = observe(&g, Modality::Audio, &ObservationConfig::perfect(), &v, 2);
        for (r, _) in view.evidence {
            match r {
                EvidenceRef::Node(s) => assert!(sources.contains(&g.category_of(s).unwrap())),
                EvidenceRef::Edge(..) => panic!("audio has no edge evidence"),
            }
        }
    }

    #[test]
    fn noisy_or_examples() {
        let r = EvidenceRef::Node(0);
        let view = |c| ModalityView { modality: Modality::Image, evidence: vec![(r, c)] };
        assert_eq!(fuse(&[view(0.7)])[&r], 0.7);
        assert_eq!(fuse(&[view(0.5), view(0.5)])[&r], 0.75);
        assert_eq!(fuse(&[view(0.5), view(0.5), view(0.5)])[&r], 0.875);
        assert!(fuse(&[]).is_empty());
    }

    #[test]
    fn evidence_graph_drops_orphan_edges() {
        let scene = OarGraph {
            nodes: vec![
                ObjectNode { slot: 0, category: 1, attribute: None, confidence: 1.0 },
                ObjectNode { slot: 1, category: 2, attribute: None, confidence: 1.0 },
            ],
            edges: vec![RelationEdge { subject: 0, object: 1, predicate: 0, confidence: 1.0 }],
        };
        let mut fused = FusedEvidence::new();
        fused.insert(EvidenceRef::Node(0), 0.9);
        fused.insert(EvidenceRef::Edge(0, 1), 0.8);
        let g = evidence_graph(&scene, &fused);
        assert_eq!(g.nodes.len(), 1);
        assert!(g.edges.is_empty());
        fused.insert(EvidenceRef::Node(1), 0.6);
        let g = evidence_graph(&scene, &fused);
        assert_eq!(g.edges[0].confidence, 0.8);
        assert_eq!(g.nodes[1].confidence, 0.6);
    }
}
