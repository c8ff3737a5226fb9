use oar_core::graph::{validate_graph, Vocabulary};
use oar_core::rng::derive_seed;
use oar_core::worldgen::{
    evidence_graph, fuse, generate_scene, observe, EvidenceRef, Modality, ModalityView, ObservationConfig,
    SceneConfig,
};
use proptest::prelude::*;

fn scene_cfg(seed: u64) -> SceneConfig {
    SceneConfig { seed, ..SceneConfig::default() }
}

#[test]
fn relation_count_matches_clamped_poisson() {
    let v = Vocabulary::builtin();
    let n = 10_000;
    let mut total = 0usize;
    for s in 0..n {
        let g = generate_scene(&scene_cfg(s), &v);
        assert!(g.nodes.len() <= 30 && g.edges.len() <= 30 && !g.nodes.is_empty());
        if s < 1000 {
            assert!(validate_graph(&g, &v).is_ok());
        }
        total += g.edges.len();
    }
    let mean = total as f64 / n as f64;
    assert!((10.6..=11.4).contains(&mean), "{mean}");
}

#[test]
fn scene_examples() {
    let v = Vocabulary::builtin();
    let cfg = SceneConfig { mean_objects: 0.0, ..scene_cfg(4) };
    let g = generate_scene(&cfg, &v);
    assert_eq!(g.nodes.len(), 1);
    assert!(g.edges.is_empty());
    assert_eq!(generate_scene(&scene_cfg(9), &v), generate_scene(&scene_cfg(9), &v));
}

#[test]
fn categories_have_a_long_tail() {
    let v = Vocabulary::builtin();
    let mut counts = vec![0usize; v.entity_count()];
    for s in 0..2000 {
        for n in generate_scene(&scene_cfg(s), &v).nodes {
            counts[n.category] += 1;
        }
    }
    assert!(counts[0] > 5 * counts[20].max(1));
}

#[test]
fn observation_examples() {
    let v = Vocabulary::builtin();
    let scene = generate_scene(&scene_cfg(5), &v);
    let full = observe(&scene, Modality::Image, &ObservationConfig::perfect(), &v, 1);
    assert_eq!(full.evidence.len(), scene.nodes.len() + scene.edges.len());
    assert!(full.evidence.iter().all(|&(_, c)| c == 1.0));
    let none = ObservationConfig {
        p_img_node: 0.0,
        p_img_edge: 0.0,
        p_txt_node: 0.0,
        p_txt_edge: 0.0,
        p_aud_event: 0.0,
        ..ObservationConfig::default()
    };
    for m in Modality::ALL {
        assert!(observe(&scene, m, &none, &v, 1).evidence.is_empty());
    }
}

#[test]
fn inclusion_rate_at_one_half() {
    let v = Vocabulary::builtin();
    let cfg = ObservationConfig { p_img_node: 0.5, ..ObservationConfig::default() };
    let (mut seen, mut draws) = (0usize, 0usize);
    let mut s = 0;
    while draws < 10_000 {
        let scene = generate_scene(&scene_cfg(s), &v);
        let view = observe(&scene, Modality::Image, &cfg, &v, derive_seed(1, &[s]));
        seen += view.evidence.iter().filter(|(r, _)| matches!(r, EvidenceRef::Node(_))).count();
        draws += scene.nodes.len();
        s += 1;
    }
    let rate = seen as f64 / draws as f64;
    assert!((0.48..=0.52).contains(&rate), "{rate}");
}

#[test]
fn audio_only_reports_sources() {
    let v = Vocabulary::builtin();
    let sources = v.audio_emitting_entities();
    for s in 0..200 {
        let scene = generate_scene(&scene_cfg(s), &v);
        let view = observe(&scene, Modality::Audio, &ObservationConfig::perfect(), &v, s);
        for (r, _) in view.evidence {
            match r {
                EvidenceRef::Node(slot) => assert!(sources.contains(&scene.category_of(slot).unwrap())),
                EvidenceRef::Edge(..) => panic!("audio edge"),
            }
        }
    }
}

#[test]
fn fusion_examples() {
    let r = EvidenceRef::Node(0);
    let view = |c| ModalityView { modality: Modality::Image, evidence: vec![(r, c)] };
    assert!((fuse(&[view(0.7)])[&r] - 0.7).abs() < 1e-12);
    assert!((fuse(&[view(0.5), view(0.5)])[&r] - 0.75).abs() < 1e-12);
    assert!((fuse(&[view(0.5), view(0.5), view(0.5)])[&r] - 0.875).abs() < 1e-12);
}

#[test]
fn more_modalities_recover_more_objects() {
    let v = Vocabulary::builtin();
    let cfg = ObservationConfig::default();
    let subsets: [&[Modality]; 7] = [
        &[Modality::Image],
        &[Modality::Text],
        &[Modality::Audio],
        &[Modality::Image, Modality::Text],
        &[Modality::Image, Modality::Audio],
        &[Modality::Text, Modality::Audio],
        &[Modality::Image, Modality::Text, Modality::Audio],
    ];
    let mut recall = [0.0; 7];
    let n = 1000;
    for s in 0..n {
        let scene = generate_scene(&scene_cfg(s), &v);
        let views: Vec<ModalityView> =
            Modality::ALL.iter().map(|&m| observe(&scene, m, &cfg, &v, derive_seed(s, &[m as u64]))).collect();
        for (i, set) in subsets.iter().enumerate() {
            let chosen: Vec<ModalityView> = views.iter().filter(|w| set.contains(&w.modality)).cloned().collect();
            let g = evidence_graph(&scene, &fuse(&chosen));
            recall[i] += g.nodes.len() as f64 / scene.nodes.len() as f64 / n as f64;
        }
    }
    let contains = |big: &[Modality], small: &[Modality]| small.iter().all(|m| big.contains(m));
    for i in 0..7 {
        for j in 0..7 {
            if i != j && contains(subsets[i], subsets[j]) {
                assert!(recall[i] > recall[j], "{:?} {} vs {:?} {}", subsets[i], recall[i], subsets[j], recall[j]);
            }
        }
    }
}

fn arb_view() -> impl Strategy<Value = ModalityView> {
    prop::collection::vec((0usize..6, 0.0f64..=1.0), 0..6).prop_map(|ev| ModalityView {
        modality: Modality::Image,
        evidence: ev.into_iter().map(|(s, c)| (EvidenceRef::Node(s), c)).collect(),
    })
}

proptest! {
    #[test]
    fn fuse_is_order_free_and_monotone(a in arb_view(), b in arb_view(), c in arb_view()) {
        let abc = fuse(&[a.clone(), b.clone(), c.clone()]);
        let cab = fuse(&[c.clone(), a.clone(), b.clone()]);
        prop_assert_eq!(abc.len(), cab.len());
        for (r, x) in &abc {
            prop_assert!((x - cab[r]).abs() < 1e-12);
        }
        let ab = fuse(&[a, b]);
        for (r, x) in &ab {
            prop_assert!(abc[r] >= *x - 1e-12);
        }
        for x in abc.values() {
            prop_assert!((0.0..=1.0).contains(x));
        }
    }
}
