mod common;

use common::{relabel, small_graph};
use oar_core::graph::{ged, ged_approx, ged_exact, GedCosts, ObjectNode, OarGraph, RelationEdge};
use proptest::prelude::*;

fn unit() -> GedCosts {
    GedCosts::default()
}

#[test]
fn three_node_deletion() {
    let node = |slot, category| ObjectNode { slot, category, attribute: None, confidence: 1.0 };
    let edge = |subject, object| RelationEdge { subject, object, predicate: 0, confidence: 1.0 };
    let g1 = OarGraph { nodes: vec![node(0, 0), node(1, 1), node(2, 2)], edges: vec![edge(0, 1), edge(1, 2)] };
    let g2 = OarGraph { nodes: vec![node(0, 0), node(1, 1)], edges: vec![edge(0, 1)] };
    let r = ged_exact(&g1, &g2, &unit()).unwrap();
    assert_eq!(r.raw, 2.0);
    assert!(r.exact);
    assert!((r.normalized - 0.4).abs() < 1e-12);
}

#[test]
fn approximation_bounds_exact_on_200_pairs() {
    let mut equal = 0;
    for i in 0..200u64 {
        let a = small_graph(2 * i, 5, 3, 2);
        let b = small_graph(2 * i + 1, 5, 3, 2);
        let exact = ged_exact(&a, &b, &unit()).unwrap().raw;
        let approx = ged_approx(&a, &b, &unit()).unwrap();
        assert!(!approx.exact);
        assert!(approx.raw >= exact - 1e-9, "pair {i}: {} < {exact}", approx.raw);
        if (approx.raw - exact).abs() < 1e-9 {
            equal += 1;
        }
    }
    assert!(equal >= 180, "only {equal}/200 equal");
}

#[test]
fn large_graphs_use_the_approximation() {
    let line = |n: usize, shift: usize| OarGraph {
        nodes: (0..n).map(|i| ObjectNode { slot: i, category: (i + shift) % 4, attribute: None, confidence: 1.0 }).collect(),
        edges: (1..n).map(|i| RelationEdge { subject: i - 1, object: i, predicate: 0, confidence: 1.0 }).collect(),
    };
    let r = ged(&line(7, 0), &line(7, 1), &unit()).unwrap();
    assert!(!r.exact);
    assert!(ged(&line(6, 0), &line(6, 1), &unit()).unwrap().exact);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn symmetric(s1 in any::<u64>(), s2 in any::<u64>()) {
        let (a, b) = (small_graph(s1, 5, 3, 2), small_graph(s2, 5, 3, 2));
        let ab = ged(&a, &b, &unit()).unwrap();
        let ba = ged(&b, &a, &unit()).unwrap();
        prop_assert!((ab.raw - ba.raw).abs() < 1e-9);
        prop_assert!((ab.normalized - ba.normalized).abs() < 1e-9);
    }

    #[test]
    fn triangle_inequality(s1 in any::<u64>(), s2 in any::<u64>(), s3 in any::<u64>()) {
        let (a, b, c) = (small_graph(s1, 4, 3, 2), small_graph(s2, 4, 3, 2), small_graph(s3, 4, 3, 2));
        let d = |x: &OarGraph, y: &OarGraph| ged_exact(x, y, &unit()).unwrap().raw;
        prop_assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c) + 1e-9);
    }

    #[test]
    fn zero_iff_isomorphic(s1 in any::<u64>(), s2 in any::<u64>(), p in any::<u64>()) {
        let a = small_graph(s1, 5, 3, 2);
        let r = ged(&a, &relabel(&a, p), &unit()).unwrap();
        prop_assert_eq!(r.raw, 0.0);
        let b = small_graph(s2, 5, 3, 2);
        let r = ged(&a, &b, &unit()).unwrap();
        prop_assert!(r.normalized >= 0.0);
        let same = |g: &OarGraph| {
            let mut n: Vec<_> = g.nodes.iter().map(|n| (n.category, n.attribute)).collect();
            n.sort();
            (n, g.edges.len())
        };
        if r.raw == 0.0 {
            prop_assert_eq!(same(&a), same(&b));
        }
    }
}
