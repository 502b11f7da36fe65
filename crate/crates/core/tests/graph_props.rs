mod common;

use breakdiv_core::graph::{
    chain_boundary, cut_count, fundamental_cycle, refine, spanning_trees, RawGraph,
    WeightedGraph,
};
use breakdiv_core::homology::{det_exact, gram_matrix};
use breakdiv_core::rational::Rational;
use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn spanning_tree_count_is_invariant_under_relabeling() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10 {
        let g = random_graph(&mut rng, 5, 8, 3);
        let count = spanning_trees(&g).len();

        let mut raw = g.to_raw();
        let rename = |v: &str| format!("w_{}", v);
        raw.vertices = raw.vertices.iter().map(|v| rename(v)).collect();
        // shuffle vertex order too
        let k = raw.vertices.len();
        for i in (1..k).rev() {
            let j = rng.gen_range(0..=i);
            raw.vertices.swap(i, j);
        }
        let relabeled = RawGraph {
            vertices: raw.vertices.clone(),
            edges: g
                .to_raw()
                .edges
                .iter()
                .map(|e| breakdiv_core::graph::RawEdge {
                    id: e.id.clone(),
                    ends: [rename(&e.ends[0]), rename(&e.ends[1])],
                    length: e.length.clone(),
                })
                .collect(),
        };
        let g2 = WeightedGraph::validate(&relabeled).unwrap();
        assert_eq!(spanning_trees(&g2).len(), count);
    }
}

#[test]
fn refinement_preserves_genus_total_length_and_tree_weight() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..10 {
        let g = random_graph(&mut rng, 5, 7, 4);
        let mut spec = Vec::new();
        for e in g.edges() {
            if rng.gen_bool(0.5) {
                let denom = rng.gen_range(2..=4);
                spec.push((e.id.clone(), vec![&e.length * rat(&format!("1/{}", denom))]));
            }
        }
        let refined = refine(&g, &spec).unwrap();
        assert_eq!(refined.genus(), g.genus());
        assert_eq!(refined.total_length(), g.total_length());
    }
}

#[test]
fn cut_is_symmetric_and_cycles_bound_nothing() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..10 {
        let g = random_graph(&mut rng, 5, 8, 3);
        let s = random_set(&mut rng, &g);
        let complement: breakdiv_core::VertexSet = g
            .vertices()
            .iter()
            .filter(|v| !s.contains(*v))
            .cloned()
            .collect();
        assert_eq!(
            cut_count(&g, &s, &complement).unwrap(),
            cut_count(&g, &complement, &s).unwrap()
        );

        for t in spanning_trees(&g).iter().take(4) {
            let cotree = t.cotree_edges(&g);
            assert_eq!(cotree.len() as i64, g.genus());
            for e in &cotree {
                let c = fundamental_cycle(&g, t, e).unwrap();
                assert!(chain_boundary(&g, &c).is_empty());
            }
            // g independent cycles: the length Gram matrix is nonsingular
            let gram = gram_matrix(&g, t).unwrap();
            assert!(gram.is_positive_definite());
            assert!(det_exact(&gram.entries) > Rational::zero());
        }
    }
}
