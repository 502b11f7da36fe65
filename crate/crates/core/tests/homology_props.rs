mod common;

use breakdiv_core::divisor::is_equivalent;
use breakdiv_core::graph::{refine, spanning_trees};
use breakdiv_core::homology::*;
use breakdiv_core::metric::MetricDivisor;
use breakdiv_core::orient::canonical_break_divisor;
use breakdiv_core::rational::Rational;
use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn gram_determinant_equals_tree_weight_total_on_random_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(71);
    for _ in 0..30 {
        let g = random_graph(&mut rng, 6, 9, 5);
        let report = dual_kirchhoff_check(&g).unwrap();
        assert!(report.holds, "dual identity failed on {:?}", g.to_raw());
        let volumes = cell_volumes(&g).unwrap();
        assert_eq!(volumes.ratio_sum(), Rational::one());
        assert_eq!(volumes.det, report.total_weight);
    }
}

#[test]
fn projection_gram_consistency_on_every_tree() {
    let mut rng = ChaCha8Rng::seed_from_u64(73);
    for _ in 0..8 {
        let g = random_graph(&mut rng, 5, 7, 4);
        let det = det_exact(&gram_matrix(&g, &spanning_trees(&g)[0]).unwrap().entries);
        for t in spanning_trees(&g) {
            let gram = gram_matrix(&g, &t).unwrap();
            assert_eq!(det_exact(&gram.entries), det);
            let cotree = t.cotree_edges(&g);
            let projections: Vec<Vec<Rational>> = cotree
                .iter()
                .map(|e| edge_projection(&g, &t, e).unwrap())
                .collect();
            let k = projections.len();
            let mut inner = vec![vec![Rational::zero(); k]; k];
            for i in 0..k {
                for j in 0..k {
                    let mut acc = Rational::zero();
                    for (r, row) in gram.entries.iter().enumerate() {
                        for (c, val) in row.iter().enumerate() {
                            acc += &projections[i][r] * &(val * &projections[j][c]);
                        }
                    }
                    inner[i][j] = acc;
                }
            }
            let w: Rational = g
                .edges()
                .iter()
                .filter(|e| !t.contains(&e.id))
                .map(|e| e.length.clone())
                .product();
            assert_eq!(det_exact(&inner), &w * &w / det.clone());
        }
    }
}

// The integral chip-firing theory ignores lengths, so the two oracles are
// compared on unit-length graphs, and on weighted graphs with integer
// lengths against chip-firing on the unit subdivision (the torus
// coordinates are refinement-invariant).
#[test]
fn torus_and_dhar_equivalence_oracles_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(79);
    let mut equivalent_pairs = 0;
    for _ in 0..25 {
        let g = unit_variant(&random_graph(&mut rng, 5, 8, 1));
        let q = g.vertex_id(0).clone();
        let t0 = spanning_trees(&g).remove(0);
        for _ in 0..5 {
            let degree = rng.gen_range(-2..=4);
            let d1 = random_divisor(&mut rng, &g, degree, 2);
            // half the samples are genuine equivalences via chip-firing
            let d2 = if rng.gen_bool(0.5) {
                let mut d = d1.clone();
                for _ in 0..rng.gen_range(1..=3) {
                    d = breakdiv_core::divisor::fire_set(&g, &d, &random_set(&mut rng, &g));
                }
                d
            } else {
                random_divisor(&mut rng, &g, d1.degree(), 2)
            };
            let dhar = is_equivalent(&g, &d1, &d2);
            let torus = jac_equivalent(
                &g,
                &MetricDivisor::from_divisor(&d1),
                &MetricDivisor::from_divisor(&d2),
                &q,
                &t0,
            )
            .unwrap();
            assert_eq!(dhar, torus, "oracles disagree on {:?} vs {:?}", d1, d2);
            if dhar {
                equivalent_pairs += 1;
            }
        }
    }
    assert!(equivalent_pairs >= 25, "too few equivalent pairs sampled");
}

#[test]
fn torus_oracle_matches_dhar_on_the_unit_subdivision() {
    let mut rng = ChaCha8Rng::seed_from_u64(81);
    for _ in 0..20 {
        let g = random_graph(&mut rng, 4, 6, 3);
        let fine = unit_subdivision(&g);
        let q = g.vertex_id(0).clone();
        let t0 = spanning_trees(&g).remove(0);
        for _ in 0..5 {
            let degree = rng.gen_range(-1..=3);
            let d1 = random_divisor(&mut rng, &g, degree, 1);
            let d2 = random_divisor(&mut rng, &g, degree, 1);
            let torus = jac_equivalent(
                &g,
                &MetricDivisor::from_divisor(&d1),
                &MetricDivisor::from_divisor(&d2),
                &q,
                &t0,
            )
            .unwrap();
            let dhar_fine = is_equivalent(&fine, &d1, &d2);
            assert_eq!(torus, dhar_fine, "metric oracle mismatch on {:?}", g.to_raw());
        }
    }
}

// Integral canonicalization moves within the combinatorial class, which on
// a unit-length model is the metric class.
#[test]
fn canonicalization_fixes_torus_coordinates() {
    let mut rng = ChaCha8Rng::seed_from_u64(83);
    for _ in 0..20 {
        let g = unit_variant(&random_graph(&mut rng, 5, 7, 1));
        let q = g.vertex_id(0).clone();
        let t0 = spanning_trees(&g).remove(0);
        let d = random_divisor(&mut rng, &g, g.genus(), 2);
        let canonical = canonical_break_divisor(&g, &d).unwrap();
        assert_eq!(
            abel_jacobi_divisor(&g, &d, &q, &t0).unwrap(),
            abel_jacobi_divisor(&g, &canonical, &q, &t0).unwrap()
        );
    }
}

#[test]
fn reduced_laplacian_matches_its_tree_sum_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(89);
    for _ in 0..25 {
        let g = random_graph(&mut rng, 6, 9, 5);
        let q = g.vertex_id(rng.gen_range(0..g.vertex_count())).clone();
        for mode in [ConductanceMode::Length, ConductanceMode::InverseLength] {
            let det = reduced_laplacian_det(&g, &q, mode).unwrap();
            let oracle = tree_weights(&g, mode).total_w_prime;
            assert_eq!(det, oracle, "mode {:?} on {:?}", mode, g.to_raw());
        }
    }
}

#[test]
fn cauchy_binet_holds_on_random_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(97);
    for _ in 0..15 {
        let g = random_graph(&mut rng, 5, 8, 4);
        let t0 = spanning_trees(&g).remove(0);
        let report = cauchy_binet_check(&g, &t0).unwrap();
        assert!(report.holds, "Cauchy-Binet failed on {:?}", g.to_raw());
    }
}

#[test]
fn weight_total_and_determinant_survive_refinement() {
    let g = theta();
    let refined = refine(
        &g,
        &[("a".to_string(), vec![rat("1")]), ("c".to_string(), vec![rat("1")])],
    )
    .unwrap();
    let base = dual_kirchhoff_check(&g).unwrap();
    let fine = dual_kirchhoff_check(&refined).unwrap();
    assert_eq!(base.det, fine.det);
    assert_eq!(base.total_weight, fine.total_weight);
    assert_eq!(base.det, rat("8"));

    // the classical coweight total is NOT a metric invariant
    let coarse_prime = tree_weights(&g, ConductanceMode::InverseLength).total_w_prime;
    let fine_prime = tree_weights(&refined, ConductanceMode::InverseLength).total_w_prime;
    assert_eq!(coarse_prime, rat("2"));
    assert_eq!(fine_prime, rat("8"));
    assert_ne!(coarse_prime, fine_prime);
}

#[test]
fn random_refinements_preserve_the_metric_invariants() {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    for _ in 0..10 {
        let g = random_graph(&mut rng, 4, 6, 4);
        let base = dual_kirchhoff_check(&g).unwrap();
        let mut spec = Vec::new();
        for e in g.edges() {
            if rng.gen_bool(0.5) {
                let len = e.length.clone();
                let cut = len * rat(&format!("1/{}", rng.gen_range(2..=4)));
                spec.push((e.id.clone(), vec![cut]));
            }
        }
        let refined = refine(&g, &spec).unwrap();
        let fine = dual_kirchhoff_check(&refined).unwrap();
        assert!(base.holds && fine.holds);
        assert_eq!(base.det, fine.det);
    }
}
