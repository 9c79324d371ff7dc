//! Reduction-layer behavior against the oracles, including the sparsification
//! loop that stays dormant at production constants.

use rand::Rng;

use qcongest::graph::{Pair, PairSet, UndirectedWeightedGraph};
use qcongest::matrix::{min_plus_product, DistMatrix};
use qcongest::net::{EnforcementMode, Network};
use qcongest::oracles::brute_find_edges;
use qcongest::params::PipelineParams;
use qcongest::reductions::{
    distance_product_via_triangles, find_edges, product_network_size, sampling_loop_dormant,
    SolverKind,
};
use qcongest::weight::{Finite, Inf};
use qcongest::Seeder;

#[test]
fn oracle_solver_reproduces_brute_force_exactly() {
    let seeder = Seeder::new(2001);
    for seed in 0..40u64 {
        let mut rng = seeder.substream("g", &[seed]);
        let n = 16;
        let mut g = UndirectedWeightedGraph::new(n);
        for u in 0..n {
            for v in (u + 1)..n {
                if rng.random_bool(0.5) {
                    g.set_edge(u, v, rng.random_range(-5..=9)).unwrap();
                }
            }
        }
        let s = PairSet::complete(n);
        let mut net = Network::new(n, EnforcementMode::Strict);
        let params = PipelineParams::default();
        assert!(sampling_loop_dormant(n, &params));
        let (found, audit) = find_edges(
            &mut net,
            &g,
            &s,
            SolverKind::BruteOracle,
            &params,
            &seeder.child("fe", &[seed]),
        )
        .unwrap();
        assert_eq!(found, brute_find_edges(&g, &s), "seed {seed}");
        assert_eq!(
            audit.loop_iterations, 0,
            "desk scale keeps the loop dormant"
        );
    }
}

#[test]
fn forced_sampling_loop_peels_heavy_pairs_early() {
    // Shrinking the loop factor to 1 activates the sparsified rounds at
    // n = 81. The planted pair is in well over half the possible triangles,
    // so some thinned round catches it before the final full-graph call.
    let n = 81;
    let heavy = Pair::new(0, 1);
    let mut g = UndirectedWeightedGraph::new(n);
    g.set_edge(0, 1, -1).unwrap();
    for w in 2..43usize {
        g.set_edge(0, w, 0).unwrap();
        g.set_edge(w, 1, 0).unwrap();
    }
    let s = PairSet::complete(n);
    // Every pair of every planted triangle is involved: {0,1} plus the legs.
    let expect = brute_find_edges(&g, &s);
    assert!(expect.contains(&heavy));
    assert_eq!(expect.len(), 1 + 2 * 41);

    let params = PipelineParams {
        loop_factor: 1.0,
        ..PipelineParams::default()
    };
    assert!(!sampling_loop_dormant(n, &params));

    let seeder = Seeder::new(2002);
    let mut early = 0;
    for seed in 0..100u64 {
        let mut net = Network::new(n, EnforcementMode::Strict);
        let (found, audit) = find_edges(
            &mut net,
            &g,
            &s,
            SolverKind::BruteOracle,
            &params,
            &seeder.child("run", &[seed]),
        )
        .unwrap();
        assert_eq!(found, expect, "seed {seed}");
        assert!(audit.loop_iterations >= 5);
        if audit.settled_in_loop.contains(&heavy) {
            early += 1;
        }
    }
    assert!(
        early >= 95,
        "heavy pair settled early in only {early}/100 runs"
    );
}

#[test]
fn audited_products_report_no_inner_mismatches_with_the_oracle() {
    let seeder = Seeder::new(2003);
    for seed in 0..10u64 {
        let mut rng = seeder.substream("m", &[seed]);
        let n_g = 4;
        let gen = |rng: &mut qcongest::Substream| {
            let rows = (0..n_g)
                .map(|_| {
                    (0..n_g)
                        .map(|_| {
                            if rng.random_bool(0.25) {
                                Inf
                            } else {
                                Finite(rng.random_range(-8..=8))
                            }
                        })
                        .collect()
                })
                .collect();
            DistMatrix::from_rows(rows).unwrap()
        };
        let a = gen(&mut rng);
        let b = gen(&mut rng);
        let mut net = Network::new(product_network_size(n_g), EnforcementMode::Strict);
        let (c, audit) = distance_product_via_triangles(
            &mut net,
            &a,
            &b,
            SolverKind::BruteOracle,
            &PipelineParams::default(),
            &seeder.child("p", &[seed]),
            true,
        )
        .unwrap();
        assert_eq!(c, min_plus_product(&a, &b).unwrap());
        assert_eq!(audit.inner_mismatches, 0);
        assert_eq!(audit.audited_calls, audit.calls);
        assert!(audit.calls <= audit.call_bound);
    }
}

#[test]
fn quantum_pipeline_product_matches_oracle_on_small_matrices() {
    // End-to-end through the full distributed pipeline with the amplitude
    // searches, on 2x2 matrices (12-node instances on a 16-node network).
    let seeder = Seeder::new(2004);
    let params = PipelineParams {
        amplification: Some(2),
        pretest_samples: Some(3),
        ..PipelineParams::default()
    };
    let mut exact = 0;
    for seed in 0..25u64 {
        let mut rng = seeder.substream("m", &[seed]);
        let n_g = 2;
        let gen = |rng: &mut qcongest::Substream| {
            let rows = (0..n_g)
                .map(|_| {
                    (0..n_g)
                        .map(|_| {
                            if rng.random_bool(0.2) {
                                Inf
                            } else {
                                Finite(rng.random_range(-4..=4))
                            }
                        })
                        .collect()
                })
                .collect();
            DistMatrix::from_rows(rows).unwrap()
        };
        let a = gen(&mut rng);
        let b = gen(&mut rng);
        let mut net = Network::new(product_network_size(n_g), EnforcementMode::Strict);
        let (c, _) = distance_product_via_triangles(
            &mut net,
            &a,
            &b,
            SolverKind::Pipeline,
            &params,
            &seeder.child("p", &[seed]),
            false,
        )
        .unwrap();
        if c == min_plus_product(&a, &b).unwrap() {
            exact += 1;
        }
    }
    assert!(exact >= 24, "only {exact}/25 products exact");
}
