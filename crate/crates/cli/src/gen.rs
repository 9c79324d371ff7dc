//! Seeded instance generators.

use rand::Rng;

use qcongest::graph::{UndirectedWeightedGraph, WeightedDigraph};
use qcongest::Substream;

/// Random digraph with weights `c(u,v) + phi(u) - phi(v)` for non-negative
/// costs and random vertex potentials: every cycle weight telescopes to a
/// sum of costs, so negative arcs appear but negative cycles cannot.
pub fn random_digraph(n: usize, bound: i64, density: f64, rng: &mut Substream) -> WeightedDigraph {
    let half = (bound / 2).max(1);
    let phis: Vec<i64> = (0..n).map(|_| rng.random_range(0..=half)).collect();
    let mut g = WeightedDigraph::new(n, bound.max(2));
    for u in 0..n {
        for v in 0..n {
            if u != v && rng.random_bool(density) {
                let c: i64 = rng.random_range(0..=half);
                g.add_arc(u, v, c + phis[u] - phis[v])
                    .expect("weights stay within the bound");
            }
        }
    }
    g
}

/// Undirected instance: positive background weights with `triangles`
/// planted negative triangles. Shared edges may compound into further
/// negative triangles; truth is always taken from the brute-force oracle.
pub fn planted_undirected(
    n: usize,
    bound: i64,
    triangles: usize,
    rng: &mut Substream,
) -> UndirectedWeightedGraph {
    let top = bound.max(2);
    let mut g = UndirectedWeightedGraph::new(n);
    for u in 0..n {
        for v in (u + 1)..n {
            g.set_edge(u, v, rng.random_range(1..=top)).unwrap();
        }
    }
    for _ in 0..triangles {
        let u = rng.random_range(0..n);
        let mut v = rng.random_range(0..n);
        while v == u {
            v = rng.random_range(0..n);
        }
        let mut w = rng.random_range(0..n);
        while w == u || w == v {
            w = rng.random_range(0..n);
        }
        g.set_edge(u, v, 1).unwrap();
        g.set_edge(u, w, -1).unwrap();
        g.set_edge(w, v, -1).unwrap();
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use qcongest::oracles::{brute_find_edges, floyd_warshall};
    use qcongest::PairSet;
    use qcongest::Seeder;

    #[test]
    fn random_digraphs_have_negative_arcs_but_no_negative_cycles() {
        let seeder = Seeder::new(11);
        let mut negatives = 0;
        for seed in 0..20u64 {
            let mut rng = seeder.substream("g", &[seed]);
            let g = random_digraph(12, 8, 0.5, &mut rng);
            negatives += g.arcs().filter(|&(_, _, w)| w < 0).count();
            assert!(floyd_warshall(&g).is_ok(), "seed {seed}");
        }
        assert!(negatives > 0);
    }

    #[test]
    fn planted_instances_contain_negative_triangles() {
        let seeder = Seeder::new(12);
        let mut rng = seeder.substream("p", &[0]);
        let g = planted_undirected(16, 4, 3, &mut rng);
        let found = brute_find_edges(&g, &PairSet::complete(16));
        assert!(!found.is_empty());
    }
}
