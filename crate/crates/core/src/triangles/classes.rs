//! Estimating how triangle-heavy each (block pair, fine block) triple is.
//!
//! Every vertex samples a small random subset of its S partners and
//! broadcasts it; each triple-scheme node counts, over the broadcast sample
//! restricted to its block pair, how many pairs it can complete into a
//! negative triangle, and derives a class index from the count. Classes
//! trade destination count against per-destination bandwidth later on.

use rand::Rng;

use crate::error::Abort;
use crate::graph::UndirectedWeightedGraph;
use crate::labels::{LabelSchemes, TripleIdx};
use crate::net::Network;
use crate::params::PipelineParams;
use crate::rng::Substream;

use super::predicate::{negative_triangle_predicate, TriangleIndex};
use super::PhaseError;

/// The per-triple sampled counts and derived classes.
#[derive(Debug)]
pub struct ClassPartition {
    class_of: Vec<u32>,
    d_counts: Vec<u64>,
    alphas: Vec<u32>,
}

impl ClassPartition {
    pub fn class_of_triple(&self, t: TripleIdx) -> u32 {
        self.class_of[t]
    }

    pub fn sampled_count(&self, t: TripleIdx) -> u64 {
        self.d_counts[t]
    }

    /// Class indices that occur, ascending.
    pub fn alphas(&self) -> &[u32] {
        &self.alphas
    }

    /// Fine blocks of one slot that fall in the class: the search domain of
    /// that slot's helpers for this class.
    pub fn fine_blocks(
        &self,
        schemes: &LabelSchemes,
        ub: usize,
        vb: usize,
        alpha: u32,
    ) -> Vec<usize> {
        (0..schemes.fine_count())
            .filter(|&wb| self.class_of[schemes.triple_index(ub, vb, wb)] == alpha)
            .collect()
    }

    /// All triples of one class.
    pub fn members(&self, alpha: u32) -> Vec<TripleIdx> {
        (0..self.class_of.len())
            .filter(|&t| self.class_of[t] == alpha)
            .collect()
    }
}

fn class_for_count(d: u64, params: &PipelineParams, n: usize) -> u32 {
    let mut c = 0u32;
    while d as f64 >= params.class_threshold(n, c) {
        c += 1;
    }
    c
}

/// Run the class-estimation protocol.
pub fn identify_class(
    net: &mut Network,
    g: &UndirectedWeightedGraph,
    index: &TriangleIndex,
    schemes: &LabelSchemes,
    params: &PipelineParams,
    rng: &mut Substream,
) -> Result<ClassPartition, PhaseError> {
    let n = schemes.n();
    let p = params.class_probability(n);
    let abort_cap = params.class_abort_cap(n);

    // Each vertex samples partners among its S pairs. Iterating the S index
    // visits every pair once; both endpoints draw independently.
    let mut selected: Vec<Vec<usize>> = vec![Vec::new(); n]; // per vertex: pair indices
    let mut sample_sizes = vec![0usize; n];
    for (idx, pair) in index.pairs().iter().enumerate() {
        for v in [pair.lo(), pair.hi()] {
            if rng.random_bool(p) {
                selected[v].push(idx);
                sample_sizes[v] += 1;
            }
        }
    }

    // Abort vote.
    let all = vec![(n - 1) as u64; n];
    net.charge_bulk_aggregate(&all, &all)
        .map_err(PhaseError::Net)?;
    if let Some(node) = (0..n).find(|&u| sample_sizes[u] as f64 > abort_cap) {
        return Err(PhaseError::Abort(Abort::ClassSampleOverflow {
            node,
            size: sample_sizes[node],
            limit: abort_cap.floor() as usize,
        }));
    }

    // Broadcast the samples: each selected pair goes to every other node.
    let total_selected: u64 = sample_sizes.iter().map(|&s| s as u64).sum();
    let mut bc_src = vec![0u64; n];
    let mut bc_snk = vec![0u64; n];
    for u in 0..n {
        bc_src[u] = (sample_sizes[u] * (n - 1)) as u64;
        // Receivers get every broadcast unit except their own.
        bc_snk[u] = total_selected - sample_sizes[u] as u64;
    }
    net.charge_bulk_aggregate(&bc_src, &bc_snk)
        .map_err(PhaseError::Net)?;

    // The broadcast sample, deduplicated (both endpoints may have drawn it)
    // and bucketed by unordered block pair.
    let mut sample: Vec<usize> = selected.into_iter().flatten().collect();
    sample.sort_unstable();
    sample.dedup();
    let coarse = schemes.coarse_count();
    let mut sample_buckets: Vec<Vec<usize>> = vec![Vec::new(); coarse * coarse];
    for &idx in &sample {
        let pair = index.pair(idx);
        let a = schemes.coarse_block_of(pair.lo());
        let b = schemes.coarse_block_of(pair.hi());
        sample_buckets[a.min(b) * coarse + a.max(b)].push(idx);
    }

    // Per-triple counts, evaluated once per unordered block pair.
    let mut d_counts = vec![0u64; schemes.triple_count()];
    for ub in 0..coarse {
        for vb in ub..coarse {
            let bucket = &sample_buckets[ub * coarse + vb];
            for wb in 0..schemes.fine_count() {
                let d = bucket
                    .iter()
                    .filter(|&&idx| negative_triangle_predicate(g, index, idx, wb))
                    .count() as u64;
                d_counts[schemes.triple_index(ub, vb, wb)] = d;
                d_counts[schemes.triple_index(vb, ub, wb)] = d;
            }
        }
    }

    let class_of: Vec<u32> = d_counts
        .iter()
        .map(|&d| class_for_count(d, params, n))
        .collect();
    let mut alphas: Vec<u32> = class_of.to_vec();
    alphas.sort_unstable();
    alphas.dedup();
    Ok(ClassPartition {
        class_of,
        d_counts,
        alphas,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::PairSet;
    use crate::net::EnforcementMode;
    use crate::rng::Seeder;

    fn run(
        g: &UndirectedWeightedGraph,
        s: &PairSet,
        params: &PipelineParams,
        seed: u64,
    ) -> Result<ClassPartition, PhaseError> {
        let schemes = LabelSchemes::build(g.vertex_count()).unwrap();
        let index = TriangleIndex::build(g, s, &schemes);
        let mut net = Network::new(g.vertex_count(), EnforcementMode::Strict);
        net.enter_phase("classes");
        let seeder = Seeder::new(seed);
        let mut rng = seeder.substream("classes", &[0]);
        identify_class(&mut net, g, &index, &schemes, params, &mut rng)
    }

    #[test]
    fn no_negative_triangles_means_class_zero_everywhere() {
        let mut g = UndirectedWeightedGraph::new(16);
        for u in 0..16usize {
            for v in (u + 1)..16 {
                g.set_edge(u, v, 1).unwrap();
            }
        }
        let s = PairSet::complete(16);
        let params = PipelineParams::default();
        let classes = run(&g, &s, &params, 50).unwrap();
        assert!(classes.alphas() == [0]);
        assert!(classes.members(0).len() == 16);
    }

    #[test]
    fn oversized_threshold_keeps_all_classes_zero() {
        // A triangle-dense graph, but a threshold factor so large that every
        // sampled count stays below the class-0 bound.
        let mut g = UndirectedWeightedGraph::new(16);
        for u in 0..16usize {
            for v in (u + 1)..16 {
                g.set_edge(u, v, -1).unwrap();
            }
        }
        let s = PairSet::complete(16);
        let params = PipelineParams {
            class_threshold_factor: 100.0, // 100 ln 16 = 277 > |P| = 120
            ..PipelineParams::default()
        };
        let classes = run(&g, &s, &params, 51).unwrap();
        assert_eq!(classes.alphas(), [0]);
    }

    #[test]
    fn dense_graph_with_tight_threshold_spreads_classes() {
        let mut g = UndirectedWeightedGraph::new(16);
        for u in 0..16usize {
            for v in (u + 1)..16 {
                g.set_edge(u, v, -1).unwrap();
            }
        }
        let s = PairSet::complete(16);
        let params = PipelineParams {
            class_threshold_factor: 0.5,
            ..PipelineParams::default()
        };
        let classes = run(&g, &s, &params, 52).unwrap();
        assert!(classes.alphas().len() > 1, "{:?}", classes.alphas());
    }

    #[test]
    fn tiny_abort_cap_aborts() {
        let mut g = UndirectedWeightedGraph::new(16);
        for u in 0..16usize {
            for v in (u + 1)..16 {
                g.set_edge(u, v, 1).unwrap();
            }
        }
        let s = PairSet::complete(16);
        let params = PipelineParams {
            class_abort_factor: 0.0,
            ..PipelineParams::default()
        };
        let err = run(&g, &s, &params, 53).unwrap_err();
        assert!(matches!(
            err,
            PhaseError::Abort(Abort::ClassSampleOverflow { .. })
        ));
    }
}
