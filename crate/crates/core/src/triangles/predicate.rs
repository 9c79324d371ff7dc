//! Per-pair, per-block triangle predicate with a precomputed two-leg index.
//!
//! A triple-scheme node answering for fine block `ww` holds all weights
//! `f(u, w)` and `f(w, v)` with `w` in its block, so the test it runs for a
//! queried pair {u, v} is
//!
//! ```text
//! min over w in ww of  f(u,w) + f(w,v)   <   -f(u,v)
//! ```
//!
//! strictly: the triangle weight sum must be negative. The index stores that
//! block-wise minimum for every S pair once per graph structure; the
//! comparison side `f(u,v)` is read live, because threshold edges are the
//! one part callers adjust between runs.

use crate::error::PipelineError;
use crate::graph::{Pair, PairSet, UndirectedWeightedGraph};
use crate::labels::LabelSchemes;

const NO_PATH: i64 = i64::MAX;

/// Two-leg minima for every S pair and fine block, plus the sorted multiset
/// of two-leg sums per pair (for exact triangle counts against any base
/// weight). Both depend only on the legs through third vertices, so the
/// index stays valid while callers adjust the pair weights themselves.
pub struct TriangleIndex {
    pairs: Vec<Pair>,
    rows: Vec<i64>,
    /// Per pair: ascending two-leg sums over all completing vertices.
    sums: Vec<Vec<i64>>,
    fine_count: usize,
}

impl TriangleIndex {
    pub fn build(g: &UndirectedWeightedGraph, s: &PairSet, schemes: &LabelSchemes) -> Self {
        let fine_count = schemes.fine_count();
        let pairs: Vec<Pair> = s.iter().copied().collect();
        let mut rows = vec![NO_PATH; pairs.len() * fine_count];
        let mut sums = vec![Vec::new(); pairs.len()];

        // Dense symmetric weight lookup for O(1) probes.
        let n = g.vertex_count();
        let mut dense = vec![NO_PATH; n * n];
        for (u, v, w) in g.edges() {
            dense[u * n + v] = w;
            dense[v * n + u] = w;
        }

        for (idx, p) in pairs.iter().enumerate() {
            let (u, v) = (p.lo(), p.hi());
            let row = &mut rows[idx * fine_count..(idx + 1) * fine_count];
            for (w, f_uw) in g.neighbors(u) {
                if w == v {
                    continue;
                }
                let f_wv = dense[w * n + v];
                if f_wv == NO_PATH {
                    continue;
                }
                let sum = f_uw + f_wv;
                let block = schemes.fine_block_of(w);
                if sum < row[block] {
                    row[block] = sum;
                }
                sums[idx].push(sum);
            }
            sums[idx].sort_unstable();
        }
        TriangleIndex {
            pairs,
            rows,
            sums,
            fine_count,
        }
    }

    pub fn pair_count(&self) -> usize {
        self.pairs.len()
    }

    pub fn pair(&self, idx: usize) -> Pair {
        self.pairs[idx]
    }

    pub fn pairs(&self) -> &[Pair] {
        &self.pairs
    }

    pub fn as_pair_set(&self) -> PairSet {
        PairSet::from_pairs(self.pairs.clone())
    }

    pub fn index_of(&self, p: &Pair) -> Option<usize> {
        self.pairs.binary_search(p).ok()
    }

    /// Exact number of vertices completing a negative triangle with the
    /// pair, at its current weight in `g`.
    pub fn gamma_of(&self, g: &UndirectedWeightedGraph, idx: usize) -> usize {
        let p = self.pairs[idx];
        let Some(f_uv) = g.weight(p.lo(), p.hi()) else {
            return 0;
        };
        self.sums[idx].partition_point(|&s| s < -f_uv)
    }

    /// Minimum `f(u,w) + f(w,v)` over the fine block, if any completing
    /// vertex exists.
    pub fn two_leg_min(&self, idx: usize, block: usize) -> Option<i64> {
        let v = self.rows[idx * self.fine_count + block];
        (v != NO_PATH).then_some(v)
    }
}

/// Does some vertex of the fine block complete a negative triangle with the
/// indexed pair? Strict: the three weights must sum below zero.
pub fn negative_triangle_predicate(
    g: &UndirectedWeightedGraph,
    index: &TriangleIndex,
    pair_idx: usize,
    block: usize,
) -> bool {
    let p = index.pair(pair_idx);
    let Some(f_uv) = g.weight(p.lo(), p.hi()) else {
        return false;
    };
    match index.two_leg_min(pair_idx, block) {
        Some(two_leg) => two_leg < -f_uv,
        None => false,
    }
}

/// Consistency guard used by evaluators: a node may only answer pairs whose
/// endpoints match its label blocks.
pub fn check_pair_blocks(
    schemes: &LabelSchemes,
    pair: Pair,
    ub: usize,
    vb: usize,
) -> Result<(), PipelineError> {
    let (a, b) = (
        schemes.coarse_block_of(pair.lo()),
        schemes.coarse_block_of(pair.hi()),
    );
    if (a, b) == (ub, vb) || (b, a) == (ub, vb) {
        Ok(())
    } else {
        Err(PipelineError::BadInput(format!(
            "pair {:?} routed to block pair ({ub},{vb})",
            (pair.lo(), pair.hi())
        )))
    }
}
