//! Randomized pair covers distributing triangle checks over helper nodes.
//!
//! Every helper node (coarse block pair, helper index x) draws a subset of
//! the block pair's vertex pairs; with the production constants the
//! inclusion probability clamps to 1 at desk scale and the cover is the full
//! pair space. A cover set is well-balanced when no vertex appears in more
//! than `cover_balance_factor * n^(1/4) * log n` of its pairs; any unbalanced
//! set aborts the protocol and the caller retries with fresh randomness.

use rand::Rng;

use crate::error::{Abort, NetError};
use crate::graph::Pair;
use crate::labels::LabelSchemes;
use crate::net::Network;
use crate::params::PipelineParams;
use crate::rng::Substream;

use super::predicate::TriangleIndex;

/// S pairs bucketed per ordered coarse block pair; a pair with endpoints in
/// two blocks appears under both orders, a within-block pair once.
pub struct SlotBuckets {
    buckets: Vec<Vec<usize>>,
}

impl SlotBuckets {
    pub fn build(index: &TriangleIndex, schemes: &LabelSchemes) -> Self {
        let mut buckets = vec![Vec::new(); schemes.pair_slots()];
        for (idx, p) in index.pairs().iter().enumerate() {
            let a = schemes.coarse_block_of(p.lo());
            let b = schemes.coarse_block_of(p.hi());
            buckets[schemes.pair_slot(a, b)].push(idx);
            if a != b {
                buckets[schemes.pair_slot(b, a)].push(idx);
            }
        }
        SlotBuckets { buckets }
    }

    pub fn slot(&self, slot: usize) -> &[usize] {
        &self.buckets[slot]
    }
}

#[derive(Debug, Clone)]
enum CoverSet {
    /// Inclusion probability clamped to 1: the whole pair space.
    Full,
    Sampled(Vec<Pair>),
}

/// The per-helper random cover sets.
pub struct LambdaCover {
    probability: f64,
    sets: Vec<CoverSet>,
}

impl LambdaCover {
    /// Draw the cover. With probability 1 the sets are the full pair spaces
    /// and no randomness is consumed.
    pub fn draw(schemes: &LabelSchemes, params: &PipelineParams, rng: &mut Substream) -> Self {
        let n = schemes.n();
        let p = params.cover_probability(n);
        if p >= 1.0 {
            return LambdaCover {
                probability: 1.0,
                sets: vec![CoverSet::Full; n],
            };
        }
        let mut sets = Vec::with_capacity(n);
        for node in 0..n {
            let (ub, vb, _x) = schemes.helper_parts(node);
            let mut chosen = Vec::new();
            if p > 0.0 {
                for u in schemes.coarse_members(ub) {
                    for v in schemes.coarse_members(vb) {
                        // Each unordered pair of the slot is drawn once.
                        if u == v || (ub == vb && u > v) {
                            continue;
                        }
                        if rng.random_bool(p) {
                            chosen.push(Pair::new(u, v));
                        }
                    }
                }
            }
            sets.push(CoverSet::Sampled(chosen));
        }
        LambdaCover {
            probability: p,
            sets,
        }
    }

    pub fn probability(&self) -> f64 {
        self.probability
    }

    pub fn is_full(&self) -> bool {
        self.probability >= 1.0
    }

    /// Size of one helper's cover set.
    pub fn set_size(&self, schemes: &LabelSchemes, helper: usize) -> usize {
        match &self.sets[helper] {
            CoverSet::Full => {
                let (ub, vb, _) = schemes.helper_parts(helper);
                let s = schemes.coarse_size();
                if ub == vb {
                    s * (s - 1) / 2
                } else {
                    s * s
                }
            }
            CoverSet::Sampled(v) => v.len(),
        }
    }

    /// Largest per-vertex pair count within one helper's set.
    pub fn max_vertex_multiplicity(&self, schemes: &LabelSchemes, helper: usize) -> usize {
        match &self.sets[helper] {
            CoverSet::Full => {
                let (ub, vb, _) = schemes.helper_parts(helper);
                if ub == vb {
                    schemes.coarse_size() - 1
                } else {
                    schemes.coarse_size()
                }
            }
            CoverSet::Sampled(v) => {
                let mut counts = std::collections::BTreeMap::new();
                for p in v {
                    *counts.entry(p.lo()).or_insert(0usize) += 1;
                    *counts.entry(p.hi()).or_insert(0usize) += 1;
                }
                counts.values().copied().max().unwrap_or(0)
            }
        }
    }

    /// First helper whose set is not well-balanced, if any.
    pub fn unbalanced_helper(&self, schemes: &LabelSchemes, cap: f64) -> Option<usize> {
        (0..self.sets.len()).find(|&h| self.max_vertex_multiplicity(schemes, h) as f64 > cap)
    }

    /// Do the helper sets of every slot jointly cover the slot's pair space?
    pub fn coverage_complete(&self, schemes: &LabelSchemes) -> bool {
        if self.is_full() {
            return true;
        }
        for ub in 0..schemes.coarse_count() {
            for vb in 0..schemes.coarse_count() {
                let mut covered = std::collections::BTreeSet::new();
                for x in 0..schemes.fine_count() {
                    let h = schemes.helper_node(ub, vb, x);
                    if let CoverSet::Sampled(v) = &self.sets[h] {
                        covered.extend(v.iter().copied());
                    }
                }
                for u in schemes.coarse_members(ub) {
                    for v in schemes.coarse_members(vb) {
                        if u == v || (ub == vb && u > v) {
                            continue;
                        }
                        if !covered.contains(&Pair::new(u, v)) {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }
}

/// Which S pairs one helper retains for its searches.
pub enum RetainedSet {
    /// Under a full cover: the whole S bucket of the helper's slot.
    Slot(usize),
    List(Vec<usize>),
}

pub struct HelperRetained {
    sets: Vec<RetainedSet>,
    /// Nominal per-helper search budget m; real pairs are conceptually
    /// padded with dummy searches (empty predicates) up to this count.
    pub nominal_budget: usize,
}

impl HelperRetained {
    pub fn at<'a>(&'a self, buckets: &'a SlotBuckets, helper: usize) -> &'a [usize] {
        match &self.sets[helper] {
            RetainedSet::Slot(s) => buckets.slot(*s),
            RetainedSet::List(v) => v,
        }
    }
}

/// Outcome of the cover phase.
pub struct CoverPhase {
    pub cover: LambdaCover,
    pub retained: HelperRetained,
}

/// Draw the cover, run the abort vote, and charge the weight/membership
/// loading of the retained pairs. On an unbalanced set the vote itself is
/// still charged (every node learns of the abort) before the error returns.
pub fn build_pair_cover(
    net: &mut Network,
    index: &TriangleIndex,
    schemes: &LabelSchemes,
    params: &PipelineParams,
    rng: &mut Substream,
) -> Result<Result<CoverPhase, Abort>, NetError> {
    let n = schemes.n();
    let cover = LambdaCover::draw(schemes, params, rng);

    // Abort vote: one unit from every node to every other node.
    let all = vec![(n - 1) as u64; n];
    net.charge_bulk_aggregate(&all, &all)?;
    if let Some(helper) = cover.unbalanced_helper(schemes, params.well_balanced_cap(n)) {
        return Ok(Err(Abort::CoverNotBalanced { node: helper }));
    }

    // Weight + membership loading: each helper asks the lower endpoint of
    // every cover pair and gets one unit back (weight and S membership).
    let mut req_src = vec![0u64; n];
    let mut req_snk = vec![0u64; n];
    if cover.is_full() {
        // Per slot, the pair space is identical for all sqrt(n) helpers.
        let copies = schemes.fine_count() as u64;
        for ub in 0..schemes.coarse_count() {
            for vb in 0..schemes.coarse_count() {
                for u in schemes.coarse_members(ub) {
                    for v in schemes.coarse_members(vb) {
                        if u == v || (ub == vb && u > v) {
                            continue;
                        }
                        req_snk[u.min(v)] += copies;
                    }
                }
                for x in 0..schemes.fine_count() {
                    let h = schemes.helper_node(ub, vb, x);
                    req_src[h] += cover.set_size(schemes, h) as u64;
                }
            }
        }
    } else {
        for (h, set) in cover.sets.iter().enumerate() {
            if let CoverSet::Sampled(pairs) = set {
                req_src[h] += pairs.len() as u64;
                for p in pairs {
                    req_snk[p.lo()] += 1;
                }
            }
        }
    }
    net.charge_bulk_aggregate(&req_src, &req_snk)?;
    net.charge_bulk_aggregate(&req_snk, &req_src)?;

    // Retained pairs: the cover intersected with S.
    let mut sets = Vec::with_capacity(n);
    for h in 0..n {
        match &cover.sets[h] {
            CoverSet::Full => {
                let (ub, vb, _) = schemes.helper_parts(h);
                sets.push(RetainedSet::Slot(schemes.pair_slot(ub, vb)));
            }
            CoverSet::Sampled(pairs) => {
                let list: Vec<usize> = pairs.iter().filter_map(|p| index.index_of(p)).collect();
                sets.push(RetainedSet::List(list));
            }
        }
    }
    Ok(Ok(CoverPhase {
        cover,
        retained: HelperRetained {
            sets,
            nominal_budget: params.pair_budget(n),
        },
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{PairSet, UndirectedWeightedGraph};
    use crate::net::EnforcementMode;
    use crate::rng::Seeder;

    fn setup(n: usize) -> (LabelSchemes, PipelineParams) {
        (LabelSchemes::build(n).unwrap(), PipelineParams::default())
    }

    #[test]
    fn clamped_probability_gives_full_balanced_cover() {
        let (schemes, params) = setup(16);
        let seeder = Seeder::new(40);
        let mut rng = seeder.substream("cover", &[0]);
        let cover = LambdaCover::draw(&schemes, &params, &mut rng);
        assert!(cover.is_full());
        assert!(cover.coverage_complete(&schemes));
        assert!(cover
            .unbalanced_helper(&schemes, params.well_balanced_cap(16))
            .is_none());
        // Full slot sizes: 8*8 across blocks, C(8,2) within.
        assert_eq!(cover.set_size(&schemes, schemes.helper_node(0, 1, 0)), 64);
        assert_eq!(cover.set_size(&schemes, schemes.helper_node(0, 0, 0)), 28);
    }

    #[test]
    fn forced_zero_probability_covers_nothing() {
        let (schemes, mut params) = setup(16);
        params.cover_sample_factor = 0.0;
        let seeder = Seeder::new(41);
        let mut rng = seeder.substream("cover", &[0]);
        let cover = LambdaCover::draw(&schemes, &params, &mut rng);
        assert!(!cover.is_full());
        for h in 0..16 {
            assert_eq!(cover.set_size(&schemes, h), 0);
        }
        // No set can be unbalanced, but coverage fails.
        assert!(cover.unbalanced_helper(&schemes, 0.0).is_none());
        assert!(!cover.coverage_complete(&schemes));
    }

    #[test]
    fn sampled_cover_draws_pairs_at_given_rate() {
        let (schemes, mut params) = setup(16);
        params.cover_sample_factor = 0.5; // p = 0.5 ln 16 / 4 ~ 0.35
        let p = params.cover_probability(16);
        assert!(p < 1.0 && p > 0.2);
        let seeder = Seeder::new(42);
        let mut total = 0usize;
        let mut space = 0usize;
        for seed in 0..40u64 {
            let mut rng = seeder.substream("cover", &[seed]);
            let cover = LambdaCover::draw(&schemes, &params, &mut rng);
            for h in 0..16 {
                total += cover.set_size(&schemes, h);
                let (ub, vb, _) = schemes.helper_parts(h);
                space += if ub == vb { 28 } else { 64 };
            }
        }
        let rate = total as f64 / space as f64;
        assert!((rate - p).abs() < 0.05, "rate {rate} vs p {p}");
    }

    #[test]
    fn cover_phase_charges_loading_and_retains_s_pairs() {
        let (schemes, params) = setup(16);
        let mut g = UndirectedWeightedGraph::new(16);
        g.set_edge(0, 8, -1).unwrap();
        g.set_edge(1, 9, 2).unwrap();
        let s = PairSet::from_pairs(vec![Pair::new(0, 8), Pair::new(1, 9)]);
        let index = TriangleIndex::build(&g, &s, &schemes);
        let buckets = SlotBuckets::build(&index, &schemes);
        let mut net = Network::new(16, EnforcementMode::Strict);
        net.enter_phase("cover");
        let seeder = Seeder::new(43);
        let mut rng = seeder.substream("cover", &[0]);
        let phase = build_pair_cover(&mut net, &index, &schemes, &params, &mut rng)
            .unwrap()
            .unwrap();
        // Both S pairs cross blocks 0 and 1: retained at helpers of slots
        // (0,1) and (1,0), under the full cover.
        let h01 = schemes.helper_node(0, 1, 2);
        let pairs = phase.retained.at(&buckets, h01);
        assert_eq!(pairs.len(), 2);
        assert!(net.ledger().phase("cover").unwrap().rounds() > 0);
        assert_eq!(phase.retained.nominal_budget, params.pair_budget(16));
    }

    #[test]
    fn tiny_balance_cap_forces_abort() {
        let (schemes, mut params) = setup(16);
        params.cover_balance_factor = 0.0;
        let g = UndirectedWeightedGraph::new(16);
        let s = PairSet::new();
        let index = TriangleIndex::build(&g, &s, &schemes);
        let mut net = Network::new(16, EnforcementMode::Strict);
        let seeder = Seeder::new(44);
        let mut rng = seeder.substream("cover", &[0]);
        let res = build_pair_cover(&mut net, &index, &schemes, &params, &mut rng).unwrap();
        assert!(matches!(res, Err(Abort::CoverNotBalanced { .. })));
    }
}
