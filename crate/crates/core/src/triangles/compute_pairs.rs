//! The full negative-triangle pair finder.
//!
//! Given an undirected weighted graph and a pair set S distributed over the
//! nodes, find every pair of S involved in a negative triangle:
//!
//! 1. every triple-scheme node gathers the leg weights between its two
//!    blocks (a batched bulk exchange);
//! 2. helper nodes draw their pair covers, abort on imbalance, and load the
//!    weights and S membership of their cover pairs;
//! 3. the triples are classed by estimated triangle load, then each class
//!    runs the lockstep searches against its evaluation procedure;
//! 4. found pairs travel back to their endpoint nodes.
//!
//! Aborting sub-protocols are retried with fresh randomness up to the
//! configured bound.

use serde::Serialize;

use crate::error::{NetError, PipelineError};
use crate::graph::{Pair, PairSet, UndirectedWeightedGraph};
use crate::labels::LabelSchemes;
use crate::net::Network;
use crate::params::PipelineParams;
use crate::rng::Seeder;

use super::classes::identify_class;
use super::cover::{build_pair_cover, SlotBuckets};
use super::predicate::TriangleIndex;
use super::search::{run_class_searches, AlphaSearchReport};
use super::PhaseError;

/// Bulk-exchange loads of the gathering step, reusable across calls that
/// share the same edge structure.
pub struct GatherPlan {
    src: Vec<u64>,
    snk: Vec<u64>,
    /// Per triple node: units of gathered table it ends up holding.
    pub table_sizes: Vec<u64>,
}

impl GatherPlan {
    pub fn build(g: &UndirectedWeightedGraph, schemes: &LabelSchemes) -> Self {
        let n = schemes.n();
        let coarse = schemes.coarse_count();
        let mut src = vec![0u64; n];
        let mut snk = vec![0u64; n];
        for (a, b, _w) in g.edges() {
            // As a (coarse endpoint, fine endpoint) leg, each orientation
            // feeds the triples of one coarse block and one fine block,
            // across all coarse partners; the coarse endpoint owns the leg.
            let (ca, cb) = (schemes.coarse_block_of(a), schemes.coarse_block_of(b));
            let (fa, fb) = (schemes.fine_block_of(a), schemes.fine_block_of(b));
            for other in 0..coarse {
                // {u, w} legs of P(coarse, fine).
                snk[schemes.triple_index(ca, other, fb)] += 1;
                snk[schemes.triple_index(cb, other, fa)] += 1;
                // {w, v} legs of P(fine, coarse).
                snk[schemes.triple_index(other, ca, fb)] += 1;
                snk[schemes.triple_index(other, cb, fa)] += 1;
            }
            src[a] += 2 * coarse as u64;
            src[b] += 2 * coarse as u64;
        }
        let table_sizes = snk.clone();
        GatherPlan {
            src,
            snk,
            table_sizes,
        }
    }
}

/// Non-ledger audit trail of one run.
#[derive(Debug, Clone, Serialize, Default)]
#[serde(rename_all = "camelCase")]
pub struct PipelineAudit {
    /// Every S pair within the promised triangle-count cap.
    pub promise_satisfied: bool,
    pub max_gamma: usize,
    pub promise_cap: f64,
    pub pair_count: usize,
    pub aborts: u64,
    pub cover_full: bool,
    pub alpha_reports: Vec<AlphaSearchReport>,
}

impl PipelineAudit {
    pub fn merge(&mut self, other: &PipelineAudit) {
        self.promise_satisfied &= other.promise_satisfied;
        self.max_gamma = self.max_gamma.max(other.max_gamma);
        self.promise_cap = other.promise_cap;
        self.pair_count = self.pair_count.max(other.pair_count);
        self.aborts += other.aborts;
        self.cover_full &= other.cover_full;
        self.alpha_reports
            .extend(other.alpha_reports.iter().cloned());
    }

    pub fn new_clean() -> Self {
        PipelineAudit {
            promise_satisfied: true,
            cover_full: true,
            ..PipelineAudit::default()
        }
    }
}

#[derive(Debug)]
pub struct ComputePairsOutput {
    pub found: PairSet,
    /// Per node: the pairs containing it that were reported.
    pub per_node_output: Vec<Vec<Pair>>,
    pub audit: PipelineAudit,
}

/// Run the finder on a prepared context. `call_tag` keys the randomness so
/// repeated calls inside one experiment stay independent and reproducible.
#[allow(clippy::too_many_arguments)]
pub fn compute_pairs(
    net: &mut Network,
    g: &UndirectedWeightedGraph,
    index: &TriangleIndex,
    buckets: &SlotBuckets,
    plan: &GatherPlan,
    schemes: &LabelSchemes,
    params: &PipelineParams,
    seeder: &Seeder,
    call_tag: u64,
) -> Result<ComputePairsOutput, PipelineError> {
    let n = schemes.n();
    assert!(
        g.vertex_count() <= n,
        "graph must fit the network (pad first)"
    );
    let mut audit = PipelineAudit::new_clean();
    audit.pair_count = index.pair_count();
    audit.promise_cap = params.promise_cap(n);
    for idx in 0..index.pair_count() {
        let gamma = index.gamma_of(g, idx);
        audit.max_gamma = audit.max_gamma.max(gamma);
    }
    audit.promise_satisfied = (audit.max_gamma as f64) <= audit.promise_cap;

    // Gathering.
    net.enter_phase("gather");
    net.charge_bulk_aggregate(&plan.src, &plan.snk)
        .map_err(PipelineError::Net)?;

    let call_seeder = seeder.child("call", &[call_tag]);
    let mut last_abort = None;
    for attempt in 0..params.retry_bound.max(1) as u64 {
        // Pair cover.
        net.enter_phase("cover");
        let mut rng = call_seeder.substream("cover", &[attempt]);
        let phase = match build_pair_cover(net, index, schemes, params, &mut rng)
            .map_err(PipelineError::Net)?
        {
            Ok(phase) => phase,
            Err(abort) => {
                audit.aborts += 1;
                last_abort = Some(abort);
                continue;
            }
        };
        audit.cover_full &= phase.cover.is_full();

        // Class estimation.
        net.enter_phase("classes");
        let mut rng = call_seeder.substream("classes", &[attempt]);
        let classes = match identify_class(net, g, index, schemes, params, &mut rng) {
            Ok(c) => c,
            Err(PhaseError::Abort(abort)) => {
                audit.aborts += 1;
                last_abort = Some(abort);
                continue;
            }
            Err(PhaseError::Net(e)) => return Err(PipelineError::Net(e)),
        };

        // Per-class searches.
        let step_seeder = call_seeder.child("attempt", &[attempt]);
        let outcome = run_class_searches(
            net,
            g,
            index,
            schemes,
            params,
            buckets,
            &phase.retained,
            &classes,
            &plan.table_sizes,
            &step_seeder,
            attempt,
        )
        .map_err(PipelineError::Net)?;
        audit.alpha_reports = outcome.reports;

        // Output: found pairs travel to their endpoints.
        net.enter_phase("output");
        let mut src = vec![0u64; n];
        let mut snk = vec![0u64; n];
        let mut found_pairs = Vec::new();
        let mut per_node_output: Vec<Vec<Pair>> = vec![Vec::new(); n];
        for (idx, &hit) in outcome.found.iter().enumerate() {
            if !hit {
                continue;
            }
            let pair = index.pair(idx);
            let helper = outcome.finder[idx].expect("found pairs have a finder");
            src[helper] += 2;
            snk[pair.lo()] += 1;
            snk[pair.hi()] += 1;
            per_node_output[pair.lo()].push(pair);
            per_node_output[pair.hi()].push(pair);
            found_pairs.push(pair);
        }
        net.charge_bulk_aggregate(&src, &snk)
            .map_err(PipelineError::Net)?;

        return Ok(ComputePairsOutput {
            found: PairSet::from_pairs(found_pairs),
            per_node_output,
            audit,
        });
    }

    Err(PipelineError::RetriesExhausted {
        attempts: params.retry_bound.max(1),
        last: last_abort.expect("exhaustion implies at least one abort"),
    })
}

/// Prepared context for repeated calls over one graph structure.
pub struct FinderContext {
    pub schemes: LabelSchemes,
    pub index: TriangleIndex,
    pub buckets: SlotBuckets,
    pub plan: GatherPlan,
}

impl FinderContext {
    pub fn build(
        g: &UndirectedWeightedGraph,
        s: &PairSet,
        net_size: usize,
    ) -> Result<Self, NetError> {
        let schemes = LabelSchemes::build(net_size)?;
        let index = TriangleIndex::build(g, s, &schemes);
        let buckets = SlotBuckets::build(&index, &schemes);
        let plan = GatherPlan::build(g, &schemes);
        Ok(FinderContext {
            schemes,
            index,
            buckets,
            plan,
        })
    }
}

/// One-shot convenience wrapper: build the context and run a single call.
pub fn find_pairs_once(
    net: &mut Network,
    g: &UndirectedWeightedGraph,
    s: &PairSet,
    params: &PipelineParams,
    seeder: &Seeder,
) -> Result<ComputePairsOutput, PipelineError> {
    s.validate(g.vertex_count()).map_err(PipelineError::Graph)?;
    let ctx = FinderContext::build(g, s, net.node_count()).map_err(PipelineError::Net)?;
    compute_pairs(
        net,
        g,
        &ctx.index,
        &ctx.buckets,
        &ctx.plan,
        &ctx.schemes,
        params,
        seeder,
        0,
    )
}
