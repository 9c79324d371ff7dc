//! The reduction chain: shortest paths from distance products, distance
//! products from negative-triangle detection.
//!
//! * [`find_edges`] removes the triangle-count promise: while the scale
//!   permits, it runs the promise solver on sparsified subgraphs whose
//!   sampling rate doubles per round, peeling off triangle-rich pairs, and
//!   finishes with one full-graph call. At desk scale the loop condition is
//!   false immediately and the promise holds vacuously.
//! * [`distance_product_via_triangles`] runs one joint binary search over
//!   all product entries: each step builds threshold edges from the current
//!   interval midpoints and asks a finder which pairs beat their thresholds.
//! * [`apsp`] squares the encoded matrix logarithmically many times and
//!   ships row u to node u.

use rand::Rng;
use serde::Serialize;

use crate::error::PipelineError;
use crate::graph::{PairSet, UndirectedWeightedGraph, WeightedDigraph};
use crate::labels::pad_to_fourth_power;
use crate::matrix::{encode_graph_matrix, DistMatrix};
use crate::net::Network;
use crate::oracles::brute_find_edges;
use crate::params::{log_n, PipelineParams};
use crate::rng::Seeder;
use crate::triangles::{compute_pairs, FinderContext, PipelineAudit};
use crate::tripartite::{build_tripartite_instance, TripartiteLayout};
use crate::weight::{ExtWeight, Finite};

/// Which promise-level solver backs the reductions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    /// The distributed pipeline (quantum-sim or exhaustive, per params).
    Pipeline,
    /// Brute-force ground truth; isolates the reduction logic itself.
    BruteOracle,
}

#[derive(Debug, Clone, Default, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct FindEdgesAudit {
    pub loop_iterations: u64,
    pub solver_calls: u64,
    /// Pairs settled by the sparsified rounds, before the final call.
    pub settled_in_loop: PairSet,
    pub pipeline: PipelineAudit,
}

#[allow(clippy::too_many_arguments)]
fn solve_instance(
    net: &mut Network,
    g: &UndirectedWeightedGraph,
    s: &PairSet,
    kind: SolverKind,
    params: &PipelineParams,
    seeder: &Seeder,
    call_tag: u64,
    reuse: Option<&FinderContext>,
    audit: &mut PipelineAudit,
) -> Result<PairSet, PipelineError> {
    match kind {
        SolverKind::BruteOracle => Ok(brute_find_edges(g, s)),
        SolverKind::Pipeline => {
            let out = match reuse {
                Some(ctx) => compute_pairs(
                    net,
                    g,
                    &ctx.index,
                    &ctx.buckets,
                    &ctx.plan,
                    &ctx.schemes,
                    params,
                    seeder,
                    call_tag,
                )?,
                None => {
                    let ctx =
                        FinderContext::build(g, s, net.node_count()).map_err(PipelineError::Net)?;
                    compute_pairs(
                        net,
                        g,
                        &ctx.index,
                        &ctx.buckets,
                        &ctx.plan,
                        &ctx.schemes,
                        params,
                        seeder,
                        call_tag,
                    )?
                }
            };
            audit.merge(&out.audit);
            Ok(out.found)
        }
    }
}

/// True when the sparsification loop never executes at this scale.
pub fn sampling_loop_dormant(n: usize, params: &PipelineParams) -> bool {
    params.loop_factor * log_n(n) > n as f64
}

/// Find all pairs of `s` involved in a negative triangle, without any
/// promise on their triangle counts.
pub fn find_edges(
    net: &mut Network,
    g: &UndirectedWeightedGraph,
    s: &PairSet,
    kind: SolverKind,
    params: &PipelineParams,
    seeder: &Seeder,
) -> Result<(PairSet, FindEdgesAudit), PipelineError> {
    let n = net.node_count();
    let mut audit = FindEdgesAudit {
        pipeline: PipelineAudit::new_clean(),
        ..FindEdgesAudit::default()
    };

    let mut remaining = s.clone();
    let mut settled = PairSet::new();
    let mut i = 0u32;
    while params.loop_factor * 2f64.powi(i as i32) * log_n(n) <= n as f64 {
        let p = (params.loop_factor * 2f64.powi(i as i32) * log_n(n) / n as f64)
            .sqrt()
            .clamp(0.0, 1.0);
        // Sparsify: sampled edges, with the surviving S pairs kept at their
        // true weights (their own edge is not what the sampling thins out).
        let mut rng = seeder.substream("sparsify", &[u64::from(i)]);
        let mut sparse = UndirectedWeightedGraph::new(g.vertex_count());
        for (u, v, w) in g.edges() {
            if rng.random_bool(p) || remaining.contains(&crate::graph::Pair::new(u, v)) {
                sparse.set_edge(u, v, w).expect("copying a valid edge");
            }
        }
        let found = solve_instance(
            net,
            &sparse,
            &remaining,
            kind,
            params,
            seeder,
            u64::from(i),
            None,
            &mut audit.pipeline,
        )?;
        remaining = remaining.difference(&found);
        settled = settled.union(&found);
        audit.loop_iterations += 1;
        audit.solver_calls += 1;
        i += 1;
    }
    audit.settled_in_loop = settled.clone();

    let reusable = (audit.loop_iterations == 0 && kind == SolverKind::Pipeline)
        .then(|| FinderContext::build(g, s, n))
        .transpose()
        .map_err(PipelineError::Net)?;
    let final_found = solve_instance(
        net,
        g,
        &remaining,
        kind,
        params,
        seeder,
        u64::from(i) + 1,
        reusable.as_ref(),
        &mut audit.pipeline,
    )?;
    audit.solver_calls += 1;
    Ok((settled.union(&final_found), audit))
}

#[derive(Debug, Clone, Default, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ProductAudit {
    pub calls: u64,
    /// Binary search call budget for this product.
    pub call_bound: u64,
    /// Inner results compared against brute force (when enabled): calls
    /// whose pair set disagreed.
    pub audited_calls: u64,
    pub inner_mismatches: u64,
    pub pipeline: PipelineAudit,
}

/// Network size hosting a product of `n_g`-dimensional matrices.
pub fn product_network_size(n_g: usize) -> usize {
    pad_to_fourth_power(3 * n_g)
}

/// Compute the distance product through negative-triangle detection: a
/// per-entry lockstep binary search, each step one finder call on the
/// threshold instance.
pub fn distance_product_via_triangles(
    net: &mut Network,
    a: &DistMatrix,
    b: &DistMatrix,
    kind: SolverKind,
    params: &PipelineParams,
    seeder: &Seeder,
    audit_inner: bool,
) -> Result<(DistMatrix, ProductAudit), PipelineError> {
    let n_g = a.dimension();
    if b.dimension() != n_g {
        return Err(PipelineError::Graph(
            crate::error::GraphError::DimensionMismatch {
                left: n_g,
                right: b.dimension(),
            },
        ));
    }
    assert_eq!(
        net.node_count(),
        product_network_size(n_g),
        "network must host the 3n-vertex instance padded to a fourth power"
    );

    let bound = a.max_magnitude().max(b.max_magnitude());
    let layout = TripartiteLayout { n: n_g };
    let zeros =
        DistMatrix::from_rows(vec![vec![ExtWeight::ZERO; n_g]; n_g]).expect("square zero matrix");
    let (mut instance, s) =
        build_tripartite_instance(a, b, &zeros).map_err(PipelineError::Graph)?;

    let mut audit = ProductAudit {
        pipeline: PipelineAudit::new_clean(),
        ..ProductAudit::default()
    };
    // Half-open interval [lo, hi) per pair in S; entries without any finite
    // middle leg stay INF and are never searched. The interval spans 4M + 1
    // values, so ceil(log2(4M + 2)) halvings settle every entry.
    audit.call_bound = ((4 * bound + 2).max(2) as f64).log2().ceil() as u64;
    let mut intervals: Vec<(i64, i64)> = vec![(-2 * bound, 2 * bound + 1); s.len()];

    let ctx = (kind == SolverKind::Pipeline)
        .then(|| FinderContext::build(&instance, &s, net.node_count()))
        .transpose()
        .map_err(PipelineError::Net)?;
    let dormant = sampling_loop_dormant(net.node_count(), params);

    let mut step = 0u64;
    while intervals.iter().any(|&(lo, hi)| hi - lo > 1) {
        // Midpoint thresholds become the I-J edge weights.
        for (pair, &(lo, hi)) in s.iter().zip(&intervals) {
            let d = midpoint(lo, hi);
            instance
                .set_edge(pair.lo(), pair.hi(), -d)
                .expect("threshold edge exists");
        }
        let found = if dormant || kind == SolverKind::BruteOracle {
            solve_instance(
                net,
                &instance,
                &s,
                kind,
                params,
                seeder,
                step,
                ctx.as_ref(),
                &mut audit.pipeline,
            )?
        } else {
            let (found, fe_audit) = find_edges(
                net,
                &instance,
                &s,
                kind,
                params,
                &seeder.child("product-step", &[step]),
            )?;
            audit.pipeline.merge(&fe_audit.pipeline);
            found
        };
        audit.calls += 1;
        if audit_inner {
            audit.audited_calls += 1;
            if brute_find_edges(&instance, &s) != found {
                audit.inner_mismatches += 1;
            }
        }
        for (pair, interval) in s.iter().zip(intervals.iter_mut()) {
            let (lo, hi) = *interval;
            if hi - lo <= 1 {
                continue;
            }
            let d = midpoint(lo, hi);
            if found.contains(pair) {
                // Some middle leg beats the threshold: the value is below d.
                interval.1 = d;
            } else {
                interval.0 = d;
            }
        }
        step += 1;
        if step > audit.call_bound + 2 {
            return Err(PipelineError::BadInput(
                "binary search failed to converge".into(),
            ));
        }
    }

    let mut c = DistMatrix::filled_inf(n_g);
    for (pair, &(lo, _)) in s.iter().zip(&intervals) {
        let (i, j) = layout.pair_indices(pair).expect("S holds I x J pairs only");
        c.set(i, j, Finite(lo));
    }
    c.refresh_bound();
    Ok((c, audit))
}

fn midpoint(lo: i64, hi: i64) -> i64 {
    // Floor midpoint, correct for negative bounds.
    (lo + hi).div_euclid(2)
}

#[derive(Debug, Clone, Default, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ApspAudit {
    pub squarings: u64,
    pub products: Vec<ProductAudit>,
}

/// All-pairs shortest distances of a digraph with integer weights, by
/// repeated squaring of the encoded matrix. Fails on negative cycles.
pub fn apsp(
    net: &mut Network,
    g: &WeightedDigraph,
    kind: SolverKind,
    params: &PipelineParams,
    seeder: &Seeder,
    audit_inner: bool,
) -> Result<(DistMatrix, ApspAudit), PipelineError> {
    let n_g = g.vertex_count();
    let cap = n_g as i64 * g.weight_bound().max(1);
    let mut matrix = encode_graph_matrix(g);
    let mut audit = ApspAudit::default();

    // Square up to the n-th power: distances stabilize at n-1 hops, and the
    // n-th power surfaces negative cycles on the diagonal.
    let mut hops = 1usize;
    while hops < n_g {
        let (next, product_audit) = distance_product_via_triangles(
            net,
            &matrix,
            &matrix,
            kind,
            params,
            &seeder.child("squaring", &[audit.squarings]),
            audit_inner,
        )?;
        matrix = next;
        audit.squarings += 1;
        audit.products.push(product_audit);
        hops *= 2;

        for (v, d) in matrix.diagonal().enumerate() {
            if let Finite(d) = d {
                if d < 0 {
                    return Err(PipelineError::NegativeCycle { vertex: v, diag: d });
                }
            }
        }
        // Entries past n*W cannot arise without a negative cycle.
        if matrix.max_magnitude() > cap {
            return Err(PipelineError::NegativeCycle {
                vertex: 0,
                diag: -matrix.max_magnitude(),
            });
        }
    }

    // Deliver row u to node u.
    net.enter_phase("deliver");
    let mut src = vec![0u64; net.node_count()];
    let mut snk = vec![0u64; net.node_count()];
    for u in 0..n_g {
        src[u] += n_g as u64 - 1;
        snk[u] += n_g as u64 - 1;
    }
    net.charge_bulk_aggregate(&src, &snk)
        .map_err(PipelineError::Net)?;

    for (v, d) in matrix.diagonal().enumerate() {
        match d {
            Finite(d) if d < 0 => return Err(PipelineError::NegativeCycle { vertex: v, diag: d }),
            _ => {}
        }
    }
    Ok((matrix, audit))
}
