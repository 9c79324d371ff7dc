//! Lockstep parallel searches over the class domains.
//!
//! For one class, every helper node runs one search per retained pair over
//! the class's fine blocks of its slot (plus the dummy element). All helpers
//! share the iteration schedule: a step applies the same iteration count to
//! every open search, measures them all, and rehearses the measured queries
//! through one real execution of the class evaluator, which both
//! prices the step (the remaining iterations of the step charge the same
//! measured cost) and actually answers the queries. A search settles when
//! the network answered true for its measured element.
//!
//! Two exactness-preserving reductions keep this tractable at scale:
//! searches with identical solution sets share their amplitude pair (the
//! two-level dynamics depend only on the solution count), and searches whose
//! only solution is the dummy (the vast majority) are never tracked
//! individually: their measured queries per (helper, block) form a
//! multinomial draw, which is sampled directly into the evaluation load grid.

use std::collections::HashMap;

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::Serialize;

use crate::error::NetError;
use crate::graph::UndirectedWeightedGraph;
use crate::labels::LabelSchemes;
use crate::ledger::CostKind;
use crate::net::{Network, NodeId};
use crate::params::{log_n, PipelineParams, SearchMode};
use crate::qsearch::closed_form_success;
use crate::qsearch::schedule_iterations;
use crate::rng::{Seeder, Substream};

use super::classes::ClassPartition;
use super::cover::{HelperRetained, SlotBuckets};
use super::eval::{AlphaEvaluator, EvalQuery, LoadGrid};
use super::predicate::{negative_triangle_predicate, TriangleIndex};

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct AlphaSearchReport {
    pub alpha: u32,
    /// Slots whose class domain is nonempty.
    pub instances: usize,
    /// Real searches simulated (dummy padding excluded).
    pub coordinates: u64,
    pub nominal_budget: usize,
    pub grover_iterations: u64,
    pub schedule_passes: u64,
    pub eval_calls: u64,
    pub eval_rounds_total: u64,
    pub max_eval_rounds: u64,
    pub max_eval_sink_units: u64,
    pub step0_rounds: u64,
    pub round_budget: u64,
    pub cost_violations: u64,
    pub promise_violations: u64,
    pub typicality_samples: u64,
    pub typicality_violations: u64,
    pub evaluator_errors: u64,
    /// Helper-set overlap with triangle-rich triples stays under the audit
    /// cap (only meaningful under a full cover, where overlaps are exact).
    pub helper_balance_ok: bool,
    pub max_claims: u64,
    pub claims_cap: f64,
    /// Per-slot class width within the promise-derived bound.
    pub class_width_ok: bool,
    /// Every element is accepted by at most beta/2 of a helper's searches.
    pub freq_criterion_ok: bool,
    /// Sampled class estimates bracket the true triangle-pair counts.
    pub class_estimates_ok: bool,
    pub hypothesis_beta_large_all: bool,
    pub hypothesis_domain_small_ln_all: bool,
    pub hypothesis_domain_small_log2_all: bool,
    pub found_events: u64,
}

pub struct ClassSearchOutcome {
    /// Per S-pair index: found by some helper's search.
    pub found: Vec<bool>,
    /// Representative finder per found pair.
    pub finder: Vec<Option<NodeId>>,
    pub reports: Vec<AlphaSearchReport>,
}

struct Group {
    slot: usize,
    /// Solution positions within the slot's block list, ascending; never
    /// empty (solution-free searches are aggregated, not grouped).
    solutions: Vec<u16>,
}

struct Coord {
    helper: u32,
    pair_idx: u32,
    group: u32,
}

fn binomial_draw(n: u64, p: f64, rng: &mut Substream) -> u64 {
    if n == 0 || p <= 0.0 {
        0
    } else if p >= 1.0 {
        n
    } else {
        Binomial::new(n, p).expect("p in (0,1)").sample(rng)
    }
}

/// Spread `total` uniform draws over the slot's block positions.
fn spread_uniform(
    grid: &mut LoadGrid,
    helper: NodeId,
    blocks: &[usize],
    total: u64,
    rng: &mut Substream,
) {
    let mut remaining = total;
    let len = blocks.len();
    for (pos, &block) in blocks.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        let c = if pos + 1 == len {
            remaining
        } else {
            binomial_draw(remaining, 1.0 / (len - pos) as f64, rng)
        };
        if c > 0 {
            grid.add(helper, block, c as u32);
            remaining -= c;
        }
    }
}

struct StepCounters<'a> {
    report: &'a mut AlphaSearchReport,
    settled: &'a mut [bool],
    found: &'a mut [bool],
    finder: &'a mut [Option<NodeId>],
}

/// Run one rehearsed evaluation and absorb its outcome.
#[allow(clippy::too_many_arguments)]
fn run_eval(
    net: &mut Network,
    evaluator: &AlphaEvaluator,
    g: &UndirectedWeightedGraph,
    index: &TriangleIndex,
    schemes: &LabelSchemes,
    queries: &[EvalQuery],
    coord_of: &[usize],
    coords: &[Coord],
    grid: &LoadGrid,
    k: usize,
    counters: &mut StepCounters<'_>,
) -> Result<(), NetError> {
    if grid.is_empty() {
        return Ok(());
    }
    let result = evaluator.evaluate(net, g, index, schemes, queries, grid)?;
    // The remaining iterations of this step repeat the rehearsed
    // communication pattern.
    let repeats = (k.max(1) as u64) - 1;
    if repeats > 0 {
        let kind = net.cost_kind();
        net.charge_rounds(repeats * result.rounds, kind);
    }
    let report = &mut *counters.report;
    report.eval_calls += 1;
    report.eval_rounds_total += result.rounds;
    report.max_eval_rounds = report.max_eval_rounds.max(result.rounds);
    report.max_eval_sink_units = report.max_eval_sink_units.max(result.max_sink_units);
    if result.rounds > evaluator.round_budget() {
        report.cost_violations += 1;
    }
    report.promise_violations += result.promise_violations;
    report.typicality_violations += result.promise_violations;
    report.typicality_samples += result.active_helpers;
    report.evaluator_errors += result.answers.iter().filter(|a| a.is_none()).count() as u64;
    for (qi, answer) in result.answers.iter().enumerate() {
        if *answer == Some(true) {
            let ci = coord_of[qi];
            if !counters.settled[ci] {
                counters.settled[ci] = true;
                report.found_events += 1;
                let pair = coords[ci].pair_idx as usize;
                if !counters.found[pair] {
                    counters.found[pair] = true;
                    counters.finder[pair] = Some(coords[ci].helper as usize);
                }
            }
        }
    }
    Ok(())
}

/// Run the per-class searches for every class present.
#[allow(clippy::too_many_arguments)]
pub fn run_class_searches(
    net: &mut Network,
    g: &UndirectedWeightedGraph,
    index: &TriangleIndex,
    schemes: &LabelSchemes,
    params: &PipelineParams,
    buckets: &SlotBuckets,
    retained: &HelperRetained,
    classes: &ClassPartition,
    gather_sizes: &[u64],
    seeder: &Seeder,
    attempt: u64,
) -> Result<ClassSearchOutcome, NetError> {
    let n = schemes.n();
    let fine = schemes.fine_count();
    let mut found = vec![false; index.pair_count()];
    let mut finder: Vec<Option<NodeId>> = vec![None; index.pair_count()];
    let mut reports = Vec::new();

    for &alpha in classes.alphas() {
        net.enter_phase("search");
        let evaluator = AlphaEvaluator::new(net, schemes, classes, gather_sizes, alpha, params)?;

        // Class domains per slot.
        let coarse = schemes.coarse_count();
        let mut blocks_per_slot: Vec<Vec<usize>> = Vec::with_capacity(schemes.pair_slots());
        for ub in 0..coarse {
            for vb in 0..coarse {
                blocks_per_slot.push(classes.fine_blocks(schemes, ub, vb, alpha));
            }
        }
        let instances = blocks_per_slot.iter().filter(|b| !b.is_empty()).count();
        let max_domain = blocks_per_slot
            .iter()
            .map(|b| b.len() + 1)
            .max()
            .unwrap_or(2)
            .max(2);

        // Class width audit: the promise caps how many triangle-rich triples
        // one slot can contribute to a class.
        let width_cap = params.dup_divisor * (n as f64).sqrt() * log_n(n) / 2f64.powi(alpha as i32);
        let class_width_ok = blocks_per_slot.iter().all(|b| b.len() as f64 <= width_cap);

        // Coordinates and shared groups for solution-bearing searches;
        // solution-free searches are only counted. Under a full cover the
        // solution set of a pair is identical across a slot's helpers, so
        // lookups are memoized per (slot, pair).
        let mut groups: Vec<Group> = Vec::new();
        let mut group_ids: HashMap<(usize, Vec<u16>), u32> = HashMap::new();
        let mut pair_group: HashMap<(usize, u32), Option<u32>> = HashMap::new();
        let mut coords: Vec<Coord> = Vec::new();
        let mut barren = vec![0u64; n];
        // Claims per (slot, position): searches accepting each element.
        let mut claims: Vec<Vec<u64>> = blocks_per_slot
            .iter()
            .map(|b| vec![0u64; b.len()])
            .collect();

        #[allow(clippy::needless_range_loop)]
        for helper in 0..n {
            let (ub, vb, _x) = schemes.helper_parts(helper);
            let slot = schemes.pair_slot(ub, vb);
            let blocks = &blocks_per_slot[slot];
            if blocks.is_empty() {
                continue;
            }
            for &pair_idx in retained.at(buckets, helper) {
                let gid = match pair_group.get(&(slot, pair_idx as u32)) {
                    Some(&gid) => gid,
                    None => {
                        let solutions: Vec<u16> = blocks
                            .iter()
                            .enumerate()
                            .filter(|&(_, &wb)| negative_triangle_predicate(g, index, pair_idx, wb))
                            .map(|(pos, _)| pos as u16)
                            .collect();
                        for &pos in &solutions {
                            claims[slot][pos as usize] += 1;
                        }
                        let gid =
                            if solutions.is_empty() {
                                None
                            } else {
                                Some(*group_ids.entry((slot, solutions.clone())).or_insert_with(
                                    || {
                                        groups.push(Group { slot, solutions });
                                        (groups.len() - 1) as u32
                                    },
                                ))
                            };
                        pair_group.insert((slot, pair_idx as u32), gid);
                        gid
                    }
                };
                match gid {
                    Some(gid) => coords.push(Coord {
                        helper: helper as u32,
                        pair_idx: pair_idx as u32,
                        group: gid,
                    }),
                    None => barren[helper] += 1,
                }
            }
        }

        // Audits over the exact per-helper claims (full cover: claims equal
        // the true triangle-pair overlap per block).
        let claims_cap = params.balance_audit_cap(n, alpha);
        let beta = params.beta(n, alpha);
        let max_claims = claims
            .iter()
            .flat_map(|c| c.iter().copied())
            .max()
            .unwrap_or(0);
        let helper_balance_ok = (max_claims as f64) <= claims_cap;
        let freq_criterion_ok = (max_claims as f64) <= beta / 2.0;

        // Sampled class estimates versus the true counts of this class.
        let mut class_estimates_ok = true;
        for slot_claims in &claims {
            for &delta in slot_claims {
                let ok = if alpha == 0 {
                    delta as f64 <= 2.0 * n as f64
                } else {
                    let lo = 2f64.powi(alpha as i32 - 3) * n as f64;
                    let hi = 2f64.powi(alpha as i32 + 1) * n as f64;
                    lo <= delta as f64 && delta as f64 <= hi
                };
                if !ok {
                    class_estimates_ok = false;
                }
            }
        }

        // Hypothesis flags across the slot instances.
        let m = retained.nominal_budget;
        let mf = m.max(2) as f64;
        let mut beta_large_all = true;
        let mut dom_ln_all = true;
        let mut dom_log2_all = true;
        for blocks in &blocks_per_slot {
            if blocks.is_empty() {
                continue;
            }
            let x = blocks.len() as f64;
            beta_large_all &= beta > params.typical_beta_factor * mf / x;
            dom_ln_all &= x < mf / (params.typical_domain_factor * mf.ln());
            dom_log2_all &= x < mf / (params.typical_domain_factor * mf.log2());
        }

        let total_coords = coords.len() as u64 + barren.iter().sum::<u64>();
        let mut report = AlphaSearchReport {
            alpha,
            instances,
            coordinates: total_coords,
            nominal_budget: m,
            grover_iterations: 0,
            schedule_passes: 0,
            eval_calls: 0,
            eval_rounds_total: 0,
            max_eval_rounds: 0,
            max_eval_sink_units: 0,
            step0_rounds: evaluator.step0_rounds,
            round_budget: evaluator.round_budget(),
            cost_violations: 0,
            promise_violations: 0,
            typicality_samples: 0,
            typicality_violations: 0,
            evaluator_errors: 0,
            helper_balance_ok,
            max_claims,
            claims_cap,
            class_width_ok,
            freq_criterion_ok,
            class_estimates_ok,
            hypothesis_beta_large_all: beta_large_all,
            hypothesis_domain_small_ln_all: dom_ln_all,
            hypothesis_domain_small_log2_all: dom_log2_all,
            found_events: 0,
        };

        if total_coords == 0 {
            reports.push(report);
            continue;
        }

        let mut settled = vec![false; coords.len()];
        let mut rng = seeder.substream("class-search", &[u64::from(alpha), attempt]);
        let mut grid = LoadGrid::new(n, fine);
        let mut queries: Vec<EvalQuery> = Vec::new();
        let mut coord_of: Vec<usize> = Vec::new();

        let slot_of_helper: Vec<usize> = (0..n)
            .map(|h| {
                let (ub, vb, _x) = schemes.helper_parts(h);
                schemes.pair_slot(ub, vb)
            })
            .collect();

        match params.mode {
            SearchMode::OracleExhaustive => {
                net.set_cost_kind(CostKind::Classical);
                for pos in 0..(max_domain - 1) {
                    grid.clear();
                    queries.clear();
                    coord_of.clear();
                    for helper in 0..n {
                        let blocks = &blocks_per_slot[slot_of_helper[helper]];
                        if pos < blocks.len() && barren[helper] > 0 {
                            grid.add(helper, blocks[pos], barren[helper] as u32);
                        }
                    }
                    for (ci, c) in coords.iter().enumerate() {
                        if settled[ci] {
                            continue;
                        }
                        let blocks = &blocks_per_slot[groups[c.group as usize].slot];
                        if pos < blocks.len() {
                            let q = EvalQuery {
                                helper: c.helper as usize,
                                pair_idx: c.pair_idx as usize,
                                block: blocks[pos],
                            };
                            grid.add(q.helper, q.block, 1);
                            queries.push(q);
                            coord_of.push(ci);
                        }
                    }
                    let mut counters = StepCounters {
                        report: &mut report,
                        settled: &mut settled,
                        found: &mut found,
                        finder: &mut finder,
                    };
                    run_eval(
                        net,
                        &evaluator,
                        g,
                        index,
                        schemes,
                        &queries,
                        &coord_of,
                        &coords,
                        &grid,
                        1,
                        &mut counters,
                    )?;
                }
            }
            SearchMode::QuantumSim => {
                // Classical pretest: uniform tuples catch dense predicates.
                net.set_cost_kind(CostKind::Classical);
                for _ in 0..params.pretest_for(m) {
                    grid.clear();
                    queries.clear();
                    coord_of.clear();
                    for helper in 0..n {
                        if barren[helper] > 0 {
                            let blocks = &blocks_per_slot[slot_of_helper[helper]];
                            spread_uniform(&mut grid, helper, blocks, barren[helper], &mut rng);
                        }
                    }
                    for (ci, c) in coords.iter().enumerate() {
                        if settled[ci] {
                            continue;
                        }
                        let blocks = &blocks_per_slot[groups[c.group as usize].slot];
                        let q = EvalQuery {
                            helper: c.helper as usize,
                            pair_idx: c.pair_idx as usize,
                            block: blocks[rng.random_range(0..blocks.len())],
                        };
                        grid.add(q.helper, q.block, 1);
                        queries.push(q);
                        coord_of.push(ci);
                    }
                    let mut counters = StepCounters {
                        report: &mut report,
                        settled: &mut settled,
                        found: &mut found,
                        finder: &mut finder,
                    };
                    run_eval(
                        net,
                        &evaluator,
                        g,
                        index,
                        schemes,
                        &queries,
                        &coord_of,
                        &coords,
                        &grid,
                        1,
                        &mut counters,
                    )?;
                }

                net.set_cost_kind(CostKind::QuantumCharged);
                let passes = params.amplification_for(m);
                let mut group_prob = vec![0.0f64; groups.len()];
                let mut barren_real = vec![0.0f64; schemes.pair_slots()];
                for _pass in 0..passes {
                    report.schedule_passes += 1;
                    for k in schedule_iterations(max_domain, &mut rng) {
                        report.grover_iterations += k as u64;
                        for (gi, group) in groups.iter().enumerate() {
                            let d = blocks_per_slot[group.slot].len() + 1;
                            let n1 = group.solutions.len() + 1;
                            group_prob[gi] = closed_form_success(d, n1, k);
                        }
                        for (slot, blocks) in blocks_per_slot.iter().enumerate() {
                            if !blocks.is_empty() {
                                barren_real[slot] = (1.0
                                    - closed_form_success(blocks.len() + 1, 1, k))
                                .clamp(0.0, 1.0);
                            }
                        }

                        grid.clear();
                        queries.clear();
                        coord_of.clear();
                        // Solution-free searches: their real measurements are
                        // uniform over the domain, aggregated per helper.
                        for helper in 0..n {
                            if barren[helper] == 0 {
                                continue;
                            }
                            let slot = slot_of_helper[helper];
                            let real = binomial_draw(barren[helper], barren_real[slot], &mut rng);
                            spread_uniform(
                                &mut grid,
                                helper,
                                &blocks_per_slot[slot],
                                real,
                                &mut rng,
                            );
                        }
                        // Tracked searches: per-coordinate measurement.
                        for (ci, c) in coords.iter().enumerate() {
                            if settled[ci] {
                                continue;
                            }
                            let group = &groups[c.group as usize];
                            let blocks = &blocks_per_slot[group.slot];
                            let n_sol = group.solutions.len() + 1;
                            let pos = if rng.random::<f64>() < group_prob[c.group as usize] {
                                // Within the solution side; the last slot is
                                // the dummy, answered locally.
                                let i = rng.random_range(0..n_sol);
                                if i == n_sol - 1 {
                                    None
                                } else {
                                    Some(group.solutions[i] as usize)
                                }
                            } else {
                                let n0 = blocks.len() - group.solutions.len();
                                let mut x = rng.random_range(0..n0);
                                for &s in &group.solutions {
                                    if (s as usize) <= x {
                                        x += 1;
                                    } else {
                                        break;
                                    }
                                }
                                Some(x)
                            };
                            if let Some(pos) = pos {
                                let q = EvalQuery {
                                    helper: c.helper as usize,
                                    pair_idx: c.pair_idx as usize,
                                    block: blocks[pos],
                                };
                                grid.add(q.helper, q.block, 1);
                                queries.push(q);
                                coord_of.push(ci);
                            }
                        }
                        let mut counters = StepCounters {
                            report: &mut report,
                            settled: &mut settled,
                            found: &mut found,
                            finder: &mut finder,
                        };
                        run_eval(
                            net,
                            &evaluator,
                            g,
                            index,
                            schemes,
                            &queries,
                            &coord_of,
                            &coords,
                            &grid,
                            k,
                            &mut counters,
                        )?;
                    }
                }
                net.set_cost_kind(CostKind::Classical);
            }
        }
        reports.push(report);
    }

    Ok(ClassSearchOutcome {
        found,
        finder,
        reports,
    })
}
