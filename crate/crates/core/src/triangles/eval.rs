//! Networked evaluation procedures answering batched triangle queries.
//!
//! Helpers send, per fine block they query, the list of pairs asking about
//! that block (with the pair weights) to the node responsible for the block;
//! that node answers each pair with the triangle predicate and sends the
//! bits back. For class zero the responsible node is the triple-scheme node
//! itself. For heavier classes the class has fewer triples, so each triple's
//! gathered table is first copied onto a batch of relabeled nodes (once per
//! class, not per call) and every sender splits its lists across the copies,
//! trading destination count for per-destination bandwidth.
//!
//! A list longer than the declared bound breaks the procedure's promise: the
//! offending helper gets error answers for that call and the event is
//! recorded, not fatal; the surrounding search tolerates atypical inputs.
//!
//! Call load is accounted through a dense per-(helper, block) grid. Searches
//! that can only ever answer false (their one solution is the dummy) appear
//! in the grid without materializing individual queries; explicit queries are
//! carried only where the answer bit matters.

use crate::error::NetError;
use crate::graph::UndirectedWeightedGraph;
use crate::labels::{DuplicationScheme, LabelSchemes};
use crate::net::{Network, NodeId};
use crate::params::{log_n, PipelineParams};

use super::classes::ClassPartition;
use super::predicate::{negative_triangle_predicate, TriangleIndex};

/// One tracked query: a pair asking about one fine block.
#[derive(Debug, Clone, Copy)]
pub struct EvalQuery {
    pub helper: NodeId,
    pub pair_idx: usize,
    pub block: usize,
}

/// Dense per-(helper, fine block) unit counts for one evaluation call.
#[derive(Debug, Clone)]
pub struct LoadGrid {
    counts: Vec<u32>,
    fine_count: usize,
}

impl LoadGrid {
    pub fn new(n: usize, fine_count: usize) -> Self {
        LoadGrid {
            counts: vec![0; n * fine_count],
            fine_count,
        }
    }

    pub fn clear(&mut self) {
        self.counts.iter_mut().for_each(|c| *c = 0);
    }

    pub fn add(&mut self, helper: NodeId, block: usize, units: u32) {
        self.counts[helper * self.fine_count + block] += units;
    }

    pub fn count(&self, helper: NodeId, block: usize) -> u32 {
        self.counts[helper * self.fine_count + block]
    }

    fn helper_row(&self, helper: NodeId) -> &[u32] {
        &self.counts[helper * self.fine_count..(helper + 1) * self.fine_count]
    }

    pub fn from_queries(n: usize, fine_count: usize, queries: &[EvalQuery]) -> Self {
        let mut grid = LoadGrid::new(n, fine_count);
        for q in queries {
            grid.add(q.helper, q.block, 1);
        }
        grid
    }

    pub fn is_empty(&self) -> bool {
        self.counts.iter().all(|&c| c == 0)
    }
}

/// Outcome of one evaluation call.
#[derive(Debug, Clone)]
pub struct EvalCallResult {
    /// Per tracked query; `None` when the sender's promise was broken.
    pub answers: Vec<Option<bool>>,
    pub rounds: u64,
    pub max_sink_units: u64,
    /// Helpers whose lists broke the promise this call.
    pub promise_violations: u64,
    /// Helpers that sent at least one unit.
    pub active_helpers: u64,
}

pub struct AlphaEvaluator {
    alpha: u32,
    /// Promise bound on one (helper, block) list; equals the typicality
    /// level beta of the class.
    promise_cap: f64,
    dup: Option<DuplicationScheme>,
    budget: u64,
    pub step0_rounds: u64,
}

impl AlphaEvaluator {
    /// Set up the evaluator for one class. For classes above zero this runs
    /// the table duplication broadcast and charges its cost.
    pub fn new(
        net: &mut Network,
        schemes: &LabelSchemes,
        classes: &ClassPartition,
        gather_sizes: &[u64],
        alpha: u32,
        params: &PipelineParams,
    ) -> Result<Self, NetError> {
        let n = schemes.n();
        let promise_cap = params.beta(n, alpha);
        let mut step0_rounds = 0;
        let dup = if alpha == 0 {
            None
        } else {
            let members = classes.members(alpha);
            let scheme = DuplicationScheme::assign(schemes, members, params.dup_copies(n, alpha));
            // Copy each member triple's gathered table onto its labels.
            let mut src = vec![0u64; n];
            let mut snk = vec![0u64; n];
            for (slot, &t) in scheme.triples().iter().enumerate() {
                let size = gather_sizes[t];
                for y in 0..scheme.copies() {
                    let dst = scheme.node_for(slot, y);
                    if dst != schemes.triple_node(t) {
                        src[schemes.triple_node(t)] += size;
                        snk[dst] += size;
                    }
                }
            }
            step0_rounds = net.charge_bulk_aggregate(&src, &snk)?.rounds;
            Some(scheme)
        };

        // Declared budget, from the procedure's own load bounds: senders
        // move at most the nominal budget m in total, receivers at most
        // sqrt(n) lists of (promise / copies) pairs each.
        let copies = dup.as_ref().map_or(1, |d| d.copies()) as f64;
        let m = params.pair_budget(n) as f64;
        let sink_bound = (n as f64).sqrt() * promise_cap / copies;
        let batches = (m / n as f64).ceil() + (sink_bound / n as f64).ceil();
        let budget = 4 * batches as u64 + 8;

        Ok(AlphaEvaluator {
            alpha,
            promise_cap,
            dup,
            budget,
            step0_rounds,
        })
    }

    pub fn alpha(&self) -> u32 {
        self.alpha
    }

    pub fn promise_cap(&self) -> f64 {
        self.promise_cap
    }

    pub fn round_budget(&self) -> u64 {
        self.budget
    }

    /// Destination nodes for one (helper, block) list.
    fn destinations(&self, schemes: &LabelSchemes, helper: NodeId, block: usize) -> Vec<NodeId> {
        let (ub, vb, _x) = schemes.helper_parts(helper);
        let t = schemes.triple_index(ub, vb, block);
        match &self.dup {
            None => vec![schemes.triple_node(t)],
            Some(d) => {
                let slot = d
                    .slot_of(t)
                    .expect("queried block must belong to the class");
                (0..d.copies()).map(|y| d.node_for(slot, y)).collect()
            }
        }
    }

    /// Answer one batch. `grid` carries every unit moved this call
    /// (including the untracked always-false searches); `queries` are the
    /// coordinates whose answer bit is consumed. Cost is charged at the
    /// network's current kind.
    pub fn evaluate(
        &self,
        net: &mut Network,
        g: &UndirectedWeightedGraph,
        index: &TriangleIndex,
        schemes: &LabelSchemes,
        queries: &[EvalQuery],
        grid: &LoadGrid,
    ) -> Result<EvalCallResult, NetError> {
        let n = schemes.n();
        let fine = grid.fine_count;
        if grid.is_empty() {
            return Ok(EvalCallResult {
                answers: vec![None; queries.len()],
                rounds: 0,
                max_sink_units: 0,
                promise_violations: 0,
                active_helpers: 0,
            });
        }

        // Promise check and request/response loads, straight off the grid.
        let mut offender = vec![false; n];
        let mut src = vec![0u64; n];
        let mut snk = vec![0u64; n];
        let mut active = 0u64;
        let mut violations = 0u64;
        for helper in 0..n {
            let row = grid.helper_row(helper);
            let total: u64 = row.iter().map(|&c| u64::from(c)).sum();
            if total == 0 {
                continue;
            }
            active += 1;
            if row.iter().any(|&c| f64::from(c) > self.promise_cap) {
                offender[helper] = true;
                violations += 1;
                continue;
            }
            src[helper] = total;
            #[allow(clippy::needless_range_loop)]
            for block in 0..fine {
                let count = u64::from(row[block]);
                if count == 0 {
                    continue;
                }
                let dsts = self.destinations(schemes, helper, block);
                let share = count / dsts.len() as u64;
                let extra = (count % dsts.len() as u64) as usize;
                for (i, dst) in dsts.iter().enumerate() {
                    snk[*dst] += share + u64::from(i < extra);
                }
            }
        }
        let request = net.charge_bulk_aggregate(&src, &snk)?;
        let response = net.charge_bulk_aggregate(&snk, &src)?;

        let answers = queries
            .iter()
            .map(|q| {
                if offender[q.helper] {
                    None
                } else {
                    Some(negative_triangle_predicate(g, index, q.pair_idx, q.block))
                }
            })
            .collect();

        Ok(EvalCallResult {
            answers,
            rounds: request.rounds + response.rounds,
            max_sink_units: request.max_sink_units,
            promise_violations: violations,
            active_helpers: active,
        })
    }
}

/// The theory-side per-call round bound the acceptance audit compares
/// against: a fixed multiple of `(log n)^2`, one constant for every n.
pub fn eval_round_bound(n: usize, factor: f64) -> f64 {
    factor * log_n(n) * log_n(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Pair, PairSet};
    use crate::ledger::CostKind;
    use crate::net::EnforcementMode;
    use crate::params::PipelineParams;
    use crate::rng::Seeder;
    use crate::triangles::classes::identify_class;

    struct Fixture {
        g: UndirectedWeightedGraph,
        index: TriangleIndex,
        schemes: LabelSchemes,
        classes: ClassPartition,
        net: Network,
        params: PipelineParams,
    }

    fn fixture(edges: &[(usize, usize, i64)], s: &[(usize, usize)]) -> Fixture {
        let schemes = LabelSchemes::build(16).unwrap();
        let mut g = UndirectedWeightedGraph::new(16);
        for &(u, v, w) in edges {
            g.set_edge(u, v, w).unwrap();
        }
        let s = PairSet::from_pairs(s.iter().map(|&(u, v)| Pair::new(u, v)).collect());
        let index = TriangleIndex::build(&g, &s, &schemes);
        let params = PipelineParams::default();
        let mut net = Network::new(16, EnforcementMode::Strict);
        net.enter_phase("test");
        let seeder = Seeder::new(60);
        let mut rng = seeder.substream("classes", &[0]);
        let classes = match identify_class(&mut net, &g, &index, &schemes, &params, &mut rng) {
            Ok(c) => c,
            Err(e) => panic!("unexpected class failure: {e:?}"),
        };
        Fixture {
            g,
            index,
            schemes,
            classes,
            net,
            params,
        }
    }

    fn eval_queries(
        fx: &mut Fixture,
        eval: &AlphaEvaluator,
        queries: &[EvalQuery],
    ) -> EvalCallResult {
        let grid = LoadGrid::from_queries(16, fx.schemes.fine_count(), queries);
        eval.evaluate(&mut fx.net, &fx.g, &fx.index, &fx.schemes, queries, &grid)
            .unwrap()
    }

    #[test]
    fn no_triangles_all_answers_false() {
        let mut fx = fixture(&[(0, 8, 1), (0, 4, 1), (4, 8, 1)], &[(0, 8)]);
        let gather = vec![0u64; 16];
        let eval = AlphaEvaluator::new(
            &mut fx.net,
            &fx.schemes,
            &fx.classes,
            &gather,
            0,
            &fx.params,
        )
        .unwrap();
        let queries: Vec<EvalQuery> = (0..4)
            .map(|block| EvalQuery {
                helper: fx.schemes.helper_node(0, 1, 0),
                pair_idx: 0,
                block,
            })
            .collect();
        let out = eval_queries(&mut fx, &eval, &queries);
        assert!(out.answers.iter().all(|a| *a == Some(false)));
        assert_eq!(out.promise_violations, 0);
        assert_eq!(out.active_helpers, 1);
        assert!(out.rounds >= 4); // request and response, two rounds each
    }

    #[test]
    fn planted_triangle_answers_true_in_its_block() {
        // Pair {0, 8} weight -5; vertex 4 (fine block 1) completes it.
        let mut fx = fixture(&[(0, 8, -5), (0, 4, 1), (4, 8, 2)], &[(0, 8)]);
        let gather = vec![0u64; 16];
        let eval = AlphaEvaluator::new(
            &mut fx.net,
            &fx.schemes,
            &fx.classes,
            &gather,
            0,
            &fx.params,
        )
        .unwrap();
        let helper = fx.schemes.helper_node(0, 1, 3);
        let queries: Vec<EvalQuery> = (0..4)
            .map(|block| EvalQuery {
                helper,
                pair_idx: 0,
                block,
            })
            .collect();
        let out = eval_queries(&mut fx, &eval, &queries);
        let expect: Vec<Option<bool>> = (0..4).map(|b| Some(b == 1)).collect();
        assert_eq!(out.answers, expect);
    }

    #[test]
    fn oversized_list_is_an_error_answer() {
        let mut fx = fixture(&[(0, 8, -5), (0, 4, 1), (4, 8, 2)], &[(0, 8)]);
        fx.params.beta_factor = 0.001; // promise cap below 1
        let gather = vec![0u64; 16];
        let eval = AlphaEvaluator::new(
            &mut fx.net,
            &fx.schemes,
            &fx.classes,
            &gather,
            0,
            &fx.params,
        )
        .unwrap();
        let helper = fx.schemes.helper_node(0, 1, 0);
        let queries = vec![EvalQuery {
            helper,
            pair_idx: 0,
            block: 1,
        }];
        let out = eval_queries(&mut fx, &eval, &queries);
        assert_eq!(out.answers, vec![None]);
        assert_eq!(out.promise_violations, 1);
    }

    #[test]
    fn untracked_background_load_counts_toward_the_promise() {
        let mut fx = fixture(&[(0, 8, -5), (0, 4, 1), (4, 8, 2)], &[(0, 8)]);
        let gather = vec![0u64; 16];
        let eval = AlphaEvaluator::new(
            &mut fx.net,
            &fx.schemes,
            &fx.classes,
            &gather,
            0,
            &fx.params,
        )
        .unwrap();
        let helper = fx.schemes.helper_node(0, 1, 0);
        let queries = vec![EvalQuery {
            helper,
            pair_idx: 0,
            block: 1,
        }];
        let mut grid = LoadGrid::from_queries(16, 4, &queries);
        // Pile anonymous load on the same list until it breaks the promise.
        grid.add(helper, 1, eval.promise_cap() as u32 + 1);
        let out = eval
            .evaluate(&mut fx.net, &fx.g, &fx.index, &fx.schemes, &queries, &grid)
            .unwrap();
        assert_eq!(out.answers, vec![None]);
        assert_eq!(out.promise_violations, 1);
    }

    #[test]
    fn empty_queries_cost_nothing_after_setup() {
        let mut fx = fixture(&[(0, 8, -5), (0, 4, 1), (4, 8, 2)], &[(0, 8)]);
        let gather = vec![4u64; 16];
        fx.net.enter_phase("alpha-pos");
        // Force a positive class via a tiny threshold so step 0 runs.
        let mut params = fx.params.clone();
        params.class_threshold_factor = 0.001;
        let seeder = Seeder::new(61);
        let mut rng = seeder.substream("classes", &[1]);
        let classes = match identify_class(
            &mut fx.net,
            &fx.g,
            &fx.index,
            &fx.schemes,
            &params,
            &mut rng,
        ) {
            Ok(c) => c,
            Err(e) => panic!("abort: {e:?}"),
        };
        let positive: Vec<u32> = classes
            .alphas()
            .iter()
            .copied()
            .filter(|&a| a > 0)
            .collect();
        assert!(!positive.is_empty());
        let alpha = positive[0];
        let before = fx.net.ledger().phase("alpha-pos").unwrap().rounds();
        let eval = AlphaEvaluator::new(&mut fx.net, &fx.schemes, &classes, &gather, alpha, &params)
            .unwrap();
        let after_setup = fx.net.ledger().phase("alpha-pos").unwrap().rounds();
        assert!(after_setup > before, "step 0 must charge rounds");
        assert_eq!(eval.step0_rounds, after_setup - before);
        let grid = LoadGrid::new(16, 4);
        let out = eval
            .evaluate(&mut fx.net, &fx.g, &fx.index, &fx.schemes, &[], &grid)
            .unwrap();
        assert_eq!(out.rounds, 0);
        assert_eq!(
            fx.net.ledger().phase("alpha-pos").unwrap().rounds(),
            after_setup
        );
    }

    #[test]
    fn single_copy_positive_class_behaves_like_class_zero_with_relaxed_promise() {
        // Small classes keep one copy per triple, so the procedure is the
        // class-zero one up to destination relabeling and a promise cap
        // scaled by 2^alpha.
        let mut fx = fixture(&[(0, 8, -5), (0, 4, 1), (4, 8, 2)], &[(0, 8)]);
        let gather = vec![2u64; 16];
        let mut params = fx.params.clone();
        params.class_threshold_factor = 0.001;
        let seeder = Seeder::new(62);
        let mut rng = seeder.substream("classes", &[2]);
        let classes = identify_class(
            &mut fx.net,
            &fx.g,
            &fx.index,
            &fx.schemes,
            &params,
            &mut rng,
        )
        .unwrap();
        let alpha = classes
            .alphas()
            .iter()
            .copied()
            .find(|&a| a > 0)
            .expect("a positive class");

        let zero = AlphaEvaluator::new(
            &mut fx.net,
            &fx.schemes,
            &fx.classes,
            &gather,
            0,
            &fx.params,
        )
        .unwrap();
        let pos = AlphaEvaluator::new(&mut fx.net, &fx.schemes, &classes, &gather, alpha, &params)
            .unwrap();
        assert_eq!(
            pos.promise_cap(),
            zero.promise_cap() * 2f64.powi(alpha as i32)
        );

        // Identical queries produce identical answers through either class.
        let helper = fx.schemes.helper_node(0, 1, 2);
        let queries: Vec<EvalQuery> = classes
            .fine_blocks(&fx.schemes, 0, 1, alpha)
            .into_iter()
            .map(|block| EvalQuery {
                helper,
                pair_idx: 0,
                block,
            })
            .collect();
        assert!(!queries.is_empty());
        let a = eval_queries(&mut fx, &zero, &queries);
        let b = eval_queries(&mut fx, &pos, &queries);
        assert_eq!(a.answers, b.answers);
        assert_eq!(a.rounds, b.rounds);
    }

    #[test]
    fn quantum_kind_charges_quantum_rounds() {
        let mut fx = fixture(&[(0, 8, -5), (0, 4, 1), (4, 8, 2)], &[(0, 8)]);
        let gather = vec![0u64; 16];
        let eval = AlphaEvaluator::new(
            &mut fx.net,
            &fx.schemes,
            &fx.classes,
            &gather,
            0,
            &fx.params,
        )
        .unwrap();
        fx.net.enter_phase("q");
        fx.net.set_cost_kind(CostKind::QuantumCharged);
        let queries = vec![EvalQuery {
            helper: fx.schemes.helper_node(0, 1, 0),
            pair_idx: 0,
            block: 1,
        }];
        eval_queries(&mut fx, &eval, &queries);
        let phase = fx.net.ledger().phase("q").unwrap();
        assert_eq!(phase.classical_rounds, 0);
        assert!(phase.quantum_charged_rounds >= 4);
    }
}
