//! Parallel independent searches sharing one evaluation procedure.
//!
//! The joint state of m independent searches over one domain is the tensor
//! product of the per-search states, so it is stored as m small vectors.
//! All coordinates advance in lockstep: every schedule step applies the same
//! iteration count to each unsettled coordinate, then measures all of them
//! at once. In the *typical* variant the measured tuple is rehearsed through
//! a real network procedure, which both prices the step and answers it; the
//! procedure is only trusted on tuples where no element is over-requested,
//! and the rehearsal audits exactly that.

use rand::Rng;
use serde::Serialize;

use crate::rng::Substream;

use super::amplitude::{SearchError, TruthTable, TwoLevelState};
use super::schedule::schedule_iterations;
use super::single::SearchParams;

/// m independent searches over one dummy-extended domain.
#[derive(Debug, Clone)]
pub struct SearchEnsemble {
    domain: usize,
    tables: Vec<TruthTable>,
}

impl SearchEnsemble {
    pub fn new(tables: Vec<TruthTable>) -> Result<Self, SearchError> {
        assert!(!tables.is_empty(), "ensemble needs at least one search");
        let domain = tables[0].domain_size();
        if domain < 2 {
            return Err(SearchError::DomainTooSmall(domain));
        }
        for t in &tables {
            if !t.is_extended() {
                return Err(SearchError::NotExtended);
            }
            if t.domain_size() != domain {
                return Err(SearchError::DomainMismatch {
                    left: domain,
                    right: t.domain_size(),
                });
            }
        }
        Ok(SearchEnsemble { domain, tables })
    }

    pub fn len(&self) -> usize {
        self.tables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tables.is_empty()
    }

    /// Domain size including the dummy.
    pub fn domain_size(&self) -> usize {
        self.domain
    }

    pub fn dummy_index(&self) -> usize {
        self.domain - 1
    }

    pub fn tables(&self) -> &[TruthTable] {
        &self.tables
    }

    /// Joint probability that measuring every coordinate yields a solution;
    /// the product of the per-coordinate probabilities after `k` iterations
    /// from uniform.
    pub fn joint_success_probability(&self, k: usize) -> f64 {
        self.tables
            .iter()
            .map(|t| {
                let n1 = t.solution_count();
                let mut s = TwoLevelState::uniform(self.domain - n1, n1);
                s.iterate_k(k);
                s.success_probability()
            })
            .product()
    }

    /// How many searches accept each real element: the load any solution
    /// tuple can put on one element.
    pub fn solution_frequencies(&self) -> Vec<usize> {
        let real = self.domain - 1;
        let mut freq = vec![0usize; real];
        for t in &self.tables {
            for x in t.real_solutions() {
                freq[x] += 1;
            }
        }
        freq
    }
}

/// Typicality bound: no real element may be requested more than `beta`
/// times in one evaluation tuple.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TypicalSpec {
    pub beta: f64,
    /// Size of the real domain (dummy excluded).
    pub domain: usize,
}

impl TypicalSpec {
    pub fn new(beta: f64, domain: usize) -> Self {
        assert!(beta > 0.0, "beta must be positive");
        TypicalSpec { beta, domain }
    }
}

/// True iff every real element's multiplicity in the tuple is at most beta.
/// Dummy entries (indices at or beyond the real domain) are local answers
/// that generate no traffic, so they are not counted.
pub fn typical_membership(tuple: &[usize], spec: &TypicalSpec) -> bool {
    let mut counts = vec![0u64; spec.domain];
    for &x in tuple {
        if x < spec.domain {
            counts[x] += 1;
            if counts[x] as f64 > spec.beta {
                return false;
            }
        }
    }
    true
}

/// Answers of one rehearsed evaluation call.
#[derive(Debug, Clone)]
pub struct EvalOutcome {
    /// Per-coordinate answers; `None` models an evaluator error.
    pub answers: Vec<Option<bool>>,
    /// Measured network cost of the call, in rounds.
    pub rounds: u64,
}

/// A network procedure evaluating per-coordinate queries in one shot.
pub trait TupleEvaluator {
    /// `queries[i]` is `None` when coordinate i asks nothing this step
    /// (already settled, or it measured the dummy and answers locally).
    fn evaluate(&mut self, queries: &[Option<usize>]) -> EvalOutcome;

    /// Declared round budget per call; exceeding it is a cost violation.
    fn round_budget(&self) -> u64;

    /// Charge for executions that repeat the rehearsed pattern without being
    /// replayed (one rehearsal stands in for `k` identical iterations).
    fn charge_repeat(&mut self, _rounds: u64) {}
}

/// Hypothesis flags of the typical-input theorem, reported but not enforced.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct HypothesisReport {
    pub m: usize,
    pub domain: usize,
    pub beta: f64,
    /// `|X| < m / (36 ln m)`.
    pub domain_small_ln: bool,
    /// Same reading with log base 2.
    pub domain_small_log2: bool,
    /// `beta > 8 m / |X|`.
    pub beta_large: bool,
    /// Every real element is accepted by at most beta/2 of the searches.
    pub solutions_typical: bool,
    pub max_solution_frequency: usize,
}

pub fn hypothesis_report(
    m: usize,
    spec: &TypicalSpec,
    frequencies: &[usize],
    domain_factor: f64,
    beta_factor: f64,
) -> HypothesisReport {
    let mf = m.max(2) as f64;
    let x = spec.domain.max(1) as f64;
    let max_freq = frequencies.iter().copied().max().unwrap_or(0);
    HypothesisReport {
        m,
        domain: spec.domain,
        beta: spec.beta,
        domain_small_ln: x < mf / (domain_factor * mf.ln()),
        domain_small_log2: x < mf / (domain_factor * mf.log2()),
        beta_large: spec.beta > beta_factor * mf / x,
        solutions_typical: (max_freq as f64) <= spec.beta / 2.0,
        max_solution_frequency: max_freq,
    }
}

/// Outcome counters of a typical-mode run.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TypicalityReport {
    pub sampled_tuples: u64,
    pub typicality_violations: u64,
    pub eval_calls: u64,
    pub eval_rounds: u64,
    pub max_eval_rounds: u64,
    pub cost_violations: u64,
    pub grover_iterations: u64,
    pub evaluator_errors: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hypothesis: Option<HypothesisReport>,
}

enum Answers<'a> {
    FromTables,
    FromEvaluator(&'a mut dyn TupleEvaluator),
}

struct Driver<'a> {
    ens: &'a SearchEnsemble,
    results: Vec<Option<usize>>,
    solutions: Vec<Vec<usize>>,
    report: TypicalityReport,
}

impl<'a> Driver<'a> {
    fn new(ens: &'a SearchEnsemble) -> Self {
        let solutions: Vec<Vec<usize>> = ens.tables.iter().map(|t| t.solutions()).collect();
        Driver {
            ens,
            results: vec![None; ens.len()],
            solutions,
            report: TypicalityReport::default(),
        }
    }

    fn all_settled(&self) -> bool {
        self.results.iter().all(|r| r.is_some())
    }

    /// Measure every unsettled coordinate after `k` fresh iterations.
    #[allow(clippy::needless_range_loop)]
    fn measure(&mut self, k: usize, rng: &mut Substream) -> Vec<Option<usize>> {
        let mut sampled = vec![None; self.ens.len()];
        for i in 0..self.ens.len() {
            if self.results[i].is_some() {
                continue;
            }
            let n1 = self.solutions[i].len();
            let mut st = TwoLevelState::uniform(self.ens.domain - n1, n1);
            st.iterate_k(k);
            sampled[i] = Some(st.sample(&self.solutions[i], rng));
        }
        sampled
    }

    /// Uniform classical samples over the real domain.
    fn pretest_tuple(&self, rng: &mut Substream) -> Vec<Option<usize>> {
        (0..self.ens.len())
            .map(|i| {
                if self.results[i].is_some() {
                    None
                } else {
                    Some(rng.random_range(0..self.ens.dummy_index()))
                }
            })
            .collect()
    }

    fn settle(
        &mut self,
        sampled: &[Option<usize>],
        answers: &mut Answers<'_>,
        spec: Option<&TypicalSpec>,
        k: usize,
    ) {
        let dummy = self.ens.dummy_index();
        // Queries: real-element measurements of unsettled coordinates.
        let queries: Vec<Option<usize>> =
            sampled.iter().map(|s| s.filter(|&x| x != dummy)).collect();

        if let Some(spec) = spec {
            let tuple: Vec<usize> = queries.iter().flatten().copied().collect();
            self.report.sampled_tuples += 1;
            if !typical_membership(&tuple, spec) {
                self.report.typicality_violations += 1;
            }
        }

        let resolved: Vec<Option<bool>> = match answers {
            Answers::FromTables => queries
                .iter()
                .enumerate()
                .map(|(i, q)| q.map(|x| self.ens.tables[i].is_solution(x)))
                .collect(),
            Answers::FromEvaluator(eval) => {
                let outcome = eval.evaluate(&queries);
                self.report.eval_calls += 1;
                self.report.eval_rounds += outcome.rounds;
                self.report.max_eval_rounds = self.report.max_eval_rounds.max(outcome.rounds);
                if outcome.rounds > eval.round_budget() {
                    self.report.cost_violations += 1;
                }
                // One rehearsal priced the pattern; the remaining k-1
                // iterations of this step repeat it.
                let repeats = (k.max(1) as u64).saturating_sub(1);
                if repeats > 0 {
                    eval.charge_repeat(repeats * outcome.rounds);
                }
                self.report.evaluator_errors += outcome
                    .answers
                    .iter()
                    .zip(&queries)
                    .filter(|(a, q)| q.is_some() && a.is_none())
                    .count() as u64;
                outcome.answers
            }
        };

        #[allow(clippy::needless_range_loop)]
        for i in 0..self.ens.len() {
            if self.results[i].is_some() {
                continue;
            }
            if let (Some(x), Some(Some(true))) = (queries[i], resolved.get(i).copied()) {
                self.results[i] = Some(x);
            }
        }
    }

    fn finish(mut self) -> (Vec<usize>, TypicalityReport) {
        let dummy = self.ens.dummy_index();
        let out = self.results.drain(..).map(|r| r.unwrap_or(dummy)).collect();
        (out, self.report)
    }
}

fn run_driver(
    ens: &SearchEnsemble,
    params: &SearchParams,
    mut mode: Answers<'_>,
    spec: Option<&TypicalSpec>,
    rng: &mut Substream,
) -> (Vec<usize>, TypicalityReport) {
    let mut driver = Driver::new(ens);

    for _ in 0..params.pretest_samples {
        if driver.all_settled() {
            break;
        }
        let tuple = driver.pretest_tuple(rng);
        driver.settle(&tuple, &mut mode, spec, 0);
    }

    for _ in 0..params.repetitions.max(1) {
        if driver.all_settled() {
            break;
        }
        for k in schedule_iterations(ens.domain_size(), rng) {
            if driver.all_settled() {
                break;
            }
            driver.report.grover_iterations += k as u64;
            let sampled = driver.measure(k, rng);
            driver.settle(&sampled, &mut mode, spec, k);
        }
    }
    driver.finish()
}

/// Run the ensemble with direct table answers (the idealized evaluator).
/// Coordinate i of the output solves table i, or is the dummy when nothing
/// real was found.
pub fn multi_search_product(
    ens: &SearchEnsemble,
    params: &SearchParams,
    rng: &mut Substream,
) -> Vec<usize> {
    run_driver(ens, params, Answers::FromTables, None, rng).0
}

/// Run the ensemble against a rehearsed network evaluator that is only
/// trusted on typical tuples. Every schedule step samples one basis tuple
/// from the current product distribution, prices it through the evaluator,
/// and audits its typicality.
pub fn multi_search_typical(
    ens: &SearchEnsemble,
    spec: &TypicalSpec,
    eval: &mut dyn TupleEvaluator,
    params: &SearchParams,
    typical_domain_factor: f64,
    typical_beta_factor: f64,
    rng: &mut Substream,
) -> (Vec<usize>, TypicalityReport) {
    let (out, mut report) = run_driver(ens, params, Answers::FromEvaluator(eval), Some(spec), rng);
    report.hypothesis = Some(hypothesis_report(
        ens.len(),
        spec,
        &ens.solution_frequencies(),
        typical_domain_factor,
        typical_beta_factor,
    ));
    (out, report)
}
