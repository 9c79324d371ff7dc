//! Run reports. Everything serializes deterministically: same config and
//! seed, byte-identical JSON.

use serde::Serialize;

use qcongest::graph::Pair;
use qcongest::params::SearchMode;
use qcongest::reductions::ApspAudit;
use qcongest::triangles::{AlphaSearchReport, PipelineAudit};
use qcongest::weight::ExtWeight;
use qcongest::RoundLedger;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunStatus {
    Ok,
    NegativeCycle,
    Failed,
}

/// The hypothesis/typicality audit block carried by every run report.
#[derive(Debug, Clone, Serialize, Default)]
#[serde(rename_all = "camelCase")]
pub struct AuditSummary {
    pub promise_satisfied: bool,
    pub max_gamma: usize,
    pub promise_cap: f64,
    pub aborts: u64,
    pub typicality_samples: u64,
    pub typicality_violations: u64,
    pub promise_violations: u64,
    pub cost_violations: u64,
    pub evaluator_errors: u64,
    pub grover_iterations: u64,
    pub max_eval_rounds: u64,
    pub hypothesis_beta_large: bool,
    pub hypothesis_domain_small_ln: bool,
    pub hypothesis_domain_small_log2: bool,
    /// Every element accepted by at most beta/2 searches per helper.
    pub solution_frequency_ok: bool,
    /// Helper overlap with triangle-rich triples under the audit cap.
    pub helper_balance_ok: bool,
    /// Class widths within the promise-derived bound.
    pub class_width_ok: bool,
    /// Sampled class estimates bracketed the true counts.
    pub class_estimates_ok: bool,
    pub bandwidth_violations: usize,
}

impl AuditSummary {
    pub fn from_audits<'a>(
        audits: impl Iterator<Item = &'a PipelineAudit>,
        ledger: &RoundLedger,
    ) -> Self {
        let mut s = AuditSummary {
            promise_satisfied: true,
            hypothesis_beta_large: true,
            hypothesis_domain_small_ln: true,
            hypothesis_domain_small_log2: true,
            solution_frequency_ok: true,
            helper_balance_ok: true,
            class_width_ok: true,
            class_estimates_ok: true,
            ..AuditSummary::default()
        };
        for audit in audits {
            s.promise_satisfied &= audit.promise_satisfied;
            s.max_gamma = s.max_gamma.max(audit.max_gamma);
            s.promise_cap = audit.promise_cap;
            s.aborts += audit.aborts;
            for r in &audit.alpha_reports {
                s.typicality_samples += r.typicality_samples;
                s.typicality_violations += r.typicality_violations;
                s.promise_violations += r.promise_violations;
                s.cost_violations += r.cost_violations;
                s.evaluator_errors += r.evaluator_errors;
                s.grover_iterations += r.grover_iterations;
                s.max_eval_rounds = s.max_eval_rounds.max(r.max_eval_rounds);
                s.hypothesis_beta_large &= r.hypothesis_beta_large_all;
                s.hypothesis_domain_small_ln &= r.hypothesis_domain_small_ln_all;
                s.hypothesis_domain_small_log2 &= r.hypothesis_domain_small_log2_all;
                s.solution_frequency_ok &= r.freq_criterion_ok;
                s.helper_balance_ok &= r.helper_balance_ok;
                s.class_width_ok &= r.class_width_ok;
                s.class_estimates_ok &= r.class_estimates_ok;
            }
        }
        s.bandwidth_violations = ledger.violation_count();
        s
    }

    /// The audits a run must clear for exit code zero.
    pub fn clean(&self) -> bool {
        self.typicality_violations == 0
            && self.cost_violations == 0
            && self.bandwidth_violations == 0
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ApspReport {
    pub command: &'static str,
    pub n: usize,
    pub weight_bound: i64,
    pub seed: u64,
    pub mode: SearchMode,
    pub network_nodes: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub padding_note: Option<String>,
    pub status: RunStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distances: Option<Vec<Vec<ExtWeight>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_agreement: Option<bool>,
    pub total_rounds: u64,
    /// Total rounds divided by the constant host factor 3: the instance
    /// lives on 3n vertices, the claims count n-node rounds.
    pub rounds_normalized: f64,
    pub ledger: RoundLedger,
    pub audit: AuditSummary,
    pub reduction: ApspAudit,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct FindEdgesReport {
    pub command: &'static str,
    pub n: usize,
    pub seed: u64,
    pub mode: SearchMode,
    pub network_nodes: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub padding_note: Option<String>,
    pub status: RunStatus,
    pub found: Vec<(usize, usize)>,
    pub oracle_agreement: bool,
    pub loop_iterations: u64,
    pub ledger: RoundLedger,
    pub audit: AuditSummary,
    pub alpha_reports: Vec<AlphaSearchReport>,
    pub passed: bool,
}

pub fn pairs_as_tuples(pairs: impl Iterator<Item = Pair>) -> Vec<(usize, usize)> {
    pairs.map(|p| (p.lo(), p.hi())).collect()
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LemmaReport {
    pub name: String,
    pub trials: usize,
    pub passes: usize,
    pub rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub threshold: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl LemmaReport {
    pub fn new(name: &str, trials: usize, passes: usize, threshold: f64) -> Self {
        let rate = passes as f64 / trials.max(1) as f64;
        // Normal-approximation interval, clamped to [0, 1].
        let half = 1.96 * (rate * (1.0 - rate) / trials.max(1) as f64).sqrt();
        LemmaReport {
            name: name.to_string(),
            trials,
            passes,
            rate,
            ci_low: (rate - half).max(0.0),
            ci_high: (rate + half).min(1.0),
            threshold,
            passed: rate >= threshold,
            notes: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct VerifyReport {
    pub command: &'static str,
    pub seed: u64,
    pub lemmas: Vec<LemmaReport>,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BenchRow {
    pub n: usize,
    pub classical_rounds: u64,
    pub quantum_charged_rounds: u64,
    pub grover_iterations: u64,
    pub max_eval_rounds: u64,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BenchReport {
    pub command: &'static str,
    pub seed: u64,
    pub rows: Vec<BenchRow>,
    pub passed: bool,
}

impl BenchReport {
    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("n,classicalRounds,quantumChargedRounds,groverIterations,maxEvalRounds\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.n,
                r.classical_rounds,
                r.quantum_charged_rounds,
                r.grover_iterations,
                r.max_eval_rounds
            ));
        }
        out
    }
}
