//! Tunable pipeline constants.
//!
//! Every numeric constant of the triangle-detection pipeline is surfaced
//! here with its production default, so desk-scale experiments can clamp or
//! override them without code edits. Logarithms are natural throughout.

use serde::{Deserialize, Serialize};

/// How the per-class searches are driven.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchMode {
    /// Amplitude-level simulation of the parallel searches, with rehearsed
    /// evaluation cost.
    QuantumSim,
    /// Exhaustive classical evaluation through the same network procedures.
    /// Isolates pipeline errors from search randomness.
    OracleExhaustive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case")]
pub struct PipelineParams {
    /// Promise cap factor: each pair in S is involved in at most
    /// `promise_factor * log n` negative triangles.
    pub promise_factor: f64,
    /// Sampling-loop factor in the promise reduction: loop while
    /// `loop_factor * 2^i * log n <= n`.
    pub loop_factor: f64,
    /// Pair-cover inclusion probability factor: `f * log n / sqrt(n)`,
    /// clamped to [0, 1].
    pub cover_sample_factor: f64,
    /// Well-balancedness cap factor: per vertex at most
    /// `f * n^(1/4) * log n` cover pairs in one helper set.
    pub cover_balance_factor: f64,
    /// Class-estimation selection probability factor: `f * log n / n`.
    pub class_sample_factor: f64,
    /// Class-estimation abort factor: abort when a node selects more than
    /// `f * log n` sample partners.
    pub class_abort_factor: f64,
    /// Class rule factor: class c is the smallest with
    /// `d < f * 2^c * log n`.
    pub class_threshold_factor: f64,
    /// Nominal per-helper search budget factor: `m = f * n * log n`.
    pub pair_budget_factor: f64,
    /// Typicality/evaluation bound factor: `beta = f * 2^alpha * sqrt(n) * log n`.
    pub beta_factor: f64,
    /// Copy-count divisor for hot classes: `2^alpha / (f * log n)` copies.
    pub dup_divisor: f64,
    /// Hypothesis factor: the typical-input search guarantee needs
    /// `|X| < m / (f * log m)`.
    pub typical_domain_factor: f64,
    /// Hypothesis factor: the typical-input search guarantee needs `beta > f * m / |X|`.
    pub typical_beta_factor: f64,
    /// Audit cap factor for per-helper overlap with hot triples:
    /// `f * 2^alpha * sqrt(n) * log n`.
    pub balance_audit_factor: f64,
    /// Search schedule repetitions; `None` derives `ceil(2 ln m)` from the
    /// nominal ensemble size.
    pub amplification: Option<usize>,
    /// Classical pre-test tuples before searching; `None` derives
    /// `ceil(4 ln m)`.
    pub pretest_samples: Option<usize>,
    /// How many times aborted sub-protocols are retried with fresh
    /// randomness.
    pub retry_bound: usize,
    pub mode: SearchMode,
}

impl Default for PipelineParams {
    fn default() -> Self {
        PipelineParams {
            promise_factor: 90.0,
            loop_factor: 60.0,
            cover_sample_factor: 10.0,
            cover_balance_factor: 100.0,
            class_sample_factor: 10.0,
            class_abort_factor: 60.0,
            class_threshold_factor: 10.0,
            pair_budget_factor: 100.0,
            beta_factor: 800.0,
            dup_divisor: 720.0,
            typical_domain_factor: 36.0,
            typical_beta_factor: 8.0,
            balance_audit_factor: 100.0,
            amplification: None,
            pretest_samples: None,
            retry_bound: 8,
            mode: SearchMode::QuantumSim,
        }
    }
}

pub fn log_n(n: usize) -> f64 {
    (n.max(2) as f64).ln()
}

impl PipelineParams {
    pub fn promise_cap(&self, n: usize) -> f64 {
        self.promise_factor * log_n(n)
    }

    pub fn cover_probability(&self, n: usize) -> f64 {
        (self.cover_sample_factor * log_n(n) / (n as f64).sqrt()).clamp(0.0, 1.0)
    }

    pub fn well_balanced_cap(&self, n: usize) -> f64 {
        self.cover_balance_factor * (n as f64).powf(0.25) * log_n(n)
    }

    pub fn class_probability(&self, n: usize) -> f64 {
        (self.class_sample_factor * log_n(n) / n as f64).clamp(0.0, 1.0)
    }

    pub fn class_abort_cap(&self, n: usize) -> f64 {
        self.class_abort_factor * log_n(n)
    }

    pub fn class_threshold(&self, n: usize, c: u32) -> f64 {
        self.class_threshold_factor * 2f64.powi(c as i32) * log_n(n)
    }

    /// Nominal per-helper search count m (real pairs are padded to this).
    pub fn pair_budget(&self, n: usize) -> usize {
        (self.pair_budget_factor * n as f64 * log_n(n)).ceil() as usize
    }

    pub fn beta(&self, n: usize, alpha: u32) -> f64 {
        self.beta_factor * 2f64.powi(alpha as i32) * (n as f64).sqrt() * log_n(n)
    }

    pub fn balance_audit_cap(&self, n: usize, alpha: u32) -> f64 {
        self.balance_audit_factor * 2f64.powi(alpha as i32) * (n as f64).sqrt() * log_n(n)
    }

    pub fn dup_copies(&self, n: usize, alpha: u32) -> usize {
        let raw = 2f64.powi(alpha as i32) / (self.dup_divisor * log_n(n));
        (raw.floor() as usize).max(1)
    }

    pub fn amplification_for(&self, m: usize) -> usize {
        self.amplification
            .unwrap_or_else(|| (2.0 * log_n(m)).ceil() as usize)
            .max(1)
    }

    pub fn pretest_for(&self, m: usize) -> usize {
        self.pretest_samples
            .unwrap_or_else(|| (4.0 * log_n(m)).ceil() as usize)
    }
}
