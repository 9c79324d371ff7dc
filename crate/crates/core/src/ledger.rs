//! Cost accounting for simulated runs.

use serde::{Deserialize, Serialize};

/// How a round or message is charged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CostKind {
    Classical,
    /// Communication performed inside a rehearsed quantum step. Tracked
    /// separately so quantum round claims stay auditable apart from the
    /// classical pre/post-processing.
    QuantumCharged,
}

/// Counters for one named phase. Counters only ever grow.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PhaseLedger {
    pub phase: String,
    pub classical_rounds: u64,
    pub quantum_charged_rounds: u64,
    pub messages: u64,
    pub max_link_load: u64,
    pub violations: Vec<String>,
}

impl PhaseLedger {
    fn new(phase: &str) -> Self {
        PhaseLedger {
            phase: phase.to_string(),
            classical_rounds: 0,
            quantum_charged_rounds: 0,
            messages: 0,
            max_link_load: 0,
            violations: Vec::new(),
        }
    }

    pub fn rounds(&self) -> u64 {
        self.classical_rounds + self.quantum_charged_rounds
    }
}

/// Phase-tagged cost ledger for a whole run. Phases are keyed by name, so
/// repeated executions of the same phase accumulate.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RoundLedger {
    phases: Vec<PhaseLedger>,
    #[serde(skip)]
    current: usize,
}

impl RoundLedger {
    pub fn new() -> Self {
        RoundLedger {
            phases: vec![PhaseLedger::new("init")],
            current: 0,
        }
    }

    /// Switch accounting to the named phase, creating it on first use.
    pub fn enter_phase(&mut self, name: &str) {
        if let Some(idx) = self.phases.iter().position(|p| p.phase == name) {
            self.current = idx;
        } else {
            self.phases.push(PhaseLedger::new(name));
            self.current = self.phases.len() - 1;
        }
    }

    pub fn current_phase(&self) -> &PhaseLedger {
        &self.phases[self.current]
    }

    pub fn phases(&self) -> &[PhaseLedger] {
        &self.phases
    }

    pub fn phase(&self, name: &str) -> Option<&PhaseLedger> {
        self.phases.iter().find(|p| p.phase == name)
    }

    pub(crate) fn charge_rounds(&mut self, rounds: u64, kind: CostKind) {
        let p = &mut self.phases[self.current];
        match kind {
            CostKind::Classical => p.classical_rounds += rounds,
            CostKind::QuantumCharged => p.quantum_charged_rounds += rounds,
        }
    }

    pub(crate) fn charge_messages(&mut self, units: u64) {
        self.phases[self.current].messages += units;
    }

    pub(crate) fn observe_link_load(&mut self, load: u64) {
        let p = &mut self.phases[self.current];
        p.max_link_load = p.max_link_load.max(load);
    }

    pub(crate) fn record_violation(&mut self, text: String) {
        self.phases[self.current].violations.push(text);
    }

    pub fn total_classical_rounds(&self) -> u64 {
        self.phases.iter().map(|p| p.classical_rounds).sum()
    }

    pub fn total_quantum_rounds(&self) -> u64 {
        self.phases.iter().map(|p| p.quantum_charged_rounds).sum()
    }

    pub fn total_messages(&self) -> u64 {
        self.phases.iter().map(|p| p.messages).sum()
    }

    pub fn violation_count(&self) -> usize {
        self.phases.iter().map(|p| p.violations.len()).sum()
    }
}
