//! Synchronous round engine for the CONGEST-CLIQUE model.
//!
//! `n` nodes on a complete network exchange messages in lockstep rounds.
//! One message unit, a `(vertex, vertex, weight)` triple plus a small tag,
//! is the concrete stand-in for one O(log n)-bit message, and each ordered
//! node pair carries at most `bandwidth_units` of them per round.
//!
//! Two delivery primitives exist:
//!
//! * [`Network::run_round`]: per-node handlers, full payload delivery, strict
//!   per-link bandwidth checks. Used where message contents drive control
//!   flow.
//! * [`Network::route_bulk`] and the load-only variants: the two-round bulk
//!   routing contract (no node sources or sinks more than `n` units). Heavy
//!   data movement is charged through these; batched helpers split larger
//!   exchanges and charge two rounds per batch.

use crate::error::NetError;
use crate::ledger::{CostKind, PhaseLedger, RoundLedger};

pub type NodeId = usize;

/// How bandwidth violations are treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnforcementMode {
    /// Violations abort the run.
    Strict,
    /// Violations are logged in the ledger and the run continues.
    Audit,
}

/// One message in flight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Message {
    pub src: NodeId,
    pub dst: NodeId,
    pub words: Vec<u64>,
    pub kind: CostKind,
}

impl Message {
    /// A single-unit message.
    pub fn unit(src: NodeId, dst: NodeId) -> Self {
        Message {
            src,
            dst,
            words: Vec::new(),
            kind: CostKind::Classical,
        }
    }

    pub fn with_words(src: NodeId, dst: NodeId, words: Vec<u64>) -> Self {
        Message {
            src,
            dst,
            words,
            kind: CostKind::Classical,
        }
    }

    pub fn quantum(mut self) -> Self {
        self.kind = CostKind::QuantumCharged;
        self
    }

    /// Size in message units. An empty payload still occupies one unit.
    pub fn size_units(&self) -> u64 {
        (self.words.len() as u64).max(1)
    }
}

/// Outcome of one synchronous round.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RoundStats {
    pub messages: u64,
    pub max_link_load: u64,
}

/// Outcome of a bulk exchange.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BulkStats {
    pub rounds: u64,
    pub batches: u64,
    pub units: u64,
    pub max_source_units: u64,
    pub max_sink_units: u64,
}

impl BulkStats {
    fn absorb(&mut self, other: BulkStats) {
        self.rounds += other.rounds;
        self.batches += other.batches;
        self.units += other.units;
        self.max_source_units = self.max_source_units.max(other.max_source_units);
        self.max_sink_units = self.max_sink_units.max(other.max_sink_units);
    }
}

pub struct Network {
    n: usize,
    bandwidth_units: u64,
    mode: EnforcementMode,
    cost_kind: CostKind,
    ledger: RoundLedger,
    inboxes: Vec<Vec<Message>>,
}

impl Network {
    pub fn new(n: usize, mode: EnforcementMode) -> Self {
        assert!(n > 0, "network needs at least one node");
        Network {
            n,
            bandwidth_units: 1,
            mode,
            cost_kind: CostKind::Classical,
            ledger: RoundLedger::new(),
            inboxes: vec![Vec::new(); n],
        }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn mode(&self) -> EnforcementMode {
        self.mode
    }

    pub fn ledger(&self) -> &RoundLedger {
        &self.ledger
    }

    pub fn into_ledger(self) -> RoundLedger {
        self.ledger
    }

    pub fn enter_phase(&mut self, name: &str) {
        self.ledger.enter_phase(name);
    }

    pub fn current_phase(&self) -> &PhaseLedger {
        self.ledger.current_phase()
    }

    /// Set how subsequent rounds are charged.
    pub fn set_cost_kind(&mut self, kind: CostKind) {
        self.cost_kind = kind;
    }

    pub fn cost_kind(&self) -> CostKind {
        self.cost_kind
    }

    fn check_node(&self, node: NodeId) -> Result<(), NetError> {
        if node >= self.n {
            Err(NetError::NodeOutOfRange { node, n: self.n })
        } else {
            Ok(())
        }
    }

    /// Charge rounds without simulating them. Used to account for repeated
    /// executions whose communication pattern was already rehearsed once.
    pub fn charge_rounds(&mut self, rounds: u64, kind: CostKind) {
        self.ledger.charge_rounds(rounds, kind);
    }

    pub fn record_violation(&mut self, text: impl Into<String>) {
        self.ledger.record_violation(text.into());
    }

    /// Run one synchronous round. Every node sees its inbox from the previous
    /// round and produces outgoing messages; deliveries land in the next
    /// round's inboxes. Exceeding the per-link bandwidth is a violation:
    /// fatal in strict mode, logged in audit mode.
    pub fn run_round<F>(&mut self, mut handler: F) -> Result<RoundStats, NetError>
    where
        F: FnMut(NodeId, Vec<Message>) -> Vec<Message>,
    {
        let mut outgoing: Vec<Message> = Vec::new();
        for node in 0..self.n {
            let inbox = std::mem::take(&mut self.inboxes[node]);
            outgoing.extend(handler(node, inbox));
        }

        // Per ordered pair, total units this round.
        let mut link_units: std::collections::BTreeMap<(NodeId, NodeId), u64> =
            std::collections::BTreeMap::new();
        let mut total_units = 0u64;
        for msg in &outgoing {
            self.check_node(msg.src)?;
            self.check_node(msg.dst)?;
            let units = msg.size_units();
            if units > self.bandwidth_units {
                let err = NetError::Oversized {
                    units,
                    limit: self.bandwidth_units,
                };
                if self.mode == EnforcementMode::Strict {
                    return Err(err);
                }
                self.ledger.record_violation(err.to_string());
            }
            *link_units.entry((msg.src, msg.dst)).or_insert(0) += units;
            total_units += units;
        }

        let mut max_link = 0u64;
        for (&(src, dst), &units) in &link_units {
            max_link = max_link.max(units);
            if units > self.bandwidth_units {
                let err = NetError::Bandwidth {
                    src,
                    dst,
                    units,
                    limit: self.bandwidth_units,
                };
                if self.mode == EnforcementMode::Strict {
                    return Err(err);
                }
                self.ledger.record_violation(err.to_string());
            }
        }

        let kind = self.cost_kind;
        self.ledger.charge_rounds(1, kind);
        self.ledger.charge_messages(total_units);
        self.ledger.observe_link_load(max_link);
        for msg in outgoing {
            self.inboxes[msg.dst].push(msg);
        }
        Ok(RoundStats {
            messages: total_units,
            max_link_load: max_link,
        })
    }

    /// Drain a node's pending inbox (outside of `run_round` handlers).
    pub fn take_inbox(&mut self, node: NodeId) -> Vec<Message> {
        std::mem::take(&mut self.inboxes[node])
    }

    /// Deliver a set of messages whose sources and destinations are known in
    /// advance to all nodes (asserted by the caller). If no node sources more
    /// than `n` units and none sinks more than `n`, everything lands within
    /// two charged rounds; otherwise the caller must split into batches.
    pub fn route_bulk(&mut self, messages: Vec<Message>) -> Result<BulkStats, NetError> {
        let stats =
            self.bulk_accounting(messages.iter().map(|m| (m.src, m.dst, m.size_units())))?;
        for msg in messages {
            self.inboxes[msg.dst].push(msg);
        }
        Ok(stats)
    }

    /// The bulk-routing contract applied to load counts only: cost accounting
    /// without materializing payloads. Phase code that keeps its data in
    /// shared state uses this to charge the equivalent routing.
    pub fn route_bulk_counts<I>(&mut self, loads: I) -> Result<BulkStats, NetError>
    where
        I: IntoIterator<Item = (NodeId, NodeId, u64)>,
    {
        self.bulk_accounting(loads.into_iter())
    }

    fn bulk_accounting<I>(&mut self, loads: I) -> Result<BulkStats, NetError>
    where
        I: Iterator<Item = (NodeId, NodeId, u64)>,
    {
        let mut source = vec![0u64; self.n];
        let mut sink = vec![0u64; self.n];
        let mut total = 0u64;
        let mut any = false;
        for (src, dst, units) in loads {
            self.check_node(src)?;
            self.check_node(dst)?;
            any = true;
            source[src] += units;
            sink[dst] += units;
            total += units;
        }
        if !any {
            return Ok(BulkStats::default());
        }
        let cap = self.n as u64;
        for node in 0..self.n {
            if source[node] > cap {
                return Err(NetError::BulkOverload {
                    node,
                    role: "sources",
                    units: source[node],
                    limit: cap,
                });
            }
            if sink[node] > cap {
                return Err(NetError::BulkOverload {
                    node,
                    role: "sinks",
                    units: sink[node],
                    limit: cap,
                });
            }
        }
        let kind = self.cost_kind;
        self.ledger.charge_rounds(2, kind);
        self.ledger.charge_messages(total);
        // Bulk routing stays within bandwidth by contract.
        self.ledger.observe_link_load(if total > 0 { 1 } else { 0 });
        Ok(BulkStats {
            rounds: 2,
            batches: 1,
            units: total,
            max_source_units: source.iter().copied().max().unwrap_or(0),
            max_sink_units: sink.iter().copied().max().unwrap_or(0),
        })
    }

    /// Charge a bulk exchange from per-node aggregate loads alone. The
    /// exchange is split into `ceil(max_load / n)` batches, each of which
    /// satisfies the bulk contract (unit messages over a bipartite multigraph
    /// of maximum degree D decompose into D matchings, so grouping n of them
    /// per batch is always feasible); two rounds are charged per batch.
    pub fn charge_bulk_aggregate(
        &mut self,
        source_units: &[u64],
        sink_units: &[u64],
    ) -> Result<BulkStats, NetError> {
        assert_eq!(source_units.len(), self.n);
        assert_eq!(sink_units.len(), self.n);
        let max_source = source_units.iter().copied().max().unwrap_or(0);
        let max_sink = sink_units.iter().copied().max().unwrap_or(0);
        let total: u64 = source_units.iter().sum();
        let sunk: u64 = sink_units.iter().sum();
        debug_assert_eq!(total, sunk, "sources and sinks must carry equal units");
        if total == 0 {
            return Ok(BulkStats::default());
        }
        let cap = self.n as u64;
        let batches = max_source.max(max_sink).div_ceil(cap);
        let kind = self.cost_kind;
        self.ledger.charge_rounds(2 * batches, kind);
        self.ledger.charge_messages(total);
        self.ledger.observe_link_load(1);
        Ok(BulkStats {
            rounds: 2 * batches,
            batches,
            units: total,
            max_source_units: max_source,
            max_sink_units: max_sink,
        })
    }

    /// Deliver arbitrary load counts by splitting them into batches that each
    /// satisfy the bulk contract; two rounds are charged per batch.
    pub fn route_bulk_batched<I>(&mut self, loads: I) -> Result<BulkStats, NetError>
    where
        I: IntoIterator<Item = (NodeId, NodeId, u64)>,
    {
        let cap = self.n as u64;
        let mut totals = BulkStats::default();
        let mut source = vec![0u64; self.n];
        let mut sink = vec![0u64; self.n];
        let mut batch: Vec<(NodeId, NodeId, u64)> = Vec::new();
        // Overall per-node loads, for the caller's audit trail.
        let mut overall_source = vec![0u64; self.n];
        let mut overall_sink = vec![0u64; self.n];

        for (src, dst, units) in loads {
            self.check_node(src)?;
            self.check_node(dst)?;
            overall_source[src] += units;
            overall_sink[dst] += units;
            let mut remaining = units;
            while remaining > 0 {
                let room = (cap - source[src]).min(cap - sink[dst]);
                if room == 0 {
                    let flushed = self.bulk_accounting(batch.drain(..))?;
                    totals.absorb(flushed);
                    source.iter_mut().for_each(|s| *s = 0);
                    sink.iter_mut().for_each(|s| *s = 0);
                    continue;
                }
                let take = remaining.min(room);
                source[src] += take;
                sink[dst] += take;
                batch.push((src, dst, take));
                remaining -= take;
            }
        }
        if !batch.is_empty() {
            let flushed = self.bulk_accounting(batch.drain(..))?;
            totals.absorb(flushed);
        }
        totals.max_source_units = overall_source.iter().copied().max().unwrap_or(0);
        totals.max_sink_units = overall_sink.iter().copied().max().unwrap_or(0);
        Ok(totals)
    }
}
