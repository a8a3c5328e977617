//! Conflict-graph-aware contention manager.
//!
//! Transactions are bucketed into ordered duration/access-size subgroups
//! at construction. Each step the policy picks the lowest-order subgroup
//! with pending members, keeps every still-pending high-priority
//! transaction high (so it runs uninterrupted to commit), and extends the
//! high set with a greedy maximal independent set of the remaining
//! unconflicted subgroup members. High beats low on conflict; between two
//! low-priority transactions the lower id wins.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::engine::{ContentionManager, PolicyViolation, Step, StepView};
use crate::model::{Classification, ConflictGraph, TxnId, Workload};

/// Greedy maximal independent set over the nodes in `candidates`,
/// scanning ids in ascending order. The result is independent in the
/// graph induced on `candidates` and maximal within it.
pub fn maximal_independent_set(
    graph: &ConflictGraph,
    candidates: &BTreeSet<TxnId>,
) -> BTreeSet<TxnId> {
    let mut chosen: BTreeSet<TxnId> = BTreeSet::new();
    for &id in candidates {
        if graph.neighbors(id).all(|n| !chosen.contains(&n)) {
            chosen.insert(id);
        }
    }
    chosen
}

/// Per-step priority assignment, recorded when dumping is enabled.
#[derive(Debug, Clone, Serialize)]
pub struct PrioritySnapshot {
    pub step: Step,
    pub high: Vec<TxnId>,
    pub low: Vec<TxnId>,
}

pub struct ClairvoyantPolicy {
    classification: Classification,
    graph: ConflictGraph,
    high: BTreeSet<TxnId>,
    log: Option<Vec<PrioritySnapshot>>,
}

impl ClairvoyantPolicy {
    pub fn new(workload: &Workload) -> Self {
        Self {
            classification: Classification::new(workload),
            graph: ConflictGraph::build(workload),
            high: BTreeSet::new(),
            log: None,
        }
    }

    /// Enables per-step recording of the high/low priority split.
    pub fn with_priority_log(workload: &Workload) -> Self {
        let mut policy = Self::new(workload);
        policy.log = Some(Vec::new());
        policy
    }

    pub fn priority_log(&self) -> &[PrioritySnapshot] {
        self.log.as_deref().unwrap_or(&[])
    }

    /// Current high-priority set; exposed for tests and debugging.
    pub fn high_set(&self) -> &BTreeSet<TxnId> {
        &self.high
    }
}

impl ContentionManager for ClairvoyantPolicy {
    fn name(&self) -> &'static str {
        "clairvoyant"
    }

    fn begin_step(&mut self, step: Step, view: &StepView<'_>) {
        let pending: BTreeSet<TxnId> = view.pending.iter().copied().collect();

        // Lowest-order subgroup with pending members.
        let Some(lowest) = pending
            .iter()
            .map(|id| self.classification.key(*id))
            .min()
        else {
            self.high.clear();
            return;
        };
        let lowest_pending: BTreeSet<TxnId> = pending
            .iter()
            .copied()
            .filter(|id| self.classification.key(*id) == lowest)
            .collect();

        // Survivors of the previous high set stay high until they commit.
        let carried: BTreeSet<TxnId> = self.high.intersection(&pending).copied().collect();
        debug_assert!(carried.is_subset(&lowest_pending));

        // Pending transactions conflicting with a carried transaction are
        // barred from the independent-set extension.
        let barred: BTreeSet<TxnId> = pending
            .iter()
            .copied()
            .filter(|id| carried.iter().any(|c| self.graph.are_adjacent(*id, *c)))
            .collect();

        let eligible: BTreeSet<TxnId> =
            lowest_pending.difference(&barred).copied().collect();
        let independent = maximal_independent_set(&self.graph, &eligible);
        debug_assert!(carried.is_subset(&independent));

        self.high = independent.union(&carried).copied().collect();

        if let Some(log) = &mut self.log {
            log.push(PrioritySnapshot {
                step,
                high: self.high.iter().copied().collect(),
                low: pending.difference(&self.high).copied().collect(),
            });
        }
    }

    fn resolve(
        &mut self,
        _step: Step,
        first: TxnId,
        second: TxnId,
    ) -> Result<TxnId, PolicyViolation> {
        match (self.high.contains(&first), self.high.contains(&second)) {
            (true, true) => Err(PolicyViolation(format!(
                "transactions {first} and {second} are both high priority but conflict"
            ))),
            (true, false) => Ok(first),
            (false, true) => Ok(second),
            (false, false) => Ok(first.min(second)),
        }
    }
}

/// Checks subgroup-ordered commits on a trace: no transaction may commit
/// while a strictly lower-order subgroup still holds a transaction that
/// was pending when the committing one last restarted and is still
/// pending at its commit. Meaningful on workloads where every pair
/// conflicts; returns the offending pairs.
pub fn subgroup_order_violations(
    workload: &Workload,
    trace: &crate::engine::ExecutionTrace,
) -> Vec<(TxnId, TxnId)> {
    let classification = Classification::new(workload);
    let mut bad = Vec::new();
    for committed in &trace.transactions {
        for other in &trace.transactions {
            if other.id == committed.id {
                continue;
            }
            if classification.key(other.id) < classification.key(committed.id)
                && other.commit_step > committed.commit_step
            {
                bad.push((committed.id, other.id));
            }
        }
    }
    bad
}
