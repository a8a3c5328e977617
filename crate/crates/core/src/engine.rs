//! Synchronous discrete-time greedy execution engine.
//!
//! Every pending transaction runs at every step. The engine enumerates
//! conflicting pairs of running transactions, asks the contention-manager
//! policy to pick a winner for each, applies aborts, accrues progress,
//! and records a complete trace. Aborted transactions restart on the next
//! step at no extra cost; a transaction whose progress reaches its
//! duration commits at the end of the step.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{ConflictGraph, TxnId, Workload};

/// Discrete time step index.
pub type Step = u64;

/// Engine-side view handed to the policy at the start of each step.
pub struct StepView<'a> {
    /// All pending (hence running) transactions, ascending by id.
    pub pending: &'a [TxnId],
    /// Transactions (re)starting at this step, ascending by id. At step 0
    /// this is every transaction; later it is those aborted one step ago.
    pub restarted: &'a [TxnId],
}

/// A policy invariant was broken; surfaced through [`EngineError::Policy`].
#[derive(Debug, Error, PartialEq, Eq)]
#[error("{0}")]
pub struct PolicyViolation(pub String);

/// Conflict-resolution policy plugged into the engine.
///
/// The engine drives one policy instance per run. A policy must be
/// deterministic given its construction-time seed and the sequence of
/// engine callbacks, and `resolve` must return one of the two offered
/// ids.
pub trait ContentionManager {
    fn name(&self) -> &'static str;

    /// Called once at the start of every step, before conflicts are
    /// enumerated.
    fn begin_step(&mut self, _step: Step, _view: &StepView<'_>) {}

    /// Picks the winner of a conflicting pair of running transactions.
    /// The pair is offered as `(lower id, higher id)`.
    fn resolve(&mut self, step: Step, first: TxnId, second: TxnId)
        -> Result<TxnId, PolicyViolation>;

    /// The loser of a resolved conflict was aborted at `step` and will
    /// restart at `step + 1`.
    fn notify_abort(&mut self, _step: Step, _loser: TxnId, _winner: TxnId) {}

    /// The transaction committed at the end of `step`.
    fn notify_commit(&mut self, _step: Step, _id: TxnId) {}
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(
        "policy returned {returned} for conflict pair ({first}, {second}) at step {step}"
    )]
    PolicyContract {
        step: Step,
        first: TxnId,
        second: TxnId,
        returned: TxnId,
    },
    #[error("policy invariant violation at step {step}: {violation}")]
    Policy { step: Step, violation: PolicyViolation },
    #[error("execution exceeded {guard} steps without committing all transactions")]
    NonTermination { guard: u64 },
}

/// One recorded engine event.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceEvent {
    pub step: Step,
    #[serde(flatten)]
    pub kind: EventKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EventKind {
    Issue { txn: TxnId },
    Abort { loser: TxnId, winner: TxnId },
    Commit { txn: TxnId },
}

/// Per-transaction summary of one run.
///
/// `commit_step` is the time boundary at which the transaction is done:
/// a transaction started at `last_start` with duration `d` executes
/// during steps `[last_start, last_start + d)` and has
/// `commit_step = last_start + d`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TxnRecord {
    pub id: TxnId,
    pub issue_step: Step,
    pub commit_step: Step,
    pub aborts: u64,
    pub last_start: Step,
}

impl TxnRecord {
    /// Final uninterrupted execution interval, half-open.
    pub fn final_interval(&self) -> (Step, Step) {
        (self.last_start, self.commit_step)
    }
}

/// Complete record of one engine run. The makespan equals the largest
/// commit step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExecutionTrace {
    pub makespan: u64,
    pub events: Vec<TraceEvent>,
    /// One record per transaction, ascending by id.
    pub transactions: Vec<TxnRecord>,
}

impl ExecutionTrace {
    pub fn record(&self, id: TxnId) -> Option<&TxnRecord> {
        self.transactions.iter().find(|r| r.id == id)
    }

    pub fn total_aborts(&self) -> u64 {
        self.transactions.iter().map(|r| r.aborts).sum()
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace serialization cannot fail")
    }

    /// Flat event listing with columns `step,kind,loser,winner`. Issue
    /// and commit rows carry their transaction id in the winner column.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("step,kind,loser,winner\n");
        for ev in &self.events {
            let line = match ev.kind {
                EventKind::Issue { txn } => format!("{},issue,,{}\n", ev.step, txn),
                EventKind::Abort { loser, winner } => {
                    format!("{},abort,{},{}\n", ev.step, loser, winner)
                }
                EventKind::Commit { txn } => format!("{},commit,,{}\n", ev.step, txn),
            };
            out.push_str(&line);
        }
        out
    }
}

/// Runs the workload to completion under the given policy.
///
/// Step semantics: conflicts among running transactions are resolved
/// first (pairs in ascending `(min id, max id)` order, skipping pairs
/// that touch a transaction already aborted this step); every survivor
/// then gains one progress unit; transactions reaching their duration
/// commit at the end of the step; aborted transactions restart on the
/// next step with progress zero.
pub fn run<P>(workload: &Workload, policy: &mut P) -> Result<ExecutionTrace, EngineError>
where
    P: ContentionManager + ?Sized,
{
    let mut ids: Vec<TxnId> = workload.ids().collect();
    ids.sort();
    let durations: BTreeMap<TxnId, u64> = workload
        .transactions()
        .iter()
        .map(|t| (t.id(), t.duration()))
        .collect();
    let pairs = ConflictGraph::build(workload).edges();

    let total_duration: u64 = durations.values().sum();
    let guard = total_duration
        .saturating_mul(ids.len() as u64)
        .saturating_mul(4);

    struct Slot {
        committed: bool,
        progress: u64,
        start_step: Step,
        aborts: u64,
    }
    let mut slots: BTreeMap<TxnId, Slot> = ids
        .iter()
        .map(|id| {
            (
                *id,
                Slot {
                    committed: false,
                    progress: 0,
                    start_step: 0,
                    aborts: 0,
                },
            )
        })
        .collect();

    let mut events: Vec<TraceEvent> = ids
        .iter()
        .map(|id| TraceEvent {
            step: 0,
            kind: EventKind::Issue { txn: *id },
        })
        .collect();
    let mut records: BTreeMap<TxnId, TxnRecord> = BTreeMap::new();
    let mut remaining = ids.len();

    let mut step: Step = 0;
    while remaining > 0 {
        if step > guard {
            return Err(EngineError::NonTermination { guard });
        }

        let running: Vec<TxnId> = ids
            .iter()
            .copied()
            .filter(|id| !slots[id].committed)
            .collect();
        let restarted: Vec<TxnId> = running
            .iter()
            .copied()
            .filter(|id| slots[id].start_step == step)
            .collect();
        policy.begin_step(
            step,
            &StepView {
                pending: &running,
                restarted: &restarted,
            },
        );

        let mut aborted_now: BTreeSet<TxnId> = BTreeSet::new();
        for &(u, v) in &pairs {
            if slots[&u].committed || slots[&v].committed {
                continue;
            }
            if aborted_now.contains(&u) || aborted_now.contains(&v) {
                continue;
            }
            let winner = policy
                .resolve(step, u, v)
                .map_err(|violation| EngineError::Policy { step, violation })?;
            if winner != u && winner != v {
                return Err(EngineError::PolicyContract {
                    step,
                    first: u,
                    second: v,
                    returned: winner,
                });
            }
            let loser = if winner == u { v } else { u };
            aborted_now.insert(loser);
            events.push(TraceEvent {
                step,
                kind: EventKind::Abort { loser, winner },
            });
            let slot = slots.get_mut(&loser).unwrap();
            slot.progress = 0;
            slot.start_step = step + 1;
            slot.aborts += 1;
            policy.notify_abort(step, loser, winner);
        }

        for &id in &running {
            if aborted_now.contains(&id) {
                continue;
            }
            let slot = slots.get_mut(&id).unwrap();
            slot.progress += 1;
            if slot.progress == durations[&id] {
                slot.committed = true;
                remaining -= 1;
                let commit_step = step + 1;
                events.push(TraceEvent {
                    step: commit_step,
                    kind: EventKind::Commit { txn: id },
                });
                records.insert(
                    id,
                    TxnRecord {
                        id,
                        issue_step: 0,
                        commit_step,
                        aborts: slot.aborts,
                        last_start: slot.start_step,
                    },
                );
                policy.notify_commit(step, id);
            }
        }

        step += 1;
    }

    let makespan = records.values().map(|r| r.commit_step).max().unwrap_or(0);
    Ok(ExecutionTrace {
        makespan,
        events,
        transactions: records.into_values().collect(),
    })
}

/// One discrepancy found by [`validate_trace`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceViolation {
    UnknownTransaction(TxnId),
    MissingIssue(TxnId),
    MissingCommit(TxnId),
    MultipleCommits(TxnId),
    /// An abort was recorded outside the window in which the transaction
    /// could have been running, or after its commit.
    AbortOutOfWindow { id: TxnId, step: Step },
    /// Commit step does not equal last restart plus duration, so the
    /// transaction must have idled or progressed inconsistently.
    GreedyViolation {
        id: TxnId,
        expected_commit: Step,
        actual_commit: Step,
    },
    /// Final committed intervals of a conflicting pair overlap.
    SafetyOverlap { first: TxnId, second: TxnId },
    /// Per-transaction record disagrees with the event log.
    SummaryMismatch(TxnId),
    /// Trace makespan field does not equal the largest commit step.
    MakespanMismatch { recorded: u64, actual: u64 },
}

impl fmt::Display for TraceViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::UnknownTransaction(id) => write!(f, "event references unknown transaction {id}"),
            Self::MissingIssue(id) => write!(f, "transaction {id} has no issue event at step 0"),
            Self::MissingCommit(id) => write!(f, "transaction {id} never commits"),
            Self::MultipleCommits(id) => write!(f, "transaction {id} commits more than once"),
            Self::AbortOutOfWindow { id, step } => {
                write!(f, "transaction {id} aborted at step {step} while not running")
            }
            Self::GreedyViolation {
                id,
                expected_commit,
                actual_commit,
            } => write!(
                f,
                "transaction {id} commits at {actual_commit} but its last restart implies {expected_commit}"
            ),
            Self::SafetyOverlap { first, second } => write!(
                f,
                "conflicting transactions {first} and {second} have overlapping committed intervals"
            ),
            Self::SummaryMismatch(id) => {
                write!(f, "per-transaction record for {id} disagrees with the event log")
            }
            Self::MakespanMismatch { recorded, actual } => {
                write!(f, "trace makespan {recorded} but largest commit step is {actual}")
            }
        }
    }
}

/// Checks a trace against the workload: serialization safety (final
/// committed intervals of conflicting pairs are disjoint), exactly one
/// commit per transaction, and greedy timing (no pending transaction
/// idles). Violations come back as data; an empty list means the trace
/// is consistent.
pub fn validate_trace(workload: &Workload, trace: &ExecutionTrace) -> Vec<TraceViolation> {
    let mut violations = Vec::new();
    let known: BTreeSet<TxnId> = workload.ids().collect();

    #[derive(Default)]
    struct Recon {
        issues: Vec<Step>,
        aborts: Vec<Step>,
        commits: Vec<Step>,
    }
    let mut recon: BTreeMap<TxnId, Recon> = known
        .iter()
        .map(|id| (*id, Recon::default()))
        .collect();

    for ev in &trace.events {
        let touched: Vec<TxnId> = match ev.kind {
            EventKind::Issue { txn } | EventKind::Commit { txn } => vec![txn],
            EventKind::Abort { loser, winner } => vec![loser, winner],
        };
        for id in touched {
            if !known.contains(&id) {
                violations.push(TraceViolation::UnknownTransaction(id));
            }
        }
        match ev.kind {
            EventKind::Issue { txn } => {
                if let Some(r) = recon.get_mut(&txn) {
                    r.issues.push(ev.step);
                }
            }
            EventKind::Abort { loser, .. } => {
                if let Some(r) = recon.get_mut(&loser) {
                    r.aborts.push(ev.step);
                }
            }
            EventKind::Commit { txn } => {
                if let Some(r) = recon.get_mut(&txn) {
                    r.commits.push(ev.step);
                }
            }
        }
    }

    let mut intervals: BTreeMap<TxnId, (Step, Step)> = BTreeMap::new();
    for txn in workload.transactions() {
        let id = txn.id();
        let r = &recon[&id];
        if r.issues != [0] {
            violations.push(TraceViolation::MissingIssue(id));
        }
        match r.commits.len() {
            0 => {
                violations.push(TraceViolation::MissingCommit(id));
                continue;
            }
            1 => {}
            _ => {
                violations.push(TraceViolation::MultipleCommits(id));
                continue;
            }
        }
        let commit = r.commits[0];
        let mut start: Step = 0;
        let mut ok = true;
        for &a in &r.aborts {
            // While running, steps [start, start + duration) are live; the
            // final one would commit, so an abort must land before that.
            if a < start || a >= start + txn.duration() || a + 1 > commit {
                violations.push(TraceViolation::AbortOutOfWindow { id, step: a });
                ok = false;
                break;
            }
            start = a + 1;
        }
        if !ok {
            continue;
        }
        if commit != start + txn.duration() {
            violations.push(TraceViolation::GreedyViolation {
                id,
                expected_commit: start + txn.duration(),
                actual_commit: commit,
            });
            continue;
        }
        intervals.insert(id, (start, commit));
        match trace.record(id) {
            Some(rec)
                if rec.issue_step == 0
                    && rec.commit_step == commit
                    && rec.aborts == r.aborts.len() as u64
                    && rec.last_start == start => {}
            _ => violations.push(TraceViolation::SummaryMismatch(id)),
        }
    }

    let txns = workload.transactions();
    for (i, a) in txns.iter().enumerate() {
        for b in &txns[i + 1..] {
            if !a.conflicts_with(b) {
                continue;
            }
            let (Some(&(sa, ca)), Some(&(sb, cb))) =
                (intervals.get(&a.id()), intervals.get(&b.id()))
            else {
                continue;
            };
            if sa < cb && sb < ca {
                violations.push(TraceViolation::SafetyOverlap {
                    first: a.id(),
                    second: b.id(),
                });
            }
        }
    }

    let actual_makespan = recon
        .values()
        .flat_map(|r| r.commits.iter().copied())
        .max()
        .unwrap_or(0);
    if trace.makespan != actual_makespan {
        violations.push(TraceViolation::MakespanMismatch {
            recorded: trace.makespan,
            actual: actual_makespan,
        });
    }

    violations
}

/// True iff at every step with pending transactions, some transaction
/// running at that step executes uninterrupted until its commit — i.e.
/// the final committed intervals cover the whole schedule.
pub fn pending_commit_holds(trace: &ExecutionTrace) -> bool {
    let makespan = trace.makespan as usize;
    let mut covered = vec![false; makespan];
    for rec in &trace.transactions {
        for step in rec.last_start..rec.commit_step {
            if (step as usize) < makespan {
                covered[step as usize] = true;
            }
        }
    }
    covered.into_iter().all(|c| c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ResourceId, Transaction};
    use proptest::prelude::*;

    fn txn(id: u32, duration: u64, reads: &[u32], writes: &[u32]) -> Transaction {
        Transaction::new(
            TxnId(id),
            duration,
            reads.iter().copied().map(ResourceId),
            writes.iter().copied().map(ResourceId),
        )
        .unwrap()
    }

    /// Lower id always wins.
    struct FavorLowestId;

    impl ContentionManager for FavorLowestId {
        fn name(&self) -> &'static str {
            "favor-lowest-id"
        }

        fn resolve(
            &mut self,
            _step: Step,
            first: TxnId,
            _second: TxnId,
        ) -> Result<TxnId, PolicyViolation> {
            Ok(first)
        }
    }

    /// Winner per step taken from a script; falls back to lowest id.
    struct Scripted(BTreeMap<Step, TxnId>);

    impl ContentionManager for Scripted {
        fn name(&self) -> &'static str {
            "scripted"
        }

        fn resolve(
            &mut self,
            step: Step,
            first: TxnId,
            second: TxnId,
        ) -> Result<TxnId, PolicyViolation> {
            Ok(match self.0.get(&step) {
                Some(&w) if w == first || w == second => w,
                _ => first,
            })
        }
    }

    #[test]
    fn single_transaction_run() {
        let w = Workload::new(1, vec![txn(1, 2, &[], &[0])]).unwrap();
        let trace = run(&w, &mut FavorLowestId).unwrap();
        assert_eq!(trace.makespan, 2);
        assert_eq!(trace.total_aborts(), 0);
        let rec = trace.record(TxnId(1)).unwrap();
        assert_eq!(rec.commit_step, 2);
        assert_eq!(rec.last_start, 0);
        assert!(validate_trace(&w, &trace).is_empty());
        assert!(pending_commit_holds(&trace));
    }

    #[test]
    fn two_conflicting_unit_transactions() {
        let w = Workload::new(1, vec![txn(1, 1, &[], &[0]), txn(2, 1, &[], &[0])]).unwrap();
        let trace = run(&w, &mut FavorLowestId).unwrap();
        assert_eq!(trace.makespan, 2);
        assert_eq!(trace.total_aborts(), 1);
        assert_eq!(
            trace.events,
            vec![
                TraceEvent { step: 0, kind: EventKind::Issue { txn: TxnId(1) } },
                TraceEvent { step: 0, kind: EventKind::Issue { txn: TxnId(2) } },
                TraceEvent {
                    step: 0,
                    kind: EventKind::Abort { loser: TxnId(2), winner: TxnId(1) },
                },
                TraceEvent { step: 1, kind: EventKind::Commit { txn: TxnId(1) } },
                TraceEvent { step: 2, kind: EventKind::Commit { txn: TxnId(2) } },
            ]
        );
        assert!(validate_trace(&w, &trace).is_empty());
    }

    #[test]
    fn non_conflicting_transactions_run_in_parallel() {
        let w = Workload::new(2, vec![txn(1, 1, &[], &[0]), txn(2, 3, &[], &[1])]).unwrap();
        let trace = run(&w, &mut FavorLowestId).unwrap();
        assert_eq!(trace.makespan, 3);
        assert_eq!(trace.total_aborts(), 0);
        assert!(validate_trace(&w, &trace).is_empty());
    }

    #[test]
    fn policy_contract_enforced() {
        struct Foreign;
        impl ContentionManager for Foreign {
            fn name(&self) -> &'static str {
                "foreign"
            }
            fn resolve(
                &mut self,
                _: Step,
                _: TxnId,
                _: TxnId,
            ) -> Result<TxnId, PolicyViolation> {
                Ok(TxnId(999))
            }
        }
        let w = Workload::new(1, vec![txn(1, 1, &[], &[0]), txn(2, 1, &[], &[0])]).unwrap();
        let err = run(&w, &mut Foreign).unwrap_err();
        assert!(matches!(err, EngineError::PolicyContract { returned: TxnId(999), .. }));
    }

    #[test]
    fn livelock_hits_guard() {
        /// Alternates the winner every step, so neither duration-2
        /// transaction ever finishes.
        struct Alternating;
        impl ContentionManager for Alternating {
            fn name(&self) -> &'static str {
                "alternating"
            }
            fn resolve(
                &mut self,
                step: Step,
                first: TxnId,
                second: TxnId,
            ) -> Result<TxnId, PolicyViolation> {
                Ok(if step % 2 == 0 { first } else { second })
            }
        }
        let w = Workload::new(1, vec![txn(1, 2, &[], &[0]), txn(2, 2, &[], &[0])]).unwrap();
        let err = run(&w, &mut Alternating).unwrap_err();
        assert!(matches!(err, EngineError::NonTermination { .. }));
    }

    #[test]
    fn pending_commit_fails_for_adversarial_schedule() {
        // Script: step 0 aborts 2, step 1 aborts 1, afterwards 1 wins all.
        // Both survive their early aborts, so no transaction issued at
        // steps 0 or 1 runs uninterrupted to commit.
        let w = Workload::new(1, vec![txn(1, 2, &[], &[0]), txn(2, 2, &[], &[0])]).unwrap();
        let script: BTreeMap<Step, TxnId> = [(0, TxnId(1)), (1, TxnId(2))].into();
        let trace = run(&w, &mut Scripted(script)).unwrap();
        assert!(validate_trace(&w, &trace).is_empty());
        assert!(!pending_commit_holds(&trace));
    }

    #[test]
    fn forged_traces_yield_violations() {
        let w = Workload::new(1, vec![txn(1, 1, &[], &[0]), txn(2, 1, &[], &[0])]).unwrap();
        // Overlapping committed intervals for a conflicting pair.
        let forged = ExecutionTrace {
            makespan: 1,
            events: vec![
                TraceEvent { step: 0, kind: EventKind::Issue { txn: TxnId(1) } },
                TraceEvent { step: 0, kind: EventKind::Issue { txn: TxnId(2) } },
                TraceEvent { step: 1, kind: EventKind::Commit { txn: TxnId(1) } },
                TraceEvent { step: 1, kind: EventKind::Commit { txn: TxnId(2) } },
            ],
            transactions: vec![
                TxnRecord { id: TxnId(1), issue_step: 0, commit_step: 1, aborts: 0, last_start: 0 },
                TxnRecord { id: TxnId(2), issue_step: 0, commit_step: 1, aborts: 0, last_start: 0 },
            ],
        };
        let violations = validate_trace(&w, &forged);
        assert!(violations
            .iter()
            .any(|v| matches!(v, TraceViolation::SafetyOverlap { .. })));

        // Missing commit.
        let forged = ExecutionTrace {
            makespan: 1,
            events: vec![
                TraceEvent { step: 0, kind: EventKind::Issue { txn: TxnId(1) } },
                TraceEvent { step: 0, kind: EventKind::Issue { txn: TxnId(2) } },
                TraceEvent { step: 1, kind: EventKind::Commit { txn: TxnId(1) } },
            ],
            transactions: vec![TxnRecord {
                id: TxnId(1),
                issue_step: 0,
                commit_step: 1,
                aborts: 0,
                last_start: 0,
            }],
        };
        let violations = validate_trace(&w, &forged);
        assert!(violations.contains(&TraceViolation::MissingCommit(TxnId(2))));
    }

    #[test]
    fn trace_export_formats() {
        let w = Workload::new(1, vec![txn(1, 1, &[], &[0]), txn(2, 1, &[], &[0])]).unwrap();
        let trace = run(&w, &mut FavorLowestId).unwrap();
        let json = trace.to_json_string();
        let back: ExecutionTrace = serde_json::from_str(&json).unwrap();
        assert_eq!(trace, back);
        let csv = trace.to_csv_string();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "step,kind,loser,winner");
        assert_eq!(lines[1], "0,issue,,1");
        assert_eq!(lines[3], "0,abort,2,1");
        assert_eq!(lines[4], "1,commit,,1");
    }

    fn arb_workload() -> impl Strategy<Value = Workload> {
        prop::collection::vec(
            (
                1u64..5,
                prop::collection::btree_set(0u32..5, 0..3),
                prop::collection::btree_set(0u32..5, 1..3),
            ),
            1..8,
        )
        .prop_map(|specs| {
            let txns = specs
                .into_iter()
                .enumerate()
                .map(|(i, (dur, reads, writes))| {
                    Transaction::new(
                        TxnId(i as u32),
                        dur,
                        reads.into_iter().map(ResourceId),
                        writes.into_iter().map(ResourceId),
                    )
                    .unwrap()
                })
                .collect();
            Workload::new(5, txns).unwrap()
        })
    }

    proptest! {
        #[test]
        fn deterministic_and_safe(w in arb_workload()) {
            let a = run(&w, &mut FavorLowestId).unwrap();
            let b = run(&w, &mut FavorLowestId).unwrap();
            prop_assert_eq!(&a, &b);
            prop_assert_eq!(a.to_json_string(), b.to_json_string());
            prop_assert!(validate_trace(&w, &a).is_empty());
        }

        #[test]
        fn makespan_lower_bounds_respected(w in arb_workload()) {
            let trace = run(&w, &mut FavorLowestId).unwrap();
            prop_assert!(trace.makespan >= w.tau_max());
            for r in 0..w.resource_count() {
                let writer_sum: u64 = w
                    .transactions()
                    .iter()
                    .filter(|t| t.writes().contains(&ResourceId(r)))
                    .map(Transaction::duration)
                    .sum();
                prop_assert!(trace.makespan >= writer_sum);
            }
        }
    }
}
