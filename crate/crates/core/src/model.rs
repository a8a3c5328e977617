//! Domain types for transactions, workloads, conflicts, and the
//! group/subgroup classification shared by both contention managers.
//!
//! All types here are immutable after construction and safe to share
//! across threads; every operation is a pure function.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Identifier of a transaction, unique within a workload.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default,
)]
#[serde(transparent)]
pub struct TxnId(pub u32);

impl fmt::Display for TxnId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Index of a shared resource, in `[0, resource_count)`.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default,
)]
#[serde(transparent)]
pub struct ResourceId(pub u32);

impl fmt::Display for ResourceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("transaction {0} has zero duration")]
    ZeroDuration(TxnId),
    #[error("transaction {0} accesses no resources")]
    NoAccesses(TxnId),
    #[error("duplicate transaction id {0}")]
    DuplicateId(TxnId),
    #[error("transaction {id} uses resource {resource} but the workload declares only {resource_count} resources")]
    ResourceOutOfRange {
        id: TxnId,
        resource: ResourceId,
        resource_count: u32,
    },
    #[error("workload declares zero resources")]
    ZeroResourceCount,
    #[error("workload contains no writing transaction")]
    NoWriter,
}

/// An atomic unit of work: declared read and write sets over shared
/// resources, plus the number of discrete time steps it needs to commit
/// when it runs uninterrupted.
///
/// A resource that appears in both declared sets is kept in the write set
/// only, so the access count `lambda` counts distinct resources and write
/// access subsumes read access.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "TransactionDoc")]
pub struct Transaction {
    id: TxnId,
    duration: u64,
    reads: BTreeSet<ResourceId>,
    writes: BTreeSet<ResourceId>,
}

impl Transaction {
    pub fn new(
        id: TxnId,
        duration: u64,
        reads: impl IntoIterator<Item = ResourceId>,
        writes: impl IntoIterator<Item = ResourceId>,
    ) -> Result<Self, ModelError> {
        if duration == 0 {
            return Err(ModelError::ZeroDuration(id));
        }
        let writes: BTreeSet<ResourceId> = writes.into_iter().collect();
        let reads: BTreeSet<ResourceId> = reads
            .into_iter()
            .filter(|r| !writes.contains(r))
            .collect();
        if reads.is_empty() && writes.is_empty() {
            return Err(ModelError::NoAccesses(id));
        }
        Ok(Self {
            id,
            duration,
            reads,
            writes,
        })
    }

    pub fn id(&self) -> TxnId {
        self.id
    }

    pub fn duration(&self) -> u64 {
        self.duration
    }

    pub fn reads(&self) -> &BTreeSet<ResourceId> {
        &self.reads
    }

    pub fn writes(&self) -> &BTreeSet<ResourceId> {
        &self.writes
    }

    /// Number of distinct resources accessed for read or write (lambda).
    pub fn access_count(&self) -> u64 {
        (self.reads.len() + self.writes.len()) as u64
    }

    pub fn write_count(&self) -> u64 {
        self.writes.len() as u64
    }

    pub fn read_count(&self) -> u64 {
        self.reads.len() as u64
    }

    pub fn is_read_only(&self) -> bool {
        self.writes.is_empty()
    }

    pub fn is_writing(&self) -> bool {
        !self.writes.is_empty()
    }

    /// Iterates over every accessed resource, reads and writes combined.
    pub fn accesses(&self) -> impl Iterator<Item = ResourceId> + '_ {
        self.reads.iter().chain(self.writes.iter()).copied()
    }

    pub fn accesses_resource(&self, r: ResourceId) -> bool {
        self.reads.contains(&r) || self.writes.contains(&r)
    }

    /// Ratio of writes to total accesses; zero for a read-only transaction.
    pub fn balancing_ratio(&self) -> Rational64 {
        Rational64::new(self.write_count() as i64, self.access_count() as i64)
    }

    /// True when the two transactions overlap on a resource at least one
    /// of them writes. Symmetric in its arguments.
    pub fn conflicts_with(&self, other: &Transaction) -> bool {
        debug_assert_ne!(self.id, other.id);
        self.writes.iter().any(|r| other.accesses_resource(*r))
            || other.writes.iter().any(|r| self.accesses_resource(*r))
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TransactionDoc {
    id: u32,
    duration: u64,
    reads: Vec<u32>,
    writes: Vec<u32>,
}

impl TryFrom<TransactionDoc> for Transaction {
    type Error = ModelError;

    fn try_from(doc: TransactionDoc) -> Result<Self, Self::Error> {
        Transaction::new(
            TxnId(doc.id),
            doc.duration,
            doc.reads.into_iter().map(ResourceId),
            doc.writes.into_iter().map(ResourceId),
        )
    }
}

/// A batch of transactions over a fixed set of shared resources.
///
/// Construction validates that ids are distinct, every resource index is
/// in range, and at least one transaction writes (a workload with no
/// writer has no conflicts and nothing to schedule).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "WorkloadDoc")]
pub struct Workload {
    resource_count: u32,
    transactions: Vec<Transaction>,
}

impl Workload {
    pub fn new(resource_count: u32, transactions: Vec<Transaction>) -> Result<Self, ModelError> {
        if resource_count == 0 {
            return Err(ModelError::ZeroResourceCount);
        }
        let mut seen = BTreeSet::new();
        for txn in &transactions {
            if !seen.insert(txn.id()) {
                return Err(ModelError::DuplicateId(txn.id()));
            }
            for r in txn.accesses() {
                if r.0 >= resource_count {
                    return Err(ModelError::ResourceOutOfRange {
                        id: txn.id(),
                        resource: r,
                        resource_count,
                    });
                }
            }
        }
        if !transactions.iter().any(Transaction::is_writing) {
            return Err(ModelError::NoWriter);
        }
        Ok(Self {
            resource_count,
            transactions,
        })
    }

    pub fn resource_count(&self) -> u32 {
        self.resource_count
    }

    pub fn len(&self) -> usize {
        self.transactions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transactions.is_empty()
    }

    pub fn transactions(&self) -> &[Transaction] {
        &self.transactions
    }

    pub fn get(&self, id: TxnId) -> Option<&Transaction> {
        self.transactions.iter().find(|t| t.id() == id)
    }

    pub fn ids(&self) -> impl Iterator<Item = TxnId> + '_ {
        self.transactions.iter().map(Transaction::id)
    }

    pub fn tau_min(&self) -> u64 {
        self.transactions
            .iter()
            .map(Transaction::duration)
            .min()
            .expect("workload is never empty")
    }

    pub fn tau_max(&self) -> u64 {
        self.transactions
            .iter()
            .map(Transaction::duration)
            .max()
            .expect("workload is never empty")
    }

    /// Number of duration groups: `ceil(log2(tau_max / tau_min)) + 1`.
    pub fn duration_group_count(&self) -> u32 {
        ceil_log2_quotient(self.tau_max(), self.tau_min()) + 1
    }

    /// Number of access-size subgroups per group: `ceil(log2(s)) + 1`.
    pub fn access_subgroup_count(&self) -> u32 {
        ceil_log2(self.resource_count as u64) + 1
    }

    /// Number of transactions writing the given resource (gamma).
    pub fn writer_count(&self, r: ResourceId) -> u64 {
        self.transactions
            .iter()
            .filter(|t| t.writes().contains(&r))
            .count() as u64
    }

    /// Largest writer count over all resources (gamma_max).
    pub fn gamma_max(&self) -> u64 {
        (0..self.resource_count)
            .map(|r| self.writer_count(ResourceId(r)))
            .max()
            .unwrap_or(0)
    }

    /// Largest access count over all transactions (lambda_max).
    pub fn lambda_max(&self) -> u64 {
        self.transactions
            .iter()
            .map(Transaction::access_count)
            .max()
            .expect("workload is never empty")
    }

    /// Minimum balancing ratio over writing transactions. Lies in
    /// `(0, 1]`; the workload invariant guarantees a writer exists.
    pub fn global_beta(&self) -> Rational64 {
        self.transactions
            .iter()
            .filter(|t| t.is_writing())
            .map(Transaction::balancing_ratio)
            .min()
            .expect("workload always contains a writer")
    }

    /// Assigns the transaction to its duration/access-size subgroup, or
    /// to the read-only group which orders after every writing subgroup.
    pub fn classify(&self, txn: &Transaction) -> SubgroupKey {
        if txn.is_read_only() {
            return SubgroupKey::ReadOnly;
        }
        SubgroupKey::Writing {
            group: (txn.duration() / self.tau_min()).ilog2(),
            subgroup: txn.access_count().ilog2(),
        }
    }

    pub fn from_json_str(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("workload serialization cannot fail")
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WorkloadDoc {
    resource_count: u32,
    transactions: Vec<Transaction>,
}

impl TryFrom<WorkloadDoc> for Workload {
    type Error = ModelError;

    fn try_from(doc: WorkloadDoc) -> Result<Self, Self::Error> {
        Workload::new(doc.resource_count, doc.transactions)
    }
}

/// Ordered coordinate of a scheduling subgroup.
///
/// Writing transactions land in `(group, subgroup)` where `group` buckets
/// duration by powers of two above the shortest duration and `subgroup`
/// buckets the access count by powers of two. Read-only transactions form
/// a single group that orders after every writing subgroup.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SubgroupKey {
    Writing { group: u32, subgroup: u32 },
    ReadOnly,
}

impl fmt::Display for SubgroupKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SubgroupKey::Writing { group, subgroup } => write!(f, "A({group},{subgroup})"),
            SubgroupKey::ReadOnly => write!(f, "B"),
        }
    }
}

/// Precomputed subgroup assignment for every transaction of a workload.
#[derive(Debug, Clone)]
pub struct Classification {
    keys: BTreeMap<TxnId, SubgroupKey>,
}

impl Classification {
    pub fn new(workload: &Workload) -> Self {
        let keys = workload
            .transactions()
            .iter()
            .map(|t| (t.id(), workload.classify(t)))
            .collect();
        Self { keys }
    }

    pub fn key(&self, id: TxnId) -> SubgroupKey {
        self.keys[&id]
    }

    pub fn get(&self, id: TxnId) -> Option<SubgroupKey> {
        self.keys.get(&id).copied()
    }

    /// All distinct keys present, in subgroup order.
    pub fn keys_in_order(&self) -> Vec<SubgroupKey> {
        let set: BTreeSet<SubgroupKey> = self.keys.values().copied().collect();
        set.into_iter().collect()
    }

    pub fn members(&self, key: SubgroupKey) -> Vec<TxnId> {
        self.keys
            .iter()
            .filter(|(_, k)| **k == key)
            .map(|(id, _)| *id)
            .collect()
    }
}

/// Range bounds and writer statistics of one writing subgroup.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubgroupStats {
    pub key: SubgroupKey,
    pub members: Vec<TxnId>,
    /// Lower end of the subgroup duration range: `2^group * tau_min`.
    pub tau_min_bound: u64,
    /// Upper end of the subgroup duration range: `(2^(group+1) - 1) * tau_min`.
    pub tau_max_bound: u64,
    /// Lower end of the access-count range: `2^subgroup`.
    pub lambda_min_bound: u64,
    /// Upper end of the access-count range: `2^(subgroup+1) - 1`.
    pub lambda_max_bound: u64,
    /// Largest number of subgroup members writing any single resource.
    pub gamma_max: u64,
}

/// Computes range bounds and writer stats for a writing subgroup of the
/// workload. Returns `None` for the read-only group.
pub fn subgroup_stats(workload: &Workload, key: SubgroupKey) -> Option<SubgroupStats> {
    let SubgroupKey::Writing { group, subgroup } = key else {
        return None;
    };
    let members: Vec<TxnId> = workload
        .transactions()
        .iter()
        .filter(|t| workload.classify(t) == key)
        .map(Transaction::id)
        .collect();
    let gamma_max = (0..workload.resource_count())
        .map(|r| {
            members
                .iter()
                .filter(|id| {
                    workload
                        .get(**id)
                        .is_some_and(|t| t.writes().contains(&ResourceId(r)))
                })
                .count() as u64
        })
        .max()
        .unwrap_or(0);
    let tau_min = workload.tau_min();
    Some(SubgroupStats {
        key,
        members,
        tau_min_bound: (1 << group) * tau_min,
        tau_max_bound: ((1 << (group + 1)) - 1) * tau_min,
        lambda_min_bound: 1 << subgroup,
        lambda_max_bound: (1 << (subgroup + 1)) - 1,
        gamma_max,
    })
}

/// Conflict graph: one node per transaction, one edge per conflicting
/// pair. Simple and undirected, with no self-loops.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConflictGraph {
    adj: BTreeMap<TxnId, BTreeSet<TxnId>>,
}

impl ConflictGraph {
    pub fn build(workload: &Workload) -> Self {
        let mut adj: BTreeMap<TxnId, BTreeSet<TxnId>> = workload
            .ids()
            .map(|id| (id, BTreeSet::new()))
            .collect();
        let txns = workload.transactions();
        for (i, a) in txns.iter().enumerate() {
            for b in &txns[i + 1..] {
                if a.conflicts_with(b) {
                    adj.get_mut(&a.id()).unwrap().insert(b.id());
                    adj.get_mut(&b.id()).unwrap().insert(a.id());
                }
            }
        }
        Self { adj }
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = TxnId> + '_ {
        self.adj.keys().copied()
    }

    pub fn neighbors(&self, id: TxnId) -> impl Iterator<Item = TxnId> + '_ {
        self.adj.get(&id).into_iter().flatten().copied()
    }

    pub fn degree(&self, id: TxnId) -> usize {
        self.adj.get(&id).map_or(0, BTreeSet::len)
    }

    pub fn max_degree(&self) -> usize {
        self.adj.values().map(BTreeSet::len).max().unwrap_or(0)
    }

    pub fn are_adjacent(&self, u: TxnId, v: TxnId) -> bool {
        self.adj.get(&u).is_some_and(|n| n.contains(&v))
    }

    /// Edges as `(lower id, higher id)` pairs in ascending order.
    pub fn edges(&self) -> Vec<(TxnId, TxnId)> {
        self.adj
            .iter()
            .flat_map(|(u, ns)| ns.iter().filter(|v| *u < **v).map(|v| (*u, *v)))
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.values().map(BTreeSet::len).sum::<usize>() / 2
    }
}

/// Smallest `k` with `2^k >= m`; zero for `m <= 1`.
fn ceil_log2(m: u64) -> u32 {
    if m <= 1 {
        0
    } else {
        64 - (m - 1).leading_zeros()
    }
}

/// `ceil(log2(a / b))` for positive integers, computed exactly.
fn ceil_log2_quotient(a: u64, b: u64) -> u32 {
    ceil_log2(a.div_ceil(b))
}
