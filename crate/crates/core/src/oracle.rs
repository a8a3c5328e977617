//! Ground-truth machinery: serialization lower bounds, exact brute-force
//! optimal makespan, exact chromatic number, and the reduction between
//! vertex coloring and transaction scheduling.
//!
//! The exact searches are exponential and refuse instances above a
//! caller-supplied size limit ([`DEFAULT_ORACLE_LIMIT`] is sized for
//! sub-minute desk runs).

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::model::{ModelError, ResourceId, Transaction, TxnId, Workload};

/// Default size cap for the exponential searches.
pub const DEFAULT_ORACLE_LIMIT: usize = 10;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("exact search refused: {count} transactions exceed the limit of {limit}")]
    TooManyTransactions { count: usize, limit: usize },
    #[error("exact search refused: {count} vertices exceed the limit of {limit}")]
    TooManyVertices { count: u32, limit: usize },
    #[error("the reduction requires a graph with at least one edge")]
    EdgelessGraph,
    #[error("transaction {id} has duration {duration}; the coloring view needs unit durations")]
    NonUnitDuration { id: TxnId, duration: u64 },
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("graph parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Simple undirected graph on vertices `0..vertex_count`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UndirectedGraph {
    vertex_count: u32,
    edges: BTreeSet<(u32, u32)>,
}

impl UndirectedGraph {
    pub fn new(
        vertex_count: u32,
        edges: impl IntoIterator<Item = (u32, u32)>,
    ) -> Result<Self, OracleError> {
        let mut normalized = BTreeSet::new();
        for (u, v) in edges {
            if u == v {
                return Err(OracleError::InvalidGraph(format!("self-loop at vertex {u}")));
            }
            if u >= vertex_count || v >= vertex_count {
                return Err(OracleError::InvalidGraph(format!(
                    "edge ({u}, {v}) out of range for {vertex_count} vertices"
                )));
            }
            normalized.insert((u.min(v), u.max(v)));
        }
        Ok(Self {
            vertex_count,
            edges: normalized,
        })
    }

    pub fn vertex_count(&self) -> u32 {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.edges.iter().copied()
    }

    pub fn are_adjacent(&self, u: u32, v: u32) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }

    pub fn degree(&self, v: u32) -> usize {
        self.edges
            .iter()
            .filter(|(a, b)| *a == v || *b == v)
            .count()
    }

    /// Parses the edge-list text format: a `p <vertices> <edges>` header
    /// followed by one `e <u> <v>` line per edge, 0-indexed. Blank lines
    /// and `c` comment lines are skipped.
    pub fn parse(text: &str) -> Result<Self, OracleError> {
        let mut header: Option<(u32, usize)> = None;
        let mut edges = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('c') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let tag = parts.next().unwrap();
            let fields: Vec<&str> = parts.collect();
            match tag {
                "p" => {
                    if header.is_some() {
                        return Err(OracleError::Parse(format!(
                            "line {}: duplicate p line",
                            lineno + 1
                        )));
                    }
                    if fields.len() != 2 {
                        return Err(OracleError::Parse(format!(
                            "line {}: expected `p <vertices> <edges>`",
                            lineno + 1
                        )));
                    }
                    let v = fields[0].parse().map_err(|_| {
                        OracleError::Parse(format!("line {}: bad vertex count", lineno + 1))
                    })?;
                    let e = fields[1].parse().map_err(|_| {
                        OracleError::Parse(format!("line {}: bad edge count", lineno + 1))
                    })?;
                    header = Some((v, e));
                }
                "e" => {
                    if header.is_none() {
                        return Err(OracleError::Parse(format!(
                            "line {}: edge before p line",
                            lineno + 1
                        )));
                    }
                    if fields.len() != 2 {
                        return Err(OracleError::Parse(format!(
                            "line {}: expected `e <u> <v>`",
                            lineno + 1
                        )));
                    }
                    let u = fields[0].parse().map_err(|_| {
                        OracleError::Parse(format!("line {}: bad endpoint", lineno + 1))
                    })?;
                    let v = fields[1].parse().map_err(|_| {
                        OracleError::Parse(format!("line {}: bad endpoint", lineno + 1))
                    })?;
                    edges.push((u, v));
                }
                _ => {
                    return Err(OracleError::Parse(format!(
                        "line {}: unknown record `{tag}`",
                        lineno + 1
                    )))
                }
            }
        }
        let Some((vertex_count, declared)) = header else {
            return Err(OracleError::Parse("missing p line".into()));
        };
        if edges.len() != declared {
            return Err(OracleError::Parse(format!(
                "p line declares {declared} edges but {} were listed",
                edges.len()
            )));
        }
        Self::new(vertex_count, edges)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("p {} {}\n", self.vertex_count, self.edges.len());
        for (u, v) in &self.edges {
            out.push_str(&format!("e {u} {v}\n"));
        }
        out
    }
}

impl fmt::Display for UndirectedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Certified lower bounds on the optimal makespan of a workload.
///
/// Writers of a common resource conflict pairwise and must serialize,
/// which yields the first two bounds; the longest transaction yields the
/// third. `best` is the strongest of the three.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LowerBoundReport {
    /// `gamma_max * tau_min`: the most-written resource serializes that
    /// many transactions, each at least the shortest duration.
    pub writer_count_bound: u64,
    /// Max over resources of the total duration of its writers.
    pub writer_serialization_bound: u64,
    /// Duration of the longest transaction.
    pub longest_duration_bound: u64,
    pub best: u64,
}

pub fn lower_bound(workload: &Workload) -> LowerBoundReport {
    let writer_count_bound = workload.gamma_max() * workload.tau_min();
    let writer_serialization_bound = (0..workload.resource_count())
        .map(|r| {
            workload
                .transactions()
                .iter()
                .filter(|t| t.writes().contains(&ResourceId(r)))
                .map(Transaction::duration)
                .sum::<u64>()
        })
        .max()
        .unwrap_or(0);
    let longest_duration_bound = workload.tau_max();
    let best = writer_count_bound
        .max(writer_serialization_bound)
        .max(longest_duration_bound);
    LowerBoundReport {
        writer_count_bound,
        writer_serialization_bound,
        longest_duration_bound,
        best,
    }
}

/// Exact minimum makespan over all start-time assignments in which
/// conflicting transactions get disjoint execution intervals.
///
/// Branch and bound over transactions in descending duration order
/// (ties by ascending id), pruned by the incumbent and the certified
/// lower bound. Exponential: refuses workloads above `limit`.
pub fn optimal_makespan(workload: &Workload, limit: usize) -> Result<u64, OracleError> {
    if workload.len() > limit {
        return Err(OracleError::TooManyTransactions {
            count: workload.len(),
            limit,
        });
    }

    let mut order: Vec<&Transaction> = workload.transactions().iter().collect();
    order.sort_by(|a, b| {
        b.duration()
            .cmp(&a.duration())
            .then(a.id().cmp(&b.id()))
    });
    let n = order.len();
    let durations: Vec<u64> = order.iter().map(|t| t.duration()).collect();
    let conflict: Vec<Vec<bool>> = order
        .iter()
        .map(|a| {
            order
                .iter()
                .map(|b| a.id() != b.id() && a.conflicts_with(b))
                .collect()
        })
        .collect();

    // Serializing everything is always feasible.
    let total: u64 = durations.iter().sum();
    let floor = lower_bound(workload).best;

    struct Search {
        durations: Vec<u64>,
        conflict: Vec<Vec<bool>>,
        starts: Vec<u64>,
        best: u64,
        floor: u64,
    }

    impl Search {
        fn descend(&mut self, depth: usize, makespan_so_far: u64) {
            if self.best == self.floor {
                return;
            }
            if depth == self.starts.len() {
                self.best = self.best.min(makespan_so_far);
                return;
            }
            let duration = self.durations[depth];
            // Only starts that beat the incumbent are worth exploring.
            let Some(cap) = self.best.checked_sub(duration + 1) else {
                return;
            };
            'starts: for start in 0..=cap {
                let end = start + duration;
                for earlier in 0..depth {
                    if self.conflict[depth][earlier] {
                        let (s, e) = (
                            self.starts[earlier],
                            self.starts[earlier] + self.durations[earlier],
                        );
                        if start < e && s < end {
                            continue 'starts;
                        }
                    }
                }
                self.starts[depth] = start;
                self.descend(depth + 1, makespan_so_far.max(end));
                if self.best == self.floor {
                    return;
                }
            }
        }
    }

    if total == floor {
        return Ok(floor);
    }
    let mut search = Search {
        durations,
        conflict,
        starts: vec![0; n],
        best: total,
        floor,
    };
    search.descend(0, 0);
    Ok(search.best)
}

/// Exact chromatic number by backtracking k-colorability checks for
/// `k = <greedy clique bound> ..= n`. Refuses graphs above `limit`.
pub fn chromatic_number(graph: &UndirectedGraph, limit: usize) -> Result<u32, OracleError> {
    let n = graph.vertex_count();
    if n as usize > limit {
        return Err(OracleError::TooManyVertices { count: n, limit });
    }
    if n == 0 {
        return Ok(0);
    }
    if graph.edge_count() == 0 {
        return Ok(1);
    }

    // Vertices by descending degree; helps both the clique seed and the
    // backtracking order.
    let mut order: Vec<u32> = (0..n).collect();
    order.sort_by_key(|v| std::cmp::Reverse(graph.degree(*v)));

    let mut clique: Vec<u32> = Vec::new();
    for &v in &order {
        if clique.iter().all(|c| graph.are_adjacent(*c, v)) {
            clique.push(v);
        }
    }

    for k in clique.len() as u32..=n {
        if k_colorable(graph, &order, k) {
            return Ok(k);
        }
    }
    unreachable!("every graph on n vertices is n-colorable")
}

fn k_colorable(graph: &UndirectedGraph, order: &[u32], k: u32) -> bool {
    fn go(graph: &UndirectedGraph, order: &[u32], k: u32, colors: &mut [Option<u32>], idx: usize, max_used: u32) -> bool {
        if idx == order.len() {
            return true;
        }
        let v = order[idx];
        // Allowing only one fresh color breaks color-permutation symmetry.
        let limit = k.min(max_used + 1);
        'colors: for c in 0..limit {
            for (i, &u) in order.iter().enumerate().take(idx) {
                if colors[i] == Some(c) && graph.are_adjacent(u, v) {
                    continue 'colors;
                }
            }
            colors[idx] = Some(c);
            if go(graph, order, k, colors, idx + 1, max_used.max(c + 1)) {
                return true;
            }
            colors[idx] = None;
        }
        false
    }
    let mut colors = vec![None; order.len()];
    go(graph, order, k, &mut colors, 0, 0)
}

/// Builds a scheduling instance whose optimal makespan equals the
/// graph's chromatic number: one unit-duration transaction per vertex,
/// one resource per edge, written by both endpoints. A vertex with no
/// incident edge gets a private resource to write so that every
/// transaction accesses something; such resources are never shared and
/// add no conflicts.
///
/// The resulting workload is all-writes (global balancing ratio 1) with
/// equal durations, and its conflict graph is isomorphic to the input.
pub fn reduce_coloring_to_scheduling(graph: &UndirectedGraph) -> Result<Workload, OracleError> {
    if graph.edge_count() == 0 {
        return Err(OracleError::EdgelessGraph);
    }
    let edges: Vec<(u32, u32)> = graph.edges().collect();
    let mut writes: Vec<Vec<ResourceId>> = vec![Vec::new(); graph.vertex_count() as usize];
    for (index, (u, v)) in edges.iter().enumerate() {
        writes[*u as usize].push(ResourceId(index as u32));
        writes[*v as usize].push(ResourceId(index as u32));
    }
    let mut resource_count = edges.len() as u32;
    for w in writes.iter_mut() {
        if w.is_empty() {
            w.push(ResourceId(resource_count));
            resource_count += 1;
        }
    }
    let transactions = writes
        .into_iter()
        .enumerate()
        .map(|(v, writes)| Transaction::new(TxnId(v as u32), 1, [], writes))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Workload::new(resource_count, transactions)?)
}

/// The coloring view of a unit-duration workload: its conflict graph,
/// with vertex `i` standing for the `i`-th transaction in workload
/// order. Its chromatic number equals the workload's optimal makespan.
pub fn reduce_scheduling_to_coloring(workload: &Workload) -> Result<UndirectedGraph, OracleError> {
    for t in workload.transactions() {
        if t.duration() != 1 {
            return Err(OracleError::NonUnitDuration {
                id: t.id(),
                duration: t.duration(),
            });
        }
    }
    let txns = workload.transactions();
    let mut edges = Vec::new();
    for (i, a) in txns.iter().enumerate() {
        for (j, b) in txns.iter().enumerate().skip(i + 1) {
            if a.conflicts_with(b) {
                edges.push((i as u32, j as u32));
            }
        }
    }
    UndirectedGraph::new(txns.len() as u32, edges)
}
