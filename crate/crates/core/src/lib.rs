//! Discrete-time simulation of greedy transactional-memory contention
//! management.
//!
//! The crate provides:
//! - domain types for transactions, workloads, and conflict graphs
//!   ([`model`]);
//! - a synchronous greedy execution engine with a pluggable
//!   contention-manager policy ([`engine`]);
//! - two shipped policies: a conflict-graph-aware scheduler
//!   ([`clairvoyant`]) and a randomized conflict-graph-oblivious one
//!   ([`nonclairvoyant`]);
//! - exact ground-truth machinery: makespan lower bounds, brute-force
//!   optimal makespan, chromatic number, and the vertex-coloring
//!   reduction ([`oracle`]);
//! - a seeded workload generator ([`generator`]) and an experiment
//!   runner with CSV/JSON reporting ([`experiment`]).

pub mod clairvoyant;
pub mod engine;
pub mod experiment;
pub mod generator;
pub mod model;
pub mod nonclairvoyant;
pub mod oracle;

pub use clairvoyant::ClairvoyantPolicy;
pub use engine::{run, ContentionManager, EngineError, ExecutionTrace};
pub use model::{Classification, ConflictGraph, SubgroupKey, Transaction, TxnId, Workload};
pub use nonclairvoyant::NonClairvoyantPolicy;
