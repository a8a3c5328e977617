//! Conflict-graph-oblivious randomized contention manager.
//!
//! Subgroup order always decides conflicts across subgroups. Within a
//! subgroup each transaction carries a random priority number in `[1, n]`,
//! redrawn from a seeded generator on every (re)start; the smaller number
//! wins, ties favoring the higher id of the offered pair. A transaction
//! that lost to a winner by random priority cannot abort that winner
//! until the winner commits or is itself aborted.
//!
//! Conflicts reach this policy only through `resolve` callbacks; it never
//! reads the conflict graph.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::engine::{ContentionManager, PolicyViolation, Step, StepView};
use crate::model::{Classification, TxnId, Workload};

/// Random priorities in effect after the redraws of one step, recorded
/// when dumping is enabled.
#[derive(Debug, Clone, Serialize)]
pub struct PrioritySample {
    pub step: Step,
    /// `(transaction, priority)` pairs for every pending transaction.
    pub values: Vec<(TxnId, u64)>,
}

pub struct NonClairvoyantPolicy {
    classification: Classification,
    population: u64,
    rng: ChaCha8Rng,
    priorities: BTreeMap<TxnId, u64>,
    /// Directed `(loser, winner)` pairs: the loser may not abort the
    /// winner while the winner stays pending.
    blocked: BTreeSet<(TxnId, TxnId)>,
    log: Option<Vec<PrioritySample>>,
}

impl NonClairvoyantPolicy {
    pub fn new(workload: &Workload, seed: u64) -> Self {
        Self {
            classification: Classification::new(workload),
            population: workload.len() as u64,
            rng: ChaCha8Rng::seed_from_u64(seed),
            priorities: BTreeMap::new(),
            blocked: BTreeSet::new(),
            log: None,
        }
    }

    /// Enables per-step recording of the random priorities.
    pub fn with_priority_log(workload: &Workload, seed: u64) -> Self {
        let mut policy = Self::new(workload, seed);
        policy.log = Some(Vec::new());
        policy
    }

    pub fn priority_log(&self) -> &[PrioritySample] {
        self.log.as_deref().unwrap_or(&[])
    }

    fn redraw(&mut self, id: TxnId) -> u64 {
        let value = self.rng.gen_range(1..=self.population);
        self.priorities.insert(id, value);
        value
    }
}

impl ContentionManager for NonClairvoyantPolicy {
    fn name(&self) -> &'static str {
        "non-clairvoyant"
    }

    fn begin_step(&mut self, step: Step, view: &StepView<'_>) {
        // Redraws happen in ascending id order so runs are reproducible.
        for &id in view.restarted {
            self.redraw(id);
        }
        if let Some(log) = &mut self.log {
            log.push(PrioritySample {
                step,
                values: self.priorities.iter().map(|(id, r)| (*id, *r)).collect(),
            });
        }
    }

    fn resolve(
        &mut self,
        _step: Step,
        first: TxnId,
        second: TxnId,
    ) -> Result<TxnId, PolicyViolation> {
        let key_first = self.classification.key(first);
        let key_second = self.classification.key(second);
        if key_first < key_second {
            return Ok(first);
        }
        if key_second < key_first {
            return Ok(second);
        }
        debug_assert!(
            !(self.blocked.contains(&(first, second)) && self.blocked.contains(&(second, first)))
        );
        if self.blocked.contains(&(first, second)) {
            return Ok(second);
        }
        if self.blocked.contains(&(second, first)) {
            return Ok(first);
        }
        let r_first = self.priorities[&first];
        let r_second = self.priorities[&second];
        Ok(if r_first < r_second { first } else { second })
    }

    fn notify_abort(&mut self, _step: Step, loser: TxnId, winner: TxnId) {
        // The loser was just aborted, so anyone blocked on it is freed.
        self.blocked.retain(|(_, w)| *w != loser);
        if self.classification.key(loser) == self.classification.key(winner) {
            self.blocked.insert((loser, winner));
        }
    }

    fn notify_commit(&mut self, _step: Step, id: TxnId) {
        self.blocked.retain(|(l, w)| *l != id && *w != id);
        self.priorities.remove(&id);
    }
}
