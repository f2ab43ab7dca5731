//! The global write history: per-location, totally ordered logs of writes
//! indexed by contiguous timestamps starting at zero.

use std::collections::BTreeMap;

use crate::lang::ast::{Loc, Tau, Value};
use crate::state::Front;

/// One write in the history: the stored value and the synchronization front
/// it publishes (bottom for non-atomic and otherwise unsynchronized writes).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HistEntry {
    pub value: Value,
    pub front: Front,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct History(BTreeMap<Loc, Vec<HistEntry>>);

impl History {
    pub fn new() -> Self {
        History(BTreeMap::new())
    }

    pub fn get(&self, loc: &Loc, tau: Tau) -> Option<&HistEntry> {
        self.0.get(loc).and_then(|v| v.get(tau as usize))
    }

    /// Greatest defined timestamp for `loc`, if any.
    pub fn last_tau(&self, loc: &Loc) -> Option<Tau> {
        self.0
            .get(loc)
            .filter(|v| !v.is_empty())
            .map(|v| (v.len() - 1) as Tau)
    }

    /// `last_tau + 1`, or 0 when `loc` has no entries.
    pub fn next_tau(&self, loc: &Loc) -> Tau {
        self.0.get(loc).map_or(0, |v| v.len() as Tau)
    }

    /// Appends an entry at `next_tau(loc)` and returns its timestamp.
    pub fn append(&mut self, loc: &Loc, entry: HistEntry) -> Tau {
        let entries = self.0.entry(loc.clone()).or_default();
        entries.push(entry);
        (entries.len() - 1) as Tau
    }

    /// Joins `extra` into the stored front of `(loc, tau)`. Used when a
    /// resolved postponed write brings an already published entry up to date.
    pub fn join_front(&mut self, loc: &Loc, tau: Tau, extra: &Front) {
        if let Some(entries) = self.0.get_mut(loc) {
            if let Some(e) = entries.get_mut(tau as usize) {
                e.front = e.front.join(extra);
            }
        }
    }

    pub fn entries(&self, loc: &Loc) -> &[HistEntry] {
        self.0.get(loc).map_or(&[], |v| v.as_slice())
    }

    pub fn locations(&self) -> impl Iterator<Item = &Loc> {
        self.0.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Loc, &Vec<HistEntry>)> {
        self.0.iter()
    }
}
