//! Presence events and the per-user logical specification.
//!
//! The specification is a set of triples `(user, formula, count)`. Counts rank
//! alternatives when a decision is made; they never enter the inference.
//!
//! Visits are translated into formulas as follows:
//!
//! - a visit that ends parked in space `p` after entering through gate `g`
//!   contributes one occurrence of `g -> F p`;
//! - every gate the user has never entered is described by `G ~g`, whose count
//!   is the number of visits that avoided it;
//! - once a gate is used, its `G ~g` entry is dropped for good.
//!
//! "Never entered" is read off the store itself: for a user the store has
//! never seen, every gate outside the current visit qualifies; for a known
//! user it is exactly the gates that still carry a `G ~g` entry. A user stays
//! known after reconciliation drops their last entry.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::formula::Formula;
use crate::tableau::{decide, default_depth, TableauError, Verdict};
use crate::time::Timestamp;

/// Presence of an object at a vertex at an instant.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EventRecord {
    pub object: String,
    pub node: String,
    pub time: Timestamp,
}

impl EventRecord {
    pub fn new(object: impl Into<String>, node: impl Into<String>, time: Timestamp) -> Self {
        EventRecord { object: object.into(), node: node.into(), time }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecEntry {
    pub id: String,
    pub formula: Formula,
    /// Number of observations behind this formula; always positive.
    pub count: u64,
}

/// A completed visit as reported by a follower agent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VisitSummary {
    pub user: String,
    pub entry_gate: String,
    pub parked: Option<String>,
    pub exit_gate: String,
    pub path: Vec<EventRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KnowledgeError {
    #[error("malformed visit: {0}")]
    MalformedVisit(&'static str),
    #[error("'{0}' is not a gate")]
    UnknownGate(String),
    #[error("occurrence count must be positive")]
    ZeroCount,
    #[error(transparent)]
    Tableau(#[from] TableauError),
}

/// The set of specification triples, unique per `(user, nnf(formula))`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SpecStore {
    entries: BTreeMap<(String, Formula), SpecEntry>,
    known: BTreeSet<String>,
}

impl SpecStore {
    pub fn new() -> Self {
        SpecStore::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// All entries, grouped by user.
    pub fn entries(&self) -> impl Iterator<Item = &SpecEntry> + '_ {
        self.entries.values()
    }

    pub fn entries_of<'a>(&'a self, user: &'a str) -> impl Iterator<Item = &'a SpecEntry> + 'a {
        self.entries.values().filter(move |e| e.id == user)
    }

    /// Whether `user` ever had an entry in this store.
    pub fn has_user(&self, user: &str) -> bool {
        self.known.contains(user)
    }

    /// Users that currently have entries.
    pub fn users(&self) -> BTreeSet<String> {
        self.entries.values().map(|e| e.id.clone()).collect()
    }

    /// Looks up the entry for a formula up to normal form.
    pub fn get(&self, user: &str, formula: &Formula) -> Option<&SpecEntry> {
        self.entries.get(&(user.to_string(), formula.nnf()))
    }

    /// Adds `count` occurrences of `formula` for `user`, merging with an existing entry.
    pub fn add(&mut self, user: &str, formula: Formula, count: u64) -> Result<(), KnowledgeError> {
        if count == 0 {
            return Err(KnowledgeError::ZeroCount);
        }
        let key = (user.to_string(), formula.nnf());
        self.known.insert(user.to_string());
        self.entries
            .entry(key)
            .and_modify(|e| e.count += count)
            .or_insert_with(|| SpecEntry { id: user.to_string(), formula, count });
        Ok(())
    }

    pub fn remove(&mut self, user: &str, formula: &Formula) -> Option<SpecEntry> {
        self.entries.remove(&(user.to_string(), formula.nnf()))
    }

    /// Learns from one completed visit.
    pub fn record_visit(&self, visit: &VisitSummary, all_gates: &BTreeSet<String>) -> Result<SpecStore, KnowledgeError> {
        validate_visit(visit)?;
        for gate in [&visit.entry_gate, &visit.exit_gate] {
            if !all_gates.contains(gate) {
                return Err(KnowledgeError::UnknownGate(gate.clone()));
            }
        }
        let user = visit.user.as_str();
        let known = self.has_user(user);
        let mut next = self.clone();
        if let Some(space) = &visit.parked {
            next.add(user, Formula::preference(&visit.entry_gate, space), 1)?;
        }
        let used: BTreeSet<&String> = visit.path.iter().map(|e| &e.node).filter(|n| all_gates.contains(*n)).collect();
        for gate in all_gates {
            let never = Formula::never(gate);
            if used.contains(gate) {
                next.remove(user, &never);
            } else if !known || self.get(user, &never).is_some() {
                next.add(user, never, 1)?;
            }
        }
        Ok(next)
    }

    /// Drops every entry of `user` that contradicts the user being at `gate`
    /// now, i.e. whose conjunction with the gate atom has a closed tree.
    pub fn reconcile(&self, user: &str, gate: &str, depth: Option<usize>) -> Result<(SpecStore, Vec<Formula>), KnowledgeError> {
        let mut next = self.clone();
        let mut removed = Vec::new();
        for entry in self.entries_of(user) {
            let probe = Formula::and(entry.formula.clone(), Formula::atom(gate));
            let bound = depth.unwrap_or_else(|| default_depth(&probe));
            if decide(&probe, bound)?.verdict == Verdict::Unsat {
                next.remove(user, &entry.formula);
                removed.push(entry.formula.clone());
            }
        }
        Ok((next, removed))
    }

    /// Preference entries `gate -> F space` of `user`, most frequent first, then by space label.
    pub fn entries_for(&self, user: &str, gate: &str) -> Vec<SpecEntry> {
        let mut found: Vec<(&str, &SpecEntry)> = self
            .entries_of(user)
            .filter_map(|e| match e.formula.as_preference() {
                Some((g, space)) if g == gate => Some((space, e)),
                _ => None,
            })
            .collect();
        found.sort_by(|a, b| b.1.count.cmp(&a.1.count).then_with(|| a.0.cmp(b.0)));
        found.into_iter().map(|(_, e)| e.clone()).collect()
    }
}

fn validate_visit(v: &VisitSummary) -> Result<(), KnowledgeError> {
    let (Some(first), Some(last)) = (v.path.first(), v.path.last()) else {
        return Err(KnowledgeError::MalformedVisit("empty path"));
    };
    if first.node != v.entry_gate {
        return Err(KnowledgeError::MalformedVisit("path does not start at the entry gate"));
    }
    if last.node != v.exit_gate {
        return Err(KnowledgeError::MalformedVisit("path does not end at the exit gate"));
    }
    if v.path.iter().any(|e| e.object != v.user) {
        return Err(KnowledgeError::MalformedVisit("path mixes objects"));
    }
    if v.path.windows(2).any(|w| w[1].time < w[0].time) {
        return Err(KnowledgeError::MalformedVisit("path timestamps decrease"));
    }
    if let Some(space) = &v.parked {
        if !v.path.iter().any(|e| &e.node == space) {
            return Err(KnowledgeError::MalformedVisit("parked space is not on the path"));
        }
    }
    Ok(())
}
