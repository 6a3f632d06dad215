//! The three agent tiers.
//!
//! Node agents sit on gates, roads and spaces and report presence. A follower
//! is spawned when a car comes in through a gate, records its path and hands a
//! visit summary to the decision agent when the car leaves. The decision agent
//! owns the specification store and answers preference queries.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use crate::formula::Formula;
use crate::graph::{IlaGraph, NodeKind};
use crate::knowledge::{EventRecord, KnowledgeError, SpecStore, VisitSummary};
use crate::tableau::{decide, default_depth, Verdict};
use crate::time::Timestamp;

pub type FollowerId = u64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Message {
    Presence(EventRecord),
    AskPreference { user: String, gate: String },
    PreferenceReply { user: String, suggestion: Option<String> },
    VisitDone(VisitSummary),
    SpawnFollower { user: String, gate: String },
    DestroyFollower(FollowerId),
}

impl Message {
    /// Tie-break rank among messages caused by the same event. A follower must
    /// exist before the presence that created it is delivered, and the visit
    /// is learned before its follower goes away.
    pub fn rank(&self) -> u8 {
        match self {
            Message::SpawnFollower { .. } => 0,
            Message::Presence(_) => 1,
            Message::AskPreference { .. } => 2,
            Message::PreferenceReply { .. } => 3,
            Message::VisitDone(_) => 4,
            Message::DestroyFollower(_) => 5,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Message::Presence(_) => "presence",
            Message::AskPreference { .. } => "ask",
            Message::PreferenceReply { .. } => "reply",
            Message::VisitDone(_) => "visit",
            Message::SpawnFollower { .. } => "spawn",
            Message::DestroyFollower(_) => "destroy",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AgentError {
    #[error("follower of '{expected}' received an event for '{got}'")]
    WrongObject { expected: String, got: String },
    #[error("follower of '{0}' is no longer active")]
    Inactive(String),
    #[error("event at {got} for '{user}' is earlier than the last observation at {last}")]
    OutOfOrder { user: String, last: Timestamp, got: Timestamp },
    #[error("'{0}' is not a gate; a car can only leave through a gate")]
    ExitAtNonGate(String),
    #[error("follower of '{0}' has observed nothing yet")]
    EmptyPath(String),
    #[error("'{0}' is not a gate supervised by the decision agent")]
    UnknownGate(String),
    #[error(transparent)]
    Knowledge(#[from] KnowledgeError),
}

/// Permanent sensor agent of one gate, road or space vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct A1State {
    pub node: String,
    pub kind: NodeKind,
}

impl A1State {
    /// Reports an identified object at this node; a gate also spawns a follower
    /// for an object that has none.
    pub fn sense(&self, object: &str, time: Timestamp, has_follower: bool) -> Vec<Message> {
        let mut out = alloc::vec![Message::Presence(EventRecord::new(object, self.node.as_str(), time))];
        if self.kind == NodeKind::Gate && !has_follower {
            out.push(Message::SpawnFollower { user: object.into(), gate: self.node.clone() });
        }
        out
    }
}

/// Per-visit follower of one car.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct A2State {
    pub id: FollowerId,
    pub user: String,
    pub path: Vec<EventRecord>,
    pub active: bool,
}

impl A2State {
    pub fn new(id: FollowerId, user: impl Into<String>) -> Self {
        A2State { id, user: user.into(), path: Vec::new(), active: true }
    }

    fn accept(&self, e: &EventRecord) -> Result<(), AgentError> {
        if !self.active {
            return Err(AgentError::Inactive(self.user.clone()));
        }
        if e.object != self.user {
            return Err(AgentError::WrongObject { expected: self.user.clone(), got: e.object.clone() });
        }
        if let Some(last) = self.path.last() {
            if e.time < last.time {
                return Err(AgentError::OutOfOrder { user: self.user.clone(), last: last.time, got: e.time });
            }
        }
        Ok(())
    }

    pub fn on_presence(&self, e: &EventRecord) -> Result<A2State, AgentError> {
        self.accept(e)?;
        let mut next = self.clone();
        next.path.push(e.clone());
        Ok(next)
    }

    /// Closes the visit at an exit gate. Returns the `VisitDone` message and the deactivated follower.
    pub fn on_exit(&self, exit: &EventRecord, graph: &IlaGraph) -> Result<(Message, A2State), AgentError> {
        self.accept(exit)?;
        if graph.base().kind_of(&exit.node) != Some(NodeKind::Gate) {
            return Err(AgentError::ExitAtNonGate(exit.node.clone()));
        }
        let Some(first) = self.path.first() else {
            return Err(AgentError::EmptyPath(self.user.clone()));
        };
        let parked = self
            .path
            .iter()
            .rev()
            .find(|e| graph.base().kind_of(&e.node) == Some(NodeKind::Space))
            .map(|e| e.node.clone());
        let mut path = self.path.clone();
        path.push(exit.clone());
        let summary = VisitSummary {
            user: self.user.clone(),
            entry_gate: first.node.clone(),
            parked,
            exit_gate: exit.node.clone(),
            path,
        };
        let mut done = self.clone();
        done.active = false;
        done.path = summary.path.clone();
        Ok((Message::VisitDone(summary), done))
    }
}

/// Outcome of a preference query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decision {
    pub suggestion: Option<String>,
    /// Formulas dropped by reconciliation before deciding.
    pub removed: Vec<Formula>,
    /// Spaces from the open branches with the count of the entry that produced them, in preference order.
    pub candidates: Vec<(String, u64)>,
}

/// The decision agent: sole owner of the specification store.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct A3State {
    pub store: SpecStore,
    pub gates: BTreeSet<String>,
    /// Tableau depth bound; `None` uses the per-formula default.
    pub depth: Option<usize>,
}

impl A3State {
    pub fn new(store: SpecStore, gates: BTreeSet<String>) -> Self {
        A3State { store, gates, depth: None }
    }

    /// Answers "which space should `user`, now at `gate`, be offered?".
    ///
    /// Contradicting entries are reconciled away first. The learned
    /// implications for this gate are disjoined and conjoined with the gate
    /// atom; each open branch of that tree names one space. Spaces are then
    /// ranked by the count of their entry and the first free one is offered.
    pub fn on_ask(&self, user: &str, gate: &str, free: &BTreeSet<String>) -> Result<(A3State, Decision), AgentError> {
        if !self.gates.contains(gate) {
            return Err(AgentError::UnknownGate(gate.into()));
        }
        let (store, removed) = self.store.reconcile(user, gate, self.depth)?;
        let next = A3State { store, gates: self.gates.clone(), depth: self.depth };
        let entries = next.store.entries_for(user, gate);
        let mut disjuncts = entries.iter().map(|e| e.formula.clone()).rev();
        let Some(last) = disjuncts.next() else {
            return Ok((next, Decision { suggestion: None, removed, candidates: Vec::new() }));
        };
        let choice = disjuncts.fold(last, |acc, f| Formula::or(f, acc));
        let query = Formula::and(Formula::atom(gate), choice);
        let bound = self.depth.unwrap_or_else(|| default_depth(&query));
        let result = decide(&query, bound).map_err(KnowledgeError::from)?;

        let mut spaces: BTreeSet<&str> = BTreeSet::new();
        if result.verdict == Verdict::Sat {
            for targets in &result.fulfilled_targets {
                spaces.extend(targets.iter().map(String::as_str));
            }
        }
        let mut candidates: Vec<(String, u64)> = entries
            .iter()
            .filter_map(|e| {
                let (_, space) = e.formula.as_preference()?;
                spaces.contains(space).then(|| (space.into(), e.count))
            })
            .collect();
        candidates.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        let suggestion = candidates.iter().find(|(space, _)| free.contains(space)).map(|(s, _)| s.clone());
        Ok((next, Decision { suggestion, removed, candidates }))
    }

    pub fn on_visit(&self, visit: &VisitSummary) -> Result<A3State, AgentError> {
        let store = self.store.record_visit(visit, &self.gates)?;
        Ok(A3State { store, gates: self.gates.clone(), depth: self.depth })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Topology;
    use alloc::string::ToString;
    use alloc::vec;

    fn ts(sec: u64) -> Timestamp {
        "t2014.01.28.09.30.15".parse::<Timestamp>().unwrap().plus_seconds(sec).unwrap()
    }

    fn parking() -> IlaGraph {
        let mut nodes = vec![];
        for g in ["g1", "g2", "g3"] {
            nodes.push((NodeKind::Gate, g.to_string()));
        }
        nodes.push((NodeKind::Road, "r1".to_string()));
        for p in ["p010", "p015", "p018"] {
            nodes.push((NodeKind::Space, p.to_string()));
        }
        IlaGraph::build_parking(&Topology { nodes, edges: vec![] }).unwrap()
    }

    fn seeded_store() -> SpecStore {
        let mut s = SpecStore::new();
        s.add("idOla91", Formula::preference("g2", "p018"), 7).unwrap();
        s.add("idOla91", Formula::preference("g2", "p015"), 2).unwrap();
        s
    }

    fn set(xs: &[&str]) -> BTreeSet<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn a1_reports_and_spawns_at_gates() {
        let space = A1State { node: "p018".into(), kind: NodeKind::Space };
        assert_eq!(
            space.sense("idOla91", ts(0), false),
            vec![Message::Presence(EventRecord::new("idOla91", "p018", ts(0)))]
        );
        let gate = A1State { node: "g2".into(), kind: NodeKind::Gate };
        let out = gate.sense("idOla91", ts(0), false);
        assert_eq!(out.len(), 2);
        assert_eq!(out[1], Message::SpawnFollower { user: "idOla91".into(), gate: "g2".into() });
        assert_eq!(gate.sense("idOla91", ts(0), true).len(), 1);
    }

    #[test]
    fn follower_path_and_exit() {
        let g = parking();
        let f = A2State::new(1, "idOla91");
        let f = f.on_presence(&EventRecord::new("idOla91", "g2", ts(0))).unwrap();
        let f = f.on_presence(&EventRecord::new("idOla91", "r1", ts(10))).unwrap();
        let f = f.on_presence(&EventRecord::new("idOla91", "p018", ts(20))).unwrap();
        assert_eq!(f.path.iter().map(|e| e.node.as_str()).collect::<Vec<_>>(), ["g2", "r1", "p018"]);
        assert!(matches!(
            f.on_presence(&EventRecord::new("idOla91", "r1", ts(5))),
            Err(AgentError::OutOfOrder { .. })
        ));
        assert!(matches!(f.on_presence(&EventRecord::new("x", "r1", ts(50))), Err(AgentError::WrongObject { .. })));

        let (msg, dead) = f.on_exit(&EventRecord::new("idOla91", "g2", ts(30)), &g).unwrap();
        assert!(!dead.active);
        let Message::VisitDone(v) = msg else { panic!("expected VisitDone") };
        assert_eq!((v.entry_gate.as_str(), v.parked.as_deref(), v.exit_gate.as_str()), ("g2", Some("p018"), "g2"));
        assert_eq!(v.path.len(), 4);
        assert!(matches!(dead.on_presence(&EventRecord::new("idOla91", "g2", ts(40))), Err(AgentError::Inactive(_))));

        let through = A2State::new(2, "c").on_presence(&EventRecord::new("c", "g1", ts(0))).unwrap();
        let (Message::VisitDone(v), _) = through.on_exit(&EventRecord::new("c", "g3", ts(9)), &g).unwrap() else {
            panic!()
        };
        assert_eq!(v.parked, None);
        assert_eq!(
            through.on_exit(&EventRecord::new("c", "p010", ts(9)), &g),
            Err(AgentError::ExitAtNonGate("p010".into()))
        );
        assert_eq!(
            A2State::new(3, "c").on_exit(&EventRecord::new("c", "g1", ts(9)), &g),
            Err(AgentError::EmptyPath("c".into()))
        );
    }

    #[test]
    fn three_way_decision() {
        let a3 = A3State::new(seeded_store(), set(&["g1", "g2", "g3"]));
        let ask = |free: &[&str]| a3.on_ask("idOla91", "g2", &set(free)).unwrap().1;

        let d = ask(&["p010", "p015", "p018"]);
        assert_eq!(d.suggestion.as_deref(), Some("p018"));
        assert_eq!(d.candidates, vec![("p018".into(), 7), ("p015".into(), 2)]);
        assert_eq!(ask(&["p015"]).suggestion.as_deref(), Some("p015"));
        assert_eq!(ask(&["p010"]).suggestion, None);
        assert_eq!(a3.on_ask("nobody", "g2", &set(&["p018"])).unwrap().1.suggestion, None);
        assert_eq!(a3.on_ask("idOla91", "r1", &set(&[])).unwrap_err(), AgentError::UnknownGate("r1".into()));
    }

    #[test]
    fn ask_reconciles_first() {
        let mut s = seeded_store();
        s.add("idOla91", Formula::never("g3"), 5).unwrap();
        let a3 = A3State::new(s, set(&["g1", "g2", "g3"]));
        let (next, d) = a3.on_ask("idOla91", "g3", &set(&["p018"])).unwrap();
        assert_eq!(d.removed, vec![Formula::never("g3")]);
        assert_eq!(d.suggestion, None);
        assert_eq!(next.store.len(), 2);
    }
}
