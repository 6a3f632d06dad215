//! Deterministic dispatcher driving the agents from a presence trace.
//!
//! Messages are delivered in `(timestamp, node, object, kind)` order. Each
//! trace record is handed to the node agent of its vertex and the queue is
//! drained before the next record is sensed. The dispatcher owns all agent
//! state and the world graph.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::agents::{A1State, A2State, A3State, AgentError, FollowerId, Message};
use crate::formula::Formula;
use crate::graph::{GraphError, IlaGraph, NodeKind};
use crate::knowledge::{EventRecord, SpecStore};
use crate::time::Timestamp;

/// One line of a presence trace.
pub type TraceRecord = EventRecord;

/// A message together with the event that caused it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Envelope {
    pub time: Timestamp,
    pub node: String,
    pub object: String,
    pub message: Message,
}

/// One preference decision, taken when a car came in through a gate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecisionLogEntry {
    pub time: Timestamp,
    pub user: String,
    pub gate: String,
    pub suggestion: Option<String>,
    pub removed: Vec<Formula>,
    pub candidates: Vec<(String, u64)>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RuntimeError {
    #[error("{time}: '{node}' is not a vertex of the car park")]
    UnknownNode { time: Timestamp, node: String },
    #[error("{time}: '{object}' seen at '{node}' without having entered through a gate")]
    Untracked { time: Timestamp, object: String, node: String },
    #[error("{time}: {source}")]
    Agent { time: Timestamp, source: AgentError },
    #[error("{time}: {source}")]
    Graph { time: Timestamp, source: GraphError },
}

type QueueKey = (Timestamp, String, String, u8, u64);

pub struct Runtime {
    graph: IlaGraph,
    sensors: BTreeMap<String, A1State>,
    followers: BTreeMap<String, A2State>,
    next_follower: FollowerId,
    decider: A3State,
    queue: BTreeMap<QueueKey, Message>,
    seq: u64,
    log: Vec<DecisionLogEntry>,
    delivered: Vec<Envelope>,
    entered: usize,
    exited: usize,
}

impl Runtime {
    /// Sets up one node agent per gate, road and space, and the decision agent over `store`.
    pub fn new(graph: IlaGraph, store: SpecStore, depth: Option<usize>) -> Self {
        let base = graph.base();
        let sensors = base
            .vertices()
            .filter_map(|v| {
                let kind = base.kind(v)?;
                (kind != NodeKind::Car).then(|| {
                    let node = base.label(v).unwrap_or_default().to_string();
                    (node.clone(), A1State { node, kind })
                })
            })
            .collect();
        let mut decider = A3State::new(store, graph.gates());
        decider.depth = depth;
        Runtime {
            graph,
            sensors,
            followers: BTreeMap::new(),
            next_follower: 1,
            decider,
            queue: BTreeMap::new(),
            seq: 0,
            log: Vec::new(),
            delivered: Vec::new(),
            entered: 0,
            exited: 0,
        }
    }

    pub fn graph(&self) -> &IlaGraph {
        &self.graph
    }

    pub fn store(&self) -> &SpecStore {
        &self.decider.store
    }

    pub fn log(&self) -> &[DecisionLogEntry] {
        &self.log
    }

    /// Every message delivered so far, in delivery order.
    pub fn delivered(&self) -> &[Envelope] {
        &self.delivered
    }

    pub fn followers(&self) -> impl Iterator<Item = &A2State> + '_ {
        self.followers.values()
    }

    pub fn entered(&self) -> usize {
        self.entered
    }

    pub fn exited(&self) -> usize {
        self.exited
    }

    /// Replays a trace: records are sorted into dispatcher order and fed one at a time.
    pub fn run(&mut self, trace: &[TraceRecord]) -> Result<(), RuntimeError> {
        let mut sorted: Vec<&TraceRecord> = trace.iter().collect();
        sorted.sort_by(|a, b| (a.time, &a.node, &a.object).cmp(&(b.time, &b.node, &b.object)));
        for record in sorted {
            self.sense(record)?;
            self.drain()?;
        }
        Ok(())
    }

    /// Hands a record to the node agent of its vertex.
    pub fn sense(&mut self, record: &TraceRecord) -> Result<(), RuntimeError> {
        let sensor = self.sensors.get(&record.node).ok_or_else(|| RuntimeError::UnknownNode {
            time: record.time,
            node: record.node.clone(),
        })?;
        let has_follower = self.followers.contains_key(&record.object);
        for message in sensor.sense(&record.object, record.time, has_follower) {
            self.post(record.time, &record.node, &record.object, message);
        }
        Ok(())
    }

    fn post(&mut self, time: Timestamp, node: &str, object: &str, message: Message) {
        self.seq += 1;
        self.queue.insert((time, node.to_string(), object.to_string(), message.rank(), self.seq), message);
    }

    /// Delivers queued messages until none are left.
    pub fn drain(&mut self) -> Result<(), RuntimeError> {
        while let Some(((time, node, object, _, _), message)) = self.queue.pop_first() {
            self.delivered.push(Envelope { time, node: node.clone(), object: object.clone(), message: message.clone() });
            self.deliver(time, &node, &object, message)?;
        }
        Ok(())
    }

    fn deliver(&mut self, time: Timestamp, node: &str, object: &str, message: Message) -> Result<(), RuntimeError> {
        let agent_err = |source| RuntimeError::Agent { time, source };
        let graph_err = |source| RuntimeError::Graph { time, source };
        match message {
            Message::SpawnFollower { user, gate } => {
                self.graph = self.graph.add_car(&user, &gate).map_err(graph_err)?;
                let id = self.next_follower;
                self.next_follower += 1;
                self.followers.insert(user.clone(), A2State::new(id, user.as_str()));
                self.entered += 1;
                self.post(time, node, object, Message::AskPreference { user, gate });
            }
            Message::Presence(event) => {
                let Some(follower) = self.followers.get(&event.object) else {
                    return Err(RuntimeError::Untracked { time, object: event.object, node: event.node });
                };
                let at_gate = self.graph.base().kind_of(&event.node) == Some(NodeKind::Gate);
                if at_gate && !follower.path.is_empty() {
                    let (done, finished) = follower.on_exit(&event, &self.graph).map_err(agent_err)?;
                    let id = finished.id;
                    self.followers.insert(event.object.clone(), finished);
                    self.post(time, node, object, done);
                    self.post(time, node, object, Message::DestroyFollower(id));
                } else {
                    let next = follower.on_presence(&event).map_err(agent_err)?;
                    self.followers.insert(event.object.clone(), next);
                    self.graph = self.graph.move_car(&event.object, &event.node).map_err(graph_err)?;
                }
            }
            Message::AskPreference { user, gate } => {
                let free = self.graph.free_spaces();
                let (decider, decision) = self.decider.on_ask(&user, &gate, &free).map_err(agent_err)?;
                self.decider = decider;
                self.log.push(DecisionLogEntry {
                    time,
                    user: user.clone(),
                    gate,
                    suggestion: decision.suggestion.clone(),
                    removed: decision.removed,
                    candidates: decision.candidates,
                });
                self.post(time, node, object, Message::PreferenceReply { user, suggestion: decision.suggestion });
            }
            // suggestions are output only; drivers follow the trace
            Message::PreferenceReply { .. } => {}
            Message::VisitDone(summary) => {
                self.decider = self.decider.on_visit(&summary).map_err(agent_err)?;
            }
            Message::DestroyFollower(id) => {
                let user = self.followers.iter().find(|(_, f)| f.id == id).map(|(u, _)| u.clone());
                if let Some(user) = user {
                    self.followers.remove(&user);
                    self.graph = self.graph.remove_car(&user).map_err(graph_err)?;
                    self.exited += 1;
                }
            }
        }
        Ok(())
    }

    /// Cars currently inside, by follower.
    pub fn cars_inside(&self) -> BTreeSet<String> {
        self.followers.keys().cloned().collect()
    }
}
