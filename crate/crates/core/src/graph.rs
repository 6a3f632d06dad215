//! Labelled, attributed digraphs and the parking world built on them.
//!
//! [`LaGraph`] carries structure, unique labels and attribute *declarations*;
//! [`IlaGraph`] instantiates the declared attributes with values. The parking
//! world uses four vertex kinds: gates, road segments, parking spaces and cars.
//! Every parking space declares a Boolean `free` attribute. A car is a vertex
//! with exactly one outgoing edge pointing at where it currently is.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::formula::is_atom_name;

/// Attribute declared on parking spaces.
pub const FREE: &str = "free";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NodeKind {
    /// `G`: entrance/exit gate.
    Gate,
    /// `R`: road segment.
    Road,
    /// `P`: parking space.
    Space,
    /// `C`: car.
    Car,
}

impl NodeKind {
    pub fn letter(self) -> char {
        match self {
            NodeKind::Gate => 'G',
            NodeKind::Road => 'R',
            NodeKind::Space => 'P',
            NodeKind::Car => 'C',
        }
    }

    pub fn from_letter(c: &str) -> Option<NodeKind> {
        match c {
            "G" => Some(NodeKind::Gate),
            "R" => Some(NodeKind::Road),
            "P" => Some(NodeKind::Space),
            "C" => Some(NodeKind::Car),
            _ => None,
        }
    }
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub u32);

pub type Edge = (VertexId, VertexId);

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AttrValue {
    Boolean(bool),
    Integer(i64),
    Text(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AttrType {
    Boolean,
    Integer,
    Text,
}

impl AttrValue {
    pub fn kind(&self) -> AttrType {
        match self {
            AttrValue::Boolean(_) => AttrType::Boolean,
            AttrValue::Integer(_) => AttrType::Integer,
            AttrValue::Text(_) => AttrType::Text,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("label '{0}' is already in use")]
    DuplicateLabel(String),
    #[error("label '{0}' is not a valid identifier")]
    InvalidLabel(String),
    #[error("no vertex labelled '{0}'")]
    UnknownLabel(String),
    #[error("edge {0} -> {1} already exists")]
    DuplicateEdge(String, String),
    #[error("'{0}' is not a gate")]
    NotAGate(String),
    #[error("car '{0}' is already in the car park")]
    DuplicateCar(String),
    #[error("no car '{0}' in the car park")]
    UnknownCar(String),
    #[error("a car cannot be moved onto '{0}'")]
    NotPlaceable(String),
    #[error("parking space '{0}' is occupied")]
    SpaceOccupied(String),
    #[error("attribute '{0}' is not declared on this entity")]
    UndeclaredAttribute(String),
    #[error("attribute '{0}' already holds values of another type")]
    AttributeType(String),
    #[error("topology cannot declare car vertex '{0}'")]
    CarInTopology(String),
}

/// Labelled and attributed digraph: vertices, ordered-pair edges, injective
/// labels on both, and declared attribute names.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LaGraph {
    vertices: BTreeSet<VertexId>,
    edges: BTreeSet<Edge>,
    vertex_labels: BTreeMap<VertexId, String>,
    edge_labels: BTreeMap<Edge, String>,
    vertex_attrs: BTreeMap<VertexId, BTreeSet<String>>,
    edge_attrs: BTreeMap<Edge, BTreeSet<String>>,
    kinds: BTreeMap<VertexId, NodeKind>,
    by_label: BTreeMap<String, VertexId>,
}

impl LaGraph {
    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices.iter().copied()
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.edges.iter().copied()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn label(&self, v: VertexId) -> Option<&str> {
        self.vertex_labels.get(&v).map(String::as_str)
    }

    pub fn edge_label(&self, e: Edge) -> Option<&str> {
        self.edge_labels.get(&e).map(String::as_str)
    }

    pub fn kind(&self, v: VertexId) -> Option<NodeKind> {
        self.kinds.get(&v).copied()
    }

    pub fn vertex(&self, label: &str) -> Option<VertexId> {
        self.by_label.get(label).copied()
    }

    pub fn kind_of(&self, label: &str) -> Option<NodeKind> {
        self.vertex(label).and_then(|v| self.kind(v))
    }

    pub fn vertex_attributes(&self, v: VertexId) -> Option<&BTreeSet<String>> {
        self.vertex_attrs.get(&v)
    }

    pub fn edge_attributes(&self, e: Edge) -> Option<&BTreeSet<String>> {
        self.edge_attrs.get(&e)
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> + '_ {
        self.by_label.keys().map(String::as_str)
    }

    /// Labels of all vertices of `kind`, in label order.
    pub fn labels_of(&self, kind: NodeKind) -> BTreeSet<String> {
        self.by_label
            .iter()
            .filter(|(_, v)| self.kinds.get(v) == Some(&kind))
            .map(|(l, _)| l.clone())
            .collect()
    }

    pub fn out_edges(&self, v: VertexId) -> impl Iterator<Item = Edge> + '_ {
        self.edges.range((v, VertexId(0))..=(v, VertexId(u32::MAX))).copied()
    }

    pub fn in_degree(&self, v: VertexId) -> usize {
        self.edges.iter().filter(|(_, to)| *to == v).count()
    }

    /// Smallest unused id, so that adding and then removing a vertex leaves the graph unchanged.
    fn fresh_id(&self) -> VertexId {
        let mut candidate = 0u32;
        for v in &self.vertices {
            if v.0 != candidate {
                break;
            }
            candidate += 1;
        }
        VertexId(candidate)
    }

    pub fn add_vertex(&mut self, kind: NodeKind, label: &str) -> Result<VertexId, GraphError> {
        if !is_atom_name(label) {
            return Err(GraphError::InvalidLabel(label.to_string()));
        }
        if self.by_label.contains_key(label) {
            return Err(GraphError::DuplicateLabel(label.to_string()));
        }
        let v = self.fresh_id();
        self.vertices.insert(v);
        self.vertex_labels.insert(v, label.to_string());
        self.vertex_attrs.insert(v, BTreeSet::new());
        self.kinds.insert(v, kind);
        self.by_label.insert(label.to_string(), v);
        Ok(v)
    }

    pub fn add_edge(&mut self, from: VertexId, to: VertexId) -> Result<Edge, GraphError> {
        let from_label = self.label(from).ok_or_else(|| GraphError::UnknownLabel(format!("#{}", from.0)))?;
        let to_label = self.label(to).ok_or_else(|| GraphError::UnknownLabel(format!("#{}", to.0)))?;
        let e = (from, to);
        if self.edges.contains(&e) {
            return Err(GraphError::DuplicateEdge(from_label.to_string(), to_label.to_string()));
        }
        let label = format!("{from_label}->{to_label}");
        self.edges.insert(e);
        self.edge_labels.insert(e, label);
        self.edge_attrs.insert(e, BTreeSet::new());
        Ok(e)
    }

    pub fn remove_edge(&mut self, e: Edge) -> bool {
        self.edge_labels.remove(&e);
        self.edge_attrs.remove(&e);
        self.edges.remove(&e)
    }

    /// Removes a vertex together with its incident edges.
    pub fn remove_vertex(&mut self, v: VertexId) -> bool {
        if !self.vertices.remove(&v) {
            return false;
        }
        let incident: Vec<Edge> = self.edges.iter().filter(|(a, b)| *a == v || *b == v).copied().collect();
        for e in incident {
            self.remove_edge(e);
        }
        if let Some(label) = self.vertex_labels.remove(&v) {
            self.by_label.remove(&label);
        }
        self.vertex_attrs.remove(&v);
        self.kinds.remove(&v);
        true
    }

    pub fn declare_vertex_attr(&mut self, v: VertexId, name: &str) -> Result<(), GraphError> {
        let attrs = self.vertex_attrs.get_mut(&v).ok_or_else(|| GraphError::UnknownLabel(format!("#{}", v.0)))?;
        attrs.insert(name.to_string());
        Ok(())
    }

    pub fn declare_edge_attr(&mut self, e: Edge, name: &str) -> Result<(), GraphError> {
        let attrs = self.edge_attrs.get_mut(&e).ok_or_else(|| GraphError::UnknownLabel(format!("#{}->#{}", e.0 .0, e.1 .0)))?;
        attrs.insert(name.to_string());
        Ok(())
    }
}

/// Parking layout as read from a topology description.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Topology {
    pub nodes: Vec<(NodeKind, String)>,
    pub edges: Vec<(String, String)>,
}

/// An instantiated [`LaGraph`]: every declared attribute carries a value.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IlaGraph {
    base: LaGraph,
    vertex_values: BTreeMap<(VertexId, String), AttrValue>,
    edge_values: BTreeMap<(Edge, String), AttrValue>,
    attr_types: BTreeMap<String, AttrType>,
}

impl IlaGraph {
    pub fn base(&self) -> &LaGraph {
        &self.base
    }

    pub fn vertex_value(&self, v: VertexId, attr: &str) -> Option<&AttrValue> {
        self.vertex_values.get(&(v, attr.to_string()))
    }

    pub fn edge_value(&self, e: Edge, attr: &str) -> Option<&AttrValue> {
        self.edge_values.get(&(e, attr.to_string()))
    }

    fn check_type(&mut self, attr: &str, value: &AttrValue) -> Result<(), GraphError> {
        match self.attr_types.get(attr) {
            Some(t) if *t != value.kind() => Err(GraphError::AttributeType(attr.to_string())),
            Some(_) => Ok(()),
            None => {
                self.attr_types.insert(attr.to_string(), value.kind());
                Ok(())
            }
        }
    }

    /// Assigns a value to an attribute declared on `v`.
    pub fn set_vertex_value(&mut self, v: VertexId, attr: &str, value: AttrValue) -> Result<(), GraphError> {
        let declared = self.base.vertex_attributes(v).is_some_and(|a| a.contains(attr));
        if !declared {
            return Err(GraphError::UndeclaredAttribute(attr.to_string()));
        }
        self.check_type(attr, &value)?;
        self.vertex_values.insert((v, attr.to_string()), value);
        Ok(())
    }

    /// Assigns a value to an attribute declared on `e`.
    pub fn set_edge_value(&mut self, e: Edge, attr: &str, value: AttrValue) -> Result<(), GraphError> {
        let declared = self.base.edge_attributes(e).is_some_and(|a| a.contains(attr));
        if !declared {
            return Err(GraphError::UndeclaredAttribute(attr.to_string()));
        }
        self.check_type(attr, &value)?;
        self.edge_values.insert((e, attr.to_string()), value);
        Ok(())
    }

    fn remove_vertex(&mut self, v: VertexId) {
        let edges: Vec<Edge> = self.base.edges().filter(|(a, b)| *a == v || *b == v).collect();
        self.edge_values.retain(|(e, _), _| !edges.contains(e));
        self.vertex_values.retain(|(u, _), _| *u != v);
        self.base.remove_vertex(v);
    }

    /// Builds the parking world: gates, roads and spaces with adjacency edges;
    /// every space starts free.
    pub fn build_parking(topology: &Topology) -> Result<IlaGraph, GraphError> {
        let mut g = IlaGraph::default();
        for (kind, label) in &topology.nodes {
            if *kind == NodeKind::Car {
                return Err(GraphError::CarInTopology(label.clone()));
            }
            let v = g.base.add_vertex(*kind, label)?;
            if *kind == NodeKind::Space {
                g.base.declare_vertex_attr(v, FREE)?;
                g.set_vertex_value(v, FREE, AttrValue::Boolean(true))?;
            }
        }
        for (from, to) in &topology.edges {
            let a = g.base.vertex(from).ok_or_else(|| GraphError::UnknownLabel(from.clone()))?;
            let b = g.base.vertex(to).ok_or_else(|| GraphError::UnknownLabel(to.clone()))?;
            g.base.add_edge(a, b)?;
        }
        Ok(g)
    }

    fn car(&self, car_id: &str) -> Result<VertexId, GraphError> {
        match self.base.vertex(car_id) {
            Some(v) if self.base.kind(v) == Some(NodeKind::Car) => Ok(v),
            _ => Err(GraphError::UnknownCar(car_id.to_string())),
        }
    }

    /// Where a car currently is.
    pub fn car_position(&self, car_id: &str) -> Option<&str> {
        let v = self.car(car_id).ok()?;
        let (_, at) = self.base.out_edges(v).next()?;
        self.base.label(at)
    }

    pub fn cars(&self) -> BTreeSet<String> {
        self.base.labels_of(NodeKind::Car)
    }

    pub fn gates(&self) -> BTreeSet<String> {
        self.base.labels_of(NodeKind::Gate)
    }

    pub fn spaces(&self) -> BTreeSet<String> {
        self.base.labels_of(NodeKind::Space)
    }

    pub fn is_free(&self, space: &str) -> Option<bool> {
        let v = self.base.vertex(space)?;
        match self.vertex_value(v, FREE) {
            Some(AttrValue::Boolean(b)) => Some(*b),
            _ => None,
        }
    }

    fn set_free(&mut self, v: VertexId, free: bool) -> Result<(), GraphError> {
        self.set_vertex_value(v, FREE, AttrValue::Boolean(free))
    }

    /// Adds a car vertex linked to the gate it entered through.
    pub fn add_car(&self, car_id: &str, gate: &str) -> Result<IlaGraph, GraphError> {
        let gate_v = self.base.vertex(gate).ok_or_else(|| GraphError::UnknownLabel(gate.to_string()))?;
        if self.base.kind(gate_v) != Some(NodeKind::Gate) {
            return Err(GraphError::NotAGate(gate.to_string()));
        }
        if self.base.vertex(car_id).is_some() {
            return Err(if self.base.kind_of(car_id) == Some(NodeKind::Car) {
                GraphError::DuplicateCar(car_id.to_string())
            } else {
                GraphError::DuplicateLabel(car_id.to_string())
            });
        }
        let mut g = self.clone();
        let car = g.base.add_vertex(NodeKind::Car, car_id)?;
        g.base.add_edge(car, gate_v)?;
        Ok(g)
    }

    /// Re-targets the car's position edge; parking spaces follow occupancy.
    pub fn move_car(&self, car_id: &str, node: &str) -> Result<IlaGraph, GraphError> {
        let car = self.car(car_id)?;
        let target = self.base.vertex(node).ok_or_else(|| GraphError::UnknownLabel(node.to_string()))?;
        let target_kind = self.base.kind(target);
        if target_kind == Some(NodeKind::Car) {
            return Err(GraphError::NotPlaceable(node.to_string()));
        }
        let (_, current) = self.base.out_edges(car).next().expect("car has a position edge");
        if current == target {
            return Ok(self.clone());
        }
        if target_kind == Some(NodeKind::Space) && self.is_free(node) == Some(false) {
            return Err(GraphError::SpaceOccupied(node.to_string()));
        }
        let mut g = self.clone();
        g.base.remove_edge((car, current));
        g.base.add_edge(car, target)?;
        if g.base.kind(current) == Some(NodeKind::Space) {
            g.set_free(current, true)?;
        }
        if target_kind == Some(NodeKind::Space) {
            g.set_free(target, false)?;
        }
        Ok(g)
    }

    /// Removes the car and frees any space it occupied.
    pub fn remove_car(&self, car_id: &str) -> Result<IlaGraph, GraphError> {
        let car = self.car(car_id)?;
        let mut g = self.clone();
        let position = g.base.out_edges(car).next();
        if let Some((_, at)) = position {
            if g.base.kind(at) == Some(NodeKind::Space) {
                g.set_free(at, true)?;
            }
        }
        g.remove_vertex(car);
        Ok(g)
    }

    /// Labels of parking spaces whose `free` attribute is true.
    pub fn free_spaces(&self) -> BTreeSet<String> {
        self.base
            .labels_of(NodeKind::Space)
            .into_iter()
            .filter(|p| self.is_free(p) == Some(true))
            .collect()
    }

    /// Checks the structural invariants of the parking world; returns a description of the first violation.
    pub fn check_invariants(&self) -> Result<(), String> {
        let b = &self.base;
        for &(from, to) in &b.edges {
            if !b.vertices.contains(&from) || !b.vertices.contains(&to) {
                return Err(format!("edge #{}->#{} leaves the vertex set", from.0, to.0));
            }
        }
        if b.by_label.len() != b.vertices.len() || b.vertex_labels.len() != b.vertices.len() {
            return Err("vertex labels are not injective".to_string());
        }
        for (label, v) in &b.by_label {
            if b.vertex_labels.get(v) != Some(label) {
                return Err(format!("label index disagrees for '{label}'"));
            }
        }
        let edge_labels: BTreeSet<&String> = b.edge_labels.values().collect();
        if edge_labels.len() != b.edges.len() {
            return Err("edge labels are not injective".to_string());
        }
        let mut occupants: BTreeMap<VertexId, usize> = BTreeMap::new();
        for v in b.vertices() {
            if b.kind(v) == Some(NodeKind::Car) {
                let out: Vec<Edge> = b.out_edges(v).collect();
                if out.len() != 1 || b.in_degree(v) != 0 {
                    return Err(format!("car '{}' must have out-degree 1 and in-degree 0", b.label(v).unwrap_or("?")));
                }
                *occupants.entry(out[0].1).or_default() += 1;
            }
        }
        for v in b.vertices() {
            if b.kind(v) != Some(NodeKind::Space) {
                continue;
            }
            let cars = occupants.get(&v).copied().unwrap_or(0);
            let free = matches!(self.vertex_value(v, FREE), Some(AttrValue::Boolean(true)));
            if free == (cars == 1) || cars > 1 {
                return Err(format!("space '{}' has {cars} cars but free = {free}", b.label(v).unwrap_or("?")));
            }
        }
        for (v, attr) in self.vertex_values.keys() {
            if !b.vertex_attributes(*v).is_some_and(|a| a.contains(attr)) {
                return Err(format!("value for undeclared attribute '{attr}'"));
            }
        }
        for (v, attrs) in &b.vertex_attrs {
            for attr in attrs {
                if !self.vertex_values.contains_key(&(*v, attr.clone())) {
                    return Err(format!("declared attribute '{attr}' has no value"));
                }
            }
        }
        for (e, attrs) in &b.edge_attrs {
            for attr in attrs {
                if !self.edge_values.contains_key(&(*e, attr.clone())) {
                    return Err(format!("declared edge attribute '{attr}' has no value"));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn small() -> IlaGraph {
        let topo = Topology {
            nodes: vec![
                (NodeKind::Gate, "g1".into()),
                (NodeKind::Gate, "g2".into()),
                (NodeKind::Road, "r1".into()),
                (NodeKind::Space, "p010".into()),
                (NodeKind::Space, "p015".into()),
                (NodeKind::Space, "p018".into()),
            ],
            edges: vec![
                ("g1".into(), "r1".into()),
                ("r1".into(), "g1".into()),
                ("g2".into(), "r1".into()),
                ("r1".into(), "p010".into()),
                ("r1".into(), "p015".into()),
                ("r1".into(), "p018".into()),
            ],
        };
        IlaGraph::build_parking(&topo).unwrap()
    }

    #[test]
    fn build_and_query() {
        let g = small();
        assert_eq!(g.base().vertex_count(), 6);
        assert_eq!(g.base().edge_count(), 6);
        assert_eq!(g.free_spaces().len(), 3);
        assert_eq!(g.base().kind_of("g2"), Some(NodeKind::Gate));
        let e = (g.base().vertex("r1").unwrap(), g.base().vertex("p010").unwrap());
        assert_eq!(g.base().edge_label(e), Some("r1->p010"));
        g.check_invariants().unwrap();
    }

    #[test]
    fn empty_topology() {
        let g = IlaGraph::build_parking(&Topology::default()).unwrap();
        assert_eq!(g.base().vertex_count(), 0);
        assert!(g.free_spaces().is_empty());
    }

    #[test]
    fn build_errors() {
        let dup = Topology { nodes: vec![(NodeKind::Gate, "g1".into()), (NodeKind::Space, "g1".into())], edges: vec![] };
        assert_eq!(IlaGraph::build_parking(&dup), Err(GraphError::DuplicateLabel("g1".into())));
        let dangling = Topology { nodes: vec![(NodeKind::Gate, "g1".into())], edges: vec![("g1".into(), "p9".into())] };
        assert_eq!(IlaGraph::build_parking(&dangling), Err(GraphError::UnknownLabel("p9".into())));
        let car = Topology { nodes: vec![(NodeKind::Car, "c".into())], edges: vec![] };
        assert_eq!(IlaGraph::build_parking(&car), Err(GraphError::CarInTopology("c".into())));
    }

    #[test]
    fn car_lifecycle() {
        let g = small();
        let with_car = g.add_car("idOla91", "g2").unwrap();
        assert_eq!(with_car.car_position("idOla91"), Some("g2"));
        assert_eq!(with_car.add_car("idOla91", "g1"), Err(GraphError::DuplicateCar("idOla91".into())));
        assert_eq!(g.add_car("c1", "p010"), Err(GraphError::NotAGate("p010".into())));
        assert_eq!(g.add_car("c1", "g9"), Err(GraphError::UnknownLabel("g9".into())));

        let parked = with_car.move_car("idOla91", "p018").unwrap();
        assert_eq!(parked.is_free("p018"), Some(false));
        assert!(!parked.free_spaces().contains("p018"));
        parked.check_invariants().unwrap();

        let left = parked.move_car("idOla91", "r1").unwrap();
        assert_eq!(left.is_free("p018"), Some(true));
        assert_eq!(g.move_car("ghost", "p010"), Err(GraphError::UnknownCar("ghost".into())));
        assert_eq!(with_car.move_car("idOla91", "nowhere"), Err(GraphError::UnknownLabel("nowhere".into())));

        let other = parked.add_car("c2", "g1").unwrap();
        assert_eq!(other.move_car("c2", "p018"), Err(GraphError::SpaceOccupied("p018".into())));
        assert_eq!(other.move_car("c2", "idOla91"), Err(GraphError::NotPlaceable("idOla91".into())));

        assert_eq!(with_car.remove_car("idOla91").unwrap(), g);
        let at15 = with_car.move_car("idOla91", "p015").unwrap();
        let gone = at15.remove_car("idOla91").unwrap();
        assert_eq!(gone.is_free("p015"), Some(true));
        assert_eq!(gone, g);
        assert_eq!(g.remove_car("idOla91"), Err(GraphError::UnknownCar("idOla91".into())));
    }

    #[test]
    fn attribute_typing() {
        let mut g = small();
        let v = g.base().vertex("p010").unwrap();
        assert_eq!(g.set_vertex_value(v, FREE, AttrValue::Integer(1)), Err(GraphError::AttributeType(FREE.into())));
        let gate = g.base().vertex("g1").unwrap();
        assert_eq!(
            g.set_vertex_value(gate, "colour", AttrValue::Text("red".into())),
            Err(GraphError::UndeclaredAttribute("colour".into()))
        );
    }
}
