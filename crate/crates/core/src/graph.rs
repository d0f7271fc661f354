//! Problem instances: a strongly connected digraph whose required arcs carry
//! demand, service time and a priority class, plus the fleet description.

use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;

pub type NodeId = usize;
pub type ArcId = usize;
/// Priority class, `1..=num_classes` for required arcs and `0` otherwise.
pub type Class = usize;

/// Absolute tolerance used for every time comparison.
pub const TIME_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: NodeId,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Arc {
    pub id: ArcId,
    pub tail: NodeId,
    pub head: NodeId,
    /// Traversal (deadhead) time.
    pub d: f64,
    pub required: bool,
    /// Demand, zero iff not required.
    pub q: f64,
    /// Service time, zero iff not required.
    pub s: f64,
    /// Priority class, zero iff not required.
    pub p: Class,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub depot: NodeId,
    pub num_vehicles: usize,
    pub capacity: f64,
    pub num_classes: usize,
    pub nodes: Vec<Node>,
    pub arcs: Vec<Arc>,
}

/// A broken instance invariant. Violations are reported, not raised.
#[derive(Debug, Clone, PartialEq)]
pub enum InstanceViolation {
    NoArcs,
    NodeIdNotDense { position: usize, id: NodeId },
    ArcIdNotDense { position: usize, id: ArcId },
    NonFiniteCoordinate(NodeId),
    ArcEndpointOutOfRange(ArcId),
    DepotOutOfRange(NodeId),
    NonPositiveTraversal(ArcId),
    BadRequiredAttributes(ArcId),
    BadNonRequiredAttributes(ArcId),
    ClassOutOfRange { arc: ArcId, class: Class },
    NoVehicles,
    NoClasses,
    NonPositiveCapacity,
    UnreachableFromDepot(NodeId),
    CannotReachDepot(NodeId),
}

impl fmt::Display for InstanceViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use InstanceViolation::*;
        match self {
            NoArcs => write!(f, "not strongly connected (no arcs)"),
            NodeIdNotDense { position, id } => {
                write!(f, "node at position {position} has id {id}")
            }
            ArcIdNotDense { position, id } => write!(f, "arc at position {position} has id {id}"),
            NonFiniteCoordinate(v) => write!(f, "node {v} has a non-finite coordinate"),
            ArcEndpointOutOfRange(a) => write!(f, "arc {a} references a missing node"),
            DepotOutOfRange(v) => write!(f, "depot {v} is not a node"),
            NonPositiveTraversal(a) => write!(f, "arc {a} has non-positive traversal time"),
            BadRequiredAttributes(a) => {
                write!(f, "required arc {a} needs q > 0, s > 0 and a class >= 1")
            }
            BadNonRequiredAttributes(a) => {
                write!(f, "non-required arc {a} must have q = s = 0 and class 0")
            }
            ClassOutOfRange { arc, class } => {
                write!(f, "arc {arc} has class {class} outside 1..=num_classes")
            }
            NoVehicles => write!(f, "fleet is empty"),
            NoClasses => write!(f, "num_classes must be at least 1"),
            NonPositiveCapacity => write!(f, "capacity must be positive"),
            UnreachableFromDepot(v) => {
                write!(f, "not strongly connected: node {v} unreachable from depot")
            }
            CannotReachDepot(v) => {
                write!(f, "not strongly connected: depot unreachable from node {v}")
            }
        }
    }
}

impl Instance {
    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn arc(&self, id: ArcId) -> &Arc {
        &self.arcs[id]
    }

    /// Required arc ids in ascending order.
    pub fn required_arcs(&self) -> Vec<ArcId> {
        self.arcs.iter().filter(|a| a.required).map(|a| a.id).collect()
    }

    /// Required arc ids of one class, ascending.
    pub fn class_arcs(&self, class: Class) -> Vec<ArcId> {
        self.arcs
            .iter()
            .filter(|a| a.required && a.p == class)
            .map(|a| a.id)
            .collect()
    }

    pub fn class_of(&self, arc: ArcId) -> Class {
        self.arcs[arc].p
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut text = self.to_json_string()?;
        text.push('\n');
        fs::write(path, text)?;
        Ok(())
    }
}

/// Checks every instance invariant, including strong connectivity via forward
/// and reverse reachability from the depot. An empty list means valid.
pub fn validate_instance(inst: &Instance) -> Vec<InstanceViolation> {
    use InstanceViolation::*;
    let mut out = Vec::new();
    let n = inst.nodes.len();

    for (i, node) in inst.nodes.iter().enumerate() {
        if node.id != i {
            out.push(NodeIdNotDense {
                position: i,
                id: node.id,
            });
        }
        if !node.x.is_finite() || !node.y.is_finite() {
            out.push(NonFiniteCoordinate(node.id));
        }
    }
    if inst.depot >= n {
        out.push(DepotOutOfRange(inst.depot));
    }
    if inst.num_vehicles == 0 {
        out.push(NoVehicles);
    }
    if inst.num_classes == 0 {
        out.push(NoClasses);
    }
    if !(inst.capacity > 0.0) {
        out.push(NonPositiveCapacity);
    }

    let mut endpoints_ok = true;
    for (i, arc) in inst.arcs.iter().enumerate() {
        if arc.id != i {
            out.push(ArcIdNotDense {
                position: i,
                id: arc.id,
            });
        }
        if arc.tail >= n || arc.head >= n {
            out.push(ArcEndpointOutOfRange(arc.id));
            endpoints_ok = false;
        }
        if !(arc.d > 0.0) || !arc.d.is_finite() {
            out.push(NonPositiveTraversal(arc.id));
        }
        if arc.required {
            if !(arc.q > 0.0 && arc.s > 0.0 && arc.p >= 1) {
                out.push(BadRequiredAttributes(arc.id));
            } else if arc.p > inst.num_classes {
                out.push(ClassOutOfRange {
                    arc: arc.id,
                    class: arc.p,
                });
            }
        } else if arc.q != 0.0 || arc.s != 0.0 || arc.p != 0 {
            out.push(BadNonRequiredAttributes(arc.id));
        }
    }

    if inst.arcs.is_empty() {
        out.push(NoArcs);
    } else if endpoints_ok && inst.depot < n {
        let forward = reachable(n, inst.depot, inst.arcs.iter().map(|a| (a.tail, a.head)));
        let backward = reachable(n, inst.depot, inst.arcs.iter().map(|a| (a.head, a.tail)));
        for v in 0..n {
            if !forward[v] {
                out.push(UnreachableFromDepot(v));
            }
            if !backward[v] {
                out.push(CannotReachDepot(v));
            }
        }
    }
    out
}

fn reachable(n: usize, root: NodeId, edges: impl Iterator<Item = (NodeId, NodeId)>) -> Vec<bool> {
    let mut adj = vec![Vec::new(); n];
    for (u, v) in edges {
        adj[u].push(v);
    }
    let mut seen = vec![false; n];
    let mut stack = vec![root];
    seen[root] = true;
    while let Some(u) = stack.pop() {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    seen
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub fn node(id: NodeId) -> Node {
        Node {
            id,
            x: id as f64,
            y: 0.0,
        }
    }

    pub fn deadhead(id: ArcId, tail: NodeId, head: NodeId, d: f64) -> Arc {
        Arc {
            id,
            tail,
            head,
            d,
            required: false,
            q: 0.0,
            s: 0.0,
            p: 0,
        }
    }

    pub fn required(id: ArcId, tail: NodeId, head: NodeId, d: f64, s: f64, q: f64, p: Class) -> Arc {
        Arc {
            id,
            tail,
            head,
            d,
            required: true,
            q,
            s,
            p,
        }
    }

    pub fn instance(n: usize, arcs: Vec<Arc>, vehicles: usize, capacity: f64, classes: usize) -> Instance {
        Instance {
            depot: 0,
            num_vehicles: vehicles,
            capacity,
            num_classes: classes,
            nodes: (0..n).map(node).collect(),
            arcs,
        }
    }

    /// u=0 -> v=1 -> w=2 -> u, all unit length.
    pub fn triangle() -> Instance {
        instance(
            3,
            vec![
                deadhead(0, 0, 1, 1.0),
                deadhead(1, 1, 2, 1.0),
                deadhead(2, 2, 0, 1.0),
            ],
            1,
            10.0,
            1,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn single_node_without_arcs_is_not_strongly_connected() {
        let inst = instance(1, vec![], 1, 1.0, 1);
        let v = validate_instance(&inst);
        assert_eq!(v, vec![InstanceViolation::NoArcs]);
        assert_eq!(v[0].to_string(), "not strongly connected (no arcs)");
    }

    #[test]
    fn two_cycle_with_one_required_arc_is_valid() {
        let inst = instance(
            2,
            vec![required(0, 0, 1, 1.0, 2.0, 1.0, 1), deadhead(1, 1, 0, 1.0)],
            1,
            5.0,
            1,
        );
        assert!(validate_instance(&inst).is_empty());
    }

    #[test]
    fn missing_arc_makes_node_unreachable() {
        // 0 -> 1 -> 2 -> 0 with 0 -> 1 removed; 1 only reachable from itself.
        let inst = instance(
            3,
            vec![deadhead(0, 1, 2, 1.0), deadhead(1, 2, 0, 1.0)],
            1,
            1.0,
            1,
        );
        let v = validate_instance(&inst);
        assert_eq!(
            v,
            vec![
                InstanceViolation::UnreachableFromDepot(1),
                InstanceViolation::UnreachableFromDepot(2)
            ]
        );
        assert!(v[0].to_string().contains("node 1"));
    }

    #[test]
    fn attribute_rules() {
        let mut inst = triangle();
        inst.arcs[0].q = 1.0;
        inst.arcs[1] = required(1, 1, 2, 1.0, 0.0, 1.0, 1);
        inst.arcs[2] = required(2, 2, 0, 1.0, 1.0, 1.0, 3);
        let v = validate_instance(&inst);
        assert!(v.contains(&InstanceViolation::BadNonRequiredAttributes(0)));
        assert!(v.contains(&InstanceViolation::BadRequiredAttributes(1)));
        assert!(v.contains(&InstanceViolation::ClassOutOfRange { arc: 2, class: 3 }));
    }

    #[test]
    fn json_round_trip() {
        let inst = triangle();
        let text = inst.to_json_string().unwrap();
        assert_eq!(Instance::from_json_str(&text).unwrap(), inst);
    }
}
