use std::collections::BTreeSet;

use crate::graph::{ArcId, Class, Instance, NodeId};
use crate::solution::Variant;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArcKind {
    Original,
    /// `v'_0 -> v`, member of `A_f`.
    FromDummy,
    /// `v -> v'_0`, member of `A_t`.
    ToDummy,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrimeArc {
    pub id: usize,
    pub tail: NodeId,
    pub head: NodeId,
    pub d: f64,
    pub kind: ArcKind,
}

/// The base graph plus a dummy node `v'_0` joined by zero-time arcs to the
/// depot and every tail vertex of a required arc. Routes pass through the
/// dummy node between classes (or hierarchy levels).
///
/// Original arcs keep their ids; dummy arcs are numbered after them. The
/// dummy node is numbered `|V|`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformedGraph {
    pub variant: Variant,
    pub num_base_nodes: usize,
    pub dummy_node: NodeId,
    pub depot: NodeId,
    pub arcs: Vec<PrimeArc>,
    /// Ids of `v'_0 -> v` arcs, ordered by `v`.
    pub a_f: Vec<usize>,
    /// Ids of `v -> v'_0` arcs, ordered by `v`.
    pub a_t: Vec<usize>,
    from_dummy: Vec<Option<usize>>,
    to_dummy: Vec<Option<usize>>,
    /// Tail vertices of required arcs, per class (index `k - 1`).
    pub class_tails: Vec<BTreeSet<NodeId>>,
}

impl TransformedGraph {
    pub fn num_nodes(&self) -> usize {
        self.num_base_nodes + 1
    }

    /// Vertices joined to the dummy node, ascending.
    pub fn dummy_vertices(&self) -> Vec<NodeId> {
        self.a_f.iter().map(|&a| self.arcs[a].head).collect()
    }

    pub fn from_dummy(&self, v: NodeId) -> Option<usize> {
        self.from_dummy.get(v).copied().flatten()
    }

    pub fn to_dummy(&self, v: NodeId) -> Option<usize> {
        self.to_dummy.get(v).copied().flatten()
    }

    /// `V_t^1 ∪ ... ∪ V_t^{k-1} ∪ {v_0}`: vertices whose class link into
    /// class `k` is constrained.
    pub fn link_vertices_before(&self, k: Class) -> BTreeSet<NodeId> {
        let mut out: BTreeSet<NodeId> = self.class_tails[..k - 1]
            .iter()
            .flat_map(|s| s.iter().copied())
            .collect();
        out.insert(self.depot);
        out
    }

    pub fn original_arcs(&self) -> impl Iterator<Item = &PrimeArc> {
        self.arcs.iter().filter(|a| a.kind == ArcKind::Original)
    }
}

/// Builds `G' = (V', A')`. Both variants join the same vertex set to the
/// dummy node: every required-arc tail plus the depot.
pub fn transform_graph(inst: &Instance, variant: Variant) -> TransformedGraph {
    let n = inst.num_nodes();
    let dummy = n;
    let mut class_tails = vec![BTreeSet::new(); inst.num_classes];
    for arc in inst.arcs.iter().filter(|a| a.required) {
        class_tails[arc.p - 1].insert(arc.tail);
    }
    let mut joined: BTreeSet<NodeId> = class_tails.iter().flat_map(|s| s.iter().copied()).collect();
    joined.insert(inst.depot);

    let mut arcs: Vec<PrimeArc> = inst
        .arcs
        .iter()
        .map(|a| PrimeArc {
            id: a.id,
            tail: a.tail,
            head: a.head,
            d: a.d,
            kind: ArcKind::Original,
        })
        .collect();
    let mut from_dummy = vec![None; n];
    let mut to_dummy = vec![None; n];
    let mut a_f = Vec::new();
    let mut a_t = Vec::new();
    for &v in &joined {
        let id = arcs.len();
        arcs.push(PrimeArc {
            id,
            tail: dummy,
            head: v,
            d: 0.0,
            kind: ArcKind::FromDummy,
        });
        from_dummy[v] = Some(id);
        a_f.push(id);
    }
    for &v in &joined {
        let id = arcs.len();
        arcs.push(PrimeArc {
            id,
            tail: v,
            head: dummy,
            d: 0.0,
            kind: ArcKind::ToDummy,
        });
        to_dummy[v] = Some(id);
        a_t.push(id);
    }
    TransformedGraph {
        variant,
        num_base_nodes: n,
        dummy_node: dummy,
        depot: inst.depot,
        arcs,
        a_f,
        a_t,
        from_dummy,
        to_dummy,
        class_tails,
    }
}

/// Required arc ids as a slice-friendly helper for the formulations.
pub(crate) fn required_by_class(inst: &Instance) -> Vec<Vec<ArcId>> {
    (1..=inst.num_classes).map(|k| inst.class_arcs(k)).collect()
}
