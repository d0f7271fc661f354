use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Class, Instance, NodeId};
use crate::solution::Variant;

use super::formulation::{connectivity_row, connectivity_row_name, x_name, y_name};
use super::model::{Assignment, Constraint, MilpModel, Sense, CHECK_EPS};
use super::transform::TransformedGraph;

/// A violated connectivity cut: `component` is separated from the depot in
/// the support of `vehicle` at `class` (the hierarchy level in U).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cut {
    pub component: Vec<NodeId>,
    pub class: Class,
    pub vehicle: usize,
}

impl Cut {
    /// One JSON object per line, as exchanged with solver callbacks.
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("cut serializes")
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

fn value(point: &Assignment, name: String) -> Result<f64> {
    point.get(&name).copied().ok_or(Error::MissingVariable(name))
}

/// Connected components of the support graph (arcs whose `x` or `y` value
/// exceeds 1e-6) for each vehicle and level. A component that holds neither
/// the depot nor the dummy node, yet contains a serviced arc whose `x` value
/// exceeds the flow leaving the component, yields one cut.
pub fn separate_connectivity(inst: &Instance, tg: &TransformedGraph, point: &Assignment) -> Result<Vec<Cut>> {
    let variant = tg.variant;
    let n = tg.num_nodes();
    let required = inst.required_arcs();
    let mut cuts = Vec::new();
    for m in 0..inst.num_vehicles {
        for l in 1..=inst.num_classes {
            let level_required: Vec<usize> = match variant {
                Variant::P => required.iter().copied().filter(|&a| inst.arcs[a].p == l).collect(),
                Variant::U => required.clone(),
            };
            let mut x = vec![0.0; inst.arcs.len()];
            for &a in &level_required {
                x[a] = value(point, x_name(variant, a, l, m))?;
            }
            let mut y = vec![0.0; tg.arcs.len()];
            for arc in &tg.arcs {
                y[arc.id] = value(point, y_name(variant, arc.id, l, m))?;
            }

            let mut uf = UnionFind::new(n);
            for &a in &level_required {
                if x[a] > CHECK_EPS {
                    uf.union(inst.arcs[a].tail, inst.arcs[a].head);
                }
            }
            for arc in &tg.arcs {
                if y[arc.id] > CHECK_EPS {
                    uf.union(arc.tail, arc.head);
                }
            }
            let depot_root = uf.find(tg.depot);
            let dummy_root = uf.find(tg.dummy_node);
            let mut members: Vec<Vec<NodeId>> = vec![Vec::new(); n];
            for v in 0..n {
                let root = uf.find(v);
                members[root].push(v);
            }
            for (root, comp) in members.into_iter().enumerate() {
                if comp.is_empty() || root == depot_root || root == dummy_root {
                    continue;
                }
                let mut in_set = vec![false; n];
                for &v in &comp {
                    in_set[v] = true;
                }
                let leaving: f64 = level_required
                    .iter()
                    .filter(|&&a| in_set[inst.arcs[a].tail] && !in_set[inst.arcs[a].head])
                    .map(|&a| x[a])
                    .sum::<f64>()
                    + tg
                        .arcs
                        .iter()
                        .filter(|arc| in_set[arc.tail] && !in_set[arc.head])
                        .map(|arc| y[arc.id])
                        .sum::<f64>();
                let most_serviced = level_required
                    .iter()
                    .filter(|&&a| in_set[inst.arcs[a].tail] && in_set[inst.arcs[a].head])
                    .map(|&a| x[a])
                    .fold(0.0f64, f64::max);
                if most_serviced > CHECK_EPS && most_serviced - leaving > CHECK_EPS {
                    cuts.push(Cut {
                        component: comp,
                        class: l,
                        vehicle: m,
                    });
                }
            }
        }
    }
    Ok(cuts)
}

/// Connectivity rows a cut stands for: one per required arc of the level
/// lying inside the component.
pub fn cut_constraints(inst: &Instance, tg: &TransformedGraph, model: &MilpModel, cut: &Cut) -> Vec<Constraint> {
    let variant = model.variant;
    let mut in_set = vec![false; tg.num_nodes()];
    for &v in &cut.component {
        in_set[v] = true;
    }
    inst.required_arcs()
        .into_iter()
        .filter(|&b| variant == Variant::U || inst.arcs[b].p == cut.class)
        .filter(|&b| in_set[inst.arcs[b].tail] && in_set[inst.arcs[b].head])
        .map(|b| Constraint {
            name: connectivity_row_name(variant, &cut.component, cut.class, cut.vehicle, b),
            expr: connectivity_row(model, inst, tg, &in_set, cut.class, cut.vehicle, b),
            sense: Sense::Ge,
            rhs: 0.0,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deadhead::DeadheadMatrix;
    use crate::exact::formulation::{emit_milp_p, emit_milp_u, encode_solution, SubtourMode};
    use crate::exact::model::check_model;
    use crate::exact::transform::transform_graph;
    use crate::graph::fixtures::*;
    use crate::solution::Solution;

    /// Depot 0 joined to a loop 1 <-> 2 carrying one required arc 1 -> 2,
    /// and a second required arc 0 -> 3 with 3 -> 0 back.
    fn two_parts() -> Instance {
        instance(
            4,
            vec![
                deadhead(0, 0, 1, 1.0),
                deadhead(1, 2, 1, 1.0),
                deadhead(2, 1, 0, 1.0),
                required(3, 1, 2, 1.0, 1.0, 1.0, 1),
                required(4, 0, 3, 1.0, 1.0, 1.0, 1),
                deadhead(5, 3, 0, 1.0),
            ],
            1,
            10.0,
            1,
        )
    }

    #[test]
    fn encoded_solution_has_no_cuts() {
        let inst = two_parts();
        let mat = DeadheadMatrix::new(&inst).unwrap();
        for variant in [Variant::P, Variant::U] {
            let tg = transform_graph(&inst, variant);
            let model = match variant {
                Variant::P => emit_milp_p(&inst, &mat, &tg, SubtourMode::Deferred),
                Variant::U => emit_milp_u(&inst, &mat, &tg, SubtourMode::Deferred),
            }
            .unwrap();
            let sol = Solution { routes: vec![vec![4, 3]] };
            let point = encode_solution(&inst, &mat, &tg, &model, &sol).unwrap();
            assert!(separate_connectivity(&inst, &tg, &point).unwrap().is_empty());
        }
    }

    #[test]
    fn detached_loop_is_cut_and_the_cut_rows_reject_it() {
        let inst = two_parts();
        let mat = DeadheadMatrix::new(&inst).unwrap();
        let tg = transform_graph(&inst, Variant::P);
        let model = emit_milp_p(&inst, &mat, &tg, SubtourMode::Deferred).unwrap();
        // Depot tour 0 -> 3 -> 0 through the dummy node, plus a separate
        // cycle 1 -> 2 -> 1 servicing arc 3: flow balanced, support split.
        let mut point = model.zero_assignment();
        let d = |v| tg.from_dummy(v).unwrap();
        let t = |v| tg.to_dummy(v).unwrap();
        for (name, v) in [
            (y_name(Variant::P, d(0), 1, 0), 1.0),
            (x_name(Variant::P, 4, 1, 0), 1.0),
            (y_name(Variant::P, 5, 1, 0), 1.0),
            (y_name(Variant::P, t(0), 1, 0), 1.0),
            (x_name(Variant::P, 3, 1, 0), 1.0),
            (y_name(Variant::P, 1, 1, 0), 1.0),
            ("r_k1_m0".to_string(), 1.0),
            ("t_k1_m0".to_string(), 4.0),
            ("T_k1".to_string(), 4.0),
        ] {
            point.insert(name, v);
        }
        assert!(check_model(&model, &point).unwrap().is_empty());
        let cuts = separate_connectivity(&inst, &tg, &point).unwrap();
        assert_eq!(
            cuts,
            vec![Cut {
                component: vec![1, 2],
                class: 1,
                vehicle: 0
            }]
        );
        assert_eq!(cuts[0].to_json_line(), r#"{"component":[1,2],"class":1,"vehicle":0}"#);

        let mut strengthened = model.clone();
        strengthened.constraints.extend(cut_constraints(&inst, &tg, &model, &cuts[0]));
        assert_eq!(
            check_model(&strengthened, &point).unwrap(),
            vec!["subtour_k1_m0_b3_s1_2".to_string()]
        );
    }

    #[test]
    fn missing_values_fault() {
        let inst = two_parts();
        let tg = transform_graph(&inst, Variant::U);
        assert!(matches!(
            separate_connectivity(&inst, &tg, &Assignment::new()),
            Err(Error::MissingVariable(_))
        ));
    }
}
