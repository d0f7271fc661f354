use std::collections::HashMap;

use rayon::prelude::*;

use crate::deadhead::DeadheadMatrix;
use crate::error::{Error, Result};
use crate::graph::{ArcId, Instance};
use crate::solution::{route_completions_into, HierarchicalObjective, Route, Solution, Variant};

/// Hard ceiling on required arcs for exhaustive search.
pub const ORACLE_MAX_ARCS: usize = 8;
/// Hard ceiling on vehicles for exhaustive search.
pub const ORACLE_MAX_VEHICLES: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_arcs: usize,
    pub max_vehicles: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        Self {
            max_arcs: ORACLE_MAX_ARCS,
            max_vehicles: ORACLE_MAX_VEHICLES,
        }
    }
}

/// Per-route candidates for one set of arcs: completion vectors that are not
/// componentwise dominated, each with an order achieving it.
type Front = Vec<(Vec<f64>, Route)>;

fn permutations(items: &mut Vec<ArcId>, k: usize, out: &mut Vec<Vec<ArcId>>) {
    if k == items.len() {
        out.push(items.clone());
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permutations(items, k + 1, out);
        items.swap(k, i);
    }
}

/// Service orders allowed for a route holding `arcs` (sorted): all orders in
/// U, orders that keep classes in ascending blocks in P.
fn orders(inst: &Instance, arcs: &[ArcId], variant: Variant) -> Vec<Route> {
    match variant {
        Variant::U => {
            let mut out = Vec::new();
            permutations(&mut arcs.to_vec(), 0, &mut out);
            out
        }
        Variant::P => {
            let mut out: Vec<Route> = vec![Vec::new()];
            for k in 1..=inst.num_classes {
                let mut block: Vec<ArcId> = arcs.iter().copied().filter(|&a| inst.arcs[a].p == k).collect();
                if block.is_empty() {
                    continue;
                }
                let mut perms = Vec::new();
                permutations(&mut block, 0, &mut perms);
                out = out
                    .into_iter()
                    .flat_map(|prefix| {
                        perms.iter().map(move |perm| {
                            let mut r = prefix.clone();
                            r.extend_from_slice(perm);
                            r
                        })
                    })
                    .collect();
            }
            out
        }
    }
}

fn dominates(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn front(inst: &Instance, mat: &DeadheadMatrix, arcs: &[ArcId], variant: Variant) -> Front {
    let mut out: Front = Vec::new();
    let mut buf = vec![0.0; inst.num_classes];
    for order in orders(inst, arcs, variant) {
        route_completions_into(inst, mat, &order, &mut buf);
        if out.iter().any(|(v, _)| dominates(v, &buf)) {
            continue;
        }
        out.retain(|(v, _)| !dominates(&buf, v));
        out.push((buf.clone(), order));
    }
    out
}

/// Exhaustive lexicographic minimum over all assignments of required arcs to
/// vehicles and all service orders valid for `variant`.
///
/// Routes only interact through the per-class maximum, so each route keeps
/// only service orders whose completion vectors are not dominated. The
/// first minimum found in a fixed enumeration order wins, so results do not
/// depend on thread count.
pub fn brute_force_oracle(
    inst: &Instance,
    mat: &DeadheadMatrix,
    variant: Variant,
    limits: OracleLimits,
) -> Result<(Solution, HierarchicalObjective)> {
    let required = inst.required_arcs();
    let max_arcs = limits.max_arcs.min(ORACLE_MAX_ARCS);
    let max_vehicles = limits.max_vehicles.min(ORACLE_MAX_VEHICLES);
    if required.len() > max_arcs {
        return Err(Error::LimitExceeded {
            what: "oracle required-arc",
            value: required.len(),
            limit: max_arcs,
        });
    }
    if inst.num_vehicles > max_vehicles {
        return Err(Error::LimitExceeded {
            what: "oracle vehicle",
            value: inst.num_vehicles,
            limit: max_vehicles,
        });
    }
    let n = required.len();
    let vehicles = inst.num_vehicles;
    let p = inst.num_classes;

    // Fronts for every capacity-feasible subset of required arcs.
    let subsets: Vec<usize> = (0..1usize << n).collect();
    let fronts: HashMap<usize, Front> = subsets
        .par_iter()
        .filter_map(|&mask| {
            let arcs: Vec<ArcId> = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| required[i]).collect();
            let load: f64 = arcs.iter().map(|&a| inst.arcs[a].q).sum();
            (load <= inst.capacity).then(|| (mask, front(inst, mat, &arcs, variant)))
        })
        .collect();

    let assignments = vehicles.pow(n as u32);
    let best = (0..assignments)
        .into_par_iter()
        .filter_map(|code| {
            let mut masks = vec![0usize; vehicles];
            let mut c = code;
            for i in 0..n {
                masks[c % vehicles] |= 1 << i;
                c /= vehicles;
            }
            let route_fronts: Option<Vec<&Front>> = masks.iter().map(|m| fronts.get(m)).collect();
            let route_fronts = route_fronts?;
            let mut best: Option<(Vec<f64>, Vec<usize>)> = None;
            let mut pick = vec![0usize; vehicles];
            loop {
                let mut t = vec![0.0f64; p];
                for (r, &j) in pick.iter().enumerate() {
                    for (tk, v) in t.iter_mut().zip(&route_fronts[r][j].0) {
                        *tk = tk.max(*v);
                    }
                }
                let better = best.as_ref().is_none_or(|(b, _)| {
                    HierarchicalObjective(t.clone()).total_cmp(&HierarchicalObjective(b.clone())).is_lt()
                });
                if better {
                    best = Some((t, pick.clone()));
                }
                let mut r = 0;
                while r < vehicles {
                    pick[r] += 1;
                    if pick[r] < route_fronts[r].len() {
                        break;
                    }
                    pick[r] = 0;
                    r += 1;
                }
                if r == vehicles {
                    break;
                }
            }
            best.map(|(t, pick)| {
                let routes: Vec<Route> = pick
                    .iter()
                    .enumerate()
                    .map(|(r, &j)| route_fronts[r][j].1.clone())
                    .collect();
                (code, t, routes)
            })
        })
        .reduce_with(|a, b| {
            let (oa, ob) = (HierarchicalObjective(a.1.clone()), HierarchicalObjective(b.1.clone()));
            match ob.total_cmp(&oa).then(b.0.cmp(&a.0)) {
                std::cmp::Ordering::Less => b,
                _ => a,
            }
        });
    let (_, t, routes) = best.ok_or(Error::Infeasible(vec!["no capacity-feasible assignment".into()]))?;
    Ok((Solution { routes }, HierarchicalObjective(t)))
}
