use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constructive::{construct_retrying, fits, InsertionMode};
use crate::deadhead::DeadheadMatrix;
use crate::error::Result;
use crate::graph::{ArcId, Class, Instance};
use crate::local_search::local_search;
use crate::solution::{check_feasible, objective, HierarchicalObjective, Route, Solution, Variant};

use super::{rng_from, worker_seeds, CONSTRUCTION_ATTEMPTS};

/// Parents taken from the head of the population each generation.
const PARENTS: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EaParams {
    pub k_max: usize,
    pub lambda: usize,
}

impl Default for EaParams {
    fn default() -> Self {
        Self {
            k_max: 100,
            lambda: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Member {
    pub solution: Solution,
    pub objective: HierarchicalObjective,
}

#[derive(Debug, Clone)]
pub struct EaRun {
    pub best: Member,
    /// Best population objective after each generation, index 0 is the
    /// initial population.
    pub history: Vec<HierarchicalObjective>,
}

pub fn ea<R: Rng + ?Sized>(
    inst: &Instance,
    mat: &DeadheadMatrix,
    variant: Variant,
    params: &EaParams,
    mode: InsertionMode,
    rng: &mut R,
) -> Result<Solution> {
    ea_run(inst, mat, variant, params, mode, rng).map(|run| run.best.solution)
}

/// Elitist generational loop: the top four members pair up (all six unordered
/// pairs), each pair yields one offspring by exchanging the segments of a
/// random class, offspring are improved by local search and the population is
/// truncated back to `lambda`.
pub fn ea_run<R: Rng + ?Sized>(
    inst: &Instance,
    mat: &DeadheadMatrix,
    variant: Variant,
    params: &EaParams,
    mode: InsertionMode,
    rng: &mut R,
) -> Result<EaRun> {
    let lambda = params.lambda.max(1);
    let seeds = worker_seeds(rng, lambda);
    let built: Vec<Result<Solution>> = seeds
        .par_iter()
        .map(|&s| {
            construct_retrying(inst, mat, variant, mode, &mut rng_from(s), CONSTRUCTION_ATTEMPTS)
        })
        .collect();
    let mut population = Vec::with_capacity(lambda);
    for sol in built {
        let solution = sol?;
        let objective = objective(inst, mat, &solution);
        population.push(Member {
            solution,
            objective,
        });
    }
    sort_population(&mut population);
    let mut history = vec![population[0].objective.clone()];

    for _ in 0..params.k_max {
        let class = rng.gen_range(1..=inst.num_classes);
        let parents = population.len().min(PARENTS);
        let pairs: Vec<(usize, usize)> = (0..parents)
            .flat_map(|i| (i + 1..parents).map(move |j| (i, j)))
            .collect();
        let offspring: Vec<Member> = pairs
            .par_iter()
            .map(|&(i, j)| {
                let child = crossover(
                    inst,
                    mat,
                    &population[i].solution,
                    &population[j].solution,
                    class,
                    variant,
                );
                let solution = local_search(inst, mat, &child, variant);
                let objective = objective(inst, mat, &solution);
                Member {
                    solution,
                    objective,
                }
            })
            .collect();
        population.extend(offspring);
        sort_population(&mut population);
        population.truncate(lambda);
        history.push(population[0].objective.clone());
    }
    Ok(EaRun {
        best: population.swap_remove(0),
        history,
    })
}

fn sort_population(pop: &mut [Member]) {
    pop.sort_by(|a, b| a.objective.total_cmp(&b.objective));
}

/// Class-`class` arcs of a route, in route order.
fn segment(inst: &Instance, route: &[ArcId], class: Class) -> Vec<ArcId> {
    route.iter().copied().filter(|&a| inst.arcs[a].p == class).collect()
}

/// Where a class-`class` block starts: the first class-`class` arc, else the
/// first arc of a higher class, else the end.
fn block_start(inst: &Instance, route: &[ArcId], class: Class) -> usize {
    route
        .iter()
        .position(|&a| inst.arcs[a].p >= class)
        .unwrap_or(route.len())
}

/// Route `own` with the first `keep_out` arcs of its class segment removed and
/// `incoming` inserted at the block start.
fn exchanged(inst: &Instance, own: &[ArcId], out: &[ArcId], incoming: &[ArcId], class: Class) -> Route {
    let pos = block_start(inst, own, class);
    let mut route: Route = own.iter().copied().filter(|a| !out.contains(a)).collect();
    let pos = pos.min(route.len());
    route.splice(pos..pos, incoming.iter().copied());
    route
}

/// Offspring of `a` receiving `b`'s class-`class` segments, route by route.
///
/// When a route would exceed capacity, the exchanged prefixes shrink from the
/// right one arc at a time, alternating between the incoming and outgoing
/// side, until the route fits. Arcs duplicated by the exchange are dropped
/// from the incoming side and arcs it lost are appended to the end of their
/// class block on the route giving the best objective. If repair fails the
/// offspring is a copy of `a`.
pub fn crossover(
    inst: &Instance,
    mat: &DeadheadMatrix,
    a: &Solution,
    b: &Solution,
    class: Class,
    variant: Variant,
) -> Solution {
    let mut routes = Vec::with_capacity(a.routes.len());
    let mut incoming_all: Vec<(usize, ArcId)> = Vec::new();
    for (i, own) in a.routes.iter().enumerate() {
        let seg_out = segment(inst, own, class);
        let seg_in = b.routes.get(i).map(|r| segment(inst, r, class)).unwrap_or_default();
        let (mut k_out, mut k_in) = (seg_out.len(), seg_in.len());
        let mut shrink_incoming = true;
        let route = loop {
            let route = exchanged(inst, own, &seg_out[..k_out], &seg_in[..k_in], class);
            if fits(inst, &route) || (k_out == 0 && k_in == 0) {
                break route;
            }
            if (shrink_incoming && k_in > 0) || k_out == 0 {
                k_in -= 1;
            } else {
                k_out -= 1;
            }
            shrink_incoming = !shrink_incoming;
        };
        incoming_all.extend(seg_in[..k_in].iter().map(|&x| (i, x)));
        routes.push(route);
    }

    // Drop incoming copies of arcs that the child already holds elsewhere.
    let mut count = vec![0usize; inst.arcs.len()];
    for r in &routes {
        for &x in r {
            count[x] += 1;
        }
    }
    for &(i, x) in incoming_all.iter().rev() {
        if count[x] > 1 {
            if let Some(pos) = routes[i].iter().rposition(|&y| y == x) {
                routes[i].remove(pos);
                count[x] -= 1;
            }
        }
    }

    let mut child = Solution { routes };
    for lost in inst.required_arcs().into_iter().filter(|&x| count[x] == 0) {
        let arc_class = inst.arcs[lost].p;
        let mut best: Option<(HierarchicalObjective, usize)> = None;
        for r in 0..child.routes.len() {
            let mut trial = child.clone();
            let pos = trial.routes[r]
                .iter()
                .rposition(|&y| inst.arcs[y].p <= arc_class)
                .map_or(0, |p| p + 1);
            trial.routes[r].insert(pos, lost);
            if !fits(inst, &trial.routes[r]) {
                continue;
            }
            let obj = objective(inst, mat, &trial);
            if best.as_ref().is_none_or(|(b, _)| obj.total_cmp(b).is_lt()) {
                best = Some((obj, r));
            }
        }
        match best {
            Some((_, r)) => {
                let pos = child.routes[r]
                    .iter()
                    .rposition(|&y| inst.arcs[y].p <= arc_class)
                    .map_or(0, |p| p + 1);
                child.routes[r].insert(pos, lost);
            }
            None => return a.clone(),
        }
    }
    match check_feasible(inst, &child, variant) {
        Ok(v) if v.is_empty() => child,
        _ => a.clone(),
    }
}
