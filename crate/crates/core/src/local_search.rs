//! Swap neighbourhoods within a route and between two routes, restricted to a
//! per-class window, and the class-by-class improvement sweep built on them.
//!
//! Every candidate is scored on the full objective vector. The best candidate
//! is selected under an exact total order with the smallest position pair
//! winning ties, so serial and parallel evaluation agree.

use std::cmp::Ordering;

use rayon::prelude::*;

use crate::deadhead::DeadheadMatrix;
use crate::graph::{ArcId, Class, Instance, TIME_EPS};
use crate::solution::{objective, route_completions_into, HierarchicalObjective, Solution, Variant};

/// Candidate lists at least this long are scored on the rayon pool.
const PARALLEL_THRESHOLD: usize = 128;

/// Half-open window `[lo, hi)` of swappable positions on a route.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SubTourView {
    pub lo: usize,
    pub hi: usize,
}

impl SubTourView {
    pub fn empty_at(pos: usize) -> Self {
        Self { lo: pos, hi: pos }
    }

    pub fn len(&self) -> usize {
        self.hi - self.lo
    }

    pub fn is_empty(&self) -> bool {
        self.hi == self.lo
    }

    pub fn positions(&self) -> std::ops::Range<usize> {
        self.lo..self.hi
    }
}

/// Contiguous block of class-`class` arcs on a class-monotone route.
pub fn get_subtour_p(inst: &Instance, route: &[ArcId], class: Class) -> SubTourView {
    match route.iter().position(|&a| inst.arcs[a].p == class) {
        None => SubTourView::empty_at(route.len()),
        Some(lo) => {
            let len = route[lo..]
                .iter()
                .take_while(|&&a| inst.arcs[a].p == class)
                .count();
            SubTourView { lo, hi: lo + len }
        }
    }
}

/// Hierarchy level `class`: from just after the last arc of any class below
/// `class` through the last class-`class` arc. Arcs of any class inside it may
/// be swapped.
pub fn get_subtour_u(inst: &Instance, route: &[ArcId], class: Class) -> SubTourView {
    let lo = route
        .iter()
        .rposition(|&a| inst.arcs[a].p < class)
        .map_or(0, |i| i + 1);
    match route.iter().rposition(|&a| inst.arcs[a].p == class) {
        Some(last) if last >= lo => SubTourView { lo, hi: last + 1 },
        _ => SubTourView::empty_at(lo),
    }
}

pub fn get_subtour(inst: &Instance, route: &[ArcId], class: Class, variant: Variant) -> SubTourView {
    match variant {
        Variant::P => get_subtour_p(inst, route, class),
        Variant::U => get_subtour_u(inst, route, class),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwapDelta {
    /// `after - before`, per class.
    pub delta: Vec<f64>,
    pub improving: bool,
}

/// Best swap found by one neighbourhood scan.
#[derive(Debug, Clone, PartialEq)]
pub struct SwapOutcome {
    /// Intra: two positions on the route. Inter: position on route a, then on
    /// route b.
    pub positions: (usize, usize),
    pub after: HierarchicalObjective,
    pub delta: SwapDelta,
}

impl SwapOutcome {
    fn new(positions: (usize, usize), after: HierarchicalObjective, before: &HierarchicalObjective) -> Self {
        let improving = after.lex_cmp(before) == Ordering::Less;
        Self {
            positions,
            delta: SwapDelta {
                delta: after.delta(before),
                improving,
            },
            after,
        }
    }

    pub fn improving(&self) -> bool {
        self.delta.improving
    }
}

/// Clock, position and per-class completions before each index of a route,
/// so a change at index `i` only re-simulates the suffix.
struct RouteProfile {
    clock: Vec<f64>,
    node: Vec<usize>,
    completions: Vec<Vec<f64>>,
}

impl RouteProfile {
    fn new(inst: &Instance, mat: &DeadheadMatrix, route: &[ArcId]) -> Self {
        let mut clock = Vec::with_capacity(route.len() + 1);
        let mut node = Vec::with_capacity(route.len() + 1);
        let mut completions = Vec::with_capacity(route.len() + 1);
        let mut t = 0.0;
        let mut at = inst.depot;
        let mut comp = vec![0.0; inst.num_classes];
        clock.push(t);
        node.push(at);
        completions.push(comp.clone());
        for &a in route {
            let arc = &inst.arcs[a];
            t += mat.sp(at, arc.tail) + arc.s;
            at = arc.head;
            comp[arc.p - 1] = t;
            clock.push(t);
            node.push(at);
            completions.push(comp.clone());
        }
        Self {
            clock,
            node,
            completions,
        }
    }

    /// Completions of `route` with position `i` replaced by `at_i` and, if
    /// given, position `j > i` replaced by `at_j`.
    fn completions_with(
        &self,
        inst: &Instance,
        mat: &DeadheadMatrix,
        route: &[ArcId],
        i: usize,
        at_i: ArcId,
        at_j: Option<(usize, ArcId)>,
        out: &mut [f64],
    ) {
        out.copy_from_slice(&self.completions[i]);
        let mut t = self.clock[i];
        let mut at = self.node[i];
        for (pos, &orig) in route.iter().enumerate().skip(i) {
            let a = if pos == i {
                at_i
            } else {
                match at_j {
                    Some((j, b)) if j == pos => b,
                    _ => orig,
                }
            };
            let arc = &inst.arcs[a];
            t += mat.sp(at, arc.tail) + arc.s;
            at = arc.head;
            out[arc.p - 1] = t;
        }
    }
}

fn max_over_routes(inst: &Instance, mat: &DeadheadMatrix, sol: &Solution, skip: &[usize]) -> Vec<f64> {
    let mut acc = vec![0.0; inst.num_classes];
    let mut buf = vec![0.0; inst.num_classes];
    for (r, route) in sol.routes.iter().enumerate() {
        if skip.contains(&r) {
            continue;
        }
        route_completions_into(inst, mat, route, &mut buf);
        for (x, y) in acc.iter_mut().zip(&buf) {
            *x = f64::max(*x, *y);
        }
    }
    acc
}

fn pick_best(
    candidates: Vec<(usize, usize)>,
    score: impl Fn((usize, usize)) -> Option<HierarchicalObjective> + Sync,
) -> Option<((usize, usize), HierarchicalObjective)> {
    let cmp = |a: &((usize, usize), HierarchicalObjective), b: &((usize, usize), HierarchicalObjective)| {
        a.1.total_cmp(&b.1).then(a.0.cmp(&b.0))
    };
    if candidates.len() >= PARALLEL_THRESHOLD {
        candidates
            .into_par_iter()
            .filter_map(|pair| score(pair).map(|obj| (pair, obj)))
            .min_by(cmp)
    } else {
        candidates
            .into_iter()
            .filter_map(|pair| score(pair).map(|obj| (pair, obj)))
            .min_by(cmp)
    }
}

/// Best exchange of two positions inside `view` on route `route_idx`. `None`
/// when the window holds fewer than two positions.
pub fn best_swap_intra(
    inst: &Instance,
    mat: &DeadheadMatrix,
    sol: &Solution,
    route_idx: usize,
    view: SubTourView,
) -> Option<SwapOutcome> {
    if view.len() < 2 {
        return None;
    }
    let before = objective(inst, mat, sol);
    let route = &sol.routes[route_idx];
    let others = max_over_routes(inst, mat, sol, &[route_idx]);
    let profile = RouteProfile::new(inst, mat, route);
    let pairs: Vec<(usize, usize)> = view
        .positions()
        .flat_map(|i| (i + 1..view.hi).map(move |j| (i, j)))
        .collect();
    let best = pick_best(pairs, |(i, j)| {
        let mut t = vec![0.0; inst.num_classes];
        profile.completions_with(inst, mat, route, i, route[j], Some((j, route[i])), &mut t);
        for (x, o) in t.iter_mut().zip(&others) {
            *x = f64::max(*x, *o);
        }
        Some(HierarchicalObjective(t))
    })?;
    Some(SwapOutcome::new(best.0, best.1, &before))
}

/// Best capacity-feasible exchange of one arc in `view_a` on route `a` with
/// one arc in `view_b` on route `b`. `None` when no pair is feasible.
pub fn best_swap_inter(
    inst: &Instance,
    mat: &DeadheadMatrix,
    sol: &Solution,
    a: usize,
    b: usize,
    view_a: SubTourView,
    view_b: SubTourView,
) -> Option<SwapOutcome> {
    assert_ne!(a, b, "inter-route swap needs two distinct routes");
    if view_a.is_empty() || view_b.is_empty() {
        return None;
    }
    let before = objective(inst, mat, sol);
    let (ra, rb) = (&sol.routes[a], &sol.routes[b]);
    let load_a: f64 = ra.iter().map(|&x| inst.arcs[x].q).sum();
    let load_b: f64 = rb.iter().map(|&x| inst.arcs[x].q).sum();
    let others = max_over_routes(inst, mat, sol, &[a, b]);
    let pa = RouteProfile::new(inst, mat, ra);
    let pb = RouteProfile::new(inst, mat, rb);
    let pairs: Vec<(usize, usize)> = view_a
        .positions()
        .flat_map(|i| view_b.positions().map(move |j| (i, j)))
        .collect();
    let best = pick_best(pairs, |(i, j)| {
        let (x, y) = (ra[i], rb[j]);
        let dq = inst.arcs[y].q - inst.arcs[x].q;
        if load_a + dq > inst.capacity + TIME_EPS || load_b - dq > inst.capacity + TIME_EPS {
            return None;
        }
        let mut t = vec![0.0; inst.num_classes];
        let mut u = vec![0.0; inst.num_classes];
        pa.completions_with(inst, mat, ra, i, y, None, &mut t);
        pb.completions_with(inst, mat, rb, j, x, None, &mut u);
        for ((x, y), o) in t.iter_mut().zip(&u).zip(&others) {
            *x = x.max(*y).max(*o);
        }
        Some(HierarchicalObjective(t))
    })?;
    Some(SwapOutcome::new(best.0, best.1, &before))
}

/// Improves `sol` class by class: for each class, repeat best-improvement
/// intra-route swaps on every route, then inter-route swaps on every route
/// pair, until a full pass finds nothing improving.
pub fn local_search(inst: &Instance, mat: &DeadheadMatrix, sol: &Solution, variant: Variant) -> Solution {
    let mut sol = sol.clone();
    let m = sol.routes.len();
    for class in 1..=inst.num_classes {
        loop {
            let mut improved = false;
            for r in 0..m {
                loop {
                    let view = get_subtour(inst, &sol.routes[r], class, variant);
                    match best_swap_intra(inst, mat, &sol, r, view) {
                        Some(o) if o.improving() => {
                            sol.routes[r].swap(o.positions.0, o.positions.1);
                            improved = true;
                        }
                        _ => break,
                    }
                }
            }
            for a in 0..m {
                for b in a + 1..m {
                    loop {
                        let va = get_subtour(inst, &sol.routes[a], class, variant);
                        let vb = get_subtour(inst, &sol.routes[b], class, variant);
                        match best_swap_inter(inst, mat, &sol, a, b, va, vb) {
                            Some(o) if o.improving() => {
                                let (i, j) = o.positions;
                                let x = sol.routes[a][i];
                                sol.routes[a][i] = sol.routes[b][j];
                                sol.routes[b][j] = x;
                                improved = true;
                            }
                            _ => break,
                        }
                    }
                }
            }
            if !improved {
                break;
            }
        }
    }
    sol
}
