//! Greedy randomized construction.
//!
//! Classes are inserted in priority order and, within a class, arcs in
//! ascending id order. Each arc goes to a capacity-feasible vehicle drawn from
//! a softmax over the negated class completion time the insertion would give.

use rand::Rng;

use crate::deadhead::DeadheadMatrix;
use crate::error::{Error, Result};
use crate::graph::{ArcId, Class, Instance, TIME_EPS};
use crate::solution::{route_completions_into, route_load, Solution, Variant};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InsertionCandidate {
    pub vehicle: usize,
    /// Completion time of the current class on the route after insertion.
    pub cost: f64,
}

/// Where a new arc may go on its route.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InsertionMode {
    /// Append at the end of the route.
    #[default]
    Append,
    /// Cheapest position the variant allows.
    BestPosition,
}

/// Softmax of the negated costs, shifted by the maximum for stability.
pub fn softmax_probabilities(costs: &[f64]) -> Vec<f64> {
    let shift = costs.iter().map(|c| -c).fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = costs.iter().map(|c| (-c - shift).exp()).collect();
    let total: f64 = weights.iter().sum();
    weights.into_iter().map(|w| w / total).collect()
}

/// Draws a vehicle with probability proportional to `exp(-cost)`.
pub fn softmax_select<R: Rng + ?Sized>(
    candidates: &[InsertionCandidate],
    rng: &mut R,
) -> Result<usize> {
    if candidates.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    let costs: Vec<f64> = candidates.iter().map(|c| c.cost).collect();
    let probs = softmax_probabilities(&costs);
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (cand, p) in candidates.iter().zip(&probs) {
        acc += p;
        if u < acc {
            return Ok(cand.vehicle);
        }
    }
    Ok(candidates[candidates.len() - 1].vehicle)
}

/// Builds a feasible solution with append-only insertion.
pub fn construct<R: Rng + ?Sized>(
    inst: &Instance,
    mat: &DeadheadMatrix,
    variant: Variant,
    rng: &mut R,
) -> Result<Solution> {
    construct_with(inst, mat, variant, InsertionMode::Append, rng)
}

pub fn construct_with<R: Rng + ?Sized>(
    inst: &Instance,
    mat: &DeadheadMatrix,
    variant: Variant,
    mode: InsertionMode,
    rng: &mut R,
) -> Result<Solution> {
    let mut sol = Solution::empty(inst.num_vehicles);
    let mut loads = vec![0.0; inst.num_vehicles];
    let mut buf = vec![0.0; inst.num_classes];
    let mut trial = Vec::new();

    for class in 1..=inst.num_classes {
        for arc in inst.class_arcs(class) {
            let q = inst.arcs[arc].q;
            let mut candidates = Vec::with_capacity(inst.num_vehicles);
            let mut positions = Vec::with_capacity(inst.num_vehicles);
            for (vehicle, route) in sol.routes.iter().enumerate() {
                if loads[vehicle] + q > inst.capacity + TIME_EPS {
                    continue;
                }
                let (pos, cost) = match mode {
                    InsertionMode::Append => {
                        trial.clear();
                        trial.extend_from_slice(route);
                        trial.push(arc);
                        route_completions_into(inst, mat, &trial, &mut buf);
                        (route.len(), buf[class - 1])
                    }
                    InsertionMode::BestPosition => {
                        best_position(inst, mat, route, arc, class, variant, &mut trial, &mut buf)
                    }
                };
                candidates.push(InsertionCandidate { vehicle, cost });
                positions.push(pos);
            }
            if candidates.is_empty() {
                return Err(Error::ConstructionCapacity { arc });
            }
            let vehicle = softmax_select(&candidates, rng)?;
            let slot = candidates.iter().position(|c| c.vehicle == vehicle).unwrap();
            sol.routes[vehicle].insert(positions[slot], arc);
            loads[vehicle] += q;
        }
    }
    Ok(sol)
}

/// Cheapest insertion position of `arc` in `route`, ranked by the route's
/// completion vector over classes `1..=class`.
#[allow(clippy::too_many_arguments)]
fn best_position(
    inst: &Instance,
    mat: &DeadheadMatrix,
    route: &[ArcId],
    arc: ArcId,
    class: Class,
    variant: Variant,
    trial: &mut Vec<ArcId>,
    buf: &mut [f64],
) -> (usize, f64) {
    let lo = match variant {
        Variant::P => route.iter().take_while(|&&a| inst.arcs[a].p < class).count(),
        Variant::U => 0,
    };
    let mut best: Option<(Vec<f64>, usize)> = None;
    for pos in lo..=route.len() {
        trial.clear();
        trial.extend_from_slice(route);
        trial.insert(pos, arc);
        route_completions_into(inst, mat, trial, buf);
        let key = buf[..class].to_vec();
        let better = match &best {
            None => true,
            Some((b, _)) => lex_less_slice(&key, b),
        };
        if better {
            best = Some((key, pos));
        }
    }
    let (key, pos) = best.expect("at least one position");
    (pos, key[class - 1])
}

fn lex_less_slice(a: &[f64], b: &[f64]) -> bool {
    for (x, y) in a.iter().zip(b) {
        if (x - y).abs() > TIME_EPS {
            return x < y;
        }
    }
    false
}

/// Retries construction with the same RNG stream, so each attempt sees fresh
/// random draws. Returns the last fault after `attempts` failures.
pub fn construct_retrying<R: Rng + ?Sized>(
    inst: &Instance,
    mat: &DeadheadMatrix,
    variant: Variant,
    mode: InsertionMode,
    rng: &mut R,
    attempts: usize,
) -> Result<Solution> {
    let mut last = None;
    for _ in 0..attempts.max(1) {
        match construct_with(inst, mat, variant, mode, rng) {
            Ok(sol) => return Ok(sol),
            Err(e) => last = Some(e),
        }
    }
    Err(last.unwrap())
}

/// Capacity check used by the other heuristics.
pub(crate) fn fits(inst: &Instance, route: &[ArcId]) -> bool {
    route_load(inst, route) <= inst.capacity + TIME_EPS
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;
    use crate::solution::{check_feasible, is_class_monotone, objective};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn softmax_examples() {
        let p = softmax_probabilities(&[1.7, 1.7]);
        assert!((p[0] - 0.5).abs() < 1e-12 && (p[1] - 0.5).abs() < 1e-12);
        assert_eq!(softmax_probabilities(&[42.0]), vec![1.0]);
        let p = softmax_probabilities(&[0.0, 3f64.ln()]);
        assert!((p[0] - 0.75).abs() < 1e-12);
        assert!((p[1] - 0.25).abs() < 1e-12);
        let p = softmax_probabilities(&[1000.0, 1001.0, 999.0]);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn softmax_select_errors_and_singletons() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(matches!(softmax_select(&[], &mut rng), Err(Error::EmptyCandidates)));
        let one = [InsertionCandidate { vehicle: 3, cost: 9.0 }];
        for _ in 0..10 {
            assert_eq!(softmax_select(&one, &mut rng).unwrap(), 3);
        }
    }

    /// Line of nodes 0..4 with unit arcs both ways; four required class-1 or
    /// class-2 arcs leaving the depot side.
    fn four_arc_instance(vehicles: usize, capacity: f64) -> Instance {
        let mut arcs = Vec::new();
        for i in 0..3 {
            arcs.push(deadhead(arcs.len(), i, i + 1, 1.0));
            arcs.push(deadhead(arcs.len(), i + 1, i, 1.0));
        }
        let mut add = |t, h, d, p| {
            let id = arcs.len();
            arcs.push(required(id, t, h, d, 2.0 * d, 1.0, p));
        };
        add(0, 1, 1.0, 1);
        add(1, 2, 1.0, 2);
        add(2, 3, 1.0, 1);
        add(3, 2, 1.0, 2);
        instance(4, arcs, vehicles, capacity, 2)
    }

    #[test]
    fn no_required_arcs_gives_empty_routes() {
        let inst = triangle();
        let mat = DeadheadMatrix::new(&inst).unwrap();
        let sol = construct(&inst, &mat, Variant::P, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert_eq!(sol, Solution::empty(1));
    }

    #[test]
    fn single_vehicle_appends_in_class_order() {
        let mut inst = four_arc_instance(1, 100.0);
        inst.arcs.truncate(8);
        let mat = DeadheadMatrix::new(&inst).unwrap();
        let sol = construct(&inst, &mat, Variant::U, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        assert_eq!(sol.routes, vec![vec![6, 7]]);
        let t = objective(&inst, &mat, &sol);
        // 0->1 serviced by 2.0, then 1->2 at clock 4.0.
        assert_eq!(t.0, vec![2.0, 4.0]);
    }

    #[test]
    fn capacity_fault() {
        let inst = four_arc_instance(1, 3.0);
        let mat = DeadheadMatrix::new(&inst).unwrap();
        let err = construct(&inst, &mat, Variant::P, &mut ChaCha8Rng::seed_from_u64(0)).unwrap_err();
        assert!(err.to_string().starts_with("construction failed: capacity"));
    }

    #[test]
    fn split_construction_is_feasible_and_favours_cheaper_vehicle() {
        // Two vehicles, capacity forces a 2 + 2 split. Pre-load vehicle 1 so
        // the first inserted arc is cheaper on vehicle 0.
        let inst = four_arc_instance(2, 2.0);
        let mat = DeadheadMatrix::new(&inst).unwrap();
        let mut first_on_zero = 0;
        for seed in 0..1000 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let sol = construct(&inst, &mat, Variant::P, &mut rng).unwrap();
            assert!(check_feasible(&inst, &sol, Variant::P).unwrap().is_empty());
            assert!(sol.routes.iter().all(|r| r.len() == 2));
            assert!(sol.routes.iter().all(|r| is_class_monotone(&inst, r)));
            if sol.routes[0].first() == Some(&6) {
                first_on_zero += 1;
            }
        }
        // Both routes are empty for the first arc, so costs tie at 2.0 and
        // the analytic probability is 0.5 each.
        let expected = 500.0;
        assert!((first_on_zero as f64 - expected).abs() < 60.0, "{first_on_zero}");

        // Second arc (id 8, class 1 at 2->3): cost on the route holding arc 6
        // is 2 + sp(1,2) + 2 = 5, on the empty route sp(0,2) + 2 = 4.
        let probs = softmax_probabilities(&[5.0, 4.0]);
        let mut empty_route = 0;
        for seed in 0..1000 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let sol = construct(&inst, &mat, Variant::P, &mut rng).unwrap();
            let holder = sol.routes.iter().position(|r| r.contains(&6)).unwrap();
            if !sol.routes[holder].contains(&8) {
                empty_route += 1;
            }
        }
        let freq = empty_route as f64 / 1000.0;
        assert!(freq > 0.5);
        assert!((freq - probs[1]).abs() < 0.05, "{freq} vs {}", probs[1]);
    }

    #[test]
    fn fixed_seed_is_reproducible() {
        let inst = four_arc_instance(2, 10.0);
        let mat = DeadheadMatrix::new(&inst).unwrap();
        for mode in [InsertionMode::Append, InsertionMode::BestPosition] {
            let a = construct_with(&inst, &mat, Variant::U, mode, &mut ChaCha8Rng::seed_from_u64(9));
            let b = construct_with(&inst, &mat, Variant::U, mode, &mut ChaCha8Rng::seed_from_u64(9));
            assert_eq!(a.unwrap(), b.unwrap());
        }
    }

    #[test]
    fn best_position_keeps_p_feasibility() {
        let inst = four_arc_instance(2, 10.0);
        let mat = DeadheadMatrix::new(&inst).unwrap();
        for seed in 0..50 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let sol = construct_with(&inst, &mat, Variant::P, InsertionMode::BestPosition, &mut rng)
                .unwrap();
            assert!(check_feasible(&inst, &sol, Variant::P).unwrap().is_empty());
        }
    }
}
