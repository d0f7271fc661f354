use rand::Rng;

use crate::constructive::{construct_retrying, InsertionMode};
use crate::deadhead::DeadheadMatrix;
use crate::error::Result;
use crate::graph::Instance;
use crate::local_search::local_search;
use crate::solution::{objective, HierarchicalObjective, Solution, Variant};

use super::CONSTRUCTION_ATTEMPTS;

/// Swaps two same-class arcs on one route. The class is drawn uniformly among
/// classes that some route holds at least twice, then the route, then two
/// distinct positions of that class. Returns the input when no such pair
/// exists.
pub fn perturb<R: Rng + ?Sized>(inst: &Instance, sol: &Solution, rng: &mut R) -> Solution {
    let positions_of = |route: &[usize], class| -> Vec<usize> {
        route
            .iter()
            .enumerate()
            .filter(|(_, &a)| inst.arcs[a].p == class)
            .map(|(i, _)| i)
            .collect()
    };
    let eligible: Vec<usize> = (1..=inst.num_classes)
        .filter(|&k| sol.routes.iter().any(|r| positions_of(r, k).len() >= 2))
        .collect();
    if eligible.is_empty() {
        return sol.clone();
    }
    let class = eligible[rng.gen_range(0..eligible.len())];
    let routes: Vec<usize> = (0..sol.routes.len())
        .filter(|&r| positions_of(&sol.routes[r], class).len() >= 2)
        .collect();
    let route = routes[rng.gen_range(0..routes.len())];
    let pos = positions_of(&sol.routes[route], class);
    let i = rng.gen_range(0..pos.len());
    let mut j = rng.gen_range(0..pos.len() - 1);
    if j >= i {
        j += 1;
    }
    let mut out = sol.clone();
    out.routes[route].swap(pos[i], pos[j]);
    out
}

/// Iterated local search: construct, improve, then `k_max` rounds of
/// perturbing the incumbent and improving, accepting strict lexicographic
/// improvements only.
pub fn ils<R: Rng + ?Sized>(
    inst: &Instance,
    mat: &DeadheadMatrix,
    variant: Variant,
    k_max: usize,
    mode: InsertionMode,
    rng: &mut R,
) -> Result<Solution> {
    ils_trace(inst, mat, variant, k_max, mode, rng).map(|(sol, _)| sol)
}

/// As [`ils`], also returning the incumbent objective after each round
/// (index 0 is the improved construction).
pub fn ils_trace<R: Rng + ?Sized>(
    inst: &Instance,
    mat: &DeadheadMatrix,
    variant: Variant,
    k_max: usize,
    mode: InsertionMode,
    rng: &mut R,
) -> Result<(Solution, Vec<HierarchicalObjective>)> {
    let start = construct_retrying(inst, mat, variant, mode, rng, CONSTRUCTION_ATTEMPTS)?;
    let mut best = local_search(inst, mat, &start, variant);
    let mut best_obj = objective(inst, mat, &best);
    let mut history = vec![best_obj.clone()];
    for _ in 0..k_max {
        let candidate = local_search(inst, mat, &perturb(inst, &best, rng), variant);
        let obj = objective(inst, mat, &candidate);
        if obj.lex_less(&best_obj) {
            best = candidate;
            best_obj = obj;
        }
        history.push(best_obj.clone());
    }
    Ok((best, history))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;
    use crate::solution::check_feasible;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn inst3() -> Instance {
        let mut arcs = vec![
            deadhead(0, 0, 1, 1.0),
            deadhead(1, 1, 0, 1.0),
            deadhead(2, 1, 2, 1.0),
            deadhead(3, 2, 1, 1.0),
        ];
        let spec = [(0, 1, 1), (1, 0, 1), (1, 2, 2), (2, 1, 2), (0, 1, 3), (2, 1, 3)];
        for (t, h, p) in spec {
            let id = arcs.len();
            arcs.push(required(id, t, h, 1.0, 2.0, 1.0, p));
        }
        instance(3, arcs, 2, 10.0, 3)
    }

    #[test]
    fn no_eligible_pair_leaves_solution_unchanged() {
        let inst = inst3();
        let sol = Solution {
            routes: vec![vec![4, 6, 8], vec![5, 7, 9]],
        };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert_eq!(perturb(&inst, &sol, &mut rng), sol);
    }

    #[test]
    fn only_pair_is_swapped() {
        let inst = inst3();
        let sol = Solution {
            routes: vec![vec![4, 5, 6, 8], vec![7, 9]],
        };
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let out = perturb(&inst, &sol, &mut rng);
        assert_eq!(out.routes, vec![vec![5, 4, 6, 8], vec![7, 9]]);
    }

    #[test]
    fn perturbation_targets_a_class_with_two_arcs_on_the_route() {
        let inst = inst3();
        let sol = Solution {
            routes: vec![vec![4, 5, 6, 7], vec![8, 9]],
        };
        for seed in 0..1000 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let out = perturb(&inst, &sol, &mut rng);
            let diff: Vec<usize> = (0..4).filter(|&i| out.routes[0][i] != sol.routes[0][i]).collect();
            let diff_b: Vec<usize> = (0..2).filter(|&i| out.routes[1][i] != sol.routes[1][i]).collect();
            let (route, d) = if diff.is_empty() { (1, diff_b) } else { (0, diff) };
            assert_eq!(d.len(), 2);
            let a = sol.routes[route][d[0]];
            let b = sol.routes[route][d[1]];
            assert_eq!(inst.arcs[a].p, inst.arcs[b].p);
            assert!(check_feasible(&inst, &out, Variant::P).unwrap().is_empty());
        }
    }

    #[test]
    fn unique_solution_and_determinism() {
        // One vehicle, one arc: only one feasible solution.
        let inst = instance(
            2,
            vec![required(0, 0, 1, 1.0, 2.0, 1.0, 1), deadhead(1, 1, 0, 1.0)],
            1,
            5.0,
            1,
        );
        let mat = DeadheadMatrix::new(&inst).unwrap();
        let sol = ils(&inst, &mat, Variant::P, 10, InsertionMode::Append, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert_eq!(sol.routes, vec![vec![0]]);

        let inst = inst3();
        let mat = DeadheadMatrix::new(&inst).unwrap();
        let run = |s| ils_trace(&inst, &mat, Variant::U, 10, InsertionMode::Append, &mut ChaCha8Rng::seed_from_u64(s)).unwrap();
        let (a, ha) = run(42);
        let (b, _) = run(42);
        assert_eq!(a, b);
        assert!(ha.windows(2).all(|w| !w[0].lex_less(&w[1])));
    }
}
