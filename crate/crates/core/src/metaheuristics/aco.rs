use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::deadhead::DeadheadMatrix;
use crate::error::{Error, Result};
use crate::graph::{ArcId, Instance, TIME_EPS};
use crate::local_search::local_search;
use crate::solution::{objective, HierarchicalObjective, Solution, Variant};

use super::{rng_from, worker_seeds};

/// Floor added to pheromone and distance terms so an all-zero matrix still
/// yields a proper distribution.
const EPS0: f64 = 1e-6;
/// Exponent on the inverse-distance heuristic.
const BETA: i32 = 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AcoParams {
    pub n_ant: usize,
    pub k_max: usize,
    pub rho: f64,
}

impl Default for AcoParams {
    fn default() -> Self {
        Self {
            n_ant: 50,
            k_max: 100,
            rho: 0.5,
        }
    }
}

/// Pheromone level for each ordered pair of required arcs serviced
/// consecutively on a route.
#[derive(Debug, Clone, PartialEq)]
pub struct PheromoneMatrix {
    n: usize,
    rho: f64,
    tau: Vec<f64>,
    /// Arc id -> row index, `usize::MAX` for non-required arcs.
    index: Vec<usize>,
}

impl PheromoneMatrix {
    pub fn new(inst: &Instance, rho: f64) -> Self {
        let mut index = vec![usize::MAX; inst.arcs.len()];
        let required = inst.required_arcs();
        for (i, &a) in required.iter().enumerate() {
            index[a] = i;
        }
        Self {
            n: required.len(),
            rho,
            tau: vec![0.0; required.len() * required.len()],
            index,
        }
    }

    pub fn side(&self) -> usize {
        self.n
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn get(&self, from: ArcId, to: ArcId) -> f64 {
        self.tau[self.index[from] * self.n + self.index[to]]
    }

    pub fn values(&self) -> &[f64] {
        &self.tau
    }

    /// Adds `amount` to every consecutive serviced pair of `sol`. The depot
    /// start is virtual, so a one-arc route deposits nothing.
    pub fn reinforce(&mut self, sol: &Solution, amount: f64) {
        for route in &sol.routes {
            for w in route.windows(2) {
                let idx = self.index[w[0]] * self.n + self.index[w[1]];
                self.tau[idx] += amount;
            }
        }
    }

    /// Scales every entry by `1 - rho`.
    pub fn evaporate(&mut self) {
        let keep = 1.0 - self.rho;
        self.tau.iter_mut().for_each(|t| *t *= keep);
    }
}

#[derive(Debug, Clone)]
pub struct AcoRun {
    pub best: Solution,
    pub objective: HierarchicalObjective,
    pub pheromones: PheromoneMatrix,
    /// Total amount deposited over the run.
    pub deposited: f64,
}

pub fn aco<R: Rng + ?Sized>(
    inst: &Instance,
    mat: &DeadheadMatrix,
    variant: Variant,
    params: &AcoParams,
    rng: &mut R,
) -> Result<Solution> {
    aco_run(inst, mat, variant, params, rng).map(|run| run.best)
}

/// Ant colony loop. Each ant builds a solution class by class, the ant's
/// improved solution competes for the iteration best, whose consecutive pairs
/// receive `1 / T` (first nonzero class completion) before all pheromones
/// evaporate.
pub fn aco_run<R: Rng + ?Sized>(
    inst: &Instance,
    mat: &DeadheadMatrix,
    variant: Variant,
    params: &AcoParams,
    rng: &mut R,
) -> Result<AcoRun> {
    let mut tau = PheromoneMatrix::new(inst, params.rho);
    let mut best: Option<(Solution, HierarchicalObjective)> = None;
    let mut deposited = 0.0;
    let n_ant = params.n_ant.max(1);
    for iteration in 0..params.k_max.max(1) {
        let seeds = worker_seeds(rng, n_ant);
        let ants: Vec<Option<(Solution, HierarchicalObjective)>> = seeds
            .par_iter()
            .map(|&s| {
                let built = build_ant(inst, mat, &tau, &mut rng_from(s))?;
                let sol = local_search(inst, mat, &built, variant);
                let obj = objective(inst, mat, &sol);
                Some((sol, obj))
            })
            .collect();
        let mut iter_best: Option<(Solution, HierarchicalObjective)> = None;
        for ant in ants.into_iter().flatten() {
            if iter_best.as_ref().is_none_or(|(_, o)| ant.1.lex_less(o)) {
                iter_best = Some(ant);
            }
        }
        let Some((sol, obj)) = iter_best else {
            return Err(Error::AllAntsFailed {
                ants: n_ant,
                iteration,
            });
        };
        if let Some(t) = obj.0.iter().copied().find(|&t| t > TIME_EPS) {
            tau.reinforce(&sol, 1.0 / t);
            deposited += 1.0 / t * pairs(&sol) as f64;
        }
        tau.evaporate();
        if best.as_ref().is_none_or(|(_, o)| obj.lex_less(o)) {
            best = Some((sol, obj));
        }
    }
    let (best, objective) = best.expect("at least one iteration ran");
    Ok(AcoRun {
        best,
        objective,
        pheromones: tau,
        deposited,
    })
}

fn pairs(sol: &Solution) -> usize {
    sol.routes.iter().map(|r| r.len().saturating_sub(1)).sum()
}

/// One ant. Classes are served in order; at each step the vehicle with the
/// earliest clock among those that can still take some remaining arc of the
/// class extends its route, picking the next arc `b` after its last arc `a`
/// with weight `(tau[a][b] + eps) * (1 / (deadhead(a, b) + eps))^2`. Returns
/// `None` on a capacity deadlock.
fn build_ant<R: Rng + ?Sized>(
    inst: &Instance,
    mat: &DeadheadMatrix,
    tau: &PheromoneMatrix,
    rng: &mut R,
) -> Option<Solution> {
    let m = inst.num_vehicles;
    let mut sol = Solution::empty(m);
    let mut load = vec![0.0; m];
    let mut clock = vec![0.0f64; m];
    let mut at = vec![inst.depot; m];
    let mut weights = Vec::new();
    for class in 1..=inst.num_classes {
        let mut remaining = inst.class_arcs(class);
        while !remaining.is_empty() {
            let fits = |v: usize, a: ArcId| load[v] + inst.arcs[a].q <= inst.capacity + TIME_EPS;
            let vehicle = (0..m)
                .filter(|&v| remaining.iter().any(|&a| fits(v, a)))
                .min_by(|&x, &y| clock[x].total_cmp(&clock[y]).then(x.cmp(&y)))?;
            let last = sol.routes[vehicle].last().copied();
            weights.clear();
            for &b in &remaining {
                if !fits(vehicle, b) {
                    weights.push(0.0);
                    continue;
                }
                let pher = last.map_or(0.0, |a| tau.get(a, b));
                let dist = mat.sp(at[vehicle], inst.arcs[b].tail);
                weights.push((pher + EPS0) * (1.0 / (dist + EPS0)).powi(BETA));
            }
            let total: f64 = weights.iter().sum();
            let mut u = rng.gen::<f64>() * total;
            let mut pick = weights.iter().rposition(|&w| w > 0.0).expect("a fitting arc");
            for (i, &w) in weights.iter().enumerate() {
                if w > 0.0 && u < w {
                    pick = i;
                    break;
                }
                u -= w;
            }
            let b = remaining.remove(pick);
            let arc = &inst.arcs[b];
            clock[vehicle] += mat.sp(at[vehicle], arc.tail) + arc.s;
            at[vehicle] = arc.head;
            load[vehicle] += arc.q;
            sol.routes[vehicle].push(b);
        }
    }
    Some(sol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructive::construct;
    use crate::graph::fixtures::*;
    use crate::solution::check_feasible;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn one_arc() -> Instance {
        instance(
            2,
            vec![required(0, 0, 1, 1.0, 2.0, 1.0, 1), deadhead(1, 1, 0, 1.0)],
            1,
            5.0,
            1,
        )
    }

    #[test]
    fn single_arc_deposits_nothing() {
        let inst = one_arc();
        let mat = DeadheadMatrix::new(&inst).unwrap();
        let params = AcoParams { n_ant: 3, k_max: 4, rho: 0.5 };
        let run = aco_run(&inst, &mat, Variant::P, &params, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert_eq!(run.best.routes, vec![vec![0]]);
        assert_eq!(run.pheromones.side(), 1);
        assert!(run.pheromones.values().iter().all(|&t| t == 0.0));
    }

    #[test]
    fn evaporation_halves() {
        let mut arcs = vec![deadhead(0, 1, 0, 1.0)];
        arcs.push(required(1, 0, 1, 1.0, 2.0, 1.0, 1));
        arcs.push(required(2, 1, 0, 1.0, 2.0, 1.0, 1));
        let inst = instance(2, arcs, 1, 5.0, 1);
        let mut tau = PheromoneMatrix::new(&inst, 0.5);
        tau.reinforce(&Solution { routes: vec![vec![1, 2]] }, 3.0);
        assert_eq!(tau.get(1, 2), 3.0);
        assert_eq!(tau.get(2, 1), 0.0);
        let before = tau.values().to_vec();
        tau.evaporate();
        for (a, b) in tau.values().iter().zip(before) {
            assert_eq!(*a, 0.5 * b);
        }
    }

    #[test]
    fn deadlock_discards_every_ant() {
        let mut inst = one_arc();
        inst.capacity = 0.5;
        let mat = DeadheadMatrix::new(&inst).unwrap();
        let err = aco(&inst, &mat, Variant::P, &AcoParams::default(), &mut ChaCha8Rng::seed_from_u64(0)).unwrap_err();
        assert!(matches!(err, Error::AllAntsFailed { iteration: 0, .. }));
    }

    fn six_arc() -> Instance {
        let mut arcs = Vec::new();
        for i in 0..3 {
            arcs.push(deadhead(arcs.len(), i, i + 1, 1.0));
            arcs.push(deadhead(arcs.len(), i + 1, i, 1.5));
        }
        for (t, h, p) in [(0, 1, 1), (2, 3, 1), (3, 2, 2), (1, 0, 2), (1, 2, 1), (2, 1, 2)] {
            let id = arcs.len();
            arcs.push(required(id, t, h, 1.0, 2.0, 1.0, p));
        }
        instance(4, arcs, 2, 4.0, 2)
    }

    #[test]
    fn small_colony_beats_median_greedy() {
        let inst = six_arc();
        let mat = DeadheadMatrix::new(&inst).unwrap();
        let mut greedy: Vec<HierarchicalObjective> = (0..20)
            .map(|s| {
                let sol = construct(&inst, &mat, Variant::P, &mut ChaCha8Rng::seed_from_u64(s)).unwrap();
                objective(&inst, &mat, &sol)
            })
            .collect();
        greedy.sort_by(|a, b| a.total_cmp(b));
        let median = &greedy[10];
        let params = AcoParams { n_ant: 10, k_max: 10, rho: 0.5 };
        for v in [Variant::P, Variant::U] {
            let run = aco_run(&inst, &mat, v, &params, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
            assert!(check_feasible(&inst, &run.best, v).unwrap().is_empty());
            assert!(!median.lex_less(&run.objective));
            assert!(run.pheromones.values().iter().all(|&t| t >= 0.0 && t <= run.deposited + 1e-12));
        }
    }

    #[test]
    fn fixed_seed_is_reproducible() {
        let inst = six_arc();
        let mat = DeadheadMatrix::new(&inst).unwrap();
        let params = AcoParams { n_ant: 8, k_max: 5, rho: 0.5 };
        let a = aco(&inst, &mat, Variant::U, &params, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        let b = aco(&inst, &mat, Variant::U, &params, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        assert_eq!(a, b);
    }
}
